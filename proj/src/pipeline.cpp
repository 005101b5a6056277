#include "precip/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>

#include "precip/errors.hpp"

namespace precip {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_int(const std::string& s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  const char* b = s.data() + pos;
  const auto [ptr, ec] = std::from_chars(b, b + len, out);
  return ec == std::errc{} && ptr == b + len;
}

bool parse_double(const std::string& s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

bool try_parse_date(const std::string& s, std::chrono::sys_days& out) {
  int y = 0, m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  if (!parse_int(s, 0, 4, y) || !parse_int(s, 5, 2, m) || !parse_int(s, 8, 2, d)) return false;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  out = std::chrono::sys_days{ymd};
  return true;
}

}  // namespace

void DailySeries::validate() const {
  if (dates.size() != precip_mm.size()) throw DataError("daily series: dates and values differ in length");
  for (std::size_t i = 0; i < dates.size(); ++i) {
    if (!(precip_mm[i] >= 0.0) || !std::isfinite(precip_mm[i])) {
      throw DataError("daily series: negative or non-finite precipitation on " + format_iso_date(dates[i]));
    }
    if (i > 0 && dates[i] <= dates[i - 1]) {
      throw DataError("daily series: dates not strictly increasing at " + format_iso_date(dates[i]));
    }
  }
}

void from_json(const nlohmann::json& j, CsvConfig& c) {
  if (j.contains("delimiter")) {
    const auto d = j.at("delimiter").get<std::string>();
    if (d.size() != 1) throw DomainError("config: delimiter must be a single character");
    c.delimiter = d[0];
  }
  if (j.contains("missing_token")) c.missing_token = j.at("missing_token").get<std::string>();
  if (j.contains("missing_policy")) {
    const auto p = j.at("missing_policy").get<std::string>();
    if (p == "reject") {
      c.missing = MissingPolicy::Reject;
    } else if (p == "split") {
      c.missing = MissingPolicy::Split;
    } else {
      throw DomainError("config: missing_policy must be 'reject' or 'split'");
    }
  }
  if (j.contains("station_id")) c.station_id = j.at("station_id").get<std::string>();
}

std::chrono::sys_days parse_iso_date(const std::string& s) {
  std::chrono::sys_days d;
  if (!try_parse_date(trim(s), d)) throw DomainError("not an ISO-8601 date: '" + s + "'");
  return d;
}

std::string format_iso_date(std::chrono::sys_days d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

DailySeries parse_daily_csv(std::istream& in, const CsvConfig& config) {
  DailySeries s;
  s.station_id = config.station_id;
  std::string line;
  std::size_t lineno = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cut = t.find(config.delimiter);
    if (cut == std::string::npos) throw ParseError("expected two columns (date, precipitation)", lineno);
    const std::string date_s = trim(t.substr(0, cut));
    const std::string value_s = trim(t.substr(cut + 1));
    if (value_s.find(config.delimiter) != std::string::npos) {
      throw ParseError("expected two columns (date, precipitation)", lineno);
    }
    std::chrono::sys_days date;
    if (!try_parse_date(date_s, date)) {
      if (!seen_row) {  // header line
        seen_row = true;
        continue;
      }
      throw ParseError("invalid date '" + date_s + "'", lineno);
    }
    seen_row = true;
    if (!s.dates.empty() && date <= s.dates.back()) {
      throw ParseError("dates not strictly increasing at " + date_s, lineno);
    }
    if (value_s == config.missing_token || value_s.empty()) {
      if (config.missing == MissingPolicy::Reject) throw ParseError("missing value on " + date_s, lineno);
      // Split: leave the day out; the date gap terminates wet periods.
      continue;
    }
    double v = 0.0;
    if (!parse_double(value_s, v)) throw ParseError("invalid precipitation value '" + value_s + "'", lineno);
    if (v < 0.0) throw ParseError("negative precipitation on " + date_s, lineno);
    s.dates.push_back(date);
    s.precip_mm.push_back(v);
  }
  return s;
}

DailySeries parse_daily_csv(const std::string& path, const CsvConfig& config) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file '" + path + "'");
  return parse_daily_csv(in, config);
}

std::vector<WetPeriod> segment_wet_periods(const DailySeries& s, double wet_threshold_mm) {
  if (!(wet_threshold_mm >= 0.0)) throw DomainError("wet threshold must be nonnegative");
  s.validate();
  std::vector<WetPeriod> out;
  bool open = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool wet = s.precip_mm[i] > wet_threshold_mm;
    const bool contiguous = i > 0 && s.dates[i] - s.dates[i - 1] == std::chrono::days{1};
    if (open && (!wet || !contiguous)) open = false;
    if (!wet) continue;
    if (!open) {
      out.push_back({i, 0, 0.0, 0.0});
      open = true;
    }
    auto& p = out.back();
    ++p.duration_days;
    p.total_volume_mm += s.precip_mm[i];
    p.max_daily_mm = std::max(p.max_daily_mm, s.precip_mm[i]);
  }
  return out;
}

}  // namespace precip
