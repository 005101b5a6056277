#pragma once

// Daily precipitation input and wet-period segmentation.

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace precip {

struct DailySeries {
  std::vector<std::chrono::sys_days> dates;
  std::vector<double> precip_mm;
  std::string station_id;

  std::size_t size() const { return dates.size(); }
  void validate() const;  // strictly increasing dates, nonnegative values
};

enum class MissingPolicy { Reject, Split };

struct CsvConfig {
  char delimiter = ',';
  std::string missing_token = "NA";
  // Split drops the missing day; the resulting date gap ends any wet period.
  MissingPolicy missing = MissingPolicy::Reject;
  std::string station_id;
};

void from_json(const nlohmann::json& j, CsvConfig& c);

std::chrono::sys_days parse_iso_date(const std::string& s);  // YYYY-MM-DD
std::string format_iso_date(std::chrono::sys_days d);

DailySeries parse_daily_csv(std::istream& in, const CsvConfig& config = {});
DailySeries parse_daily_csv(const std::string& path, const CsvConfig& config = {});

struct WetPeriod {
  std::size_t start_index = 0;
  std::size_t duration_days = 0;
  double total_volume_mm = 0.0;
  double max_daily_mm = 0.0;
};

// Maximal runs of consecutive calendar days with precip > wet_threshold_mm.
std::vector<WetPeriod> segment_wet_periods(const DailySeries& s, double wet_threshold_mm = 0.0);

}  // namespace precip
