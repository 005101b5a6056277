#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include "precip/csv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("precip_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout.txt";
  const auto err = scratch() / "stderr.txt";
  const std::string cmd = std::string(PRECIP_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

// Ten years of scrambled wet and dry days.
fs::path daily_file() {
  const auto p = scratch() / "daily.csv";
  std::ofstream f(p);
  f << "date,precip_mm\n";
  int day = 0;
  for (int y = 2000; y < 2010; ++y) {
    for (int m = 1; m <= 12; ++m) {
      for (int d = 1; d <= 28; ++d, ++day) {
        const unsigned h = (static_cast<unsigned>(day) * 2654435761u) >> 16;
        const double v = (h % 10 < 4) ? 0.5 + (h % 101) / 10.0 : 0.0;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d,%.1f\n", y, m, d, v);
        f << buf;
      }
    }
  }
  return p;
}

}  // namespace

TEST(Cli, DistCdfAtMedian) {
  // r = gamma = lambda = 1 gives cdf 1/(1 + x^-alpha)
  const auto r = run("dist --family extreme --op cdf --params 1,2,1,1 --x 1");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(r.out), 0.5, 1e-12);
}

TEST(Cli, DistSeveralPointsIsCsv) {
  const auto r = run("dist --family gg --op cdf --params 1,1,1 --x 0.5 1 2");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto t = precip::read_csv(in);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_NEAR(t.number(2, t.columns.back()), 1.0 - std::exp(-2.0), 1e-12);
}

TEST(Cli, SimulateIsReproducibleAcrossWorkers) {
  const auto a = run("simulate --family extreme --params 0.7,1.5,0.8,2 --repr pareto-mix --n 40000 --seed 7 --workers 1");
  const auto b = run("simulate --family extreme --params 0.7,1.5,0.8,2 --repr pareto-mix --n 40000 --seed 7 --workers 4");
  const auto c = run("simulate --family extreme --params 0.7,1.5,0.8,2 --repr pareto-mix --n 40000 --seed 8 --workers 4");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, DomainErrorIsJsonOnStderr) {
  const auto r = run("dist --family gg --op cdf --params -1,1,1 --x 1");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  const auto e = json::parse(r.err);
  EXPECT_EQ(e["error"]["kind"], "domain");
  EXPECT_EQ(e["error"]["exit_code"], 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("dist --family nope --op cdf --params 1,1,1 --x 1").code, 2);
  EXPECT_EQ(run("simulate --family gg --params 1,1,1").code, 2);
}

TEST(Cli, BadDataReportsLine) {
  const auto p = scratch() / "bad.csv";
  std::ofstream(p) << "date,precip_mm\n2000-01-01,1\n2000-01-01,2\n";
  const auto r = run("fit-volume --input " + p.string());
  EXPECT_EQ(r.code, 3);
  const auto e = json::parse(r.err);
  EXPECT_EQ(e["error"]["kind"], "data");
  EXPECT_EQ(e["error"]["line"], 3);
}

TEST(Cli, ScanWritesClassificationTable) {
  const auto in = daily_file();
  const auto csv = scratch() / "scan.csv";
  const auto summary = scratch() / "scan.json";
  const auto r = run("scan --input " + in.string() + " --window 50 --r 1 --gamma 1 --output " + csv.string() +
                     " --summary " + summary.string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(csv);
  const auto t = precip::read_csv(f);
  const std::vector<std::string> want{"period_index", "start_date", "total_volume_mm",
                                      "class",        "votes",      "windows_containing"};
  EXPECT_EQ(t.columns, want);
  EXPECT_GT(t.rows.size(), 100u);
  for (const auto& row : t.rows) {
    EXPECT_TRUE(row[3] == "absolute" || row[3] == "intermediate" || row[3] == "relative" || row[3] == "none");
  }
  EXPECT_TRUE(json::parse(slurp(summary)).is_object());
}

TEST(Cli, FitDurationJson) {
  const auto r = run("fit-duration --input " + daily_file().string() + " --fixed-r 1");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_GT(j["wet_periods"].get<int>(), 400);
  EXPECT_DOUBLE_EQ(j["gnb"]["r"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j["nb"]["gamma"].get<double>(), 1.0);
}
