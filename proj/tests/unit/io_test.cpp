#include <filesystem>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "homophily/io.hpp"
#include "homophily/simulate.hpp"

using namespace homophily;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("homophily_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t format_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_event_log_jsonl(in, "inline");
  } catch (const FormatError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Io, FormatDoubleRoundTripsExactly) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng) * std::pow(10.0, (k % 40) - 20);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_THROW(format_double(std::nan("")), std::domain_error);
  EXPECT_THROW(format_double(std::numeric_limits<double>::infinity()), std::domain_error);
  EXPECT_EQ(format_optional(std::nullopt), "");
}

TEST(Io, JsonlRoundTripIsBitExact) {
  const EventLog log = simulate(fixtures::two_group_params(), 300.0, 17);
  std::stringstream buffer;
  write_event_log_jsonl(buffer, log);
  const EventLog back = read_event_log_jsonl(buffer);
  EXPECT_EQ(back, log);
  EXPECT_EQ(back.horizon(), 300.0);
}

TEST(Io, CsvRoundTripIsBitExact) {
  const fs::path dir = scratch_dir("csv");
  const EventLog log = simulate(fixtures::two_group_params(), 300.0, 18);
  write_event_log_csv(dir / "log.csv", log);
  EXPECT_TRUE(fs::exists(dir / "log.csv.meta.json"));
  EXPECT_EQ(read_event_log(dir / "log.csv"), log);

  write_event_log_jsonl(dir / "log.jsonl", log);
  EXPECT_EQ(read_event_log(dir / "log.jsonl"), log);
}

TEST(Io, EmptyLogRoundTrips) {
  const EventLog log(3, 12.5);
  std::stringstream buffer;
  write_event_log_jsonl(buffer, log);
  const EventLog back = read_event_log_jsonl(buffer);
  EXPECT_EQ(back.groups(), 3);
  EXPECT_TRUE(back.empty());
}

TEST(Io, MalformedLinesReportTheirLineNumber) {
  const std::string header = "{\"K\":2,\"horizon\":10}\n";
  EXPECT_EQ(format_error_line(header + "{\"t\":1,\"i\":1,\"j\":1}\n{\"t\":2,\"i\":1}\n"), 3u);
  EXPECT_EQ(format_error_line(header + "not json\n"), 2u);
  EXPECT_EQ(format_error_line(header + "{\"t\":1,\"i\":1,\"j\":3}\n"), 2u);
  EXPECT_EQ(format_error_line(header + "{\"t\":11,\"i\":1,\"j\":1}\n"), 2u);
  EXPECT_EQ(format_error_line(header + "{\"t\":5,\"i\":1,\"j\":1}\n{\"t\":4,\"i\":1,\"j\":1}\n"), 3u);
  EXPECT_EQ(format_error_line(header + "{\"t\":1,\"i\":1,\"j\":1,\"w\":2}\n"), 2u);
  EXPECT_EQ(format_error_line("{\"horizon\":10}\n"), 1u);
  std::istringstream empty("");
  EXPECT_THROW(read_event_log_jsonl(empty, "inline"), FormatError);
}

TEST(Io, MissingFilesRaiseIoError) {
  EXPECT_THROW(read_event_log("/nonexistent/log.jsonl"), IoError);
  EXPECT_THROW(read_text_file("/nonexistent/file"), IoError);
  const fs::path dir = scratch_dir("nometa");
  write_text_file(dir / "log.csv", "t,i,j\n");
  EXPECT_THROW(read_event_log(dir / "log.csv"), IoError);
}

TEST(Io, CsvErrorsCarryLineNumbers) {
  const fs::path dir = scratch_dir("csverr");
  write_text_file(dir / "log.csv.meta.json", "{\"K\":2,\"horizon\":10}");
  write_text_file(dir / "log.csv", "t,i,j\n1,1,1\n2,x,1\n");
  try {
    read_event_log(dir / "log.csv");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Io, FitsRoundTripThroughJson) {
  const EventLog log = simulate(fixtures::two_group_params(), 400.0, 19);
  const auto fits = estimate_windowed(log, std::vector<double>{200.0});
  const std::string text = fits_to_json(fits);
  EXPECT_EQ(text.find("NaN"), std::string::npos);
  const auto back = fits_from_json(text, "inline");
  ASSERT_EQ(back.size(), fits.size());
  for (std::size_t k = 0; k < fits.size(); ++k) {
    EXPECT_EQ(back[k].window, fits[k].window);
    EXPECT_EQ(back[k].mu_hat(), fits[k].mu_hat());
    EXPECT_EQ(back[k].alpha_hat(), fits[k].alpha_hat());
    EXPECT_EQ(back[k].beta, fits[k].beta);
    for (std::size_t p = 0; p < fits[k].pairs.size(); ++p) {
      EXPECT_EQ(back[k].pairs[p].status, fits[k].pairs[p].status);
    }
  }
  EXPECT_THROW(fits_from_json("{\"window\": 3}", "inline"), FormatError);
}

TEST(Io, RegimeTableHasOneRowPerPair) {
  const RegimeSchedule s = fixtures::three_regime_schedule();
  const EventLog log = simulate(fixtures::three_regime_params(), &s, 1500.0, 20);
  const auto fits = estimate_windowed(log, fixtures::kRegimeBreakpoints);
  Eigen::MatrixXd truth(3, 3);
  for (int k = 0; k < 3; ++k) {
    truth.col(k) = s.matrix(static_cast<std::size_t>(k)).diagonal();
  }
  std::ostringstream out;
  write_regime_table_csv(out, fits, truth);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("pair,", 0), 0u);
  EXPECT_NE(line.find("true_alpha_1"), std::string::npos);
  EXPECT_NE(line.find("alpha_hat_3"), std::string::npos);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Io, BiasSeriesLeavesUndefinedValuesEmpty) {
  EventLog log(2, 10.0);
  log.append(5.0, 0);
  const HawkesParams p(2, Eigen::Vector3d::Zero(), Eigen::MatrixXd::Zero(3, 3), 1.0);
  const std::vector<double> grid{1.0, 6.0};
  const BiasSeries series = conditional_bias_series(log, p, nullptr, RegimeMode::kReweightPast, grid);
  std::ostringstream out;
  write_bias_series_csv(out, series);
  const std::string text = out.str();
  EXPECT_EQ(text.find("nan"), std::string::npos);
  EXPECT_NE(text.find("1,,,model_true"), std::string::npos);
  EXPECT_NE(text.find("6,1,,model_true"), std::string::npos);
}

TEST(Io, StabilityJsonOmitsStationaryWhenSupercritical) {
  const HawkesParams p(1, Eigen::VectorXd::Constant(1, 1.0), Eigen::MatrixXd::Constant(1, 1, 1.5), 1.0);
  const std::string text = stability_report_to_json(analyze_stability(p), 1);
  EXPECT_NE(text.find("supercritical"), std::string::npos);
  EXPECT_EQ(text.find("NaN"), std::string::npos);
  EXPECT_EQ(text.find("Infinity"), std::string::npos);
}

TEST(Io, WriteFileCreatesParents) {
  const fs::path dir = scratch_dir("parents");
  write_text_file(dir / "a" / "b" / "c.txt", "x");
  EXPECT_EQ(read_text_file(dir / "a" / "b" / "c.txt"), "x");
}
