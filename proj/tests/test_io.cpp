#include <doctest.h>

#include "alterego/config.hpp"
#include "alterego/csv.hpp"
#include "alterego/rng.hpp"
#include "alterego/simgen.hpp"

#include <filesystem>
#include <fstream>

using namespace alterego;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("alterego_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

io::Dataset sample_dataset(int horizon = 6) {
  simgen::SimConfig cfg = simgen::default_config(3, horizon, 2);
  cfg.seed = 77;
  const simgen::MarketPath path = simgen::generate_market_path(cfg);
  const RankedDemoSet demos = simgen::generate_funds(cfg, path);
  io::Dataset dataset;
  dataset.dates = io::month_range("2017-01", horizon + 1);
  dataset.benchmark_series = 1234.5 * path.benchmark;
  for (const FundTrajectory& fund : demos.trajectories) {
    FundTrajectory raw = fund;
    raw.holdings *= 2.5e6;
    raw.trades *= 2.5e6;
    raw.cashflow *= 2.5e6;
    raw.benchmark = dataset.benchmark_series;
    raw.normalized = false;
    dataset.funds.push_back(std::move(raw));
  }
  return dataset;
}

void write_dataset(const TempDir& dir, const io::Dataset& dataset) {
  io::write_file_atomic(dir.file("funds.csv"),
                        io::trajectories_to_csv(dataset.funds, dataset.dates));
  io::write_file_atomic(dir.file("flows.csv"),
                        io::cashflows_to_csv(dataset.funds, dataset.dates));
  io::write_file_atomic(dir.file("benchmark.csv"),
                        io::benchmark_to_csv(dataset.benchmark_series, dataset.dates));
}

}  // namespace

TEST_CASE("month parsing and ranges") {
  const io::Month m = io::parse_month("2019-11");
  CHECK(m.year == 2019);
  CHECK(m.month == 11);
  CHECK(io::format_month(m) == "2019-11");
  const auto months = io::month_range("2018-11", 4);
  REQUIRE(months.size() == 4);
  CHECK(months[0] == "2018-11");
  CHECK(months[2] == "2019-01");
  CHECK_THROWS_AS(io::parse_month("2019/11"), io::data_error);
  CHECK_THROWS_AS(io::parse_month("2019-13"), io::data_error);
}

TEST_CASE("dataset CSV round-trip preserves every number") {
  TempDir dir;
  const io::Dataset dataset = sample_dataset();
  write_dataset(dir, dataset);

  const io::Dataset loaded =
      io::read_dataset(dir.file("funds.csv"), dir.file("flows.csv"), dir.file("benchmark.csv"));
  REQUIRE(loaded.funds.size() == dataset.funds.size());
  CHECK(loaded.dates == dataset.dates);
  CHECK((loaded.benchmark_series - dataset.benchmark_series).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t m = 0; m < dataset.funds.size(); ++m) {
    CHECK(loaded.funds[m].fund_id == dataset.funds[m].fund_id);
    CHECK((loaded.funds[m].holdings - dataset.funds[m].holdings).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.funds[m].trades - dataset.funds[m].trades).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.funds[m].cashflow - dataset.funds[m].cashflow).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("missing months are a hard error") {
  TempDir dir;
  const io::Dataset dataset = sample_dataset();
  write_dataset(dir, dataset);

  // Drop one holding row from the middle of the file.
  std::string text = io::read_file(dir.file("funds.csv"));
  const auto pos = text.find("2017-03,F1,holding");
  REQUIRE(pos != std::string::npos);
  const auto end = text.find('\n', pos);
  text.erase(pos, end - pos + 1);
  io::write_file_atomic(dir.file("funds.csv"), text);
  CHECK_THROWS_AS(io::read_dataset(dir.file("funds.csv"), dir.file("flows.csv"),
                                   dir.file("benchmark.csv")),
                  io::data_error);
}

TEST_CASE("benchmark gaps are a hard error") {
  TempDir dir;
  io::Dataset dataset = sample_dataset();
  dataset.dates[3] = "2017-06";  // hole in the monthly panel
  CHECK_THROWS_AS(
      [&] {
        write_dataset(dir, dataset);
        io::read_dataset(dir.file("funds.csv"), dir.file("flows.csv"),
                         dir.file("benchmark.csv"));
      }(),
      io::data_error);
}

TEST_CASE("duplicate rows and unknown funds are rejected") {
  TempDir dir;
  const io::Dataset dataset = sample_dataset();
  write_dataset(dir, dataset);

  std::string text = io::read_file(dir.file("funds.csv"));
  const auto pos = text.find("2017-02,F1,trade");
  const auto end = text.find('\n', pos);
  const std::string row = text.substr(pos, end - pos + 1);
  io::write_file_atomic(dir.file("funds.csv"), text + row);  // duplicated row
  CHECK_THROWS_AS(io::read_dataset(dir.file("funds.csv"), dir.file("flows.csv"),
                                   dir.file("benchmark.csv")),
                  io::data_error);

  write_dataset(dir, dataset);
  io::write_file_atomic(dir.file("flows.csv"),
                        io::read_file(dir.file("flows.csv")) + "2017-02,GHOST,0.5\n");
  CHECK_THROWS_AS(io::read_dataset(dir.file("funds.csv"), dir.file("flows.csv"),
                                   dir.file("benchmark.csv")),
                  io::data_error);
}

TEST_CASE("alias map renames funds on ingest") {
  TempDir dir;
  const io::Dataset dataset = sample_dataset();
  write_dataset(dir, dataset);
  io::write_file_atomic(dir.file("alias.csv"), "fund_id,alias\nF1,A\nF2,B\n");
  const io::Dataset loaded = io::read_dataset(
      dir.file("funds.csv"), dir.file("flows.csv"), dir.file("benchmark.csv"),
      dir.file("alias.csv"));
  CHECK(loaded.funds[0].fund_id == "A");
  CHECK(loaded.funds[1].fund_id == "B");
}

TEST_CASE("format_double round-trips doubles exactly") {
  NormalSampler rng(13);
  for (int i = 0; i < 200; ++i) {
    const double value = std::exp(10.0 * rng()) * (rng() > 0 ? 1.0 : -1.0);
    CHECK(std::stod(io::format_double(value)) == value);
  }
  CHECK(io::format_double(0.0) == "0");
}

TEST_CASE("atomic write leaves no temp file behind") {
  TempDir dir;
  io::write_file_atomic(dir.file("x.txt"), "hello");
  CHECK(io::read_file(dir.file("x.txt")) == "hello");
  CHECK_FALSE(fs::exists(dir.file("x.txt.tmp")));
}

TEST_CASE("config parse -> emit -> parse is the identity") {
  const std::string text =
      "# comment\n"
      "data.start = 2017-01\n"
      "trex.learning_rate = 0.05\n"
      "\n"
      "out.dir = some/dir\n";
  const io::Config parsed = io::Config::parse(text);
  const io::Config reparsed = io::Config::parse(parsed.emit());
  CHECK(parsed == reparsed);
  CHECK(parsed.get_string("data.start") == "2017-01");
  CHECK(parsed.get_double("trex.learning_rate", 0.0) == doctest::Approx(0.05));
}

TEST_CASE("config typed getters and errors") {
  const io::Config cfg = io::Config::parse("a = 1\nb = true\nc = oops\n");
  CHECK(cfg.get_int("a", 0) == 1);
  CHECK(cfg.get_bool("b", false));
  CHECK(cfg.get_double("missing", 2.5) == doctest::Approx(2.5));
  CHECK_THROWS_AS(cfg.get_double("c", 0.0), io::config_error);
  CHECK_THROWS_AS(cfg.get_string("missing"), io::config_error);
  CHECK_THROWS_AS(io::Config::parse("no equals sign here\n"), io::config_error);
}
