#pragma once

#include "alterego/types.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace alterego {
namespace io {

/// Bad or missing configuration (CLI exit code 1).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CLI exit code 2).
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Monthly timestamps in ISO "YYYY-MM" form.
struct Month {
  int year = 0;
  int month = 1;  // 1..12

  int index() const { return year * 12 + (month - 1); }
  static Month from_index(int index);
};

Month parse_month(const std::string& text);
std::string format_month(const Month& month);
std::vector<std::string> month_range(const std::string& start, int count);

/// Shortest round-trippable decimal representation, used for every numeric
/// value this project writes so that reruns are byte-identical.
std::string format_double(double value);

/// Writes via a temp file in the same directory plus rename.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// A fund panel plus the shared benchmark index series, aligned on dates.
struct Dataset {
  std::vector<FundTrajectory> funds;   // raw or normalized, aligned dates
  Vec benchmark_series;                // index values, one per date
  std::vector<std::string> dates;      // consecutive months
};

std::string trajectories_to_csv(const std::vector<FundTrajectory>& funds,
                                const std::vector<std::string>& dates);
std::string cashflows_to_csv(const std::vector<FundTrajectory>& funds,
                             const std::vector<std::string>& dates);
std::string benchmark_to_csv(const Vec& values, const std::vector<std::string>& dates);

/// Reads the three-file dataset. Dates must form one consecutive monthly
/// panel shared by every fund and the benchmark; missing months are a hard
/// error. The optional alias map (CSV `fund_id,alias`) renames funds on
/// ingest.
Dataset read_dataset(const std::string& trajectories_path, const std::string& cashflows_path,
                     const std::string& benchmark_path, const std::string& aliases_path = "");

std::map<std::string, std::string> read_alias_map(const std::string& path);

}  // namespace io
}  // namespace alterego
