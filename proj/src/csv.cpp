#include "alterego/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace alterego {
namespace io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

double parse_double(const std::string& text, const std::string& context) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw data_error(context + ": cannot parse number '" + text + "'");
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string sector_header(int n) {
  std::string out;
  char buffer[16];
  for (int s = 1; s <= n; ++s) {
    std::snprintf(buffer, sizeof(buffer), ",s%02d", s);
    out += buffer;
  }
  return out;
}

}  // namespace

Month Month::from_index(int index) {
  Month m;
  m.year = index / 12;
  m.month = index % 12 + 1;
  return m;
}

Month parse_month(const std::string& text) {
  if (text.size() != 7 || text[4] != '-')
    throw data_error("bad month '" + text + "', expected YYYY-MM");
  for (int i : {0, 1, 2, 3, 5, 6})
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      throw data_error("bad month '" + text + "', expected YYYY-MM");
  Month m;
  m.year = std::stoi(text.substr(0, 4));
  m.month = std::stoi(text.substr(5, 2));
  if (m.month < 1 || m.month > 12) throw data_error("bad month '" + text + "'");
  return m;
}

std::string format_month(const Month& month) {
  char buffer[8];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d", month.year, month.month);
  return buffer;
}

std::vector<std::string> month_range(const std::string& start, int count) {
  const int base = parse_month(start).index();
  std::vector<std::string> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(format_month(Month::from_index(base + i)));
  return out;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot write '" + temp.string() + "'");
    out << content;
  }
  fs::rename(temp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string trajectories_to_csv(const std::vector<FundTrajectory>& funds,
                                const std::vector<std::string>& dates) {
  if (funds.empty()) throw data_error("no funds to write");
  const int n = funds.front().n_sectors;
  std::string out = "date,fund_id,kind" + sector_header(n) + "\n";
  for (const FundTrajectory& fund : funds) {
    if (static_cast<int>(dates.size()) != fund.rows())
      throw data_error("fund '" + fund.fund_id + "': dates do not align with rows");
    for (int t = 0; t < fund.rows(); ++t) {
      for (const char* kind : {"holding", "trade"}) {
        out += dates[t];
        out += ',';
        out += fund.fund_id;
        out += ',';
        out += kind;
        const auto& row =
            std::string(kind) == "holding" ? fund.holdings.row(t) : fund.trades.row(t);
        for (int s = 0; s < n; ++s) {
          out += ',';
          out += format_double(row[s]);
        }
        out += '\n';
      }
    }
  }
  return out;
}

std::string cashflows_to_csv(const std::vector<FundTrajectory>& funds,
                             const std::vector<std::string>& dates) {
  std::string out = "date,fund_id,cashflow\n";
  for (const FundTrajectory& fund : funds)
    for (int t = 0; t < fund.rows(); ++t)
      out += dates[t] + "," + fund.fund_id + "," + format_double(fund.cashflow[t]) + "\n";
  return out;
}

std::string benchmark_to_csv(const Vec& values, const std::vector<std::string>& dates) {
  if (static_cast<int>(dates.size()) != values.size())
    throw data_error("benchmark: dates do not align with values");
  std::string out = "date,value\n";
  for (int t = 0; t < values.size(); ++t)
    out += dates[t] + "," + format_double(values[t]) + "\n";
  return out;
}

std::map<std::string, std::string> read_alias_map(const std::string& path) {
  std::map<std::string, std::string> aliases;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split(lines[i], ',');
    if (i == 0 && fields.size() == 2 && fields[0] == "fund_id") continue;
    if (fields.size() != 2)
      throw data_error(path + ": alias rows must be 'fund_id,alias'");
    aliases[fields[0]] = fields[1];
  }
  return aliases;
}

Dataset read_dataset(const std::string& trajectories_path, const std::string& cashflows_path,
                     const std::string& benchmark_path, const std::string& aliases_path) {
  std::map<std::string, std::string> aliases;
  if (!aliases_path.empty()) aliases = read_alias_map(aliases_path);
  const auto rename = [&aliases](const std::string& fund_id) {
    const auto it = aliases.find(fund_id);
    return it == aliases.end() ? fund_id : it->second;
  };

  // Benchmark first; it pins the date panel.
  Dataset dataset;
  {
    const auto lines = read_lines(benchmark_path);
    if (lines.empty() || lines[0] != "date,value")
      throw data_error(benchmark_path + ": expected header 'date,value'");
    std::vector<double> values;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto fields = split(lines[i], ',');
      if (fields.size() != 2) throw data_error(benchmark_path + ": bad row '" + lines[i] + "'");
      dataset.dates.push_back(format_month(parse_month(fields[0])));
      values.push_back(parse_double(fields[1], benchmark_path));
    }
    if (dataset.dates.size() < 2) throw data_error(benchmark_path + ": too few rows");
    for (std::size_t i = 1; i < dataset.dates.size(); ++i)
      if (parse_month(dataset.dates[i]).index() != parse_month(dataset.dates[i - 1]).index() + 1)
        throw data_error(benchmark_path + ": missing month after " + dataset.dates[i - 1]);
    dataset.benchmark_series =
        Eigen::Map<const Vec>(values.data(), static_cast<int>(values.size()));
  }
  std::map<std::string, int> date_index;
  for (std::size_t i = 0; i < dataset.dates.size(); ++i)
    date_index[dataset.dates[i]] = static_cast<int>(i);
  const int rows = static_cast<int>(dataset.dates.size());

  // Trajectories.
  struct Panel {
    Mat holdings;
    Mat trades;
    Mat seen;  // (rows x 2) flags for holding/trade
  };
  std::map<std::string, Panel> panels;
  std::vector<std::string> fund_order;
  int n_sectors = -1;
  {
    const auto lines = read_lines(trajectories_path);
    if (lines.empty()) throw data_error(trajectories_path + ": empty file");
    const auto header = split(lines[0], ',');
    if (header.size() < 4 || header[0] != "date" || header[1] != "fund_id" ||
        header[2] != "kind")
      throw data_error(trajectories_path + ": expected header 'date,fund_id,kind,s01,...'");
    n_sectors = static_cast<int>(header.size()) - 3;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto fields = split(lines[i], ',');
      if (static_cast<int>(fields.size()) != 3 + n_sectors)
        throw data_error(trajectories_path + ": row " + std::to_string(i + 1) +
                         " has wrong field count");
      const std::string date = format_month(parse_month(fields[0]));
      const auto date_it = date_index.find(date);
      if (date_it == date_index.end())
        throw data_error(trajectories_path + ": date " + date + " not in benchmark panel");
      const std::string fund_id = rename(fields[1]);
      const std::string& kind = fields[2];
      if (kind != "holding" && kind != "trade")
        throw data_error(trajectories_path + ": kind must be holding or trade, got '" + kind +
                         "'");
      auto panel_it = panels.find(fund_id);
      if (panel_it == panels.end()) {
        Panel panel;
        panel.holdings = Mat::Zero(rows, n_sectors);
        panel.trades = Mat::Zero(rows, n_sectors);
        panel.seen = Mat::Zero(rows, 2);
        panel_it = panels.emplace(fund_id, std::move(panel)).first;
        fund_order.push_back(fund_id);
      }
      const int t = date_it->second;
      const int kind_col = kind == "holding" ? 0 : 1;
      if (panel_it->second.seen(t, kind_col) != 0.0)
        throw data_error(trajectories_path + ": duplicate " + kind + " row for " + fund_id +
                         " at " + date);
      panel_it->second.seen(t, kind_col) = 1.0;
      Mat& target = kind_col == 0 ? panel_it->second.holdings : panel_it->second.trades;
      for (int s = 0; s < n_sectors; ++s)
        target(t, s) = parse_double(fields[3 + s], trajectories_path);
    }
  }
  if (panels.empty()) throw data_error(trajectories_path + ": no fund rows");
  for (const std::string& fund_id : fund_order) {
    const Panel& panel = panels[fund_id];
    for (int t = 0; t < rows; ++t)
      if (panel.seen(t, 0) == 0.0 || panel.seen(t, 1) == 0.0)
        throw data_error(trajectories_path + ": fund " + fund_id + " missing month " +
                         dataset.dates[t]);
  }

  // Cashflows.
  std::map<std::string, Vec> flows;
  std::map<std::string, std::vector<bool>> flows_seen;
  {
    const auto lines = read_lines(cashflows_path);
    if (lines.empty() || lines[0] != "date,fund_id,cashflow")
      throw data_error(cashflows_path + ": expected header 'date,fund_id,cashflow'");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto fields = split(lines[i], ',');
      if (fields.size() != 3) throw data_error(cashflows_path + ": bad row '" + lines[i] + "'");
      const std::string date = format_month(parse_month(fields[0]));
      const auto date_it = date_index.find(date);
      if (date_it == date_index.end())
        throw data_error(cashflows_path + ": date " + date + " not in benchmark panel");
      const std::string fund_id = rename(fields[1]);
      if (panels.find(fund_id) == panels.end())
        throw data_error(cashflows_path + ": unknown fund '" + fund_id + "'");
      auto& seen = flows_seen[fund_id];
      if (seen.empty()) {
        seen.assign(rows, false);
        flows[fund_id] = Vec::Zero(rows);
      }
      if (seen[date_it->second])
        throw data_error(cashflows_path + ": duplicate row for " + fund_id + " at " + date);
      seen[date_it->second] = true;
      flows[fund_id][date_it->second] = parse_double(fields[2], cashflows_path);
    }
  }

  for (const std::string& fund_id : fund_order) {
    FundTrajectory traj;
    traj.fund_id = fund_id;
    traj.n_sectors = n_sectors;
    traj.horizon = rows - 1;
    traj.holdings = panels[fund_id].holdings;
    traj.trades = panels[fund_id].trades;
    traj.benchmark = dataset.benchmark_series;
    const auto flow_it = flows.find(fund_id);
    if (flow_it == flows.end())
      throw data_error(cashflows_path + ": no cashflow rows for fund '" + fund_id + "'");
    const auto& seen = flows_seen[fund_id];
    for (int t = 0; t < rows; ++t)
      if (!seen[t])
        throw data_error(cashflows_path + ": fund " + fund_id + " missing month " +
                         dataset.dates[t]);
    traj.cashflow = flow_it->second;
    validate(traj);
    dataset.funds.push_back(std::move(traj));
  }
  return dataset;
}

}  // namespace io
}  // namespace alterego
