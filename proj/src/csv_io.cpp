#include "emtr/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "emtr/network.hpp"

namespace emtr {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, int line, int column) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("not a number: '" + s + "'", line, column);
  return v;
}

void expect_header(const CsvTable& t, const std::vector<std::string>& want) {
  if (t.header != want) {
    std::string joined;
    for (const auto& h : want) joined += (joined.empty() ? "" : ",") + h;
    throw ConfigError("expected header '" + joined + "'", 1, 1);
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r].size() != want.size()) {
      throw ConfigError("expected " + std::to_string(want.size()) + " columns", static_cast<int>(r) + 2, 1);
    }
  }
}

}  // namespace

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      t.header = split(line);
      first = false;
    } else {
      t.rows.push_back(split(line));
    }
  }
  if (first) throw ConfigError("empty CSV input");
  return t;
}

void write_waveform_csv(std::ostream& os, const Waveform& w) {
  os << "time_us,value\n";
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    os << num((w.start_time + static_cast<double>(i) * w.dt) * 1e6) << ',' << num(w.samples[i]) << '\n';
  }
}

Waveform read_waveform_csv(std::istream& is) {
  const auto t = read_csv(is);
  expect_header(t, {"time_us", "value"});
  if (t.rows.size() < 2) throw ConfigError("waveform needs at least two samples");
  Waveform w;
  std::vector<double> times;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int line = static_cast<int>(r) + 2;
    times.push_back(parse_double(t.rows[r][0], line, 1) * 1e-6);
    w.samples.push_back(parse_double(t.rows[r][1], line, 2));
  }
  w.start_time = times.front();
  w.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(w.dt > 0.0)) throw ConfigError("time column must increase");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = w.start_time + static_cast<double>(i) * w.dt;
    if (std::abs(times[i] - expected) > 1e-3 * w.dt + 1e-8 * std::abs(expected)) {
      throw ConfigError("samples are not uniformly spaced", static_cast<int>(i) + 2, 1);
    }
  }
  return w;
}

void write_sweep_csv(std::ostream& os, const std::vector<std::pair<double, double>>& rows) {
  os << "position_m,energy\n";
  for (const auto& [x, e] : rows) os << num(x) << ',' << num(e) << '\n';
}

std::vector<std::pair<double, double>> read_sweep_csv(std::istream& is) {
  const auto t = read_csv(is);
  expect_header(t, {"position_m", "energy"});
  std::vector<std::pair<double, double>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int line = static_cast<int>(r) + 2;
    out.emplace_back(parse_double(t.rows[r][0], line, 1), parse_double(t.rows[r][1], line, 2));
  }
  return out;
}

void write_trace_csv(std::ostream& os, const OptimizationTrace& trace) {
  os << "iteration,position_m,energy,accepted,temperature\n";
  for (std::size_t i = 0; i < trace.entries.size(); ++i) {
    const auto& e = trace.entries[i];
    os << i << ',' << num(e.position) << ',' << num(e.value) << ',' << (e.accepted ? 1 : 0) << ','
       << num(e.temperature) << '\n';
  }
}

std::vector<TraceEntry> read_trace_csv(std::istream& is) {
  const auto t = read_csv(is);
  expect_header(t, {"iteration", "position_m", "energy", "accepted", "temperature"});
  std::vector<TraceEntry> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int line = static_cast<int>(r) + 2;
    const auto& row = t.rows[r];
    if (row[3] != "0" && row[3] != "1") throw ConfigError("accepted must be 0 or 1", line, 4);
    out.push_back({parse_double(row[1], line, 2), parse_double(row[2], line, 3), row[3] == "1",
                   parse_double(row[4], line, 5)});
  }
  return out;
}

void write_campaign_csv(std::ostream& os, const std::vector<CampaignRow>& rows) {
  os << "scenario,repeat,seed,located_path,located_pos_m,true_pos_m,error_m,energy,evaluations,mode\n";
  for (const auto& r : rows) {
    os << r.scenario << ',' << r.repeat << ',' << r.seed << ',' << r.located_path + 1 << ','
       << num(r.located_position) << ',' << num(r.true_position) << ',' << num(r.error) << ',' << num(r.energy)
       << ',' << r.evaluations << ',' << to_string(r.mode) << '\n';
  }
}

}  // namespace emtr
