#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "emtr/annealing.hpp"
#include "emtr/locator.hpp"
#include "emtr/simulator.hpp"

namespace emtr {

/// `time_us,value`, 9 significant digits.
void write_waveform_csv(std::ostream& os, const Waveform& w);
/// Reads a uniformly sampled `time_us,value` file; throws ConfigError.
Waveform read_waveform_csv(std::istream& is);

/// `position_m,energy`
void write_sweep_csv(std::ostream& os, const std::vector<std::pair<double, double>>& rows);
std::vector<std::pair<double, double>> read_sweep_csv(std::istream& is);

/// `iteration,position_m,energy,accepted,temperature`
void write_trace_csv(std::ostream& os, const OptimizationTrace& trace);
std::vector<TraceEntry> read_trace_csv(std::istream& is);

/// `scenario,repeat,seed,located_path,located_pos_m,true_pos_m,error_m,energy,evaluations,mode`
/// Path numbers are 1-based.
void write_campaign_csv(std::ostream& os, const std::vector<CampaignRow>& rows);

/// Header plus raw cells of a comma-separated file without quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& is);

}  // namespace emtr
