#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "kanto/analysis.hpp"
#include "kanto/discsim.hpp"
#include "kanto/measures.hpp"

namespace kanto::io {

// ordered key=value pairs echoed into every output header
using Config = std::vector<std::pair<std::string, std::string>>;

// %.17g: shortest form that round-trips a double, stable across runs
std::string format_double(double v);

std::string verdict_name(Verdict v);
std::string kind_name(OperatorSpec::Kind k);

// "# key=value" comment lines; every writer emits this block first
void write_config_header(std::ostream& os, const Config& cfg);

// generic numeric table under the config header
void write_table(std::ostream& os, const Config& cfg, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows);

// columns m, sup_error, lower_interval, upper_interval
void write_report_csv(std::ostream& os, const ConvergenceReport& rep, const Config& cfg);

// JSON summary: verdict, rate, target, floor, final error
std::string report_json(const ConvergenceReport& rep, const Config& cfg);

// columns l, left, right, coeff; trailing metadata rows atom1,
// tail_mass_bound, i
void write_measure_csv(std::ostream& os, const PartitionMeasure& mu, const Config& cfg);

void write_gap_csv(std::ostream& os, const std::vector<GapEntry>& detail, const Config& cfg);
std::string gap_json(int i, const SurveyResult& survey, const std::vector<GapEntry>& detail,
                     const Config& cfg);

// columns m, tv, lower_interval, upper_interval
void write_dual_csv(std::ostream& os, const std::vector<DualProbeEntry>& entries,
                    const Config& cfg);

// columns step, re, im
void write_trajectory_csv(std::ostream& os, const std::vector<DiscState>& traj,
                          const Config& cfg);

// columns step, avg
void write_average_csv(std::ostream& os, const std::vector<double>& avg, const Config& cfg);

// $KANTO_OUTPUT_DIR when set, else "."
std::string output_dir();

} // namespace kanto::io
