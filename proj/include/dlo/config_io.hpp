#pragma once

#include <iosfwd>
#include <string>

#include "dlo/harness.hpp"
#include "dlo/scenario.hpp"
#include "dlo/simulation.hpp"

namespace dlo {

/// Parse a sectioned key = value config file ([simulation], [properties],
/// [scenario]; '#' comments). Missing keys take defaults; unknown keys are an
/// error. Throws std::runtime_error with file/line context.
SimulationConfig loadConfig(const std::string& path);
SimulationConfig parseConfig(std::istream& in, const std::string& label);

/// Config echo in the same format it is parsed from. Values the reference
/// protocol never specifies are flagged so emitted reports are
/// self-describing.
std::string formatConfig(const SimulationConfig& config);

/// Trajectory as delimited text: config echo as comments, a header row, then
/// one row per record with t, energy and the 4 n_u control coordinates in
/// component-blocked order. Full-precision decimal, so parsing reproduces the
/// values bit-exactly. The final line states the outcome.
void exportTrajectory(const Trajectory& trajectory, const std::string& path);
std::string formatTrajectory(const Trajectory& trajectory);

/// Inverse of formatTrajectory (used by tests and downstream tooling).
struct ParsedTrajectory {
    std::vector<std::string> columns;
    MatX rows;              ///< one row per record
    std::string outcomeLine;
};
ParsedTrajectory parseTrajectory(std::istream& in);

std::string formatBenchmarkReport(const BenchmarkReport& report);
std::string formatErrorStudyReport(const ErrorStudyReport& report);
std::string formatMaxStableTauReport(const MaxStableTauReport& report,
                                     const SimulationConfig& config);
std::string formatDriftReport(const EnergyDriftReport& report);

void writeTextFile(const std::string& path, const std::string& content);

}  // namespace dlo
