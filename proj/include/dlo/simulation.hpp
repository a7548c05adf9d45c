#pragma once

#include <string>
#include <vector>

#include "dlo/scenario.hpp"
#include "dlo/system.hpp"

namespace dlo {

enum class RunOutcome { Completed, Unstable };

struct TrajectoryRecord {
    Scalar t = 0;
    CtrlMatrix ctrl;
    Scalar energy = 0;        ///< H_m = K + U
    Scalar kinetic = 0;
    Scalar work = 0;          ///< cumulative external-force work
    long forceEvals = 0;      ///< cumulative
};

struct Trajectory {
    SimulationConfig config;
    std::vector<TrajectoryRecord> records;
    RunOutcome outcome = RunOutcome::Completed;
    long unstableStep = -1;       ///< step index when outcome is Unstable
    Scalar unstableTime = 0;
    Scalar wallSeconds = 0;       ///< stepping loop only, assembly excluded
    long totalForceEvals = 0;
    long totalSteps = 0;
};

/// A state is declared unstable when any entry is non-finite or the
/// configuration norm exceeds kInstabilityLengthFactor * length.
constexpr Scalar kInstabilityLengthFactor = 1e3;

struct RunOptions {
    bool recordFinalOnly = false;  ///< benchmark mode: initial + final records
};

/// Build the model once, step duration/tau times, record every recordStride
/// steps (plus the final step). Instability truncates the trajectory and tags
/// the outcome; it is not an error. Deterministic for a given config.
Trajectory runSimulation(const SimulationConfig& config, const RunOptions& options = {});

enum class DriftVerdict { Bounded, Secular };

/// Least-squares analysis of the energy-balance deviation
/// |H(t) - H(0) - W(t)| over the records. "Bounded" when the fitted slope is
/// statistically indistinguishable from zero at the residual scatter, or the
/// accumulated drift is negligible relative to the energy scale.
struct EnergyDriftReport {
    Scalar maxAbsDeviation = 0;
    Scalar maxRelDeviation = 0;   ///< maxAbsDeviation / scale
    Scalar scale = 0;             ///< max(|H(0)|, max kinetic energy)
    Scalar slope = 0;             ///< d|deviation|/dt, least squares
    Scalar slopeSigma = 0;        ///< standard error of the slope
    DriftVerdict verdict = DriftVerdict::Bounded;
};

/// Decision thresholds for the drift verdict, fixed here:
/// secular iff |slope| > kDriftSlopeSigmas * slopeSigma AND the drift
/// accumulated over the run exceeds kDriftNegligibleFraction * scale.
constexpr Scalar kDriftSlopeSigmas = 5.0;
constexpr Scalar kDriftNegligibleFraction = 1e-4;

EnergyDriftReport energyDriftReport(const Trajectory& trajectory);

std::string outcomeName(RunOutcome outcome);
std::string verdictName(DriftVerdict verdict);

}  // namespace dlo
