#pragma once

#include <string>
#include <vector>

#include "dlo/simulation.hpp"

namespace dlo {

struct BenchmarkCell {
    IntegratorKind integrator;
    Scalar duration = 0;
    Scalar wallSeconds = 0;       ///< median over repetitions
    RunOutcome outcome = RunOutcome::Completed;
    long forceEvals = 0;
    long steps = 0;
};

struct BenchmarkReport {
    std::string machine;
    std::vector<Scalar> durations;
    std::vector<IntegratorKind> integrators;
    std::vector<BenchmarkCell> cells;  ///< ordered integrator-major, duration-minor
    /// wall(symplectic4)/wall(rk4) per duration when both completed, else NaN.
    std::vector<Scalar> symplecticOverRk4;
};

struct BenchmarkOptions {
    int repetitions = 3;  ///< median-of-N timing
    bool warmup = true;
};

/// Time each (integrator, duration) cell of the scenario in config. Cells run
/// serially (no contention skew); recording is reduced to the final state so
/// wall time measures the stepping loop.
BenchmarkReport benchmark(const SimulationConfig& config,
                          const std::vector<IntegratorKind>& integrators,
                          const std::vector<Scalar>& durations,
                          const BenchmarkOptions& options = {});

constexpr Index kErrorStudyStations = 10;
constexpr Index kErrorStudyTimeBins = 20;

struct ErrorStudyVariant {
    Index controlCount = 0;
    Index sampleCount = 0;
    bool unstable = false;
    Scalar wallSeconds = 0;
    MatX errorGrid;       ///< stations x time bins, mean position error [m]
    VecX errorVsStation;  ///< mean over time bins
    VecX errorVsTime;     ///< mean over stations
    Scalar meanError = 0;
};

struct ErrorStudyReport {
    SimulationConfig referenceConfig;
    VecX stationParameters;  ///< the 10 fixed measurement points along the rod
    std::vector<Index> controlCounts;
    std::vector<Index> sampleCounts;
    std::vector<ErrorStudyVariant> variants;  ///< cross product + the reference itself
    MatX meanErrorByResolution;   ///< controlCounts x sampleCounts
    MatX wallSecondsByResolution;
    VecX errorVsControlCount;     ///< mean over sample counts
    VecX errorVsSampleCount;      ///< mean over control counts
    std::string machine;
};

struct ErrorStudyOptions {
    int timingRepetitions = 3;
};

/// Re-run the configured scenario at each (n_u, n_s) pair and measure the
/// position error against the configured reference resolution at 10 fixed
/// stations over 20 equal time intervals. The config itself is the reference
/// and must use the largest resolution.
ErrorStudyReport resolutionErrorStudy(const SimulationConfig& referenceConfig,
                                      const std::vector<Index>& controlCounts,
                                      const std::vector<Index>& sampleCounts,
                                      const ErrorStudyOptions& options = {});

struct StableTauProbe {
    Scalar tau = 0;
    bool stable = false;
    RunOutcome outcome = RunOutcome::Completed;
    Scalar maxRelDeviation = 0;
};

struct MaxStableTauReport {
    IntegratorKind integrator;
    Scalar maxStableTau = 0;
    Scalar smallestUnstableTau = 0;  ///< 0 when no unstable step size was found
    std::vector<StableTauProbe> probes;
};

struct MaxStableTauOptions {
    int bisectionIterations = 12;
    Scalar growthFactor = 2.0;
    Scalar maxTau = 1.0;
    /// A run counts as stable when it completes and the energy balance holds
    /// to this fraction of the dynamic energy scale over the whole horizon.
    /// Divergence alone is too weak a notion here: a dissipative scheme can
    /// avoid overflow long after its trajectory has stopped representing the
    /// conservative flow, so the search scores energy faithfulness.
    Scalar energyTolerance = 3e-3;
};

/// Bracket-and-bisect search for the largest step size at which the
/// configured scenario integrates stably.
MaxStableTauReport maxStableTau(const SimulationConfig& config, IntegratorKind integrator,
                                const MaxStableTauOptions& options = {});

std::string machineDescriptor();

}  // namespace dlo
