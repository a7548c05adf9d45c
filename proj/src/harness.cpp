#include "dlo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dlo {

namespace {

Scalar medianWallSeconds(const SimulationConfig& config, int repetitions,
                         RunOutcome* outcome, long* forceEvals, long* steps) {
    std::vector<Scalar> times;
    RunOptions options;
    options.recordFinalOnly = true;
    for (int r = 0; r < std::max(repetitions, 1); ++r) {
        Trajectory traj = runSimulation(config, options);
        times.push_back(traj.wallSeconds);
        if (outcome) *outcome = traj.outcome;
        if (forceEvals) *forceEvals = traj.totalForceEvals;
        if (steps) *steps = traj.totalSteps;
        if (traj.outcome != RunOutcome::Completed) break;  // divergence is deterministic
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

}  // namespace

BenchmarkReport benchmark(const SimulationConfig& config,
                          const std::vector<IntegratorKind>& integrators,
                          const std::vector<Scalar>& durations,
                          const BenchmarkOptions& options) {
    BenchmarkReport report;
    report.machine = machineDescriptor();
    report.durations = durations;
    report.integrators = integrators;
    if (durations.empty() || integrators.empty()) return report;

    if (options.warmup) {
        SimulationConfig warm = config;
        warm.duration = std::min<Scalar>(config.duration, 0.5);
        RunOptions ro;
        ro.recordFinalOnly = true;
        runSimulation(warm, ro);
    }

    for (IntegratorKind kind : integrators) {
        for (Scalar duration : durations) {
            BenchmarkCell row;
            row.integrator = kind;
            row.duration = duration;
            report.cells.push_back(row);
        }
    }

    // Repetitions are interleaved round-robin over the cells so that clock
    // and cache transients spread evenly instead of biasing whichever cell
    // happens to run first. Cells stay serial; the median is per cell.
    std::vector<std::vector<Scalar>> times(report.cells.size());
    RunOptions ro;
    ro.recordFinalOnly = true;
    for (int rep = 0; rep < std::max(options.repetitions, 1); ++rep) {
        for (size_t i = 0; i < report.cells.size(); ++i) {
            BenchmarkCell& row = report.cells[i];
            if (rep > 0 && row.outcome != RunOutcome::Completed)
                continue;  // divergence is deterministic
            SimulationConfig cell = config;
            cell.step.kind = row.integrator;
            cell.duration = row.duration;
            const Trajectory traj = runSimulation(cell, ro);
            times[i].push_back(traj.wallSeconds);
            row.outcome = traj.outcome;
            row.forceEvals = traj.totalForceEvals;
            row.steps = traj.totalSteps;
        }
    }
    for (size_t i = 0; i < report.cells.size(); ++i) {
        std::sort(times[i].begin(), times[i].end());
        report.cells[i].wallSeconds = times[i][times[i].size() / 2];
    }

    auto findCell = [&](IntegratorKind kind, Scalar duration) -> const BenchmarkCell* {
        for (const auto& c : report.cells)
            if (c.integrator == kind && c.duration == duration) return &c;
        return nullptr;
    };
    for (Scalar duration : durations) {
        const BenchmarkCell* s = findCell(IntegratorKind::Symplectic4, duration);
        const BenchmarkCell* r = findCell(IntegratorKind::Rk4, duration);
        Scalar ratio = std::numeric_limits<Scalar>::quiet_NaN();
        if (s && r && s->outcome == RunOutcome::Completed &&
            r->outcome == RunOutcome::Completed && r->wallSeconds > 0)
            ratio = s->wallSeconds / r->wallSeconds;
        report.symplecticOverRk4.push_back(ratio);
    }
    return report;
}

ErrorStudyReport resolutionErrorStudy(const SimulationConfig& referenceConfig,
                                      const std::vector<Index>& controlCounts,
                                      const std::vector<Index>& sampleCounts,
                                      const ErrorStudyOptions& options) {
    ErrorStudyReport report;
    report.referenceConfig = referenceConfig;
    report.machine = machineDescriptor();
    report.controlCounts = controlCounts;
    report.sampleCounts = sampleCounts;
    report.stationParameters = VecX::LinSpaced(kErrorStudyStations, 0.0,
                                               referenceConfig.properties.length);

    const Trajectory reference = runSimulation(referenceConfig);
    if (reference.outcome != RunOutcome::Completed)
        throw std::runtime_error("error study: reference run is unstable");

    // reference positions at the stations for every record
    const SplineBasis refBasis =
        buildBasis(referenceConfig.controlCount, referenceConfig.properties.length);
    const auto nRecords = static_cast<Index>(reference.records.size());
    std::vector<MatX> refPositions(static_cast<size_t>(nRecords));
    for (Index r = 0; r < nRecords; ++r) {
        MatX pos(kErrorStudyStations, 3);
        for (Index s = 0; s < kErrorStudyStations; ++s)
            pos.row(s) = evalCurve(refBasis, reference.records[static_cast<size_t>(r)].ctrl,
                                   report.stationParameters[s], 0)
                             .head<3>()
                             .transpose();
        refPositions[static_cast<size_t>(r)] = pos;
    }

    auto timeBin = [&](Scalar t) {
        const Scalar span = referenceConfig.duration;
        auto bin = static_cast<Index>(std::floor(t / span * kErrorStudyTimeBins));
        return std::clamp<Index>(bin, 0, kErrorStudyTimeBins - 1);
    };

    auto runVariant = [&](Index nu, Index ns) {
        SimulationConfig cfg = referenceConfig;
        cfg.controlCount = nu;
        cfg.sampleCount = ns;
        ErrorStudyVariant variant;
        variant.controlCount = nu;
        variant.sampleCount = ns;

        const Trajectory traj = runSimulation(cfg);
        if (traj.outcome != RunOutcome::Completed) {
            variant.unstable = true;
            return variant;
        }
        if (traj.records.size() != reference.records.size())
            throw std::runtime_error("error study: variant record grid mismatch");

        variant.wallSeconds = medianWallSeconds(cfg, options.timingRepetitions,
                                                nullptr, nullptr, nullptr);

        const SplineBasis basis = buildBasis(nu, cfg.properties.length);
        MatX errorSum = MatX::Zero(kErrorStudyStations, kErrorStudyTimeBins);
        MatX errorCount = MatX::Zero(kErrorStudyStations, kErrorStudyTimeBins);
        for (Index r = 0; r < nRecords; ++r) {
            const auto& rec = traj.records[static_cast<size_t>(r)];
            const Index bin = timeBin(rec.t);
            for (Index s = 0; s < kErrorStudyStations; ++s) {
                const Vec3 pos =
                    evalCurve(basis, rec.ctrl, report.stationParameters[s], 0).head<3>();
                const Scalar err =
                    (pos - refPositions[static_cast<size_t>(r)].row(s).transpose()).norm();
                errorSum(s, bin) += err;
                errorCount(s, bin) += 1;
            }
        }
        variant.errorGrid =
            errorSum.cwiseQuotient(errorCount.cwiseMax(Scalar(1)));
        variant.errorVsStation = variant.errorGrid.rowwise().mean();
        variant.errorVsTime = variant.errorGrid.colwise().mean().transpose();
        variant.meanError = variant.errorGrid.mean();
        return variant;
    };

    const auto nNu = static_cast<Index>(controlCounts.size());
    const auto nNs = static_cast<Index>(sampleCounts.size());
    report.meanErrorByResolution = MatX::Constant(nNu, nNs, std::nan(""));
    report.wallSecondsByResolution = MatX::Constant(nNu, nNs, std::nan(""));
    for (Index i = 0; i < nNu; ++i) {
        for (Index j = 0; j < nNs; ++j) {
            ErrorStudyVariant variant = runVariant(controlCounts[static_cast<size_t>(i)],
                                                   sampleCounts[static_cast<size_t>(j)]);
            if (!variant.unstable) {
                report.meanErrorByResolution(i, j) = variant.meanError;
                report.wallSecondsByResolution(i, j) = variant.wallSeconds;
            }
            report.variants.push_back(std::move(variant));
        }
    }
    // the reference compared against itself: errors identically zero
    report.variants.push_back(
        runVariant(referenceConfig.controlCount, referenceConfig.sampleCount));

    report.errorVsControlCount = report.meanErrorByResolution.rowwise().mean();
    report.errorVsSampleCount = report.meanErrorByResolution.colwise().mean().transpose();
    return report;
}

MaxStableTauReport maxStableTau(const SimulationConfig& config, IntegratorKind integrator,
                                const MaxStableTauOptions& options) {
    MaxStableTauReport report;
    report.integrator = integrator;

    auto probe = [&](Scalar tau) {
        SimulationConfig cfg = config;
        cfg.step.kind = integrator;
        cfg.step.tau = tau;
        StableTauProbe result;
        result.tau = tau;
        const Trajectory traj = runSimulation(cfg);
        result.outcome = traj.outcome;
        if (traj.outcome == RunOutcome::Completed && traj.records.size() >= 2) {
            Scalar h0 = traj.records.front().energy, maxDev = 0, maxKin = 0;
            for (const auto& r : traj.records) {
                maxDev = std::max(maxDev, std::abs(r.energy - h0 - r.work));
                maxKin = std::max(maxKin, std::abs(r.kinetic));
            }
            const Scalar scale = std::max({std::abs(h0), maxKin, Scalar(1e-30)});
            result.maxRelDeviation = maxDev / scale;
            result.stable = result.maxRelDeviation <= options.energyTolerance;
        }
        report.probes.push_back(result);
        return result.stable;
    };

    Scalar tau = config.step.tau;
    Scalar lo = 0, hi = 0;
    if (probe(tau)) {
        lo = tau;
        while (lo * options.growthFactor <= options.maxTau) {
            const Scalar next = lo * options.growthFactor;
            if (next >= config.duration) break;
            if (probe(next)) {
                lo = next;
            } else {
                hi = next;
                break;
            }
        }
    } else {
        hi = tau;
        Scalar t = tau;
        for (int i = 0; i < options.bisectionIterations && lo == 0; ++i) {
            t /= options.growthFactor;
            if (probe(t)) lo = t;
            else hi = t;
        }
        if (lo == 0) {
            report.maxStableTau = 0;
            report.smallestUnstableTau = hi;
            return report;
        }
    }

    if (hi > 0) {
        for (int i = 0; i < options.bisectionIterations; ++i) {
            const Scalar mid = 0.5 * (lo + hi);
            if (probe(mid)) lo = mid;
            else hi = mid;
        }
    }
    report.maxStableTau = lo;
    report.smallestUnstableTau = hi;
    return report;
}

std::string machineDescriptor() {
    std::string cpu = "unknown cpu";
    std::ifstream info("/proc/cpuinfo");
    std::string line;
    while (std::getline(info, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto pos = line.find(':');
            if (pos != std::string::npos) cpu = line.substr(pos + 2);
            break;
        }
    }
    std::ostringstream out;
    out << cpu << ", " << std::thread::hardware_concurrency() << " hw threads, compiler "
        << __VERSION__;
    return out.str();
}

}  // namespace dlo
