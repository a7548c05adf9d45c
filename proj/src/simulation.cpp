#include "dlo/simulation.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace dlo {

namespace {

bool stateStable(const VecX& q, const VecX& p, Scalar length) {
    if (!q.allFinite() || !p.allFinite()) return false;
    return q.cwiseAbs().maxCoeff() <= kInstabilityLengthFactor * length;
}

}  // namespace

Trajectory runSimulation(const SimulationConfig& config, const RunOptions& options) {
    config.validate();

    Trajectory traj;
    traj.config = config;

    DloSystem system(config);
    VecX q = flatView(system.initial().ctrl);
    VecX p = flatView(system.initial().momenta);
    system.constrain(q, p);

    const Scalar tau = config.step.tau;
    const long nSteps = static_cast<long>(std::floor(config.duration / tau + 1e-9));
    const Index stride = options.recordFinalOnly ? std::max<long>(nSteps, 1)
                                                 : config.recordStride;

    const bool driven = system.scenario().externalForce.has_value();
    Scalar work = 0;
    auto record = [&](Scalar t, long forceEvals) {
        TrajectoryRecord rec;
        rec.t = t;
        rec.ctrl = fromFlat(q, config.controlCount);
        rec.kinetic = system.kinetic(p);
        rec.energy = rec.kinetic + system.potential(q);
        rec.work = work;
        rec.forceEvals = forceEvals;
        traj.records.push_back(std::move(rec));
    };

    system.resetForceEvalCount();
    record(0.0, 0);

    auto stepper = makeStepper(config.step, system);
    const auto wallStart = std::chrono::steady_clock::now();
    long executed = 0;
    Scalar lastPower = driven ? system.drivePower(q, p, 0.0) : 0.0;
    for (long k = 1; k <= nSteps; ++k) {
        stepper.step(q, p, Scalar(k - 1) * tau);
        executed = k;
        if (!stateStable(q, p, config.properties.length)) {
            traj.outcome = RunOutcome::Unstable;
            traj.unstableStep = k;
            traj.unstableTime = Scalar(k) * tau;
            break;
        }
        if (driven) {  // trapezoidal work accumulation keeps the balance diagnostic honest
            const Scalar power = system.drivePower(q, p, Scalar(k) * tau);
            work += 0.5 * tau * (lastPower + power);
            lastPower = power;
        }
        if (k % stride == 0 || k == nSteps) record(Scalar(k) * tau, system.forceEvalCount());
    }
    traj.wallSeconds = std::chrono::duration<Scalar>(std::chrono::steady_clock::now() -
                                                     wallStart)
                           .count();
    traj.totalSteps = executed;
    traj.totalForceEvals = system.forceEvalCount();
    return traj;
}

EnergyDriftReport energyDriftReport(const Trajectory& trajectory) {
    const auto& recs = trajectory.records;
    if (trajectory.outcome != RunOutcome::Completed)
        throw std::runtime_error("energyDriftReport: trajectory did not complete");
    if (recs.size() < 10)
        throw std::runtime_error("energyDriftReport: need at least 10 records");

    const Scalar h0 = recs.front().energy;
    Scalar maxKinetic = 0;
    for (const auto& r : recs) maxKinetic = std::max(maxKinetic, std::abs(r.kinetic));

    EnergyDriftReport report;
    report.scale = std::max(std::abs(h0), maxKinetic);
    const Scalar safeScale = std::max(report.scale, Scalar(1e-30));

    const auto n = static_cast<Index>(recs.size());
    VecX t(n), dev(n);
    for (Index i = 0; i < n; ++i) {
        t[i] = recs[static_cast<size_t>(i)].t;
        dev[i] = std::abs(recs[static_cast<size_t>(i)].energy - h0 -
                          recs[static_cast<size_t>(i)].work);
    }
    report.maxAbsDeviation = dev.maxCoeff();
    report.maxRelDeviation = report.maxAbsDeviation / safeScale;

    const Scalar tMean = t.mean(), devMean = dev.mean();
    const VecX tc = t.array() - tMean;
    const Scalar stt = tc.squaredNorm();
    report.slope = tc.dot(dev - VecX::Constant(n, devMean)) / stt;
    const VecX residual = dev - VecX::Constant(n, devMean) - report.slope * tc;
    const Scalar sigmaR = std::sqrt(residual.squaredNorm() / Scalar(n - 2));
    report.slopeSigma = sigmaR / std::sqrt(stt);

    const Scalar span = t[n - 1] - t[0];
    const bool significantSlope = std::abs(report.slope) > kDriftSlopeSigmas * report.slopeSigma;
    const bool negligibleDrift =
        std::abs(report.slope) * span <= kDriftNegligibleFraction * safeScale;
    report.verdict = (significantSlope && !negligibleDrift) ? DriftVerdict::Secular
                                                            : DriftVerdict::Bounded;
    return report;
}

std::string outcomeName(RunOutcome outcome) {
    return outcome == RunOutcome::Completed ? "completed" : "unstable";
}

std::string verdictName(DriftVerdict verdict) {
    return verdict == DriftVerdict::Bounded ? "bounded" : "secular";
}

}  // namespace dlo
