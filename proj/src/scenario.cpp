#include "dlo/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace dlo {

ScenarioKind parseScenarioKind(const std::string& name) {
    if (name == "gravity_only") return ScenarioKind::GravityOnly;
    if (name == "sinusoidal_center") return ScenarioKind::SinusoidalCenter;
    throw std::invalid_argument("unknown scenario kind: " + name);
}

std::string scenarioKindName(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::GravityOnly: return "gravity_only";
        case ScenarioKind::SinusoidalCenter: return "sinusoidal_center";
    }
    throw std::invalid_argument("unknown scenario kind");
}

IntegratorKind parseIntegratorKind(const std::string& name) {
    if (name == "symplectic4") return IntegratorKind::Symplectic4;
    if (name == "rk4") return IntegratorKind::Rk4;
    if (name == "zhai") return IntegratorKind::Zhai;
    throw std::invalid_argument("unknown integrator: " + name);
}

std::string integratorKindName(IntegratorKind kind) {
    switch (kind) {
        case IntegratorKind::Symplectic4: return "symplectic4";
        case IntegratorKind::Rk4: return "rk4";
        case IntegratorKind::Zhai: return "zhai";
    }
    throw std::invalid_argument("unknown integrator kind");
}

Scenario buildScenario(ScenarioKind kind, Scalar length, Index controlCount,
                       const std::optional<ForceSchedule>& forceOverride) {
    if (controlCount < 2) throw std::invalid_argument("buildScenario: need two endpoints");
    Scenario s;
    s.springRestFirst = 0.0;
    s.springRestLast = length;
    // endpoints slide along x only
    for (Index i : {Index(0), controlCount - 1})
        for (int c : {kCompY, kCompZ, kCompTheta}) s.fixedDofs.emplace_back(i, c);

    switch (kind) {
        case ScenarioKind::GravityOnly:
            break;
        case ScenarioKind::SinusoidalCenter: {
            ForceSchedule f;
            f.applyU = length / 2;
            s.externalForce = forceOverride.value_or(f);
            break;
        }
        default:
            throw std::invalid_argument("buildScenario: unknown scenario kind");
    }
    if (s.externalForce) {
        const auto& f = *s.externalForce;
        if (!(f.frequency > 0))
            throw std::invalid_argument("buildScenario: force frequency must be positive");
        if (f.applyU < 0 || f.applyU > length)
            throw std::invalid_argument("buildScenario: force location outside the rod");
    }
    if (s.springStiffness < 0)
        throw std::invalid_argument("buildScenario: spring stiffness must be nonnegative");
    return s;
}

VecX externalForceAt(const Scenario& scenario, const SampleGrid& grid, Scalar time) {
    const Index nu = grid.basis.controlCount;
    VecX force = VecX::Zero(kComponents * nu);
    if (!scenario.externalForce) return force;

    const auto& f = *scenario.externalForce;
    const Scalar magnitude = f.amplitude * std::sin(2 * EIGEN_PI * f.frequency * time);
    const VecX weights = evalBasis(grid.basis, f.applyU, 0);
    for (int c = 0; c < 3; ++c)
        force.segment(c * nu, nu) = (magnitude * f.direction[c]) * weights;
    return force;
}

Scenario SimulationConfig::makeScenario() const {
    Scenario s = buildScenario(scenarioKind, properties.length, controlCount, forceOverride);
    s.gravity = gravity;
    s.springStiffness = springStiffness;
    return s;
}

void SimulationConfig::validate() const {
    properties.validate();
    if (controlCount < 4) throw std::invalid_argument("config: n_u must be at least 4");
    if (sampleCount < 2) throw std::invalid_argument("config: n_s must be at least 2");
    if (!(duration > 0)) throw std::invalid_argument("config: duration must be positive");
    if (recordStride < 1) throw std::invalid_argument("config: record stride must be >= 1");
    if (!(step.tau > 0)) throw std::invalid_argument("config: tau must be positive");
    if (springStiffness < 0)
        throw std::invalid_argument("config: spring stiffness must be nonnegative");
    makeScenario();  // surfaces scenario errors early
}

DloState initialState(const SplineBasis& basis) {
    DloState state;
    state.time = 0.0;
    state.ctrl = CtrlMatrix::Zero(basis.controlCount, kComponents);
    state.ctrl.col(kCompX) = grevilleAbscissae(basis);
    state.momenta = CtrlMatrix::Zero(basis.controlCount, kComponents);
    return state;
}

DloState initialState(const SimulationConfig& config) {
    return initialState(buildBasis(config.controlCount, config.properties.length));
}

}  // namespace dlo
