#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dlo/integrators.hpp"
#include "dlo/model.hpp"
#include "dlo/spline.hpp"

namespace dlo {

/// Single-point sinusoidal force schedule:
/// F(t) = amplitude * sin(2 pi frequency t) * direction, applied at
/// parameter applyU and distributed to control DOFs by basis weights.
struct ForceSchedule {
    Scalar amplitude = 1.0;    ///< N
    Scalar frequency = 0.5;    ///< Hz
    Vec3 direction = Vec3::UnitY();
    Scalar applyU = 1.0;       ///< m, in [0, length]
};

/// Boundary conditions and loading for one simulation case. The endpoints
/// are constrained to slide along the x-axis (y, z, theta pinned) and are
/// anchored by axial springs to their rest positions.
struct Scenario {
    Vec3 gravity = Vec3(0, 0, -9.81);
    Scalar springStiffness = 1e4;  ///< K_x, N/m
    std::vector<std::pair<Index, int>> fixedDofs;  ///< (control index, component)
    Scalar springRestFirst = 0.0;  ///< rest x of first endpoint
    Scalar springRestLast = 2.0;   ///< rest x of last endpoint
    std::optional<ForceSchedule> externalForce;
};

enum class ScenarioKind { GravityOnly, SinusoidalCenter };

ScenarioKind parseScenarioKind(const std::string& name);
std::string scenarioKindName(ScenarioKind kind);

/// The two reference cases: gravity only, or gravity plus a sinusoidal force
/// at the rod center in the y-direction. controlCount fixes the endpoint DOF
/// indices; overrides may replace the default force schedule.
Scenario buildScenario(ScenarioKind kind, Scalar length, Index controlCount,
                       const std::optional<ForceSchedule>& forceOverride = std::nullopt);

/// Generalized external force vector at time t (zero when nothing is
/// scheduled). Gravity is not included here; it is part of the potential.
VecX externalForceAt(const Scenario& scenario, const SampleGrid& grid, Scalar time);

/// Full simulation description; value object, freely copyable.
struct SimulationConfig {
    Index controlCount = 9;    ///< n_u
    Index sampleCount = 101;   ///< n_s
    Scalar duration = 10.0;    ///< s
    Index recordStride = 10;   ///< steps between trajectory records
    StepConfig step;
    DloProperties properties;
    ScenarioKind scenarioKind = ScenarioKind::GravityOnly;
    std::optional<ForceSchedule> forceOverride;
    Vec3 gravity = Vec3(0, 0, -9.81);
    Scalar springStiffness = 1e4;

    Scenario makeScenario() const;
    void validate() const;
};

/// Straight rest state along the x-axis: control x-values at the Greville
/// abscissae (so the curve is exactly x(u) = u), everything else zero.
DloState initialState(const SimulationConfig& config);
DloState initialState(const SplineBasis& basis);

}  // namespace dlo
