#pragma once

#include <vector>

#include "dlo/spline.hpp"
#include "dlo/types.hpp"

namespace dlo {

struct Scenario;

/// Geometry and material of the rod. The stiffness and inertia entries are
/// derived from the circular cross-section of diameter D:
///   linear density  mu = rho * pi * D^2 / 4
///   polar inertia   I  = mu * D^2 / 8
struct DloProperties {
    Scalar length = 2.0;          ///< m
    Scalar diameter = 2e-3;       ///< m
    Scalar youngModulus = 1e8;    ///< Pa
    Scalar shearModulus = 4e7;    ///< Pa
    Scalar density = 1e6;         ///< kg/m^3

    /// Plastic strain per sample point (n_s x 3). Empty means zero. Carried
    /// through the energy as a constant offset; no evolution law.
    MatX plasticStrain;

    Scalar linearDensity() const { return density * EIGEN_PI * diameter * diameter / 4; }
    Scalar polarInertia() const { return linearDensity() * diameter * diameter / 8; }

    void validate() const;
};

/// Element stiffness diag((pi D^2/4) * [E, G D^2/8, E D^2/16]) acting on the
/// (stretch, torsion, bending) strain vector.
Vec3 stiffnessDiagonal(const DloProperties& props);
Mat3 stiffnessMatrix(const DloProperties& props);

/// Canonical coordinates of the discretized rod at one instant.
struct DloState {
    Scalar time = 0.0;
    CtrlMatrix ctrl;     ///< control-point configuration q, n_u x 4
    CtrlMatrix momenta;  ///< conjugate momenta p, same shape
};

/// Strain measures at one sample point:
///   stretch  eps_s = 1 - |r'|
///   torsion  eps_t = theta' - gamma,  gamma = (C . r''') / |C|^2
///   bending  eps_b = |C| / |r'|^3,    C = r' x r''
/// When |C|^2 falls below the degeneracy threshold (locally straight curve),
/// bending and gamma are zero by continuity.
struct StrainSample {
    Scalar stretch = 0;
    Scalar torsion = 0;
    Scalar bending = 0;
    Scalar gamma = 0;
    Vec3 cross = Vec3::Zero();
};

/// Degeneracy rule: |C|^2 < kCrossDegeneracyFactor * |r'|^4  =>  eps_b = gamma = 0.
constexpr Scalar kCrossDegeneracyFactor = 1e-12;

/// The Frenet torsion reference gamma = (C . r''')/|C|^2 is ill-posed near
/// straight configurations: its position gradient grows like 1/|C|, which
/// makes the momentum rates arbitrarily stiff while a straight rod picks up
/// its first out-of-plane curvature. gamma is therefore evaluated with a
/// smoothly faded denominator |C|^2 + (kappa_fade |r'|^3)^2, which leaves
/// curvatures well above kappa_fade (in 1/m) essentially exact and rolls the
/// reference off to zero below it, keeping the potential C^1 everywhere.
constexpr Scalar kTorsionFadeCurvature = 0.2;

/// Generalized mass operator assembled once from a reference configuration
/// and held constant, so the kinetic energy stays a separable quadratic form
/// of the momenta. Block diagonal over components: mu*B for x, y, z and I*B
/// for theta, with B the basis Gram matrix under the quadrature rule.
class MassOperator {
  public:
    MassOperator() = default;
    explicit MassOperator(MatX matrix);

    const MatX& matrix() const { return matrix_; }
    Index size() const { return matrix_.rows(); }

    VecX solve(const VecX& rhs) const;  ///< M^-1 rhs via cached LU
    VecX apply(const VecX& v) const;    ///< M v

  private:
    MatX matrix_;
    Eigen::PartialPivLU<MatX> lu_;
};

/// M_ij = integral b_i b_j J |r'| du on the grid, with |r'| frozen at the
/// reference configuration. Throws on a degenerate (non-SPD) result, e.g.
/// coincident control points.
MassOperator assembleMass(const SampleGrid& grid, const DloProperties& props,
                          const CtrlMatrix& referenceCtrl);

std::vector<StrainSample> computeStrains(const SampleGrid& grid, const CtrlMatrix& ctrl);

/// Total potential: strain energy + gravity + endpoint springs,
///   U = 1/2 integral (eps - eps0)^T H (eps - eps0) |r'| du
///       - integral mu (g . r) |r'| du + 1/2 K_x sum (x_e - x_e0)^2.
Scalar potentialEnergy(const SampleGrid& grid, const DloProperties& props,
                       const CtrlMatrix& ctrl, const Scenario& scenario);

/// Elastic forces P = -dU_strain/dq, flattened component-blocked. Exact
/// gradient of the implemented strain energy, including the variation of the
/// arc-length weight |r'|.
VecX elasticForces(const SampleGrid& grid, const DloProperties& props,
                   const CtrlMatrix& ctrl);

/// dU/dq - F_external(t): the momentum-update vector. Gravity and springs are
/// differentiated analytically; the scheduled point force is distributed to
/// control DOFs by basis weights.
VecX gradPotential(const SampleGrid& grid, const DloProperties& props,
                   const CtrlMatrix& ctrl, const Scenario& scenario, Scalar time);

/// Solve M qdd = force on the cached factorization.
VecX accelerations(const MassOperator& mass, const VecX& force);

VecX toMomenta(const MassOperator& mass, const VecX& velocities);
VecX toVelocities(const MassOperator& mass, const VecX& momenta);

/// Separable Hamiltonian H = 1/2 p^T M^-1 p + U(q) with the frozen mass
/// operator; the conserved quantity monitored by drift diagnostics.
Scalar hamiltonian(const MassOperator& mass, const SampleGrid& grid,
                   const DloProperties& props, const DloState& state,
                   const Scenario& scenario);

namespace detail {

/// Scratch buffers for energy/gradient assembly, reused across evaluations
/// of one simulation. Not safe to share between concurrently stepped systems.
struct ModelWorkspace {
    MatX pos, d1, d2, d3;       // n_s x 3 curve position and derivatives
    VecX theta1;                // n_s
    MatX v1, v2, v3;            // n_s x 3 gradient factors (positions)
    VecX t1;                    // n_s gradient factor (theta)
    VecX gravityWeight0;        // n_s
    MatX gravityWeight1;        // n_s x 3
};

struct PotentialTerms {
    Scalar strain = 0;
    Scalar gravity = 0;
    Scalar spring = 0;
    Scalar total() const { return strain + gravity + spring; }
};

/// Shared energy/gradient core. When gradStrain/gradOther are non-null they
/// receive the exact gradients of the strain term and of gravity+springs.
PotentialTerms evaluatePotential(const SampleGrid& grid, const DloProperties& props,
                                 const CtrlMatrix& ctrl, const Scenario* scenario,
                                 ModelWorkspace& ws, CtrlMatrix* gradStrain,
                                 CtrlMatrix* gradOther);

}  // namespace detail

}  // namespace dlo
