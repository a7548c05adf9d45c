#pragma once

#include <vector>

#include "dlo/integrators.hpp"
#include "dlo/model.hpp"
#include "dlo/scenario.hpp"

namespace dlo {

/// Binds grid, properties, scenario and the frozen mass operator into the
/// stepping interface consumed by the integrators. Constrained DOFs
/// (endpoint y, z, theta) are masked in every rate: their velocities and
/// forces are zero, so pinned positions never move and fixed momenta stay
/// zero. One instance drives one (sequential) simulation.
class DloSystem {
  public:
    explicit DloSystem(const SimulationConfig& config);

    const SampleGrid& grid() const { return grid_; }
    const DloProperties& properties() const { return props_; }
    const Scenario& scenario() const { return scenario_; }
    const MassOperator& mass() const { return mass_; }
    const DloState& initial() const { return initial_; }

    /// Masked velocity map: zero on fixed DOFs, (M^-1 x)_f on free ones.
    VecX applyInverseMass(const VecX& x) const;
    /// Exact inverse of applyInverseMass on the free subspace (plain M v when
    /// nothing is constrained). Keeps velocity-carrying steppers consistent
    /// with the kinetic energy 1/2 p^T M^-1 p evaluated on masked momenta.
    VecX applyMass(const VecX& v) const;
    VecX forces(const VecX& qFlat, Scalar t) const;
    void constrain(VecX& qFlat, VecX& pFlat) const;

    long forceEvalCount() const { return forceEvals_; }
    void resetForceEvalCount() const { forceEvals_ = 0; }

    Scalar potential(const VecX& qFlat) const;
    Scalar kinetic(const VecX& pFlat) const;          ///< 1/2 p^T M^-1 p
    Scalar hamiltonianAt(const VecX& qFlat, const VecX& pFlat) const;

    /// Instantaneous power fed by the scheduled external force,
    /// F(t) . qdot(applyU); zero when no force is scheduled.
    Scalar drivePower(const VecX& qFlat, const VecX& pFlat, Scalar t) const;

  private:
    void mask(VecX& v) const;

    SampleGrid grid_;
    DloProperties props_;
    Scenario scenario_;
    MassOperator mass_;
    DloState initial_;
    std::vector<Index> fixedFlat_;
    std::vector<Index> freeFlat_;
    Eigen::PartialPivLU<MatX> freeInverseMass_;  ///< LU of (M^-1) on free x free
    VecX forceWeights_;  ///< b_i(applyU), empty when no force scheduled

    mutable detail::ModelWorkspace ws_;
    mutable long forceEvals_ = 0;
};

}  // namespace dlo
