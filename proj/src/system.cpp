#include "dlo/system.hpp"

#include <algorithm>

namespace dlo {

DloSystem::DloSystem(const SimulationConfig& config) {
    config.validate();
    props_ = config.properties;
    grid_ = buildSampleGrid(buildBasis(config.controlCount, props_.length),
                            config.sampleCount);
    scenario_ = config.makeScenario();
    initial_ = initialState(grid_.basis);
    mass_ = assembleMass(grid_, props_, initial_.ctrl);

    for (const auto& [point, comp] : scenario_.fixedDofs)
        fixedFlat_.push_back(flatIndex(point, comp, config.controlCount));
    for (Index i = 0; i < mass_.size(); ++i)
        if (std::find(fixedFlat_.begin(), fixedFlat_.end(), i) == fixedFlat_.end())
            freeFlat_.push_back(i);

    // restriction of M^-1 to the free DOFs; its inverse is the momentum map
    // conjugate to the masked velocity map
    MatX inverseMass(mass_.size(), mass_.size());
    for (Index j = 0; j < mass_.size(); ++j)
        inverseMass.col(j) = mass_.solve(VecX::Unit(mass_.size(), j));
    const auto nFree = static_cast<Index>(freeFlat_.size());
    MatX freeBlock(nFree, nFree);
    for (Index r = 0; r < nFree; ++r)
        for (Index c = 0; c < nFree; ++c)
            freeBlock(r, c) = inverseMass(freeFlat_[static_cast<size_t>(r)],
                                          freeFlat_[static_cast<size_t>(c)]);
    freeInverseMass_.compute(freeBlock);

    if (scenario_.externalForce)
        forceWeights_ = evalBasis(grid_.basis, scenario_.externalForce->applyU, 0);
}

void DloSystem::mask(VecX& v) const {
    for (Index i : fixedFlat_) v[i] = 0.0;
}

VecX DloSystem::applyInverseMass(const VecX& x) const {
    VecX v = mass_.solve(x);
    mask(v);
    return v;
}

VecX DloSystem::applyMass(const VecX& v) const {
    if (fixedFlat_.empty()) return mass_.apply(v);
    const auto nFree = static_cast<Index>(freeFlat_.size());
    VecX vFree(nFree);
    for (Index i = 0; i < nFree; ++i) vFree[i] = v[freeFlat_[static_cast<size_t>(i)]];
    const VecX pFree = freeInverseMass_.solve(vFree);
    VecX p = VecX::Zero(v.size());
    for (Index i = 0; i < nFree; ++i) p[freeFlat_[static_cast<size_t>(i)]] = pFree[i];
    return p;
}

VecX DloSystem::forces(const VecX& qFlat, Scalar t) const {
    ++forceEvals_;
    const CtrlMatrix ctrl = fromFlat(qFlat, grid_.basis.controlCount);
    CtrlMatrix gradStrain, gradOther;
    detail::evaluatePotential(grid_, props_, ctrl, &scenario_, ws_, &gradStrain, &gradOther);
    VecX f = -(flatView(gradStrain) + flatView(gradOther));
    if (scenario_.externalForce) f += externalForceAt(scenario_, grid_, t);
    mask(f);
    return f;
}

void DloSystem::constrain(VecX& qFlat, VecX& pFlat) const {
    const auto pinned = flatView(initial_.ctrl);
    for (Index i : fixedFlat_) {
        qFlat[i] = pinned[i];
        pFlat[i] = 0.0;
    }
}

Scalar DloSystem::potential(const VecX& qFlat) const {
    const CtrlMatrix ctrl = fromFlat(qFlat, grid_.basis.controlCount);
    return detail::evaluatePotential(grid_, props_, ctrl, &scenario_, ws_, nullptr, nullptr)
        .total();
}

Scalar DloSystem::kinetic(const VecX& pFlat) const {
    return 0.5 * pFlat.dot(mass_.solve(pFlat));
}

Scalar DloSystem::hamiltonianAt(const VecX& qFlat, const VecX& pFlat) const {
    return kinetic(pFlat) + potential(qFlat);
}

Scalar DloSystem::drivePower(const VecX& qFlat, const VecX& pFlat, Scalar t) const {
    (void)qFlat;
    if (!scenario_.externalForce) return 0.0;
    const auto& f = *scenario_.externalForce;
    const Scalar magnitude = f.amplitude * std::sin(2 * EIGEN_PI * f.frequency * t);
    const VecX v = mass_.solve(pFlat);
    const Index nu = grid_.basis.controlCount;
    Scalar pointVelocity = 0;  // direction . rdot(applyU)
    for (int c = 0; c < 3; ++c)
        pointVelocity += f.direction[c] * forceWeights_.dot(v.segment(c * nu, nu));
    return magnitude * pointVelocity;
}

}  // namespace dlo
