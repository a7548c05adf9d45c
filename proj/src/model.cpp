#include "dlo/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "dlo/scenario.hpp"

namespace dlo {

void DloProperties::validate() const {
    if (!(length > 0) || !(diameter > 0) || !(youngModulus > 0) ||
        !(shearModulus > 0) || !(density > 0))
        throw std::invalid_argument("DloProperties: all physical fields must be positive");
    if (plasticStrain.size() != 0 && plasticStrain.cols() != 3)
        throw std::invalid_argument("DloProperties: plastic strain must have 3 columns");
}

Vec3 stiffnessDiagonal(const DloProperties& props) {
    props.validate();
    const Scalar d2 = props.diameter * props.diameter;
    const Scalar area = EIGEN_PI * d2 / 4;
    return area * Vec3(props.youngModulus,
                       props.shearModulus * d2 / 8,
                       props.youngModulus * d2 / 16);
}

Mat3 stiffnessMatrix(const DloProperties& props) {
    return stiffnessDiagonal(props).asDiagonal();
}

MassOperator::MassOperator(MatX matrix) : matrix_(std::move(matrix)), lu_(matrix_) {
    if (lu_.rcond() < 1e-14)
        throw std::runtime_error("MassOperator: matrix is numerically singular");
}

VecX MassOperator::solve(const VecX& rhs) const { return lu_.solve(rhs); }

VecX MassOperator::apply(const VecX& v) const { return matrix_ * v; }

MassOperator assembleMass(const SampleGrid& grid, const DloProperties& props,
                          const CtrlMatrix& referenceCtrl) {
    props.validate();
    const Index nu = grid.basis.controlCount;
    if (referenceCtrl.rows() != nu)
        throw std::invalid_argument("assembleMass: control row count does not match basis");

    // arc-length weights |r'| of the reference configuration
    const MatX d1 = grid.basisDerivs[1] * referenceCtrl.leftCols<3>();
    const VecX speed = d1.rowwise().norm();

    const VecX w = grid.quadWeights.cwiseProduct(speed);
    MatX gram = grid.basisDerivs[0].transpose() * w.asDiagonal() * grid.basisDerivs[0];
    gram = ((gram + gram.transpose()) / 2).eval();  // exactly symmetric

    const Scalar mu = props.linearDensity();
    const Scalar inertia = props.polarInertia();

    MatX m = MatX::Zero(kComponents * nu, kComponents * nu);
    for (int c = 0; c < 3; ++c) m.block(c * nu, c * nu, nu, nu) = mu * gram;
    m.block(3 * nu, 3 * nu, nu, nu) = inertia * gram;

    MassOperator mass(std::move(m));

    // SPD spot check on the assembled operator
    std::mt19937 rng(12345);
    std::normal_distribution<Scalar> normal(0.0, 1.0);
    for (int trial = 0; trial < 4; ++trial) {
        VecX v(kComponents * nu);
        for (Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
        if (!(v.dot(mass.apply(v)) > 0))
            throw std::runtime_error("assembleMass: operator is not positive definite "
                                     "(degenerate reference configuration?)");
    }
    return mass;
}

namespace {

struct SampleKinematics {
    Vec3 d1, d2, d3;
    Scalar theta1;
    Scalar speed;      // |r'|
    Vec3 cross;        // r' x r''
    Scalar crossSq;
    bool degenerate;   // |C|^2 below threshold
};

inline SampleKinematics sampleKinematics(const detail::ModelWorkspace& ws, Index k) {
    SampleKinematics s;
    s.d1 = ws.d1.row(k).transpose();
    s.d2 = ws.d2.row(k).transpose();
    s.d3 = ws.d3.row(k).transpose();
    s.theta1 = ws.theta1[k];
    s.speed = s.d1.norm();
    s.cross = s.d1.cross(s.d2);
    s.crossSq = s.cross.squaredNorm();
    const Scalar sp2 = s.speed * s.speed;
    s.degenerate = s.crossSq < kCrossDegeneracyFactor * sp2 * sp2;
    return s;
}

// |C|^2 + (kappa_fade |r'|^3)^2, the faded torsion denominator
inline Scalar torsionDenominator(const SampleKinematics& s) {
    const Scalar sp3 = s.speed * s.speed * s.speed;
    const Scalar floor = kTorsionFadeCurvature * sp3;
    return s.crossSq + floor * floor;
}

inline Vec3 strainAt(const SampleKinematics& s, Scalar* gammaOut) {
    Scalar gamma = 0, bending = 0;
    if (!s.degenerate) {
        gamma = s.cross.dot(s.d3) / torsionDenominator(s);
        bending = std::sqrt(s.crossSq) / (s.speed * s.speed * s.speed);
    }
    if (gammaOut) *gammaOut = gamma;
    return {1.0 - s.speed, s.theta1 - gamma, bending};
}

}  // namespace

std::vector<StrainSample> computeStrains(const SampleGrid& grid, const CtrlMatrix& ctrl) {
    if (ctrl.rows() != grid.basis.controlCount)
        throw std::invalid_argument("computeStrains: control row count does not match grid");

    detail::ModelWorkspace ws;
    ws.d1 = grid.basisDerivs[1] * ctrl.leftCols<3>();
    ws.d2 = grid.basisDerivs[2] * ctrl.leftCols<3>();
    ws.d3 = grid.basisDerivs[3] * ctrl.leftCols<3>();
    ws.theta1 = grid.basisDerivs[1] * ctrl.col(kCompTheta);

    std::vector<StrainSample> out(static_cast<size_t>(grid.sampleCount));
    for (Index k = 0; k < grid.sampleCount; ++k) {
        const SampleKinematics s = sampleKinematics(ws, k);
        if (s.speed == 0)
            throw std::runtime_error("computeStrains: |r'| = 0 at a sample point "
                                     "(cusp; dynamics undefined)");
        StrainSample& sample = out[static_cast<size_t>(k)];
        const Vec3 eps = strainAt(s, &sample.gamma);
        sample.stretch = eps[0];
        sample.torsion = eps[1];
        sample.bending = eps[2];
        sample.cross = s.cross;
    }
    return out;
}

namespace detail {

PotentialTerms evaluatePotential(const SampleGrid& grid, const DloProperties& props,
                                 const CtrlMatrix& ctrl, const Scenario* scenario,
                                 ModelWorkspace& ws, CtrlMatrix* gradStrain,
                                 CtrlMatrix* gradOther) {
    const Index nu = grid.basis.controlCount;
    const Index ns = grid.sampleCount;
    if (ctrl.rows() != nu)
        throw std::invalid_argument("evaluatePotential: control row count does not match grid");
    if (props.plasticStrain.size() != 0 && props.plasticStrain.rows() != ns)
        throw std::invalid_argument("evaluatePotential: plastic strain rows must equal n_s");

    const auto& b0 = grid.basisDerivs[0];
    const auto& b1 = grid.basisDerivs[1];
    const auto& b2 = grid.basisDerivs[2];
    const auto& b3 = grid.basisDerivs[3];
    const Vec3 stiffness = stiffnessDiagonal(props);
    const Scalar mu = props.linearDensity();
    const bool hasEps0 = props.plasticStrain.size() != 0;

    ws.d1.noalias() = b1 * ctrl.leftCols<3>();
    ws.d2.noalias() = b2 * ctrl.leftCols<3>();
    ws.d3.noalias() = b3 * ctrl.leftCols<3>();
    ws.theta1.noalias() = b1 * ctrl.col(kCompTheta);

    const bool wantGravity = scenario != nullptr;
    if (wantGravity) ws.pos.noalias() = b0 * ctrl.leftCols<3>();

    const bool wantGradS = gradStrain != nullptr;
    const bool wantGradO = gradOther != nullptr && scenario != nullptr;
    if (wantGradS) {
        ws.v1.resize(ns, 3);
        ws.v2.resize(ns, 3);
        ws.v3.resize(ns, 3);
        ws.t1.resize(ns);
    }
    if (wantGradO) {
        ws.gravityWeight0.resize(ns);
        ws.gravityWeight1.resize(ns, 3);
    }

    PotentialTerms terms;
    for (Index k = 0; k < ns; ++k) {
        const SampleKinematics s = sampleKinematics(ws, k);
        if (s.speed == 0)
            throw std::runtime_error("evaluatePotential: |r'| = 0 at a sample point "
                                     "(cusp; dynamics undefined)");
        const Scalar w = grid.quadWeights[k];

        Scalar gamma = 0;
        Vec3 eps = strainAt(s, &gamma);
        if (hasEps0) eps -= props.plasticStrain.row(k).transpose();

        const Vec3 g = stiffness.cwiseProduct(eps);  // H (eps - eps0)
        const Scalar density = 0.5 * eps.dot(g);     // strain energy density
        terms.strain += w * density * s.speed;

        const Vec3 rhat = s.d1 / s.speed;

        if (wantGradS) {
            // factor vectors multiplying b', b'' and b''' rows in the
            // position gradient of (density * |r'|)
            Vec3 f1 = -g[0] * s.speed * rhat + density * rhat;
            Vec3 f2 = Vec3::Zero();
            Vec3 f3 = Vec3::Zero();
            if (!s.degenerate) {
                const Scalar crossNorm = std::sqrt(s.crossSq);
                const Vec3 chat = s.cross / crossNorm;
                const Vec3 v1 = s.d2.cross(chat);   // d|C| b' factor
                const Vec3 v2 = chat.cross(s.d1);   // d|C| b'' factor
                const Vec3 w1 = s.d2.cross(s.d3);   // d(C.r''') b' factor
                const Vec3 w2 = s.d3.cross(s.d1);   // d(C.r''') b'' factor

                const Scalar sp3 = s.speed * s.speed * s.speed;
                const Scalar bending = crossNorm / sp3;
                const Scalar denom = torsionDenominator(s);
                const Scalar fadeSq = denom - s.crossSq;  // (kappa_fade |r'|^3)^2
                // torsion: d eps_t = -d gamma over positions; the faded
                // denominator contributes through both |C|^2 and |r'|^6
                f1 += s.speed * (-g[1]) *
                      ((w1 - gamma * (2 * crossNorm * v1 + (6 * fadeSq / s.speed) * rhat)) /
                       denom);
                f2 += s.speed * (-g[1]) * ((w2 - gamma * 2 * crossNorm * v2) / denom);
                f3 += s.speed * (-g[1]) * (s.cross / denom);
                // bending
                f1 += s.speed * g[2] * (v1 / sp3 - (3 * bending / s.speed) * rhat);
                f2 += s.speed * g[2] * (v2 / sp3);
            }
            ws.v1.row(k) = (w * f1).transpose();
            ws.v2.row(k) = (w * f2).transpose();
            ws.v3.row(k) = (w * f3).transpose();
            ws.t1[k] = w * s.speed * g[1];  // d eps_t / d theta' = 1
        }

        if (wantGravity) {
            const Scalar gDotR = scenario->gravity.dot(ws.pos.row(k).transpose());
            terms.gravity -= w * mu * gDotR * s.speed;
            if (wantGradO) {
                ws.gravityWeight0[k] = -w * mu * s.speed;
                ws.gravityWeight1.row(k) = (-w * mu * gDotR) * rhat.transpose();
            }
        }
    }

    if (wantGradS) {
        gradStrain->resize(nu, kComponents);
        gradStrain->leftCols<3>().noalias() = b1.transpose() * ws.v1;
        gradStrain->leftCols<3>().noalias() += b2.transpose() * ws.v2;
        gradStrain->leftCols<3>().noalias() += b3.transpose() * ws.v3;
        gradStrain->col(kCompTheta).noalias() = b1.transpose() * ws.t1;
    }

    if (scenario) {
        const Scalar kx = scenario->springStiffness;
        const Scalar dxFirst = ctrl(0, kCompX) - scenario->springRestFirst;
        const Scalar dxLast = ctrl(nu - 1, kCompX) - scenario->springRestLast;
        terms.spring = 0.5 * kx * (dxFirst * dxFirst + dxLast * dxLast);

        if (wantGradO) {
            gradOther->setZero(nu, kComponents);
            gradOther->leftCols<3>().noalias() =
                (b0.transpose() * ws.gravityWeight0) * scenario->gravity.transpose();
            gradOther->leftCols<3>().noalias() += b1.transpose() * ws.gravityWeight1;
            (*gradOther)(0, kCompX) += kx * dxFirst;
            (*gradOther)(nu - 1, kCompX) += kx * dxLast;
        }
    } else if (gradOther) {
        gradOther->setZero(nu, kComponents);
    }

    return terms;
}

}  // namespace detail

Scalar potentialEnergy(const SampleGrid& grid, const DloProperties& props,
                       const CtrlMatrix& ctrl, const Scenario& scenario) {
    detail::ModelWorkspace ws;
    return detail::evaluatePotential(grid, props, ctrl, &scenario, ws, nullptr, nullptr)
        .total();
}

VecX elasticForces(const SampleGrid& grid, const DloProperties& props,
                   const CtrlMatrix& ctrl) {
    detail::ModelWorkspace ws;
    CtrlMatrix gradStrain;
    detail::evaluatePotential(grid, props, ctrl, nullptr, ws, &gradStrain, nullptr);
    return -flatView(gradStrain);
}

VecX gradPotential(const SampleGrid& grid, const DloProperties& props,
                   const CtrlMatrix& ctrl, const Scenario& scenario, Scalar time) {
    detail::ModelWorkspace ws;
    CtrlMatrix gradStrain, gradOther;
    detail::evaluatePotential(grid, props, ctrl, &scenario, ws, &gradStrain, &gradOther);
    VecX grad = flatView(gradStrain) + flatView(gradOther);
    if (scenario.externalForce) grad -= externalForceAt(scenario, grid, time);
    return grad;
}

VecX accelerations(const MassOperator& mass, const VecX& force) { return mass.solve(force); }

VecX toMomenta(const MassOperator& mass, const VecX& velocities) {
    return mass.apply(velocities);
}

VecX toVelocities(const MassOperator& mass, const VecX& momenta) {
    return mass.solve(momenta);
}

Scalar hamiltonian(const MassOperator& mass, const SampleGrid& grid,
                   const DloProperties& props, const DloState& state,
                   const Scenario& scenario) {
    const VecX p = flatView(state.momenta);
    const Scalar kinetic = 0.5 * p.dot(mass.solve(p));
    return kinetic + potentialEnergy(grid, props, state.ctrl, scenario);
}

}  // namespace dlo
