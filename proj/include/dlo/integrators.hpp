#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <string>

#include "dlo/types.hpp"

namespace dlo {

/// Forest-Ruth composition coefficients for the fourth-order symplectic
/// scheme, beta = 2^(1/3):
///   c1 = c4 = 1/(2(2-beta)),  c2 = c3 = (1-beta)/(2(2-beta)),
///   d1 = d3 = 1/(2-beta),     d2 = -beta/(2-beta),  d4 = 0.
/// Both families sum to 1. d4 = 0 means three force evaluations per step.
struct SymplecticCoefficients {
    std::array<Scalar, 4> c;
    std::array<Scalar, 4> d;
    Scalar beta;
};

inline SymplecticCoefficients frCoefficients() {
    const Scalar beta = std::cbrt(2.0);
    const Scalar w = 2.0 - beta;
    SymplecticCoefficients k{};
    k.beta = beta;
    k.c = {1 / (2 * w), (1 - beta) / (2 * w), (1 - beta) / (2 * w), 1 / (2 * w)};
    k.d = {1 / w, -beta / w, 1 / w, 0.0};
    return k;
}

enum class IntegratorKind { Symplectic4, Rk4, Zhai };

IntegratorKind parseIntegratorKind(const std::string& name);
std::string integratorKindName(IntegratorKind kind);

struct StepConfig {
    Scalar tau = 2e-3;  ///< time step-size, s
    IntegratorKind kind = IntegratorKind::Symplectic4;
    Scalar zhaiPsi = 0.5;
    Scalar zhaiPhi = 0.5;
};

struct StepDiagnostics {
    long forceEvals = 0;   ///< momentum-rate evaluations during this step
    long long wallNanos = 0;
    /// Total energy after the step. Steppers leave this NaN; drivers that
    /// monitor energy fill it in (the simulation loop stores per-record
    /// energies in the trajectory instead of paying for one every step).
    Scalar energy = std::numeric_limits<Scalar>::quiet_NaN();
};

/// A separable Hamiltonian system in canonical coordinates (q, p):
///  - applyInverseMass: dK/dp = M^-1 x (also used to map forces to
///    accelerations); constrained DOFs masked.
///  - applyMass: momentum map inverse to applyInverseMass on the free
///    subspace; plain M v when nothing is constrained.
///  - forces: pdot = -dU/dq + F_ext(t); each call counts as one force
///    evaluation.
///  - constrain: pin fixed positions, zero fixed momenta.
template <typename S>
concept SeparableSystem = requires(const S s, const VecX& x, VecX& q, VecX& p, double t) {
    { s.applyInverseMass(x) } -> std::convertible_to<VecX>;
    { s.applyMass(x) } -> std::convertible_to<VecX>;
    { s.forces(x, t) } -> std::convertible_to<VecX>;
    { s.constrain(q, p) };
    { s.forceEvalCount() } -> std::convertible_to<long>;
};

/// Fixed-step explicit stepper over a separable system. One instance drives
/// one simulation; the Zhai variant keeps its acceleration history here.
template <SeparableSystem System>
class Stepper {
  public:
    Stepper(const StepConfig& config, const System& system)
        : config_(config), system_(&system), coeffs_(frCoefficients()) {
        switch (config.kind) {
            case IntegratorKind::Symplectic4:
            case IntegratorKind::Rk4:
            case IntegratorKind::Zhai:
                break;
            default:
                throw std::invalid_argument("Stepper: unknown integrator kind");
        }
        if (!std::isfinite(config.tau) || config.tau == 0)
            throw std::invalid_argument("Stepper: tau must be finite and nonzero");
        if (!std::isfinite(config.zhaiPsi) || !std::isfinite(config.zhaiPhi))
            throw std::invalid_argument("Stepper: Zhai parameters must be finite");
    }

    IntegratorKind kind() const { return config_.kind; }

    /// Advance (q, p) from time t by tau. Returns per-step diagnostics; a
    /// non-finite result is the caller's instability signal.
    StepDiagnostics step(VecX& q, VecX& p, Scalar t) {
        const auto start = std::chrono::steady_clock::now();
        const long evalsBefore = system_->forceEvalCount();
        switch (config_.kind) {
            case IntegratorKind::Symplectic4: stepSymplectic(q, p, t); break;
            case IntegratorKind::Rk4: stepRk4(q, p, t); break;
            case IntegratorKind::Zhai: stepZhai(q, p, t); break;
        }
        StepDiagnostics diag;
        diag.forceEvals = system_->forceEvalCount() - evalsBefore;
        diag.wallNanos = std::chrono::duration_cast<std::chrono::nanoseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        return diag;
    }

  private:
    /// Drift-kick composition q_k = q_{k-1} + c_k tau M^-1 p_{k-1},
    /// p_k = p_{k-1} - d_k tau dU/dq(q_k). The d4 = 0 kick is skipped, so the
    /// step costs exactly three force evaluations.
    void stepSymplectic(VecX& q, VecX& p, Scalar t) {
        const Scalar tau = config_.tau;
        Scalar tq = t;  // time advanced along the drift stages
        for (int k = 0; k < 4; ++k) {
            q += (coeffs_.c[k] * tau) * system_->applyInverseMass(p);
            tq += coeffs_.c[k] * tau;
            if (coeffs_.d[k] != 0.0) p += (coeffs_.d[k] * tau) * system_->forces(q, tq);
        }
    }

    /// Classical fourth-order Runge-Kutta on (qdot, pdot) = (M^-1 p, f(q, t)).
    void stepRk4(VecX& q, VecX& p, Scalar t) {
        const Scalar tau = config_.tau;
        const VecX kq1 = system_->applyInverseMass(p);
        const VecX kp1 = system_->forces(q, t);
        const VecX kq2 = system_->applyInverseMass(p + (tau / 2) * kp1);
        const VecX kp2 = system_->forces(q + (tau / 2) * kq1, t + tau / 2);
        const VecX kq3 = system_->applyInverseMass(p + (tau / 2) * kp2);
        const VecX kp3 = system_->forces(q + (tau / 2) * kq2, t + tau / 2);
        const VecX kq4 = system_->applyInverseMass(p + tau * kp3);
        const VecX kp4 = system_->forces(q + tau * kq3, t + tau);
        q += (tau / 6) * (kq1 + 2 * kq2 + 2 * kq3 + kq4);
        p += (tau / 6) * (kp1 + 2 * kp2 + 2 * kp3 + kp4);
    }

    /// Two-parameter explicit extrapolation using the current and previous
    /// accelerations:
    ///   q_{n+1} = q_n + tau v_n + (1/2+psi) tau^2 a_n - psi tau^2 a_{n-1}
    ///   v_{n+1} = v_n + (1+phi) tau a_n - phi tau a_{n-1}
    /// One new force evaluation per step once primed. The first step is
    /// delegated to the symplectic scheme to populate the history.
    void stepZhai(VecX& q, VecX& p, Scalar t) {
        const Scalar tau = config_.tau;
        if (!primed_) {
            zhaiAccPrev_ = system_->applyInverseMass(system_->forces(q, t));
            stepSymplectic(q, p, t);
            zhaiVel_ = system_->applyInverseMass(p);
            primed_ = true;
            return;
        }
        const VecX acc = system_->applyInverseMass(system_->forces(q, t));
        q += tau * zhaiVel_ + (tau * tau) * ((0.5 + config_.zhaiPsi) * acc -
                                             config_.zhaiPsi * zhaiAccPrev_);
        zhaiVel_ += tau * ((1.0 + config_.zhaiPhi) * acc - config_.zhaiPhi * zhaiAccPrev_);
        zhaiAccPrev_ = acc;
        p = system_->applyMass(zhaiVel_);
        system_->constrain(q, p);  // pinned positions and fixed momenta stay exact
    }

    StepConfig config_;
    const System* system_;
    SymplecticCoefficients coeffs_;

    bool primed_ = false;
    VecX zhaiVel_, zhaiAccPrev_;
};

template <SeparableSystem System>
Stepper<System> makeStepper(const StepConfig& config, const System& system) {
    return Stepper<System>(config, system);
}

}  // namespace dlo
