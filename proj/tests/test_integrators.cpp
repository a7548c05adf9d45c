#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dlo/integrators.hpp"
#include "dlo/system.hpp"
#include "oracles.hpp"

using namespace dlo;

namespace {

/// Unit harmonic oscillator, H = p^2/2 + q^2/2.
struct Oscillator {
    Scalar mass = 1.0;
    Scalar stiffness = 1.0;
    mutable long evals = 0;

    VecX applyInverseMass(const VecX& x) const { return x / mass; }
    VecX applyMass(const VecX& v) const { return v * mass; }
    VecX forces(const VecX& q, double) const {
        ++evals;
        return -stiffness * q;
    }
    void constrain(VecX&, VecX&) const {}
    long forceEvalCount() const { return evals; }
};

struct FreeFlight {
    mutable long evals = 0;
    VecX applyInverseMass(const VecX& x) const { return x; }
    VecX applyMass(const VecX& v) const { return v; }
    VecX forces(const VecX& q, double) const {
        ++evals;
        return VecX::Zero(q.size());
    }
    void constrain(VecX&, VecX&) const {}
    long forceEvalCount() const { return evals; }
};

Scalar oscillatorGlobalError(IntegratorKind kind, Scalar tau, Scalar tEnd) {
    Oscillator sys;
    StepConfig config;
    config.kind = kind;
    config.tau = tau;
    auto stepper = makeStepper(config, sys);
    VecX q = VecX::Constant(1, 1.0), p = VecX::Zero(1);
    const long n = std::lround(tEnd / tau);
    for (long k = 0; k < n; ++k) stepper.step(q, p, Scalar(k) * tau);
    double qe, pe;
    oracle::oscillatorExact(1.0, 0.0, tEnd, qe, pe);
    return std::max(std::abs(q[0] - qe), std::abs(p[0] - pe));
}

}  // namespace

TEST_CASE("composition coefficients match the closed forms") {
    const SymplecticCoefficients k = frCoefficients();
    // independently recomputed from beta = 2^(1/3)
    const Scalar beta = std::cbrt(2.0);
    CHECK(k.beta == beta);
    CHECK(std::abs(k.c[0] - 0.67560359597982881702) < 1e-15);
    CHECK(std::abs(k.c[1] - (1 - beta) / (2 * (2 - beta))) < 1e-16);
    CHECK(k.c[0] == k.c[3]);
    CHECK(k.c[1] == k.c[2]);
    CHECK(std::abs(k.d[0] - 1.35120719195965763404) < 1e-15);
    CHECK(std::abs(k.d[1] - (-1.70241438391931526809)) < 1e-15);
    CHECK(k.d[0] == k.d[2]);
    CHECK(k.d[3] == 0.0);
    CHECK(std::abs(k.c[0] + k.c[1] + k.c[2] + k.c[3] - 1.0) < 1e-15);
    CHECK(std::abs(k.d[0] + k.d[1] + k.d[2] + k.d[3] - 1.0) < 1e-15);
}

TEST_CASE("free flight advances positions linearly for every stepper") {
    for (IntegratorKind kind :
         {IntegratorKind::Symplectic4, IntegratorKind::Rk4, IntegratorKind::Zhai}) {
        FreeFlight sys;
        StepConfig config;
        config.kind = kind;
        config.tau = 0.25;
        auto stepper = makeStepper(config, sys);
        VecX q(2), p(2);
        q << 1.0, -2.0;
        p << 0.5, 2.0;
        for (int k = 0; k < 8; ++k) stepper.step(q, p, k * config.tau);
        CHECK(q[0] == doctest::Approx(1.0 + 2.0 * 0.5).epsilon(1e-13));
        CHECK(q[1] == doctest::Approx(-2.0 + 2.0 * 2.0).epsilon(1e-13));
        CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(p[1] == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("symplectic energy error stays bounded over 10^4 steps") {
    Oscillator sys;
    StepConfig config;
    config.tau = 0.1;
    auto stepper = makeStepper(config, sys);
    VecX q = VecX::Constant(1, 1.0), p = VecX::Zero(1);
    const Scalar h0 = 0.5;
    Scalar maxRel = 0, firstHalfMax = 0, secondHalfMax = 0;
    for (int k = 0; k < 10000; ++k) {
        stepper.step(q, p, k * config.tau);
        const Scalar rel = std::abs(0.5 * (q[0] * q[0] + p[0] * p[0]) - h0) / h0;
        maxRel = std::max(maxRel, rel);
        Scalar& half = k < 5000 ? firstHalfMax : secondHalfMax;
        half = std::max(half, rel);
    }
    CHECK(maxRel < 1e-4);
    // bounded oscillation, not secular accumulation
    CHECK(secondHalfMax < 2 * firstHalfMax + 1e-12);
}

TEST_CASE("rk4 single step matches the fourth-order expansion") {
    Oscillator sys;
    StepConfig config;
    config.kind = IntegratorKind::Rk4;
    config.tau = 0.1;
    auto stepper = makeStepper(config, sys);
    VecX q = VecX::Constant(1, 1.0), p = VecX::Zero(1);
    stepper.step(q, p, 0.0);
    CHECK(std::abs(q[0] - 0.99500417) < 1e-7);
    CHECK(std::abs(p[0] - (-0.09983333)) < 1e-7);
}

TEST_CASE("rk4 energy decays monotonically over 10^5 steps") {
    Oscillator sys;
    StepConfig config;
    config.kind = IntegratorKind::Rk4;
    config.tau = 0.1;
    auto stepper = makeStepper(config, sys);
    VecX q = VecX::Constant(1, 1.0), p = VecX::Zero(1);
    Scalar previous = 0.5;
    for (int block = 0; block < 10; ++block) {
        for (int k = 0; k < 10000; ++k)
            stepper.step(q, p, (block * 10000.0 + k) * config.tau);
        const Scalar h = 0.5 * (q[0] * q[0] + p[0] * p[0]);
        CHECK(h < previous);  // secular error, in contrast to the symplectic case
        previous = h;
    }
    CHECK(previous < 0.5);
}

TEST_CASE("global convergence orders on the oscillator") {
    auto slopes = [](IntegratorKind kind, Scalar tau0) {
        const Scalar e0 = oscillatorGlobalError(kind, tau0, 1.0);
        const Scalar e1 = oscillatorGlobalError(kind, tau0 / 2, 1.0);
        const Scalar e2 = oscillatorGlobalError(kind, tau0 / 4, 1.0);
        return std::pair{std::log2(e0 / e1), std::log2(e1 / e2)};
    };

    const auto [s4a, s4b] = slopes(IntegratorKind::Symplectic4, 0.1);
    CHECK(s4a == doctest::Approx(4.0).epsilon(0.05));
    CHECK(s4b == doctest::Approx(4.0).epsilon(0.05));

    const auto [rka, rkb] = slopes(IntegratorKind::Rk4, 0.1);
    CHECK(rka == doctest::Approx(4.0).epsilon(0.05));
    CHECK(rkb == doctest::Approx(4.0).epsilon(0.05));

    const auto [za, zb] = slopes(IntegratorKind::Zhai, 0.01);
    CHECK(za == doctest::Approx(2.0).epsilon(0.1));
    CHECK(zb == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("zhai with psi = phi = 0 is the explicit Euler-Taylor step") {
    Oscillator sys;
    StepConfig config;
    config.kind = IntegratorKind::Zhai;
    config.tau = 0.05;
    config.zhaiPsi = 0.0;
    config.zhaiPhi = 0.0;
    auto stepper = makeStepper(config, sys);
    VecX q = VecX::Constant(1, 1.0), p = VecX::Zero(1);
    stepper.step(q, p, 0.0);  // bootstrap
    const Scalar q1 = q[0], v1 = p[0], a1 = -q1;
    stepper.step(q, p, config.tau);
    const Scalar tau = config.tau;
    CHECK(q[0] == doctest::Approx(q1 + tau * v1 + 0.5 * tau * tau * a1).epsilon(1e-14));
    CHECK(p[0] == doctest::Approx(v1 + tau * a1).epsilon(1e-14));
}

TEST_CASE("force evaluation counts per step are 3, 4 and 1") {
    for (auto [kind, expected] : {std::pair{IntegratorKind::Symplectic4, 3L},
                                  std::pair{IntegratorKind::Rk4, 4L},
                                  std::pair{IntegratorKind::Zhai, 1L}}) {
        Oscillator sys;
        StepConfig config;
        config.kind = kind;
        config.tau = 0.01;
        auto stepper = makeStepper(config, sys);
        VecX q = VecX::Constant(1, 1.0), p = VecX::Zero(1);
        const StepDiagnostics first = stepper.step(q, p, 0.0);
        if (kind == IntegratorKind::Zhai)
            CHECK(first.forceEvals == 4);  // bootstrap primes the history
        else
            CHECK(first.forceEvals == expected);
        for (int k = 1; k <= 5; ++k) {
            const StepDiagnostics diag = stepper.step(q, p, k * config.tau);
            CHECK(diag.forceEvals == expected);
        }
    }
}

TEST_CASE("symplectic stepping is time reversible") {
    Oscillator sys;
    StepConfig forward;
    forward.tau = 0.05;
    StepConfig backward = forward;
    backward.tau = -forward.tau;

    VecX q = VecX::Constant(1, 0.8), p = VecX::Constant(1, -0.3);
    const VecX q0 = q, p0 = p;
    auto fwd = makeStepper(forward, sys);
    auto bwd = makeStepper(backward, sys);
    const int n = 200;
    for (int k = 0; k < n; ++k) fwd.step(q, p, k * forward.tau);
    for (int k = 0; k < n; ++k) bwd.step(q, p, (n - k) * forward.tau);
    CHECK(std::abs(q[0] - q0[0]) < 1e-9 * std::abs(q0[0]));
    CHECK(std::abs(p[0] - p0[0]) < 1e-9 * std::abs(p0[0]));
}

TEST_CASE("reversibility holds on the rod system with constraints") {
    SimulationConfig config;
    config.controlCount = 7;
    config.sampleCount = 51;
    const DloSystem system(config);

    VecX q = flatView(system.initial().ctrl);
    VecX p = flatView(system.initial().momenta);
    system.constrain(q, p);
    const VecX q0 = q, p0 = p;

    StepConfig forward;
    forward.tau = 1e-3;
    StepConfig backward = forward;
    backward.tau = -forward.tau;
    auto fwd = makeStepper(forward, system);
    auto bwd = makeStepper(backward, system);
    const int n = 100;
    for (int k = 0; k < n; ++k) fwd.step(q, p, k * forward.tau);
    for (int k = 0; k < n; ++k) bwd.step(q, p, (n - k) * forward.tau);
    CHECK((q - q0).cwiseAbs().maxCoeff() < 1e-9 * q0.cwiseAbs().maxCoeff());
    CHECK((p - p0).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("stepper configuration errors") {
    Oscillator sys;
    StepConfig bad;
    bad.kind = static_cast<IntegratorKind>(99);
    CHECK_THROWS_AS(makeStepper(bad, sys), std::invalid_argument);

    StepConfig zeroTau;
    zeroTau.tau = 0.0;
    CHECK_THROWS_AS(makeStepper(zeroTau, sys), std::invalid_argument);

    CHECK_THROWS_AS(parseIntegratorKind("leapfrog"), std::invalid_argument);
    CHECK(parseIntegratorKind("symplectic4") == IntegratorKind::Symplectic4);
    CHECK(integratorKindName(IntegratorKind::Zhai) == "zhai");
}
