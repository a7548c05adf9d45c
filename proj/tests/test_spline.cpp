#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dlo/spline.hpp"
#include "oracles.hpp"

using namespace dlo;

TEST_CASE("clamped uniform knot construction") {
    const SplineBasis single = buildBasis<Scalar>(4, 1.0);
    VecX expected(8);
    expected << 0, 0, 0, 0, 1, 1, 1, 1;
    CHECK((single.knots - expected).cwiseAbs().maxCoeff() == 0.0);

    // n_u - degree spans of equal width
    const SplineBasis basis = buildBasis<Scalar>(9, 2.0);
    CHECK(basis.spanCount() == 6);
    for (Index k = 0; k < basis.spanCount(); ++k) {
        const Scalar width = basis.knots[3 + k + 1] - basis.knots[3 + k];
        CHECK(width == doctest::Approx(2.0 / 6.0).epsilon(1e-14));
    }

    CHECK_THROWS_AS(buildBasis<Scalar>(3, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(buildBasis<Scalar>(9, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(buildBasis<Scalar>(9, -1.0), std::invalid_argument);
}

TEST_CASE("endpoint interpolation") {
    for (Index nu : {Index(4), Index(7), Index(9)}) {
        const SplineBasis basis = buildBasis<Scalar>(nu, 2.0);
        const VecX at0 = evalBasis(basis, 0.0, 0);
        const VecX atL = evalBasis(basis, 2.0, 0);
        CHECK(at0[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(at0.tail(nu - 1).cwiseAbs().maxCoeff() == 0.0);
        CHECK(atL[nu - 1] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(atL.head(nu - 1).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("partition of unity and local support") {
    const SplineBasis basis = buildBasis<Scalar>(9, 2.0);
    std::mt19937 rng(7);
    std::uniform_real_distribution<Scalar> uniform(0.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const Scalar u = uniform(rng);
        const VecX b = evalBasis(basis, u, 0);
        CHECK(std::abs(b.sum() - 1.0) < 1e-12);
        CHECK((b.array() >= -1e-15).all());
        CHECK((b.array() != 0.0).count() <= 4);
    }
}

TEST_CASE("single-segment basis is cubic Bernstein") {
    const SplineBasis basis = buildBasis<Scalar>(4, 1.0);
    const VecX mid = evalBasis(basis, 0.5, 0);
    CHECK(mid[0] == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(mid[1] == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(mid[2] == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(mid[3] == doctest::Approx(0.125).epsilon(1e-14));

    // third derivatives of the Bernstein cubics are constant
    const VecX d3 = evalBasis(basis, 0.3, 3);
    CHECK(d3[0] == doctest::Approx(-6.0).epsilon(1e-12));
    CHECK(d3[1] == doctest::Approx(18.0).epsilon(1e-12));
    CHECK(d3[2] == doctest::Approx(-18.0).epsilon(1e-12));
    CHECK(d3[3] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("values match the textbook recursion") {
    std::mt19937 rng(11);
    for (Index nu : {Index(4), Index(5), Index(9), Index(14)}) {
        const SplineBasis basis = buildBasis<Scalar>(nu, 2.0);
        std::uniform_real_distribution<Scalar> uniform(0.0, 2.0);
        for (int trial = 0; trial < 50; ++trial) {
            const Scalar u = trial == 0 ? 0.0 : (trial == 1 ? 2.0 : uniform(rng));
            const VecX fast = evalBasis(basis, u, 0);
            const VecX naive = oracle::naiveBasisRow(basis, u);
            CHECK((fast - naive).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("derivatives match central differences inside spans") {
    const SplineBasis basis = buildBasis<Scalar>(9, 2.0);
    const Scalar h = 1e-6;
    std::mt19937 rng(13);
    std::uniform_real_distribution<Scalar> uniform(0.05, 1.95);
    int checked = 0;
    while (checked < 40) {
        const Scalar u = uniform(rng);
        // keep the stencil strictly inside one span: high derivatives jump at knots
        Scalar distance = 2.0;
        for (Index i = 0; i < basis.knots.size(); ++i)
            distance = std::min(distance, std::abs(u - basis.knots[i]));
        if (distance < 20 * h) continue;
        ++checked;
        for (int j = 1; j <= 3; ++j) {
            const VecX analytic = evalBasis(basis, u, j);
            const VecX lo = evalBasis(basis, u - h, j - 1);
            const VecX hi = evalBasis(basis, u + h, j - 1);
            const VecX fd = (hi - lo) / (2 * h);
            const Scalar scale = std::max(analytic.cwiseAbs().maxCoeff(), Scalar(1));
            CHECK((analytic - fd).cwiseAbs().maxCoeff() / scale < 1e-6);
        }
    }
}

TEST_CASE("derivative row sums vanish") {
    const SplineBasis basis = buildBasis<Scalar>(9, 2.0);
    std::mt19937 rng(17);
    std::uniform_real_distribution<Scalar> uniform(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Scalar u = uniform(rng);
        for (int j = 1; j <= 3; ++j) {
            const VecX b = evalBasis(basis, u, j);
            const Scalar scale = std::max(b.cwiseAbs().maxCoeff(), Scalar(1));
            CHECK(std::abs(b.sum()) / scale < 1e-10);
        }
    }
}

TEST_CASE("greville abscissae reproduce the identity map") {
    const SplineBasis basis = buildBasis<Scalar>(9, 2.0);
    CtrlMatrix ctrl = CtrlMatrix::Zero(9, 4);
    ctrl.col(kCompX) = grevilleAbscissae(basis);
    CHECK(ctrl(0, kCompX) == 0.0);
    CHECK(ctrl(8, kCompX) == 2.0);

    std::mt19937 rng(19);
    std::uniform_real_distribution<Scalar> uniform(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Scalar u = uniform(rng);
        const Vec4 point = evalCurve(basis, ctrl, u, 0);
        CHECK(point[0] == doctest::Approx(u).epsilon(1e-12));
        const Vec4 oracleValue = oracle::naiveCurvePoint(basis, ctrl, u);
        CHECK(std::abs(point[0] - oracleValue[0]) < 1e-12);
    }
    const Vec4 slope = evalCurve(basis, ctrl, 1.3, 1);
    CHECK(slope[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(slope[1]) + std::abs(slope[2]) + std::abs(slope[3]) == 0.0);
}

TEST_CASE("curve evaluation is linear in the control points") {
    const SplineBasis basis = buildBasis<Scalar>(7, 2.0);
    std::mt19937 rng(23);
    std::normal_distribution<Scalar> normal(0.0, 1.0);
    auto randomCtrl = [&]() {
        CtrlMatrix m(7, 4);
        for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
        return m;
    };
    const CtrlMatrix c1 = randomCtrl(), c2 = randomCtrl();
    const Scalar a = 0.7, b = -1.3;
    for (Scalar u : {0.0, 0.37, 1.0, 1.99, 2.0}) {
        const Vec4 combined = evalCurve<Scalar>(basis, a * c1 + b * c2, u, 0);
        const Vec4 parts = a * evalCurve(basis, c1, u, 0) + b * evalCurve(basis, c2, u, 0);
        CHECK((combined - parts).cwiseAbs().maxCoeff() < 1e-13);
    }

    // constants reproduce and differentiate to zero
    CtrlMatrix constant(7, 4);
    constant.rowwise() = Eigen::RowVector4d(1.5, -2.0, 0.25, 3.0);
    const Vec4 value = evalCurve(basis, constant, 1.1, 0);
    CHECK((value - Vec4(1.5, -2.0, 0.25, 3.0)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(evalCurve(basis, constant, 1.1, 1).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("domain and argument errors") {
    const SplineBasis basis = buildBasis<Scalar>(6, 2.0);
    CHECK_THROWS_AS(evalBasis(basis, -0.01, 0), std::domain_error);
    CHECK_THROWS_AS(evalBasis(basis, 2.01, 0), std::domain_error);
    CHECK_THROWS_AS(evalBasis(basis, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(evalBasis(basis, 1.0, -1), std::invalid_argument);

    CtrlMatrix wrongRows = CtrlMatrix::Zero(5, 4);
    CHECK_THROWS_AS(evalCurve(basis, wrongRows, 1.0, 0), std::invalid_argument);
}

TEST_CASE("sample grid precomputation") {
    const SplineBasis basis = buildBasis<Scalar>(9, 2.0);
    const SampleGrid grid = buildSampleGrid(basis, 101);
    CHECK(grid.sampleCount == 101);
    for (const auto& m : grid.basisDerivs) {
        CHECK(m.rows() == 101);
        CHECK(m.cols() == 9);
    }
    CHECK(grid.parameters[0] == 0.0);
    CHECK(grid.parameters[100] == 2.0);
    CHECK((grid.basisDerivs[0].rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    for (int j = 1; j <= 3; ++j) {
        const Scalar scale = std::max(grid.basisDerivs[j].cwiseAbs().maxCoeff(), Scalar(1));
        CHECK(grid.basisDerivs[j].rowwise().sum().cwiseAbs().maxCoeff() / scale < 1e-10);
    }
    CHECK(grid.quadWeights.sum() == doctest::Approx(2.0).epsilon(1e-14));

    const SampleGrid tiny = buildSampleGrid(basis, 2);
    CHECK(tiny.parameters[0] == 0.0);
    CHECK(tiny.parameters[1] == 2.0);

    CHECK_THROWS_AS(buildSampleGrid(basis, 1), std::invalid_argument);
}
