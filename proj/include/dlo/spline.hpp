#pragma once

#include <array>
#include <stdexcept>

#include "dlo/types.hpp"

namespace dlo {

/// Clamped cubic B-spline basis on the material parameter domain [0, length].
/// The first and last knot are repeated degree+1 times and interior knots are
/// uniform, so the end control points interpolate the curve endpoints.
/// Immutable after construction.
template <typename Scalar_>
struct SplineBasisT {
    using Scalar = Scalar_;
    using VecX = VecX_T<Scalar>;

    static constexpr int kDegree = 3;

    Index controlCount = 0;  ///< number of basis functions
    Scalar length = Scalar(0);
    VecX knots;              ///< size controlCount + kDegree + 1, nondecreasing

    Index spanCount() const { return controlCount - kDegree; }
};

using SplineBasis = SplineBasisT<Scalar>;

template <typename Scalar>
SplineBasisT<Scalar> buildBasis(Index controlCount, Scalar length) {
    constexpr int p = SplineBasisT<Scalar>::kDegree;
    if (controlCount < p + 1)
        throw std::invalid_argument("buildBasis: need at least degree+1 control points");
    if (!(length > Scalar(0)))
        throw std::invalid_argument("buildBasis: length must be positive");

    SplineBasisT<Scalar> basis;
    basis.controlCount = controlCount;
    basis.length = length;
    basis.knots.resize(controlCount + p + 1);

    const Index spans = controlCount - p;
    for (Index i = 0; i <= p; ++i) {
        basis.knots[i] = Scalar(0);
        basis.knots[controlCount + i] = length;
    }
    for (Index k = 1; k < spans; ++k)
        basis.knots[p + k] = length * Scalar(k) / Scalar(spans);
    return basis;
}

/// Index of the knot span containing u: knots[s] <= u < knots[s+1]
/// (the final span is closed at u = length).
template <typename Scalar>
Index findSpan(const SplineBasisT<Scalar>& basis, Scalar u) {
    constexpr int p = SplineBasisT<Scalar>::kDegree;
    if (u < Scalar(0) || u > basis.length)
        throw std::domain_error("findSpan: parameter outside [0, length]");
    const Index last = basis.controlCount - 1;  // last non-degenerate span start
    if (u >= basis.knots[basis.controlCount]) return last;
    Index lo = p, hi = basis.controlCount;
    while (hi - lo > 1) {
        const Index mid = (lo + hi) / 2;
        (u < basis.knots[mid]) ? hi = mid : lo = mid;
    }
    return lo;
}

namespace detail {

/// Values and derivatives of the degree+1 basis functions supported on the
/// span of u, rows 0..maxDeriv, columns local function index. Cox-de Boor
/// recurrence with the analytic derivative recurrence.
template <typename Scalar>
void localBasisDerivs(const SplineBasisT<Scalar>& basis, Scalar u, int maxDeriv,
                      Index span,
                      std::array<std::array<Scalar, 4>, 4>& ders) {
    constexpr int p = SplineBasisT<Scalar>::kDegree;
    const auto& t = basis.knots;

    Scalar ndu[p + 1][p + 1];
    Scalar left[p + 1], right[p + 1];
    ndu[0][0] = Scalar(1);
    for (int j = 1; j <= p; ++j) {
        left[j] = u - t[span + 1 - j];
        right[j] = t[span + j] - u;
        Scalar saved = Scalar(0);
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const Scalar temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    for (int r = 0; r <= p; ++r) ders[0][r] = ndu[r][p];

    const int n = maxDeriv < p ? maxDeriv : p;
    for (int k = n + 1; k <= maxDeriv; ++k)
        for (int r = 0; r <= p; ++r) ders[k][r] = Scalar(0);

    Scalar a[2][p + 1];
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = Scalar(1);
        for (int k = 1; k <= n; ++k) {
            Scalar d = Scalar(0);
            const int rk = r - k, pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = r - 1 <= pk ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::swap(s1, s2);
        }
    }

    Scalar factor = Scalar(p);
    for (int k = 1; k <= n; ++k) {
        for (int r = 0; r <= p; ++r) ders[k][r] *= factor;
        factor *= Scalar(p - k);
    }
}

}  // namespace detail

/// b_i^(deriv)(u) for all basis functions. At most degree+1 entries are
/// nonzero (local support).
template <typename Scalar>
VecX_T<Scalar> evalBasis(const SplineBasisT<Scalar>& basis, Scalar u, int deriv) {
    constexpr int p = SplineBasisT<Scalar>::kDegree;
    if (deriv < 0 || deriv > p)
        throw std::invalid_argument("evalBasis: derivative order must be in 0..3");
    const Index span = findSpan(basis, u);
    std::array<std::array<Scalar, 4>, 4> local{};
    detail::localBasisDerivs(basis, u, deriv, span, local);

    VecX_T<Scalar> out = VecX_T<Scalar>::Zero(basis.controlCount);
    for (int r = 0; r <= p; ++r) out[span - p + r] = local[deriv][r];
    return out;
}

/// Curve point (or u-derivative) q^(deriv)(u) = sum_i b_i^(deriv)(u) q_i.
/// Linear in the control matrix.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> evalCurve(const SplineBasisT<Scalar>& basis,
                                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 4>& ctrl,
                                      Scalar u, int deriv) {
    if (ctrl.rows() != basis.controlCount)
        throw std::invalid_argument("evalCurve: control row count does not match basis");
    const VecX_T<Scalar> b = evalBasis(basis, u, deriv);
    return (b.transpose() * ctrl).transpose();
}

/// Greville abscissae: per-function knot averages. Control x-values placed at
/// these abscissae reproduce the identity map x(u) = u.
template <typename Scalar>
VecX_T<Scalar> grevilleAbscissae(const SplineBasisT<Scalar>& basis) {
    constexpr int p = SplineBasisT<Scalar>::kDegree;
    VecX_T<Scalar> g(basis.controlCount);
    for (Index i = 0; i < basis.controlCount; ++i)
        g[i] = (basis.knots[i + 1] + basis.knots[i + 2] + basis.knots[i + 3]) / Scalar(p);
    return g;
}

/// Uniform sample grid with precomputed basis-derivative matrices and
/// composite trapezoidal quadrature weights. All energy and force assembly
/// reduces to products with these matrices.
struct SampleGrid {
    SplineBasis basis;
    Index sampleCount = 0;
    VecX parameters;                  ///< n_s values, uniform on [0, length]
    VecX quadWeights;                 ///< trapezoid weights, sum = length
    std::array<MatX, 4> basisDerivs;  ///< [j]: n_s x n_u matrix of b_i^(j)(u_k)
};

inline SampleGrid buildSampleGrid(const SplineBasis& basis, Index sampleCount) {
    if (sampleCount < 2)
        throw std::invalid_argument("buildSampleGrid: need at least 2 sample points");

    SampleGrid grid;
    grid.basis = basis;
    grid.sampleCount = sampleCount;
    grid.parameters = VecX::LinSpaced(sampleCount, 0.0, basis.length);
    grid.parameters[sampleCount - 1] = basis.length;  // exact endpoint

    const Scalar du = basis.length / Scalar(sampleCount - 1);
    grid.quadWeights = VecX::Constant(sampleCount, du);
    grid.quadWeights[0] = du / 2;
    grid.quadWeights[sampleCount - 1] = du / 2;

    for (auto& m : grid.basisDerivs) m = MatX::Zero(sampleCount, basis.controlCount);
    constexpr int p = SplineBasis::kDegree;
    std::array<std::array<Scalar, 4>, 4> local{};
    for (Index k = 0; k < sampleCount; ++k) {
        const Scalar u = grid.parameters[k];
        const Index span = findSpan(basis, u);
        detail::localBasisDerivs(basis, u, p, span, local);
        for (int j = 0; j <= p; ++j)
            for (int r = 0; r <= p; ++r)
                grid.basisDerivs[j](k, span - p + r) = local[j][r];
    }
    return grid;
}

}  // namespace dlo
