#pragma once

#include <Eigen/Dense>

namespace dlo {

using Scalar = double;
using Index = Eigen::Index;

template <typename S>
using VecX_T = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using MatX_T = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

using VecX = VecX_T<Scalar>;
using MatX = MatX_T<Scalar>;
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

/// Configuration/momentum layout: one row per control point, columns
/// (x, y, z, theta). Column-major storage, so the flattened view is
/// component-blocked: all x coefficients, then y, z, theta.
using CtrlMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, 4>;

enum Component : int { kCompX = 0, kCompY = 1, kCompZ = 2, kCompTheta = 3 };
constexpr int kComponents = 4;

inline Index flatIndex(Index point, int component, Index controlCount) {
    return static_cast<Index>(component) * controlCount + point;
}

inline Eigen::Map<const VecX> flatView(const CtrlMatrix& m) {
    return {m.data(), m.size()};
}

inline CtrlMatrix fromFlat(const VecX& v, Index controlCount) {
    return Eigen::Map<const CtrlMatrix>(v.data(), controlCount, kComponents);
}

}  // namespace dlo
