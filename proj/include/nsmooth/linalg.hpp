#pragma once

#include <Eigen/Core>

namespace nsmooth {

/// Largest coordinate dimension handled by the built-in manifolds and embeddings
/// (a 4-torus embeds in R^8). Fixed capacity keeps the geometry kernels allocation-free.
inline constexpr int kMaxCoords = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxCoords, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxCoords, kMaxCoords>;

}  // namespace nsmooth
