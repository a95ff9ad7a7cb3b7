#pragma once

// Finite point sets standing in for convex hulls (generalized gradients and
// differentials) and the minimum-norm point of their convex hull.

#include <span>
#include <vector>

#include <Eigen/Core>

namespace nsmooth {

class HullSample {
 public:
  explicit HullSample(int dim = 0) : dim_(dim) {}

  int dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return data_.empty(); }

  void add(std::span<const double> point);
  template <class Derived>
  void add(const Eigen::MatrixBase<Derived>& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) data_.push_back(v(i));
  }
  void merge(const HullSample& other);

  Eigen::Map<const Eigen::VectorXd> point(std::size_t i) const {
    return Eigen::Map<const Eigen::VectorXd>(data_.data() + i * dim_, dim_);
  }
  /// Row-major storage, one point per row.
  std::span<const double> data() const { return data_; }

  /// Largest pairwise distance between points.
  double diameter() const;
  Eigen::VectorXd lower() const;
  Eigen::VectorXd upper() const;
  double max_norm() const;

 private:
  int dim_;
  std::vector<double> data_;
};

struct MinNormResult {
  Eigen::VectorXd point;
  double norm = 0.0;
  /// Indices of the points carrying the convex combination and their coefficients.
  std::vector<int> support;
  std::vector<double> coefficients;
  bool converged = false;
  int iterations = 0;
};

/// Wolfe's minimum-norm-point algorithm. Terminates when the Wolfe criterion
///   <x, p_i - x> >= -1e-10 * |x| * max_i |p_i|   for all i
/// holds; otherwise returns the best iterate with converged = false after max_iter.
MinNormResult min_norm_point(const HullSample& hull, int max_iter = 500);

/// Worst violation of the Wolfe criterion at x, normalised by |x| max|p_i| (<= 0 when optimal).
double wolfe_gap(const HullSample& hull, const Eigen::VectorXd& x);

}  // namespace nsmooth
