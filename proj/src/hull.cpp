#include "nsmooth/hull.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "nsmooth/errors.hpp"
#include "nsmooth/kernels.hpp"

namespace nsmooth {

void HullSample::add(std::span<const double> point) {
  if (static_cast<int>(point.size()) != dim_) throw DomainViolation("HullSample::add: dimension mismatch");
  data_.insert(data_.end(), point.begin(), point.end());
}

void HullSample::merge(const HullSample& other) {
  if (other.empty()) return;
  if (other.dim_ != dim_) throw DomainViolation("HullSample::merge: dimension mismatch");
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
}

double HullSample::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) best = std::max(best, (point(i) - point(j)).norm());
  }
  return best;
}

Eigen::VectorXd HullSample::lower() const {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim_, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < size(); ++i) lo = lo.cwiseMin(point(i));
  return lo;
}

Eigen::VectorXd HullSample::upper() const {
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim_, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < size(); ++i) hi = hi.cwiseMax(point(i));
  return hi;
}

double HullSample::max_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < size(); ++i) best = std::max(best, point(i).norm());
  return best;
}

namespace {

constexpr double kWolfeTol = 1e-10;
constexpr double kCoefTol = 1e-14;

// Minimiser of |sum mu_i p_i| over the affine hull of the corral (sum mu_i = 1).
Eigen::VectorXd affine_minimizer(const Eigen::MatrixXd& P) {
  const Eigen::Index k = P.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(k + 1, k + 1);
  K.topLeftCorner(k, k) = P * P.transpose();
  K.topRightCorner(k, 1).setOnes();
  K.bottomLeftCorner(1, k).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs[k] = 1.0;
  const Eigen::VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);
  Eigen::VectorXd mu = sol.head(k);
  mu /= mu.sum();
  return mu;
}

}  // namespace

double wolfe_gap(const HullSample& hull, const Eigen::VectorXd& x) {
  const double scale = x.norm() * hull.max_norm();
  if (scale == 0.0) return 0.0;
  std::vector<double> dots(hull.size());
  kernels::matvec(hull.data(), std::span<const double>(x.data(), x.size()), dots);
  const double xx = x.squaredNorm();
  double worst = -std::numeric_limits<double>::infinity();
  for (double d : dots) worst = std::max(worst, (xx - d) / scale);
  return worst;
}

MinNormResult min_norm_point(const HullSample& hull, int max_iter) {
  if (hull.empty()) throw DomainViolation("min_norm_point: empty hull");
  const std::size_t n = hull.size();
  const int d = hull.dim();
  const double pmax = hull.max_norm();

  std::vector<int> corral;
  std::vector<double> lambda;
  {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (hull.point(i).squaredNorm() < hull.point(best).squaredNorm()) best = i;
    }
    corral.push_back(static_cast<int>(best));
    lambda.push_back(1.0);
  }

  auto combine = [&]() {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k < corral.size(); ++k) x += lambda[k] * hull.point(corral[k]);
    return x;
  };

  MinNormResult result;
  Eigen::VectorXd x = combine();
  std::vector<double> dots(n);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    if (x.norm() <= 1e-15 * std::max(1.0, pmax)) {
      result.converged = true;
      break;
    }
    kernels::matvec(hull.data(), std::span<const double>(x.data(), x.size()), dots);
    const auto j = static_cast<int>(std::min_element(dots.begin(), dots.end()) - dots.begin());
    const double xx = x.squaredNorm();
    if (dots[j] >= xx - kWolfeTol * x.norm() * pmax) {
      result.converged = true;
      break;
    }
    if (std::find(corral.begin(), corral.end(), j) != corral.end()) {
      // No progress is possible from here; the iterate is optimal to rounding.
      result.converged = true;
      break;
    }
    corral.push_back(j);
    lambda.push_back(0.0);

    for (int minor = 0; minor < 4 * (d + 2); ++minor) {
      Eigen::MatrixXd P(corral.size(), d);
      for (std::size_t k = 0; k < corral.size(); ++k) P.row(k) = hull.point(corral[k]).transpose();
      const Eigen::VectorXd mu = affine_minimizer(P);
      if ((mu.array() > kCoefTol).all()) {
        for (std::size_t k = 0; k < corral.size(); ++k) lambda[k] = mu[k];
        break;
      }
      double theta = 1.0;
      for (std::size_t k = 0; k < corral.size(); ++k) {
        if (mu[k] <= kCoefTol) {
          const double denom = lambda[k] - mu[k];
          if (denom > 0.0) theta = std::min(theta, lambda[k] / denom);
        }
      }
      for (std::size_t k = 0; k < corral.size(); ++k) lambda[k] = (1.0 - theta) * lambda[k] + theta * mu[k];
      // Drop the points whose coefficient reached zero.
      std::vector<int> keep_idx;
      std::vector<double> keep_lam;
      for (std::size_t k = 0; k < corral.size(); ++k) {
        if (lambda[k] > kCoefTol) {
          keep_idx.push_back(corral[k]);
          keep_lam.push_back(lambda[k]);
        }
      }
      if (keep_idx.empty()) {
        keep_idx.push_back(corral.back());
        keep_lam.push_back(1.0);
      }
      corral = std::move(keep_idx);
      lambda = std::move(keep_lam);
      double s = 0.0;
      for (double l : lambda) s += l;
      for (double& l : lambda) l /= s;
    }
    x = combine();
  }

  result.iterations = iter;
  result.point = x;
  result.norm = x.norm();
  result.support = corral;
  result.coefficients = lambda;
  return result;
}

}  // namespace nsmooth
