// Copyright 2026 The seqmodel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEQMODEL_PROJECTION_H_
#define SEQMODEL_PROJECTION_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seqmodel/error.h"

namespace seqmodel {

inline double KktResidual(const Eigen::MatrixXd& C, const Eigen::VectorXd& c,
                          double eps, const Eigen::VectorXd& z,
                          const Eigen::VectorXd& y, double active_tol = 1e-9);

// Euclidean projection onto { y : C y = c, y >= eps } where (C, c) is a
// sequence-form constraint system: row 0 pins the empty sequence, every
// other row reads  -y[parent] + sum_{a in children} y[a] = 0.
//
// Two exact backends share the contract:
//  * product of simplices (every set hangs off the empty sequence): one
//    sort-based simplex projection per set;
//  * anything deeper: a primal active-set method on the bound constraints,
//    each working set solved as an equality-constrained least-squares step.
// ProjectDykstra() is an independent iterative route used for cross-checks.
class PolytopeProjector {
 public:
  struct Block {
    int parent = 0;
    std::vector<int> children;
  };

  PolytopeProjector(Eigen::MatrixXd C, Eigen::VectorXd c, double eps)
      : C_(std::move(C)), c_(std::move(c)), eps_(eps) {
    if (!(eps_ >= 0.0)) throw InvalidArgument("floor must be non-negative");
    ParseStructure();
    ComputeMinimalMass();
    if (min_mass_[0] > c_(0) + 1e-12) {
      throw InfeasibleError("polytope empty: floor " + std::to_string(eps_) +
                            " needs mass " + std::to_string(min_mass_[0]) +
                            " at the root, have " + std::to_string(c_(0)));
    }
    simplex_product_ = std::all_of(blocks_.begin(), blocks_.end(),
                                   [](const Block& b) { return b.parent == 0; });
  }

  int dimension() const { return static_cast<int>(C_.cols()); }
  double floor() const { return eps_; }
  const Eigen::MatrixXd& constraints() const { return C_; }
  const Eigen::VectorXd& rhs() const { return c_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  bool simplex_product() const { return simplex_product_; }

  Eigen::VectorXd Project(const Eigen::VectorXd& z) const {
    CheckSize(z);
    return simplex_product_ ? ProjectSimplexProduct(z) : ProjectActiveSet(z);
  }

  // A feasible point: each set splits its parent's weight evenly above the
  // least weight its subtree needs.
  Eigen::VectorXd FeasiblePoint() const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dimension());
    y(0) = c_(0);
    std::vector<int> order{0};
    for (std::size_t k = 0; k < order.size(); ++k) {
      const int s = order[k];
      for (int b : child_blocks_[s]) {
        const auto& block = blocks_[b];
        double need = 0.0;
        for (int a : block.children) need += min_mass_[a];
        const double slack = (y(s) - need) / block.children.size();
        for (int a : block.children) {
          y(a) = min_mass_[a] + std::max(0.0, slack);
          order.push_back(a);
        }
      }
    }
    return y;
  }

  Eigen::VectorXd ProjectActiveSet(const Eigen::VectorXd& z) const;
  Eigen::VectorXd ProjectSimplexProduct(const Eigen::VectorXd& z) const;

 private:
  void CheckSize(const Eigen::VectorXd& z) const {
    if (z.size() != C_.cols()) {
      throw InvalidArgument("point has " + std::to_string(z.size()) +
                            " entries, constraints have " +
                            std::to_string(C_.cols()) + " columns");
    }
  }

  void ParseStructure() {
    const int m = static_cast<int>(C_.rows()), d = static_cast<int>(C_.cols());
    if (m < 1 || d < 1 || c_.size() != m) {
      throw InvalidArgument("constraint system dimensions inconsistent");
    }
    auto bad = [](const std::string& why) {
      return InvalidArgument("not a sequence-form constraint system: " + why);
    };
    for (int j = 0; j < d; ++j) {
      if (C_(0, j) != (j == 0 ? 1.0 : 0.0)) throw bad("row 0 must select y[0]");
    }
    if (!(c_(0) > 0.0)) throw bad("root mass must be positive");
    std::vector<int> owner(d, -1);
    for (int r = 1; r < m; ++r) {
      Block block;
      block.parent = -1;
      if (c_(r) != 0.0) throw bad("non-zero right-hand side");
      for (int j = 0; j < d; ++j) {
        const double v = C_(r, j);
        if (v == -1.0) {
          if (block.parent != -1) throw bad("two parents in one row");
          block.parent = j;
        } else if (v == 1.0) {
          if (j == 0 || owner[j] != -1) throw bad("sequence in two rows");
          owner[j] = r - 1;
          block.children.push_back(j);
        } else if (v != 0.0) {
          throw bad("entries must be -1, 0 or 1");
        }
      }
      if (block.parent == -1 || block.children.empty()) {
        throw bad("row without parent or children");
      }
      blocks_.push_back(std::move(block));
    }
    for (int j = 1; j < d; ++j) {
      if (owner[j] == -1) throw bad("sequence " + std::to_string(j) + " unconstrained");
    }
    child_blocks_.assign(d, {});
    for (int b = 0; b < static_cast<int>(blocks_.size()); ++b) {
      child_blocks_[blocks_[b].parent].push_back(b);
    }
    // Every sequence must be reachable from the root exactly once.
    std::vector<int> order{0};
    for (std::size_t k = 0; k < order.size() && order.size() <= std::size_t(d); ++k) {
      for (int b : child_blocks_[order[k]]) {
        for (int a : blocks_[b].children) order.push_back(a);
      }
    }
    if (static_cast<int>(order.size()) != d) throw bad("cyclic parent structure");
    topo_order_ = std::move(order);
  }

  void ComputeMinimalMass() {
    min_mass_.assign(dimension(), eps_);
    for (auto it = topo_order_.rbegin(); it != topo_order_.rend(); ++it) {
      const int s = *it;
      double need = (s == 0) ? 0.0 : eps_;
      for (int b : child_blocks_[s]) {
        double sum = 0.0;
        for (int a : blocks_[b].children) sum += min_mass_[a];
        need = std::max(need, sum);
      }
      min_mass_[s] = s == 0 ? std::max(need, eps_) : need;
    }
  }

  Eigen::MatrixXd C_;
  Eigen::VectorXd c_;
  double eps_;
  std::vector<Block> blocks_;
  std::vector<std::vector<int>> child_blocks_;
  std::vector<int> topo_order_;
  std::vector<double> min_mass_;
  bool simplex_product_ = false;
};

namespace internal {

// Projection of v onto { u : u >= lo, sum u = total } by sorting.
inline void ProjectShiftedSimplex(std::vector<double>& v, double lo,
                                  double total) {
  const int n = static_cast<int>(v.size());
  const double mass = total - n * lo;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = v[i] - lo;
  std::vector<double> sorted = w;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (int k = 0; k < n; ++k) {
    cumulative += sorted[k];
    const double t = (cumulative - mass) / (k + 1);
    if (k == n - 1 || sorted[k + 1] <= t) {
      theta = t;
      break;
    }
  }
  for (int i = 0; i < n; ++i) v[i] = lo + std::max(0.0, w[i] - theta);
}

// Min-norm least-squares solution of M x = rhs.
inline Eigen::VectorXd LeastSquares(const Eigen::MatrixXd& M,
                                    const Eigen::VectorXd& rhs) {
  if (M.cols() == 0) return Eigen::VectorXd();
  return M.completeOrthogonalDecomposition().solve(rhs);
}

}  // namespace internal

inline Eigen::VectorXd PolytopeProjector::ProjectSimplexProduct(
    const Eigen::VectorXd& z) const {
  Eigen::VectorXd y(z.size());
  y(0) = c_(0);
  std::vector<double> part;
  for (const auto& block : blocks_) {
    part.clear();
    for (int a : block.children) part.push_back(z(a));
    internal::ProjectShiftedSimplex(part, eps_, c_(0));
    for (std::size_t k = 0; k < part.size(); ++k) y(block.children[k]) = part[k];
  }
  return y;
}

inline Eigen::VectorXd PolytopeProjector::ProjectActiveSet(
    const Eigen::VectorXd& z) const {
  CheckSize(z);
  const int d = dimension();
  const double scale = std::max(1.0, z.lpNorm<Eigen::Infinity>());
  const double zero_step = 1e-13 * scale;
  Eigen::VectorXd x = FeasiblePoint();
  std::vector<bool> bound(d, false);
  const int max_iterations = 50 * d + 100;

  for (int iter = 0; iter < max_iterations; ++iter) {
    std::vector<int> free;
    for (int i = 0; i < d; ++i) {
      if (!bound[i]) free.push_back(i);
    }
    Eigen::MatrixXd C_free(C_.rows(), free.size());
    Eigen::VectorXd g(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) {
      C_free.col(k) = C_.col(free[k]);
      g(k) = z(free[k]) - x(free[k]);
    }
    // Step to the minimizer over the working face: remove from z - x its
    // component in the row space of the free columns.
    const Eigen::VectorXd lambda =
        internal::LeastSquares(C_free.transpose(), g);
    const Eigen::VectorXd p_free =
        free.empty() ? Eigen::VectorXd() : Eigen::VectorXd(g - C_free.transpose() * lambda);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k < free.size(); ++k) p(free[k]) = p_free(k);

    if (p.lpNorm<Eigen::Infinity>() <= zero_step) {
      const Eigen::VectorXd mu = x - z + C_.transpose() * lambda;
      int worst = -1;
      double worst_mu = -1e-12 * scale;
      for (int i = 0; i < d; ++i) {
        if (bound[i] && mu(i) < worst_mu) {
          worst_mu = mu(i);
          worst = i;
        }
      }
      if (worst < 0) {
        for (int i = 0; i < d; ++i) {
          if (bound[i]) x(i) = eps_;
        }
        return x;
      }
      bound[worst] = false;
      continue;
    }

    double step = 1.0;
    int blocking = -1;
    for (int i : free) {
      if (p(i) < 0.0) {
        const double s = std::max(0.0, x(i) - eps_) / -p(i);
        if (s < step) {
          step = s;
          blocking = i;
        }
      }
    }
    x += step * p;
    if (blocking >= 0) {
      bound[blocking] = true;
      x(blocking) = eps_;
    }
  }
  throw NumericalError("active-set projection did not converge in " +
                       std::to_string(max_iterations) +
                       " iterations; KKT residual " +
                       std::to_string(KktResidual(C_, c_, eps_, z, x)));
}

inline Eigen::VectorXd Project(const Eigen::MatrixXd& C,
                               const Eigen::VectorXd& c, double eps,
                               const Eigen::VectorXd& z) {
  return PolytopeProjector(C, c, eps).Project(z);
}

// Combined KKT violation of y as the projection of z: stationarity on the
// free coordinates, sign of the bound multipliers, primal feasibility and
// complementary slackness. Coordinates within `active_tol` of the floor are
// treated as active.
inline double KktResidual(const Eigen::MatrixXd& C, const Eigen::VectorXd& c,
                          double eps, const Eigen::VectorXd& z,
                          const Eigen::VectorXd& y, double active_tol) {
  const int d = static_cast<int>(y.size());
  std::vector<int> free;
  for (int i = 0; i < d; ++i) {
    if (y(i) - eps > active_tol) free.push_back(i);
  }
  Eigen::MatrixXd C_free(C.rows(), free.size());
  Eigen::VectorXd g(free.size());
  for (std::size_t k = 0; k < free.size(); ++k) {
    C_free.col(k) = C.col(free[k]);
    g(k) = z(free[k]) - y(free[k]);
  }
  const Eigen::VectorXd lambda =
      free.empty() ? Eigen::VectorXd::Zero(C.rows())
                   : internal::LeastSquares(C_free.transpose(), g);
  const Eigen::VectorXd r = y - z + C.transpose() * lambda;
  double residual = (C * y - c).lpNorm<Eigen::Infinity>();
  for (int i = 0; i < d; ++i) {
    residual = std::max(residual, eps - y(i));
    if (y(i) - eps > active_tol) {
      residual = std::max(residual, std::abs(r(i)));
    } else {
      residual = std::max(residual, -r(i));
      residual = std::max(residual, std::abs(r(i)) * (y(i) - eps));
    }
  }
  return residual;
}

struct DykstraResult {
  Eigen::VectorXd y;
  long iterations = 0;
  bool converged = false;
};

// Dykstra's alternating projections between the affine set {C y = c} and the
// shifted orthant {y >= eps}. When a nested floor binds, the orthant
// correction unwinds in steps of order eps, so the iteration budget is large
// and the affine projector is formed once as a dense matrix.
inline DykstraResult ProjectDykstra(const Eigen::MatrixXd& C,
                                    const Eigen::VectorXd& c, double eps,
                                    const Eigen::VectorXd& z,
                                    long max_iterations = 100'000'000,
                                    double tol = 1e-13) {
  const Eigen::LDLT<Eigen::MatrixXd> gram(C * C.transpose());
  const Eigen::MatrixXd P =
      Eigen::MatrixXd::Identity(z.size(), z.size()) - C.transpose() * gram.solve(C);
  const Eigen::VectorXd offset = C.transpose() * gram.solve(c);
  DykstraResult out;
  Eigen::VectorXd y = z;
  Eigen::VectorXd a(z.size()), b(z.size());
  Eigen::VectorXd p = Eigen::VectorXd::Zero(z.size());
  Eigen::VectorXd q = Eigen::VectorXd::Zero(z.size());
  for (long it = 1; it <= max_iterations; ++it) {
    a.noalias() = P * (y + p);
    a += offset;
    p += y - a;
    b = (a + q).cwiseMax(eps);
    q += a - b;
    const double change = (b - y).lpNorm<Eigen::Infinity>();
    y.swap(b);
    out.iterations = it;
    if (change < tol && (a - y).lpNorm<Eigen::Infinity>() < 1e-12 &&
        (C * y - c).lpNorm<Eigen::Infinity>() < 1e-11) {
      out.converged = true;
      break;
    }
  }
  out.y = std::move(y);
  return out;
}

}  // namespace seqmodel

#endif  // SEQMODEL_PROJECTION_H_
