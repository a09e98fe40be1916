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

#ifndef SEQMODEL_SEQUENCE_FORM_H_
#define SEQMODEL_SEQUENCE_FORM_H_

#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "seqmodel/error.h"
#include "seqmodel/game_tree.h"

namespace seqmodel {

// Sequence-form strategy vector, indexed by sequence (0 = empty sequence).
using RealizationPlan = Eigen::VectorXd;

// Per information set, a distribution over that set's actions.
struct BehavioralStrategy {
  std::vector<std::vector<double>> dist;

  bool operator==(const BehavioralStrategy&) const = default;
};

// Dense row-major matrix of exact rationals.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int r, int c) { return data_[std::size_t(r) * cols_ + c]; }
  const Rational& operator()(int r, int c) const {
    return data_[std::size_t(r) * cols_ + c];
  }

  Eigen::MatrixXd ToDouble() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) m(r, c) = seqmodel::ToDouble((*this)(r, c));
    }
    return m;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> data_;
};

inline std::string FormatRational(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// One row of E or F past the first: the information set's parent sequence
// and the contiguous block of sequences it extends.
struct SequenceInfoSet {
  int parent = 0;
  int first = 1;
  int count = 0;
};

struct LeafSequences {
  std::array<int, 2> sequence{0, 0};
  double chance_prob = 1.0;
};

struct SequenceFormGame {
  Eigen::MatrixXd E, F;  // (infosets + 1) x (sequences + 1)
  Eigen::VectorXd e, f;
  Eigen::MatrixXd A, B;  // player 1 x player 2 sequences, chance weighted
  RationalMatrix A_exact, B_exact;
  std::array<std::vector<std::string>, 2> sequence_labels;
  std::array<std::vector<std::string>, 2> infoset_labels;
  std::array<std::vector<SequenceInfoSet>, 2> infosets;
  std::vector<LeafSequences> leaves;
  bool zero_sum = true;

  const Eigen::MatrixXd& Constraints(Player p) const {
    return p == Player::kOne ? E : F;
  }
  const Eigen::VectorXd& ConstraintRhs(Player p) const {
    return p == Player::kOne ? e : f;
  }
  int Dimension(Player p) const {
    return static_cast<int>(sequence_labels[Index(p)].size());
  }
  int FindSequence(Player p, std::string_view label) const {
    const auto& labels = sequence_labels[Index(p)];
    for (int s = 0; s < static_cast<int>(labels.size()); ++s) {
      if (labels[s] == label) return s;
    }
    throw InvalidArgument("unknown sequence '" + std::string(label) + "'");
  }
};

inline SequenceFormGame DeriveSequenceForm(const GameTree& tree) {
  if (!tree.finalized()) {
    // Finalize() is where structure and perfect recall are validated.
    throw InvalidArgument("game tree not finalized (perfect recall unchecked)");
  }
  SequenceFormGame g;
  for (int p = 0; p < 2; ++p) {
    const Player player = static_cast<Player>(p);
    const auto& sets = tree.infosets(player);
    const int rows = static_cast<int>(sets.size()) + 1;
    const int cols = tree.SequenceCount(player);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    C(0, 0) = 1.0;
    rhs(0) = 1.0;
    for (int i = 0; i < static_cast<int>(sets.size()); ++i) {
      const auto& set = sets[i];
      C(i + 1, set.parent_sequence) = -1.0;
      const int n = static_cast<int>(set.actions.size());
      for (int a = 0; a < n; ++a) C(i + 1, set.first_sequence + a) = 1.0;
      g.infosets[p].push_back({set.parent_sequence, set.first_sequence, n});
      g.infoset_labels[p].push_back(set.label);
    }
    g.sequence_labels[p] = tree.SequenceLabels(player);
    if (p == 0) {
      g.E = std::move(C);
      g.e = std::move(rhs);
    } else {
      g.F = std::move(C);
      g.f = std::move(rhs);
    }
  }

  const int d1 = tree.SequenceCount(Player::kOne);
  const int d2 = tree.SequenceCount(Player::kTwo);
  g.A_exact = RationalMatrix(d1, d2);
  g.B_exact = RationalMatrix(d1, d2);
  for (const auto& leaf : tree.leaves()) {
    const int i = leaf.sequence[0], j = leaf.sequence[1];
    g.A_exact(i, j) += leaf.payoff[0] * leaf.chance_prob;
    g.B_exact(i, j) += leaf.payoff[1] * leaf.chance_prob;
    g.leaves.push_back({leaf.sequence, ToDouble(leaf.chance_prob)});
  }
  g.A = g.A_exact.ToDouble();
  g.B = g.B_exact.ToDouble();
  g.zero_sum = tree.zero_sum();
  return g;
}

inline void CheckDimension(const SequenceFormGame& game, Player p,
                           const Eigen::VectorXd& v) {
  if (v.size() != game.Dimension(p)) {
    throw InvalidArgument("plan has " + std::to_string(v.size()) +
                          " entries, expected " +
                          std::to_string(game.Dimension(p)));
  }
}

// max(|Cy - c|_inf, max_i -y_i)
inline double FeasibilityViolation(const SequenceFormGame& game, Player p,
                                   const RealizationPlan& y) {
  CheckDimension(game, p, y);
  const double eq =
      (game.Constraints(p) * y - game.ConstraintRhs(p)).lpNorm<Eigen::Infinity>();
  return std::max(eq, std::max(0.0, -y.minCoeff()));
}

inline bool IsFeasible(const SequenceFormGame& game, Player p,
                       const RealizationPlan& y, double tol = 1e-9) {
  return FeasibilityViolation(game, p, y) <= tol;
}

inline RealizationPlan BehavioralToRealization(const SequenceFormGame& game,
                                               Player p,
                                               const BehavioralStrategy& s) {
  const auto& sets = game.infosets[Index(p)];
  if (s.dist.size() != sets.size()) {
    throw InvalidArgument("behavioral strategy covers " +
                          std::to_string(s.dist.size()) + " of " +
                          std::to_string(sets.size()) + " information sets");
  }
  RealizationPlan y = RealizationPlan::Zero(game.Dimension(p));
  y(0) = 1.0;
  // Declaration order need not list a parent's set first.
  std::vector<bool> done(sets.size(), false);
  std::vector<bool> known(y.size(), false);
  known[0] = true;
  std::size_t remaining = sets.size();
  while (remaining > 0) {
    std::size_t progressed = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (done[i] || !known[sets[i].parent]) continue;
      if (static_cast<int>(s.dist[i].size()) != sets[i].count) {
        throw InvalidArgument("distribution size mismatch at information set " +
                              std::to_string(i));
      }
      for (int a = 0; a < sets[i].count; ++a) {
        y(sets[i].first + a) = y(sets[i].parent) * s.dist[i][a];
        known[sets[i].first + a] = true;
      }
      done[i] = true;
      ++progressed;
      --remaining;
    }
    if (progressed == 0) throw InvalidArgument("cyclic sequence structure");
  }
  return y;
}

// Action probabilities are y(seq) / sum of the set's sequence weights, which
// equals y(seq) / y(parent) on feasible plans; unreached sets get uniform.
inline BehavioralStrategy RealizationToBehavioral(const SequenceFormGame& game,
                                                  Player p,
                                                  const RealizationPlan& y,
                                                  double tol = 1e-9) {
  if (!IsFeasible(game, p, y, tol)) {
    throw InvalidArgument("realization plan is infeasible");
  }
  BehavioralStrategy s;
  for (const auto& set : game.infosets[Index(p)]) {
    std::vector<double> d(set.count);
    double total = 0.0;
    for (int a = 0; a < set.count; ++a) {
      d[a] = std::max(0.0, y(set.first + a));
      total += d[a];
    }
    for (auto& v : d) v = total > 0.0 ? v / total : 1.0 / set.count;
    s.dist.push_back(std::move(d));
  }
  return s;
}

inline BehavioralStrategy UniformBehavioral(const SequenceFormGame& game,
                                            Player p) {
  BehavioralStrategy s;
  for (const auto& set : game.infosets[Index(p)]) {
    s.dist.emplace_back(set.count, 1.0 / set.count);
  }
  return s;
}

// x^T A y: player 1's expected payoff per game.
inline double ExpectedPayoff(const SequenceFormGame& game,
                             const RealizationPlan& x,
                             const RealizationPlan& y) {
  CheckDimension(game, Player::kOne, x);
  CheckDimension(game, Player::kTwo, y);
  return x.dot(game.A * y);
}

namespace internal {

inline void WriteCsvRow(std::ostream& os, std::string_view head,
                        const std::vector<std::string>& cells) {
  os << head;
  for (const auto& c : cells) os << ',' << c;
  os << '\n';
}

}  // namespace internal

// Matrix dump with a header row of column labels and a label per row.
inline void WriteMatrixCsv(std::ostream& os, const Eigen::MatrixXd& m,
                           const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& col_labels) {
  internal::WriteCsvRow(os, "", col_labels);
  for (int r = 0; r < m.rows(); ++r) {
    std::vector<std::string> cells;
    for (int c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      cells.push_back(v == std::floor(v) ? std::to_string(static_cast<long>(v))
                                         : std::to_string(v));
    }
    internal::WriteCsvRow(os, row_labels.at(r), cells);
  }
}

inline void WriteMatrixCsv(std::ostream& os, const RationalMatrix& m,
                           const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& col_labels) {
  internal::WriteCsvRow(os, "", col_labels);
  for (int r = 0; r < m.rows(); ++r) {
    std::vector<std::string> cells;
    for (int c = 0; c < m.cols(); ++c) cells.push_back(FormatRational(m(r, c)));
    internal::WriteCsvRow(os, row_labels.at(r), cells);
  }
}

}  // namespace seqmodel

#endif  // SEQMODEL_SEQUENCE_FORM_H_
