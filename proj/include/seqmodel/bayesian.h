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

#ifndef SEQMODEL_BAYESIAN_H_
#define SEQMODEL_BAYESIAN_H_

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "seqmodel/error.h"
#include "seqmodel/game_tree.h"
#include "seqmodel/sequence_form.h"

namespace seqmodel {

// Independent Dirichlet distributions over the modeled player's actions, one
// per information set. `exponents` carries the per-sequence alpha used by
// the posterior objective: the alpha of the sequence's last action, and 1
// for the empty sequence (which then contributes nothing).
struct DirichletPrior {
  Player player = Player::kTwo;
  std::vector<std::vector<double>> alpha;
  Eigen::VectorXd exponents;

  static DirichletPrior FromAlpha(const SequenceFormGame& game, Player p,
                                  std::vector<std::vector<double>> alpha) {
    const auto& sets = game.infosets[Index(p)];
    if (alpha.size() != sets.size()) {
      throw InvalidArgument("prior needs one alpha vector per information set");
    }
    DirichletPrior prior;
    prior.player = p;
    prior.exponents = Eigen::VectorXd::Ones(game.Dimension(p));
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (static_cast<int>(alpha[i].size()) != sets[i].count) {
        throw InvalidArgument("alpha size mismatch at information set " +
                              std::to_string(i));
      }
      for (int a = 0; a < sets[i].count; ++a) {
        if (!(alpha[i][a] > 0.0) || !std::isfinite(alpha[i][a])) {
          throw InvalidArgument("Dirichlet parameters must be positive");
        }
        prior.exponents(sets[i].first + a) = alpha[i][a];
      }
    }
    prior.alpha = std::move(alpha);
    return prior;
  }

  static DirichletPrior Symmetric(const SequenceFormGame& game, Player p,
                                  double alpha) {
    std::vector<std::vector<double>> a;
    for (const auto& set : game.infosets[Index(p)]) a.emplace_back(set.count, alpha);
    return FromAlpha(game, p, std::move(a));
  }

  double MinExponent() const { return exponents.minCoeff(); }
};

// Draws one behavioral strategy: a Dirichlet sample per information set via
// normalized Gamma(alpha, 1) variates.
template <typename Rng>
BehavioralStrategy SampleOpponent(const DirichletPrior& prior, Rng& rng) {
  BehavioralStrategy s;
  for (const auto& alphas : prior.alpha) {
    std::vector<double> d(alphas.size());
    double total = 0.0;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      std::gamma_distribution<double> gamma(alphas[a], 1.0);
      d[a] = gamma(rng);
      total += d[a];
    }
    if (total > 0.0) {
      for (auto& v : d) v /= total;
    } else {
      for (auto& v : d) v = 1.0 / d.size();
    }
    s.dist.push_back(std::move(d));
  }
  return s;
}

// Likelihood of one observation: sum_j q_j y_j over the candidate opponent
// sequences, with chance weights normalized to sum to 1.
struct LikelihoodTerm {
  std::vector<int> sequences;  // strictly increasing
  std::vector<double> weights;
  std::int64_t multiplicity = 1;

  double Evaluate(const Eigen::VectorXd& y) const {
    double s = 0.0;
    for (std::size_t k = 0; k < sequences.size(); ++k) s += weights[k] * y(sequences[k]);
    return s;
  }
};

// Builds the term from unnormalized (sequence, chance probability) pairs,
// merging repeated sequences.
inline LikelihoodTerm MakeTerm(std::vector<std::pair<int, double>> candidates) {
  if (candidates.empty()) throw InvalidArgument("empty candidate set");
  std::map<int, double> merged;
  double total = 0.0;
  for (const auto& [seq, p] : candidates) {
    if (!(p > 0.0)) throw InvalidArgument("candidate weight must be positive");
    merged[seq] += p;
    total += p;
  }
  LikelihoodTerm term;
  for (const auto& [seq, p] : merged) {
    term.sequences.push_back(seq);
    term.weights.push_back(p / total);
  }
  return term;
}

// The term player 1 records after reaching `leaf`: o_1(leaf) mapped to
// player 2's sequences. Player 1's own reach is common to every candidate
// and cancels.
inline LikelihoodTerm ObservationTerm(const SequenceFormGame& game,
                                      const ObservabilityFunction& obs,
                                      int leaf) {
  std::vector<std::pair<int, double>> candidates;
  for (int m : obs.Observe(Player::kOne, leaf)) {
    const auto& l = game.leaves.at(m);
    candidates.emplace_back(l.sequence[Index(Player::kTwo)], l.chance_prob);
  }
  return MakeTerm(std::move(candidates));
}

// Multiset of likelihood terms; identical observations share one entry.
class ObservationLog {
 public:
  void Append(const LikelihoodTerm& term, std::int64_t count = 1) {
    if (count <= 0) throw InvalidArgument("count must be positive");
    auto key = std::make_pair(term.sequences, term.weights);
    auto [it, inserted] = index_.emplace(std::move(key), terms_.size());
    if (inserted) {
      terms_.push_back(term);
      terms_.back().multiplicity = count;
    } else {
      terms_[it->second].multiplicity += count;
    }
    iterations_ += count;
  }

  void Append(const SequenceFormGame& game, const ObservabilityFunction& obs,
              int leaf) {
    Append(ObservationTerm(game, obs, leaf));
  }

  const std::vector<LikelihoodTerm>& terms() const { return terms_; }
  std::int64_t iterations() const { return iterations_; }
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<LikelihoodTerm> terms_;
  std::map<std::pair<std::vector<int>, std::vector<double>>, std::size_t> index_;
  std::int64_t iterations_ = 0;
};

namespace internal {

inline void CheckPosteriorDomain(const Eigen::VectorXd& y,
                                 const DirichletPrior& prior,
                                 const ObservationLog& log) {
  if (y.size() != prior.exponents.size()) {
    throw InvalidArgument("plan and prior dimensions differ");
  }
  for (int i = 0; i < y.size(); ++i) {
    if (prior.exponents(i) != 1.0 && !(y(i) > 0.0)) {
      throw DomainError("sequence " + std::to_string(i) +
                        " must be positive under the prior");
    }
  }
  for (const auto& term : log.terms()) {
    for (int j : term.sequences) {
      if (!(y(j) > 0.0)) {
        throw DomainError("observed sequence " + std::to_string(j) +
                          " must be positive");
      }
    }
  }
}

}  // namespace internal

// -[ sum_i (alpha_i - 1) log y_i + sum_t log(sum_j q_j y_j) ]
inline double NegLogPosterior(const Eigen::VectorXd& y,
                              const DirichletPrior& prior,
                              const ObservationLog& log) {
  internal::CheckPosteriorDomain(y, prior, log);
  double value = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    const double w = prior.exponents(i) - 1.0;
    if (w != 0.0) value -= w * std::log(y(i));
  }
  for (const auto& term : log.terms()) {
    value -= static_cast<double>(term.multiplicity) * std::log(term.Evaluate(y));
  }
  return value;
}

inline Eigen::VectorXd NegLogPosteriorGradient(const Eigen::VectorXd& y,
                                               const DirichletPrior& prior,
                                               const ObservationLog& log) {
  internal::CheckPosteriorDomain(y, prior, log);
  Eigen::VectorXd g(y.size());
  for (int i = 0; i < y.size(); ++i) g(i) = (1.0 - prior.exponents(i)) / y(i);
  for (const auto& term : log.terms()) {
    const double scale = static_cast<double>(term.multiplicity) / term.Evaluate(y);
    for (std::size_t k = 0; k < term.sequences.size(); ++k) {
      g(term.sequences[k]) -= scale * term.weights[k];
    }
  }
  return g;
}

}  // namespace seqmodel

#endif  // SEQMODEL_BAYESIAN_H_
