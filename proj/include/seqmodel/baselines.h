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

#ifndef SEQMODEL_BASELINES_H_
#define SEQMODEL_BASELINES_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "seqmodel/bayesian.h"
#include "seqmodel/error.h"
#include "seqmodel/sequence_form.h"

namespace seqmodel {

enum class ResponseKind { kBbr, kMap, kThompson, kFmap, kBestNash, kBestResponse };

inline const char* ToString(ResponseKind k) {
  switch (k) {
    case ResponseKind::kBbr: return "bbr";
    case ResponseKind::kMap: return "map";
    case ResponseKind::kThompson: return "thompson";
    case ResponseKind::kFmap: return "fmap";
    case ResponseKind::kBestNash: return "bestnash";
    case ResponseKind::kBestResponse: return "bestresponse";
  }
  return "?";
}

inline ResponseKind ParseResponseKind(std::string_view name) {
  for (auto k : {ResponseKind::kBbr, ResponseKind::kMap, ResponseKind::kThompson,
                 ResponseKind::kFmap, ResponseKind::kBestNash,
                 ResponseKind::kBestResponse}) {
    if (name == ToString(k)) return k;
  }
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

inline bool IsSampling(ResponseKind k) {
  return k == ResponseKind::kBbr || k == ResponseKind::kMap ||
         k == ResponseKind::kThompson;
}

// k strategies drawn from the prior ahead of play, each carrying the log of
// the likelihood of everything observed so far.
class SampledPosterior {
 public:
  SampledPosterior(const SequenceFormGame& game,
                   std::vector<BehavioralStrategy> samples,
                   Player modeled = Player::kTwo)
      : samples_(std::move(samples)) {
    for (const auto& s : samples_) {
      plans_.push_back(BehavioralToRealization(game, modeled, s));
    }
    log_weights_.assign(samples_.size(), 0.0);
    sums_.assign(samples_.size(), 0.0);
    compensation_.assign(samples_.size(), 0.0);
  }

  template <typename Rng>
  static SampledPosterior Draw(const SequenceFormGame& game,
                               const DirichletPrior& prior, int k, Rng& rng) {
    if (k < 1) throw InvalidArgument("sample count must be at least 1");
    std::vector<BehavioralStrategy> samples;
    for (int i = 0; i < k; ++i) samples.push_back(SampleOpponent(prior, rng));
    return SampledPosterior(game, std::move(samples), prior.player);
  }

  // A sample giving zero probability to the observation drops to -inf.
  // Log-weights are accumulated with Neumaier compensation: after 10^4
  // updates plain summation drifts by ~1e-9 in the weight ratios.
  void Update(const LikelihoodTerm& term) {
    for (std::size_t s = 0; s < plans_.size(); ++s) {
      const double lik = term.Evaluate(plans_[s]);
      if (!(lik > 0.0)) {
        log_weights_[s] = -std::numeric_limits<double>::infinity();
        continue;
      }
      const double add = static_cast<double>(term.multiplicity) * std::log(lik);
      const double sum = sums_[s] + add;
      compensation_[s] += std::abs(sums_[s]) >= std::abs(add)
                              ? (sums_[s] - sum) + add
                              : (add - sum) + sums_[s];
      sums_[s] = sum;
      if (std::isfinite(log_weights_[s])) {
        log_weights_[s] = sums_[s] + compensation_[s];
      }
    }
  }

  void Update(const ObservationLog& log) {
    for (const auto& term : log.terms()) Update(term);
  }

  // exp(log w - max log w), normalized.
  std::vector<double> NormalizedWeights() const {
    if (log_weights_.empty()) throw InvalidArgument("empty sampled posterior");
    const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
    if (!std::isfinite(top)) {
      throw NumericalError("every sample is inconsistent with the observations");
    }
    std::vector<double> w(log_weights_.size());
    double total = 0.0;
    for (std::size_t s = 0; s < w.size(); ++s) {
      w[s] = std::exp(log_weights_[s] - top);
      total += w[s];
    }
    for (auto& v : w) v /= total;
    return w;
  }

  std::size_t size() const { return samples_.size(); }
  const std::vector<BehavioralStrategy>& samples() const { return samples_; }
  const std::vector<RealizationPlan>& plans() const { return plans_; }
  const std::vector<double>& log_weights() const { return log_weights_; }

 private:
  std::vector<BehavioralStrategy> samples_;
  std::vector<RealizationPlan> plans_;
  std::vector<double> log_weights_;
  std::vector<double> sums_;
  std::vector<double> compensation_;
};

// BBR: weight-averaged plan. MAP: heaviest sample, lowest index on ties.
// Thompson: one sample drawn in proportion to the weights.
template <typename Rng>
RealizationPlan Model(const SampledPosterior& posterior, ResponseKind kind,
                      Rng& rng) {
  if (posterior.size() == 0) throw InvalidArgument("empty sampled posterior");
  const auto& plans = posterior.plans();
  switch (kind) {
    case ResponseKind::kBbr: {
      const auto w = posterior.NormalizedWeights();
      RealizationPlan y = RealizationPlan::Zero(plans[0].size());
      for (std::size_t s = 0; s < plans.size(); ++s) y += w[s] * plans[s];
      return y;
    }
    case ResponseKind::kMap: {
      const auto& lw = posterior.log_weights();
      return plans[std::max_element(lw.begin(), lw.end()) - lw.begin()];
    }
    case ResponseKind::kThompson: {
      const auto w = posterior.NormalizedWeights();
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      double cumulative = 0.0;
      for (std::size_t s = 0; s < w.size(); ++s) {
        cumulative += w[s];
        if (u < cumulative) return plans[s];
      }
      for (std::size_t s = w.size(); s-- > 0;) {
        if (w[s] > 0.0) return plans[s];
      }
      return plans.back();
    }
    default:
      throw InvalidArgument(std::string("not a sampling model: ") + ToString(kind));
  }
}

struct BestResponseResult {
  RealizationPlan plan;  // pure strategy in sequence form
  double value = 0.0;    // responder's expected payoff
};

// Pure best response of `responder` to a fixed opponent plan by backward
// induction over the responder's information sets. (A y)[s] is the chance-
// and opponent-weighted payoff of the leaves ending in sequence s, so the
// value of a sequence is its own term plus the best action value of every
// set it leads to. Ties go to the first action.
inline BestResponseResult BestResponse(const SequenceFormGame& game,
                                       Player responder,
                                       const RealizationPlan& opponent_plan) {
  const Player opp = Opponent(responder);
  if (!IsFeasible(game, opp, opponent_plan, 1e-8)) {
    throw InvalidArgument("opponent plan is infeasible");
  }
  const Eigen::VectorXd leaf_value =
      responder == Player::kOne ? Eigen::VectorXd(game.A * opponent_plan)
                                : Eigen::VectorXd(game.B.transpose() * opponent_plan);
  const auto& sets = game.infosets[Index(responder)];
  const int d = game.Dimension(responder);
  std::vector<std::vector<int>> below(d);
  for (int i = 0; i < static_cast<int>(sets.size()); ++i) {
    below[sets[i].parent].push_back(i);
  }

  std::vector<double> value(d, 0.0);
  std::vector<int> choice(sets.size(), 0);
  // Post-order over sequences.
  std::vector<std::pair<int, bool>> stack{{0, false}};
  while (!stack.empty()) {
    auto [s, expanded] = stack.back();
    stack.pop_back();
    if (!expanded) {
      stack.push_back({s, true});
      for (int i : below[s]) {
        for (int a = 0; a < sets[i].count; ++a) {
          stack.push_back({sets[i].first + a, false});
        }
      }
      continue;
    }
    double v = leaf_value(s);
    for (int i : below[s]) {
      int best = 0;
      double best_value = value[sets[i].first];
      for (int a = 1; a < sets[i].count; ++a) {
        const double va = value[sets[i].first + a];
        if (va > best_value + 1e-12 * std::max(1.0, std::abs(best_value))) {
          best = a;
          best_value = va;
        }
      }
      choice[i] = best;
      v += best_value;
    }
    value[s] = v;
  }

  BestResponseResult out;
  out.plan = RealizationPlan::Zero(d);
  out.plan(0) = 1.0;
  std::vector<int> frontier{0};
  while (!frontier.empty()) {
    const int s = frontier.back();
    frontier.pop_back();
    for (int i : below[s]) {
      for (int a = 0; a < sets[i].count; ++a) {
        out.plan(sets[i].first + a) = a == choice[i] ? out.plan(s) : 0.0;
        frontier.push_back(sets[i].first + a);
      }
    }
  }
  out.value = value[0];
  return out;
}

// Player 1's best response, the usual case.
inline BestResponseResult BestResponse(const SequenceFormGame& game,
                                       const RealizationPlan& y) {
  return BestResponse(game, Player::kOne, y);
}

namespace internal {

inline BehavioralStrategy BehavioralByLabel(
    const SequenceFormGame& game, Player p,
    const std::map<std::string, std::vector<double>>& by_label) {
  BehavioralStrategy s;
  for (const auto& label : game.infoset_labels[Index(p)]) {
    auto it = by_label.find(label);
    if (it == by_label.end()) {
      throw InvalidArgument("no distribution for information set '" + label + "'");
    }
    s.dist.push_back(it->second);
  }
  return s;
}

}  // namespace internal

inline constexpr double kKuhnGameValue = -1.0 / 18.0;

// Player 1's equilibrium family in Kuhn poker, alpha in [0, 1/3]: bet J with
// alpha, K with 3 alpha, never Q; after check-bet call with K, with Q at
// alpha + 1/3, never with J.
inline RealizationPlan KuhnEquilibriumPlayer1(const SequenceFormGame& game,
                                              double alpha) {
  if (alpha < 0.0 || alpha > 1.0 / 3.0 + 1e-15) {
    throw InvalidArgument("equilibrium parameter outside [0, 1/3]");
  }
  const auto s = internal::BehavioralByLabel(
      game, Player::kOne,
      {{"K", {3 * alpha, 1 - 3 * alpha}},
       {"K Ch b", {1, 0}},
       {"Q", {0, 1}},
       {"Q Ch b", {alpha + 1.0 / 3.0, 2.0 / 3.0 - alpha}},
       {"J", {alpha, 1 - alpha}},
       {"J Ch b", {0, 1}}});
  return BehavioralToRealization(game, Player::kOne, s);
}

// Player 2's equilibrium: K bets and calls; Q checks and calls 1/3; J folds
// and bets 1/3 after a check.
inline RealizationPlan KuhnEquilibriumPlayer2(const SequenceFormGame& game) {
  const auto s = internal::BehavioralByLabel(
      game, Player::kTwo,
      {{"Q B", {1.0 / 3.0, 2.0 / 3.0}},
       {"Q Ch", {0, 1}},
       {"J B", {0, 1}},
       {"J Ch", {1.0 / 3.0, 2.0 / 3.0}},
       {"K B", {1, 0}},
       {"K Ch", {1, 0}}});
  return BehavioralToRealization(game, Player::kTwo, s);
}

// Player 1's guaranteed value with x: minus player 2's best-response payoff
// (zero-sum games).
inline double GuaranteedValue(const SequenceFormGame& game,
                              const RealizationPlan& x) {
  return -BestResponse(game, Player::kTwo, x).value;
}

struct BestNashResult {
  RealizationPlan plan;
  double value = 0.0;  // against the target strategy
  double alpha = 0.0;  // family parameter, Kuhn only
};

inline constexpr int kKuhnFamilyGrid = 20;  // alpha = i / 60, i = 0..20

// The equilibrium that does best against y_star. The payoff is affine in
// alpha, so an endpoint wins; the grid is a cross-check. Every member used
// is certified against player 2's best response.
inline BestNashResult BestNashKuhn(const SequenceFormGame& game,
                                   const RealizationPlan& y_star) {
  BestNashResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kKuhnFamilyGrid; ++i) {
    const double alpha = i / (3.0 * kKuhnFamilyGrid);
    RealizationPlan x = KuhnEquilibriumPlayer1(game, alpha);
    if (GuaranteedValue(game, x) < kKuhnGameValue - 1e-10) {
      throw NumericalError("internal consistency: alpha = " +
                           std::to_string(alpha) + " is not an equilibrium");
    }
    const double v = ExpectedPayoff(game, x, y_star);
    if (v > best.value) best = {std::move(x), v, alpha};
  }
  return best;
}

// Uniform play is the unique equilibrium of Rock-Paper-Scissors.
inline BestNashResult BestNashRps(const SequenceFormGame& game,
                                  const RealizationPlan& y_star) {
  RealizationPlan x = BehavioralToRealization(
      game, Player::kOne, UniformBehavioral(game, Player::kOne));
  if (std::abs(GuaranteedValue(game, x)) > 1e-12) {
    throw NumericalError("internal consistency: uniform RPS play exploitable");
  }
  const double v = ExpectedPayoff(game, x, y_star);
  return {std::move(x), v, 0.0};
}

inline BestNashResult BestNash(std::string_view game_id,
                               const SequenceFormGame& game,
                               const RealizationPlan& y_star) {
  if (game_id == "kuhn") return BestNashKuhn(game, y_star);
  if (game_id == "rps") return BestNashRps(game, y_star);
  throw InvalidArgument("no equilibrium family for game '" +
                        std::string(game_id) + "'");
}

}  // namespace seqmodel

#endif  // SEQMODEL_BASELINES_H_
