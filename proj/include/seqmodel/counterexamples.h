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

#ifndef SEQMODEL_COUNTEREXAMPLES_H_
#define SEQMODEL_COUNTEREXAMPLES_H_

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "seqmodel/baselines.h"
#include "seqmodel/bayesian.h"
#include "seqmodel/games.h"
#include "seqmodel/sequence_form.h"

namespace seqmodel {

// Rock-Paper-Scissors counterexamples showing that the sampled Bayesian
// best response model need not converge to a static opponent. Observations
// are synthetic and deterministic: at step t the opponent "plays" the move
// whose count lags its target frequency the most, so empirical frequencies
// track the true strategy as closely as integer counts allow.

namespace internal {

inline LikelihoodTerm RpsMoveTerm(int move) {
  // Player 2's sequences are the empty one followed by R, P, S.
  return MakeTerm({{move + 1, 1.0}});
}

inline int MostLaggingMove(const std::array<double, 3>& target,
                           const std::array<long, 3>& counts, long t) {
  int best = 0;
  double lag = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const double l = target[a] * static_cast<double>(t) - counts[a];
    if (l > lag + 1e-12) {
      lag = l;
      best = a;
    }
  }
  return best;
}

inline RealizationPlan RpsPlan(const SequenceFormGame& game,
                               const std::array<double, 3>& mix) {
  return BehavioralToRealization(game, Player::kTwo,
                                 BehavioralStrategy{{{mix[0], mix[1], mix[2]}}});
}

}  // namespace internal

struct HullTrapReport {
  double min_distance = std::numeric_limits<double>::infinity();
  long argmin_t = 0;
  double max_rock_weight = 0.0;  // largest first component of the model
  bool pass = false;
};

// True strategy (0.8, 0.1, 0.1); samples (0.5,0.3,0.2), (0.3,0.5,0.2),
// (0.2,0.3,0.5). The model stays in the samples' convex hull, whose rock
// weight never exceeds 0.5.
inline HullTrapReport ReproduceHullTrap(long horizon = 10'000,
                                        double threshold = 0.2) {
  const Game rps = BuildRps();
  const SequenceFormGame sf = DeriveSequenceForm(rps.tree);
  const std::array<double, 3> truth{0.8, 0.1, 0.1};
  std::vector<BehavioralStrategy> samples{{{{0.5, 0.3, 0.2}}},
                                          {{{0.3, 0.5, 0.2}}},
                                          {{{0.2, 0.3, 0.5}}}};
  SampledPosterior posterior(sf, std::move(samples));
  const RealizationPlan y_star = internal::RpsPlan(sf, truth);
  std::mt19937_64 unused(0);

  HullTrapReport report;
  std::array<long, 3> counts{0, 0, 0};
  for (long t = 0; t <= horizon; ++t) {
    if (t > 0) {
      const int move = internal::MostLaggingMove(truth, counts, t);
      ++counts[move];
      posterior.Update(internal::RpsMoveTerm(move));
    }
    const RealizationPlan model = Model(posterior, ResponseKind::kBbr, unused);
    const double d = (model - y_star).norm();
    if (d < report.min_distance) {
      report.min_distance = d;
      report.argmin_t = t;
    }
    report.max_rock_weight = std::max(report.max_rock_weight, model(1));
  }
  report.pass = report.min_distance >= threshold;
  return report;
}

struct WeightLockReport {
  // First complete cycle count t (multiple of 3) from which s1's normalized
  // weight stays above 0.99; -1 if never.
  long settle_t = -1;
  double final_s1_weight = 0.0;
  double max_ratio_error = 0.0;  // relative, both ratios, all cycles
  bool monotone = true;          // s1 weight non-decreasing cycle over cycle
  double final_distance = 0.0;   // BBR model vs the uniform truth
  bool pass = false;
};

// True strategy uniform; samples s1 = (0.2,0.4,0.4), s2 = (0.6,0.3,0.1),
// s3 = (0.2,0.3,0.5). After t = 3m observations with exact counts, the
// weight ratios are (0.018/0.032)^m and (0.03/0.032)^m.
inline WeightLockReport ReproduceWeightLock(long horizon = 10'000,
                                            double ratio_tol = 1e-9) {
  const Game rps = BuildRps();
  const SequenceFormGame sf = DeriveSequenceForm(rps.tree);
  std::vector<BehavioralStrategy> samples{{{{0.2, 0.4, 0.4}}},
                                          {{{0.6, 0.3, 0.1}}},
                                          {{{0.2, 0.3, 0.5}}}};
  SampledPosterior posterior(sf, std::move(samples));
  const RealizationPlan y_star = internal::RpsPlan(sf, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const double log_r2 = std::log(0.018 / 0.032);
  const double log_r3 = std::log(0.03 / 0.032);
  std::mt19937_64 unused(0);

  WeightLockReport report;
  double previous = 0.0;
  for (long t = 1; t <= horizon; ++t) {
    posterior.Update(internal::RpsMoveTerm(static_cast<int>((t - 1) % 3)));
    if (t % 3 != 0) continue;
    const double m = static_cast<double>(t / 3);
    const auto& lw = posterior.log_weights();
    for (const auto& [k, log_r] : {std::pair{1, log_r2}, std::pair{2, log_r3}}) {
      const double err = std::abs(std::expm1((lw[k] - lw[0]) - m * log_r));
      report.max_ratio_error = std::max(report.max_ratio_error, err);
    }
    const double w1 = posterior.NormalizedWeights()[0];
    if (w1 < previous) report.monotone = false;
    previous = w1;
    if (w1 > 0.99) {
      if (report.settle_t < 0) report.settle_t = t;
    } else {
      report.settle_t = -1;
    }
    report.final_s1_weight = w1;
    report.final_distance =
        (Model(posterior, ResponseKind::kBbr, unused) - y_star).norm();
  }
  report.pass = report.settle_t > 0 && report.monotone &&
                report.max_ratio_error <= ratio_tol;
  return report;
}

}  // namespace seqmodel

#endif  // SEQMODEL_COUNTEREXAMPLES_H_
