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

#ifndef SEQMODEL_SIMULATOR_H_
#define SEQMODEL_SIMULATOR_H_

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "seqmodel/baselines.h"
#include "seqmodel/bayesian.h"
#include "seqmodel/error.h"
#include "seqmodel/fmap.h"
#include "seqmodel/game_tree.h"
#include "seqmodel/games.h"
#include "seqmodel/sequence_form.h"

namespace seqmodel {

inline constexpr const char* kVersion = "1.0.0";

inline std::vector<ResponseKind> AllResponseKinds() {
  return {ResponseKind::kFmap,     ResponseKind::kBbr,
          ResponseKind::kMap,      ResponseKind::kThompson,
          ResponseKind::kBestNash, ResponseKind::kBestResponse};
}

struct MatchConfig {
  std::string game = "kuhn";
  int iterations = 3000;
  int opponents = 100;
  int samples = 10;
  double alpha = 2.0;
  std::uint64_t seed = 42;
  std::vector<ResponseKind> algorithms = AllResponseKinds();
  int jobs = 0;  // 0: one worker per hardware thread
  bool warm_start = true;
  PGDConfig pgd;

  void Validate() const {
    if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
    if (opponents < 1) throw InvalidArgument("opponents must be >= 1");
    if (samples < 1) throw InvalidArgument("samples must be >= 1");
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
      throw InvalidArgument("alpha must be >= 1");
    }
    if (jobs < 0) throw InvalidArgument("jobs must be >= 0");
    if (algorithms.empty()) throw InvalidArgument("no algorithms selected");
    if (game != "kuhn" && game != "rps") {
      throw InvalidArgument("unknown game '" + game + "'");
    }
    pgd.Validate();
  }
};

struct IterationRecord {
  ResponseKind algorithm = ResponseKind::kFmap;
  int opponent = 0;
  int iteration = 0;  // 1-based
  double expected_payoff = 0.0;
  double model_l2 = 0.0;

  bool operator==(const IterationRecord&) const = default;
};

// Randomness consumed by one hand, identical for every algorithm facing the
// same opponent at the same iteration.
struct SharedRandomness {
  std::vector<double> chance;                    // per chance node
  std::array<std::vector<double>, 2> thresholds;  // per information set

  bool operator==(const SharedRandomness&) const = default;
};

// Instrumentation hook: called after each played hand.
using HandObserver =
    std::function<void(int iteration, const SharedRandomness&, int leaf)>;

enum class Stream : std::uint32_t {
  kOpponent = 1,
  kDeal = 2,
  kThreshold = 3,
  kSamples = 4,
  kThompson = 5,
};

// Child seed of `parent` for `index`. Independent children keep each
// consumer's stream unaffected by what other consumers draw.
inline std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(parent),
                    static_cast<std::uint32_t>(parent >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline std::uint64_t DeriveSeed(std::uint64_t parent, Stream s) {
  // Offset keeps stream tags apart from opponent indices.
  return DeriveSeed(parent, (std::uint64_t{1} << 40) + static_cast<std::uint32_t>(s));
}

inline double Uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline SharedRandomness DrawSharedRandomness(const GameTree& tree,
                                             std::mt19937_64& deal,
                                             std::mt19937_64& thresholds) {
  SharedRandomness r;
  r.chance.resize(tree.chance_node_count());
  for (auto& u : r.chance) u = Uniform01(deal);
  for (int p = 0; p < 2; ++p) {
    r.thresholds[p].resize(tree.infosets(static_cast<Player>(p)).size());
    for (auto& u : r.thresholds[p]) u = Uniform01(thresholds);
  }
  return r;
}

// Index of the first outcome whose cumulative probability exceeds u.
inline int InvertCdf(const std::vector<double>& probs, double u) {
  double cumulative = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    cumulative += probs[a];
    if (cumulative > u) return static_cast<int>(a);
  }
  for (std::size_t a = probs.size(); a-- > 0;) {
    if (probs[a] > 0.0) return static_cast<int>(a);
  }
  return static_cast<int>(probs.size()) - 1;
}

// Plays one hand and returns the reached leaf index.
inline int PlayHand(const GameTree& tree,
                    const std::array<const BehavioralStrategy*, 2>& strategies,
                    const SharedRandomness& r) {
  int id = tree.root();
  std::vector<double> probs;
  while (true) {
    const Node& n = tree.node(id);
    switch (n.kind) {
      case NodeKind::kTerminal:
        return n.leaf;
      case NodeKind::kChance: {
        probs.clear();
        for (const auto& p : n.chance_probs) probs.push_back(ToDouble(p));
        id = n.children[InvertCdf(probs, r.chance.at(n.chance_index))];
        break;
      }
      case NodeKind::kDecision: {
        const int p = Index(n.player);
        const auto& dist = strategies[p]->dist.at(n.infoset);
        id = n.children[InvertCdf(dist, r.thresholds[p].at(n.infoset))];
        break;
      }
    }
  }
}

struct AggregateRow {
  ResponseKind algorithm = ResponseKind::kFmap;
  int iteration = 0;
  double mean_payoff = 0.0;
  double mean_model_l2 = 0.0;
};

struct ExperimentTable {
  std::vector<IterationRecord> records;  // opponent, algorithm, iteration
  std::vector<AggregateRow> aggregate;   // algorithm, iteration

  // Mean over opponents at one iteration.
  const AggregateRow& At(ResponseKind k, int iteration) const {
    for (const auto& row : aggregate) {
      if (row.algorithm == k && row.iteration == iteration) return row;
    }
    throw InvalidArgument("no aggregate row for that algorithm/iteration");
  }
};

// Repeated play of player 1 (the modeler) against static player-2 opponents.
// Each iteration: build the model from the observations so far, best-respond
// to it, score the response against the true strategy, then play the hand
// with the shared randomness and record player 1's observation.
class Simulator {
 public:
  explicit Simulator(MatchConfig config)
      : config_(Validated(std::move(config))),
        game_(BuildGame(config_.game)),
        sf_(DeriveSequenceForm(game_.tree)),
        prior_(DirichletPrior::Symmetric(sf_, Player::kTwo, config_.alpha)),
        solver_(sf_, config_.pgd, Player::kTwo) {}

  const MatchConfig& config() const { return config_; }
  const Game& game() const { return game_; }
  const SequenceFormGame& sequence_form() const { return sf_; }
  const DirichletPrior& prior() const { return prior_; }

  std::uint64_t OpponentSeed(int opponent) const {
    return DeriveSeed(config_.seed, static_cast<std::uint64_t>(opponent));
  }

  BehavioralStrategy DrawOpponent(std::uint64_t opponent_seed) const {
    std::mt19937_64 rng(DeriveSeed(opponent_seed, Stream::kOpponent));
    return SampleOpponent(prior_, rng);
  }

  std::vector<IterationRecord> RunMatch(const BehavioralStrategy& opponent,
                                        ResponseKind algorithm,
                                        std::uint64_t opponent_seed,
                                        int opponent_index = 0,
                                        const HandObserver& observer = {}) const;

  ExperimentTable RunExperiment(
      const std::function<void(int done, int total)>& progress = {}) const;

 private:
  static MatchConfig Validated(MatchConfig c) {
    c.Validate();
    return c;
  }

  MatchConfig config_;
  Game game_;
  SequenceFormGame sf_;
  DirichletPrior prior_;
  FmapSolver solver_;
};

inline std::vector<IterationRecord> Simulator::RunMatch(
    const BehavioralStrategy& opponent, ResponseKind algorithm,
    std::uint64_t opponent_seed, int opponent_index,
    const HandObserver& observer) const {
  const RealizationPlan y_star =
      BehavioralToRealization(sf_, Player::kTwo, opponent);
  const int T = config_.iterations;
  std::vector<IterationRecord> out;
  out.reserve(T);

  // Fixed strategies are scored once against the target.
  if (algorithm == ResponseKind::kBestResponse ||
      algorithm == ResponseKind::kBestNash) {
    const double value = algorithm == ResponseKind::kBestResponse
                             ? BestResponse(sf_, y_star).value
                             : BestNash(config_.game, sf_, y_star).value;
    for (int t = 1; t <= T; ++t) {
      out.push_back({algorithm, opponent_index, t, value, 0.0});
    }
    return out;
  }

  std::mt19937_64 deal(DeriveSeed(opponent_seed, Stream::kDeal));
  std::mt19937_64 thresholds(DeriveSeed(opponent_seed, Stream::kThreshold));
  std::mt19937_64 thompson(DeriveSeed(opponent_seed, Stream::kThompson));
  std::optional<SampledPosterior> posterior;
  if (IsSampling(algorithm)) {
    std::mt19937_64 draws(DeriveSeed(opponent_seed, Stream::kSamples));
    posterior = SampledPosterior::Draw(sf_, prior_, config_.samples, draws);
  }
  ObservationLog log;
  std::optional<RealizationPlan> estimate;

  for (int t = 1; t <= T; ++t) {
    RealizationPlan model;
    if (algorithm == ResponseKind::kFmap) {
      model = solver_.Estimate(prior_, log,
                               config_.warm_start ? estimate : std::nullopt)
                  .estimate;
      estimate = model;
    } else {
      model = Model(*posterior, algorithm, thompson);
    }
    const BestResponseResult response = BestResponse(sf_, model);
    out.push_back({algorithm, opponent_index, t,
                   ExpectedPayoff(sf_, response.plan, y_star),
                   (model - y_star).norm()});

    const SharedRandomness shared =
        DrawSharedRandomness(game_.tree, deal, thresholds);
    const BehavioralStrategy mine =
        RealizationToBehavioral(sf_, Player::kOne, response.plan);
    const int leaf = PlayHand(game_.tree, {&mine, &opponent}, shared);
    const LikelihoodTerm term = ObservationTerm(sf_, game_.observability, leaf);
    if (algorithm == ResponseKind::kFmap) {
      log.Append(term);
    } else {
      posterior->Update(term);
    }
    if (observer) observer(t, shared, leaf);
  }
  return out;
}

namespace internal {

// Rethrows `e` as its own dynamic type with `context` prepended.
[[noreturn]] inline void RethrowWithContext(const Error& e,
                                            const std::string& context) {
  const std::string msg = context + e.what();
  if (dynamic_cast<const InfeasibleError*>(&e)) throw InfeasibleError(msg);
  if (dynamic_cast<const NumericalError*>(&e)) throw NumericalError(msg);
  if (dynamic_cast<const DomainError*>(&e)) throw DomainError(msg);
  if (dynamic_cast<const PreconditionError*>(&e)) throw PreconditionError(msg);
  if (dynamic_cast<const InvalidArgument*>(&e)) throw InvalidArgument(msg);
  throw Error(msg);
}

}  // namespace internal

inline ExperimentTable Simulator::RunExperiment(
    const std::function<void(int done, int total)>& progress) const {
  const int n = config_.opponents;
  std::vector<std::vector<IterationRecord>> per_opponent(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex progress_mutex;

  auto work = [&] {
    for (int o = next++; o < n; o = next++) {
      try {
        const std::uint64_t seed = OpponentSeed(o);
        const BehavioralStrategy opponent = DrawOpponent(seed);
        for (ResponseKind k : config_.algorithms) {
          try {
            auto records = RunMatch(opponent, k, seed, o);
            per_opponent[o].insert(per_opponent[o].end(), records.begin(),
                                   records.end());
          } catch (const Error& e) {
            internal::RethrowWithContext(
                e, "opponent " + std::to_string(o) + ", " + ToString(k) + ": ");
          }
        }
      } catch (...) {
        errors[o] = std::current_exception();
      }
      const int finished = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, n);
      }
    }
  };

  int jobs = config_.jobs > 0 ? config_.jobs
                              : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp(jobs, 1, n);
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentTable table;
  const int T = config_.iterations;
  const auto& algos = config_.algorithms;
  std::vector<double> payoff(algos.size() * T, 0.0), dist(algos.size() * T, 0.0);
  for (int o = 0; o < n; ++o) {
    for (const auto& r : per_opponent[o]) {
      const std::size_t a = std::find(algos.begin(), algos.end(), r.algorithm) - algos.begin();
      payoff[a * T + r.iteration - 1] += r.expected_payoff;
      dist[a * T + r.iteration - 1] += r.model_l2;
      table.records.push_back(r);
    }
  }
  for (std::size_t a = 0; a < algos.size(); ++a) {
    for (int t = 1; t <= T; ++t) {
      table.aggregate.push_back({algos[a], t, payoff[a * T + t - 1] / n,
                                 dist[a * T + t - 1] / n});
    }
  }
  return table;
}

namespace internal {

inline std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace internal

inline void WriteRecordsCsv(std::ostream& os,
                            const std::vector<IterationRecord>& records) {
  os << "algo,opponent,iter,expected_payoff,model_l2\n";
  for (const auto& r : records) {
    os << ToString(r.algorithm) << ',' << r.opponent << ',' << r.iteration << ','
       << internal::FormatDouble(r.expected_payoff) << ','
       << internal::FormatDouble(r.model_l2) << '\n';
  }
}

inline void WriteAggregateCsv(std::ostream& os,
                              const std::vector<AggregateRow>& rows) {
  os << "algo,iter,mean_payoff,mean_model_l2\n";
  for (const auto& r : rows) {
    os << ToString(r.algorithm) << ',' << r.iteration << ','
       << internal::FormatDouble(r.mean_payoff) << ','
       << internal::FormatDouble(r.mean_model_l2) << '\n';
  }
}

}  // namespace seqmodel

#endif  // SEQMODEL_SIMULATOR_H_
