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

// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "cli_app.h"
#include "kuhn_tables.h"
#include "seqmodel/baselines.h"
#include "seqmodel/bayesian.h"
#include "seqmodel/counterexamples.h"
#include "seqmodel/fmap.h"
#include "seqmodel/games.h"
#include "seqmodel/projection.h"
#include "seqmodel/sequence_form.h"
#include "seqmodel/simulator.h"
#include "test_util.h"

namespace seqmodel {
namespace {

namespace fs = std::filesystem;

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buf[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void Report(const std::string& name, const Verdict& v) {
  std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
  std::fflush(stdout);
  failures += !v.pass;
}

void Info(const std::string& line) {
  std::printf("  info: %s\n", line.c_str());
  std::fflush(stdout);
}

using StringSet = std::set<std::string>;

Verdict TableExactness() {
  const Game g = BuildKuhn();
  const SequenceFormGame sf = DeriveSequenceForm(g.tree);
  int mismatches = 0;
  if (sf.E.rows() != 7 || sf.E.cols() != 13 || sf.F.rows() != 7 || sf.F.cols() != 13 ||
      sf.A_exact.rows() != 13 || sf.A_exact.cols() != 13) {
    return {false, "wrong matrix dimensions"};
  }
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 13; ++c) {
      mismatches += sf.E(r, c) != testing::kE[r][c];
      mismatches += sf.F(r, c) != testing::kF[r][c];
    }
  }
  for (int r = 0; r < 13; ++r) {
    for (int c = 0; c < 13; ++c) {
      mismatches += sf.A_exact(r, c) != Rational(testing::kASixths[r][c], 6);
    }
  }
  int obs_rows = 0;
  for (const auto& row : testing::KuhnObservability()) {
    const auto o1 = Observe(g, Player::kOne, row.leaf);
    const auto o2 = Observe(g, Player::kTwo, row.leaf);
    const bool ok = StringSet(o1.begin(), o1.end()) == StringSet(row.o1.begin(), row.o1.end()) &&
                    StringSet(o2.begin(), o2.end()) == StringSet(row.o2.begin(), row.o2.end());
    obs_rows += ok;
  }
  return {mismatches == 0 && obs_rows == 30 && g.tree.leaves().size() == 30,
          Fmt("%d matrix mismatches over E, F, A; %d/30 observability rows match",
              mismatches, obs_rows)};
}

Verdict GameValue() {
  const SequenceFormGame sf = DeriveSequenceForm(BuildKuhn().tree);
  double worst_gap = 0.0, lowest = 1.0;
  for (int i = 0; i <= kKuhnFamilyGrid; ++i) {
    const double v = GuaranteedValue(sf, KuhnEquilibriumPlayer1(sf, i / 60.0));
    worst_gap = std::max(worst_gap, std::abs(v - kKuhnGameValue));
    lowest = std::min(lowest, v);
  }
  return {worst_gap <= 1e-10 && lowest >= kKuhnGameValue - 1e-10,
          Fmt("21 family members, min guaranteed value %.15f, max |v + 1/18| = %.2e",
              lowest, worst_gap)};
}

Verdict GradientCorrectness() {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> alpha(1.0, 4.0), prob(0.05, 0.95);
  const double h = 1e-6;
  double worst = 0.0;
  int instances = 0;
  for (const char* id : {"kuhn", "rps"}) {
    const Game g = BuildGame(id);
    const SequenceFormGame sf = DeriveSequenceForm(g.tree);
    std::uniform_int_distribution<int> leaf(0, static_cast<int>(g.tree.leaves().size()) - 1);
    for (int trial = 0; trial < 200; ++trial, ++instances) {
      std::vector<std::vector<double>> a;
      BehavioralStrategy s;
      for (const auto& set : sf.infosets[1]) {
        std::vector<double> ai(set.count), d(set.count);
        double total = 0.0;
        for (int k = 0; k < set.count; ++k) {
          ai[k] = alpha(rng);
          total += (d[k] = prob(rng));
        }
        for (auto& v : d) v /= total;
        a.push_back(ai);
        s.dist.push_back(d);
      }
      const DirichletPrior prior = DirichletPrior::FromAlpha(sf, Player::kTwo, a);
      ObservationLog log;
      for (int t = 0; t < 50; ++t) log.Append(sf, g.observability, leaf(rng));
      const RealizationPlan y = BehavioralToRealization(sf, Player::kTwo, s);
      const Eigen::VectorXd grad = NegLogPosteriorGradient(y, prior, log);
      for (int i = 0; i < y.size(); ++i) {
        RealizationPlan up = y, down = y;
        up(i) += h;
        down(i) -= h;
        const double fd =
            (NegLogPosterior(up, prior, log) - NegLogPosterior(down, prior, log)) / (2 * h);
        worst = std::max(worst, std::abs(fd - grad(i)));
      }
    }
  }
  return {worst <= 1e-5,
          Fmt("%d instances (Kuhn and RPS), max |analytic - central difference| = %.2e",
              instances, worst)};
}

Verdict ProjectionCorrectness() {
  const SequenceFormGame kuhn = DeriveSequenceForm(BuildKuhn().tree);
  const SequenceFormGame rps = DeriveSequenceForm(BuildRps().tree);
  struct Case {
    const char* name;
    const Eigen::MatrixXd* C;
    const Eigen::VectorXd* c;
  };
  const Case cases[] = {{"kuhn-p2", &kuhn.F, &kuhn.f},
                        {"kuhn-p1", &kuhn.E, &kuhn.e},
                        {"rps", &rps.F, &rps.f}};
  std::mt19937_64 rng(20260102);
  std::normal_distribution<double> n(0.3, 1.5);
  const double eps = 1e-6;
  double kkt = 0.0, idem = 0.0, dyk = 0.0;
  bool dykstra_converged = true;
  for (const auto& cs : cases) {
    const PolytopeProjector proj(*cs.C, *cs.c, eps);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd z(cs.C->cols());
      for (int i = 0; i < z.size(); ++i) z(i) = n(rng);
      const Eigen::VectorXd y = proj.Project(z);
      kkt = std::max(kkt, KktResidual(*cs.C, *cs.c, eps, z, y));
      idem = std::max(idem, (proj.Project(y) - y).lpNorm<Eigen::Infinity>());
      const DykstraResult ref = ProjectDykstra(*cs.C, *cs.c, eps, z);
      dykstra_converged = dykstra_converged && ref.converged;
      dyk = std::max(dyk, (ref.y - y).lpNorm<Eigen::Infinity>());
    }
  }
  return {kkt <= 1e-8 && idem <= 1e-9 && dyk <= 1e-6 && dykstra_converged,
          Fmt("100 points each on Kuhn player 2, Kuhn player 1, RPS: max KKT %.2e, "
              "idempotence %.2e, Dykstra gap %.2e",
              kkt, idem, dyk)};
}

Verdict HullTrap() {
  const HullTrapReport r = ReproduceHullTrap(10'000, 0.2);
  return {r.pass, Fmt("min distance %.4f at t=%ld over t<=10000, max rock weight %.4f",
                      r.min_distance, r.argmin_t, r.max_rock_weight)};
}

Verdict WeightLock() {
  const WeightLockReport r = ReproduceWeightLock(10'000, 1e-9);
  return {r.pass,
          Fmt("s1 weight > 0.99 from t=%ld on, final %.12f, max ratio error %.2e, "
              "monotone %s",
              r.settle_t, r.final_s1_weight, r.max_ratio_error, r.monotone ? "yes" : "no")};
}

Verdict FullyObserved() {
  const SequenceFormGame sf = DeriveSequenceForm(BuildKuhn().tree);
  std::mt19937_64 rng(20260103);
  std::uniform_real_distribution<double> alpha(1.0, 3.0);
  std::uniform_int_distribution<int> count(0, 400);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> a;
    for (std::size_t i = 0; i < sf.infosets[1].size(); ++i) a.push_back({alpha(rng), alpha(rng)});
    const DirichletPrior prior = DirichletPrior::FromAlpha(sf, Player::kTwo, a);
    ObservationLog log;
    std::vector<double> n(13, 0.0);
    for (int s = 1; s < 13; ++s) {
      n[s] = count(rng);
      if (n[s] > 0) log.Append(MakeTerm({{s, 1.0}}), static_cast<std::int64_t>(n[s]));
    }
    const RealizationPlan y = EstimateFmap(sf, prior, log).estimate;
    for (const auto& set : sf.infosets[1]) {
      double total = 0.0;
      for (int k = 0; k < set.count; ++k) total += n[set.first + k] + prior.exponents(set.first + k) - 1;
      for (int k = 0; k < set.count; ++k) {
        const int s = set.first + k;
        worst = std::max(worst, std::abs(y(s) - (n[s] + prior.exponents(s) - 1) / total));
      }
    }
  }
  return {worst <= 1e-5, Fmt("50 cases, max |estimate - closed-form mode| = %.2e", worst)};
}

// Distance to the truth over the information sets the match reached, for
// the consistency diagnostic.
double ReachedDistance(const Simulator& sim, int o) {
  const SequenceFormGame& sf = sim.sequence_form();
  const std::uint64_t seed = sim.OpponentSeed(o);
  const BehavioralStrategy opponent = sim.DrawOpponent(seed);
  const RealizationPlan truth = BehavioralToRealization(sf, Player::kTwo, opponent);
  ObservationLog log;
  std::vector<bool> reached(sf.infosets[1].size(), false);
  sim.RunMatch(opponent, ResponseKind::kFmap, seed, o,
               [&](int, const SharedRandomness&, int leaf) {
                 log.Append(sf, sim.game().observability, leaf);
                 int s = sf.leaves[leaf].sequence[1];
                 while (s != 0) {
                   for (std::size_t i = 0; i < sf.infosets[1].size(); ++i) {
                     const auto& set = sf.infosets[1][i];
                     if (s >= set.first && s < set.first + set.count) {
                       reached[i] = true;
                       s = set.parent;
                       break;
                     }
                   }
                 }
               });
  const RealizationPlan model = EstimateFmap(sf, sim.prior(), log).estimate;
  double sq = 0.0;
  for (std::size_t i = 0; i < reached.size(); ++i) {
    if (!reached[i]) continue;
    const auto& set = sf.infosets[1][i];
    for (int k = 0; k < set.count; ++k) {
      sq += std::pow(model(set.first + k) - truth(set.first + k), 2);
    }
  }
  return std::sqrt(sq);
}

Verdict Consistency(const Simulator& sim, const ExperimentTable& table) {
  const int checkpoints[] = {10, 100, 500, 1000, 3000};
  std::string series;
  bool decreasing = true;
  double previous = std::numeric_limits<double>::infinity();
  for (int t : checkpoints) {
    const double d = table.At(ResponseKind::kFmap, t).mean_model_l2;
    series += Fmt("%s%d:%.4f", series.empty() ? "" : " ", t, d);
    decreasing = decreasing && d < previous;
    previous = d;
  }
  const double final_fmap = previous;
  bool sampling_above = true;
  std::string sampling;
  for (ResponseKind k : {ResponseKind::kBbr, ResponseKind::kMap, ResponseKind::kThompson}) {
    const double d1000 = table.At(k, 1000).mean_model_l2;
    const double d3000 = table.At(k, 3000).mean_model_l2;
    sampling_above = sampling_above && d1000 > table.At(ResponseKind::kFmap, 1000).mean_model_l2 &&
                     d3000 > final_fmap;
    sampling += Fmt(", %s %.4f", ToString(k), d3000);
  }
  const bool small = final_fmap < 0.1;

  // Diagnostic: how much of the remaining distance sits in information sets
  // the match never reached.
  const int probe = std::min(20, sim.config().opponents);
  double reached = 0.0;
  for (int o = 0; o < probe; ++o) reached += ReachedDistance(sim, o);
  Info(Fmt("FMAP mean distance restricted to reached information sets, first %d "
           "opponents, after t=%d: %.4f",
           probe, sim.config().iterations, reached / probe));

  return {decreasing && small && sampling_above,
          Fmt("FMAP mean distance %s (decreasing %s, < 0.1 at 3000 %s); at 3000%s "
              "(above FMAP %s)",
              series.c_str(), decreasing ? "yes" : "no", small ? "yes" : "no",
              sampling.c_str(), sampling_above ? "yes" : "no")};
}

Verdict FinalPayoffs(const ExperimentTable& table, int T, double seconds) {
  struct Target {
    ResponseKind kind;
    double value;
    double tol;
  };
  const Target targets[] = {{ResponseKind::kBestResponse, 0.576, 0.04},
                            {ResponseKind::kFmap, 0.573, 0.04},
                            {ResponseKind::kBbr, 0.557, 0.04},
                            {ResponseKind::kThompson, 0.547, 0.04},
                            {ResponseKind::kMap, 0.537, 0.04},
                            {ResponseKind::kBestNash, 0.173, 0.03}};
  bool within = true;
  std::string values;
  for (const auto& t : targets) {
    const double v = table.At(t.kind, T).mean_payoff;
    const bool ok = std::abs(v - t.value) <= t.tol;
    within = within && ok;
    values += Fmt("%s%s %.4f (target %.3f%s)", values.empty() ? "" : ", ", ToString(t.kind),
                  v, t.value, ok ? "" : ", outside");
  }
  const double fmap = table.At(ResponseKind::kFmap, T).mean_payoff;
  const double nash = table.At(ResponseKind::kBestNash, T).mean_payoff;
  bool ordered = true;
  for (ResponseKind k : {ResponseKind::kBbr, ResponseKind::kMap, ResponseKind::kThompson}) {
    const double v = table.At(k, T).mean_payoff;
    ordered = ordered && fmap > v && v > nash;
  }
  return {within && ordered, Fmt("%s; ordering FMAP > sampling > BestNash %s; %.0f s",
                                 values.c_str(), ordered ? "holds" : "violated", seconds)};
}

std::string Slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Verdict Determinism() {
  const fs::path root = fs::temp_directory_path() / ("seqmodel_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  auto run = [&](const std::string& name, const std::string& jobs) {
    const std::string out = (root / name).string();
    const char* argv[] = {"seqmodel", "experiment", "--opponents", "20", "--iterations", "500",
                          "--seed", "42", "--jobs", jobs.c_str(), "--out", out.c_str()};
    std::ostringstream sink_out, sink_err;
    return cli::RunCli(static_cast<int>(std::size(argv)), argv, sink_out, sink_err);
  };
  setenv("SEQMODEL_LOG", "error", 1);
  const int a = run("a", "1");
  const int b = run("b", "1");
  const int c = run("c", "4");
  bool same = a == 0 && b == 0 && c == 0;
  for (const char* file : {"records.csv", "aggregate.csv"}) {
    const std::string ref = Slurp(root / "a" / file);
    same = same && !ref.empty() && ref == Slurp(root / "b" / file) &&
           ref == Slurp(root / "c" / file);
  }
  fs::remove_all(root);
  return {same, "20 opponents x 500 iterations, seed 42, run twice serially and once "
                "with 4 workers: records.csv and aggregate.csv " +
                    std::string(same ? "byte-identical" : "differ")};
}

int Main() {
  Report("table-exactness", TableExactness());
  Report("game-value", GameValue());
  Report("gradient-correctness", GradientCorrectness());
  Report("projection-correctness", ProjectionCorrectness());
  Report("bbr-hull-trap", HullTrap());
  Report("bbr-weight-lock", WeightLock());
  Report("fully-observed-fmap", FullyObserved());

  MatchConfig config;  // defaults: 100 opponents, T = 3000, k = 10, alpha = 2
  const Simulator sim(config);
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  Info(Fmt("full-scale experiment: %d opponents x %d iterations, seed %llu, %u worker(s)",
           config.opponents, config.iterations,
           static_cast<unsigned long long>(config.seed), cores));
  const auto start = std::chrono::steady_clock::now();
  const ExperimentTable table = sim.RunExperiment();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Report("consistency", Consistency(sim, table));
  Report("final-payoffs", FinalPayoffs(table, config.iterations, seconds));
  Report("determinism", Determinism());

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace seqmodel

int main() { return seqmodel::Main(); }
