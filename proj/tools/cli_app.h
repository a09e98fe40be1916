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

#ifndef SEQMODEL_TOOLS_CLI_APP_H_
#define SEQMODEL_TOOLS_CLI_APP_H_

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "seqmodel/counterexamples.h"
#include "seqmodel/error.h"
#include "seqmodel/games.h"
#include "seqmodel/sequence_form.h"
#include "seqmodel/simulator.h"

namespace seqmodel::cli {

enum ExitCode { kOk = 0, kConfigError = 1, kNumericalError = 2 };

namespace fs = std::filesystem;
using nlohmann::json;

inline std::shared_ptr<spdlog::logger> MakeLogger() {
  // Unregistered, so repeated calls in one process do not collide.
  auto logger = std::make_shared<spdlog::logger>(
      "seqmodel", std::make_shared<spdlog::sinks::stderr_sink_st>());
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("SEQMODEL_LOG")) {
    const std::string v = env;
    if (v == "error") level = spdlog::level::err;
    else if (v == "debug") level = spdlog::level::debug;
    else if (v != "info") {
      throw InvalidArgument("SEQMODEL_LOG must be error, info or debug");
    }
  }
  logger->set_level(level);
  return logger;
}

inline std::vector<ResponseKind> ParseAlgorithms(const std::string& csv) {
  std::vector<ResponseKind> out;
  std::stringstream ss(csv);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    const ResponseKind k = ParseResponseKind(item);
    if (std::find(out.begin(), out.end(), k) != out.end()) {
      throw InvalidArgument("algorithm '" + item + "' listed twice");
    }
    out.push_back(k);
  }
  return out;
}

inline json ConfigToJson(const MatchConfig& c) {
  json algos = json::array();
  for (ResponseKind k : c.algorithms) algos.push_back(ToString(k));
  return {
      {"game", c.game},
      {"iterations", c.iterations},
      {"opponents", c.opponents},
      {"samples", c.samples},
      {"alpha", c.alpha},
      {"seed", c.seed},
      {"algorithms", algos},
      {"warm_start", c.warm_start},
      {"pgd",
       {{"initial_step", c.pgd.initial_step},
        {"armijo_c", c.pgd.armijo_c},
        {"backtrack", c.pgd.backtrack},
        {"min_step", c.pgd.min_step},
        {"tolerance", c.pgd.tolerance},
        {"max_iterations", c.pgd.max_iterations},
        {"floor", c.pgd.floor}}},
  };
}

inline MatchConfig ConfigFromJson(const json& j) {
  MatchConfig c;
  c.game = j.at("game").get<std::string>();
  c.iterations = j.at("iterations").get<int>();
  c.opponents = j.at("opponents").get<int>();
  c.samples = j.at("samples").get<int>();
  c.alpha = j.at("alpha").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.algorithms.clear();
  for (const auto& a : j.at("algorithms")) {
    c.algorithms.push_back(ParseResponseKind(a.get<std::string>()));
  }
  c.warm_start = j.value("warm_start", true);
  if (j.contains("pgd")) {
    const json& p = j.at("pgd");
    c.pgd.initial_step = p.at("initial_step").get<double>();
    c.pgd.armijo_c = p.at("armijo_c").get<double>();
    c.pgd.backtrack = p.at("backtrack").get<double>();
    c.pgd.min_step = p.at("min_step").get<double>();
    c.pgd.tolerance = p.at("tolerance").get<double>();
    c.pgd.max_iterations = p.at("max_iterations").get<int>();
    c.pgd.floor = p.at("floor").get<double>();
  }
  return c;
}

inline json Manifest(const Simulator& sim) {
  const MatchConfig& c = sim.config();
  json seeds = json::array();
  for (int o = 0; o < c.opponents; ++o) seeds.push_back(sim.OpponentSeed(o));
  return {{"software", "seqmodel"},
          {"version", kVersion},
          {"config", ConfigToJson(c)},
          {"opponent_seeds", seeds},
          {"outputs", {"records.csv", "aggregate.csv"}}};
}

inline std::ofstream OpenOutput(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot write '" + path.string() + "'");
  return os;
}

inline void PrepareDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw InvalidArgument("cannot create output directory '" + dir.string() +
                          "'");
  }
}

inline int RunExperimentCommand(MatchConfig config, const fs::path& out_dir,
                                spdlog::logger& log) {
  PrepareDirectory(out_dir);
  const Simulator sim(std::move(config));
  const MatchConfig& c = sim.config();
  log.info("game={} opponents={} iterations={} samples={} alpha={} seed={}",
           c.game, c.opponents, c.iterations, c.samples, c.alpha, c.seed);
  const ExperimentTable table = sim.RunExperiment([&](int done, int total) {
    log.debug("opponent {}/{} done", done, total);
    if (done == total || done % 10 == 0) log.info("{}/{} opponents", done, total);
  });
  {
    auto os = OpenOutput(out_dir / "records.csv");
    WriteRecordsCsv(os, table.records);
  }
  {
    auto os = OpenOutput(out_dir / "aggregate.csv");
    WriteAggregateCsv(os, table.aggregate);
  }
  {
    auto os = OpenOutput(out_dir / "manifest.json");
    os << Manifest(sim).dump(2) << '\n';
  }
  for (ResponseKind k : c.algorithms) {
    const AggregateRow& last = table.At(k, c.iterations);
    log.info("{} final mean payoff {:.4f}, model distance {:.4f}", ToString(k),
             last.mean_payoff, last.mean_model_l2);
  }
  return kOk;
}

inline int RunPropsCommand(std::ostream& out) {
  const HullTrapReport p1 = ReproduceHullTrap();
  out << (p1.pass ? "PASS" : "FAIL")
      << " hull_trap min_distance=" << p1.min_distance
      << " at_t=" << p1.argmin_t << " max_rock_weight=" << p1.max_rock_weight
      << '\n';
  const WeightLockReport p2 = ReproduceWeightLock();
  out << (p2.pass ? "PASS" : "FAIL") << " weight_lock settle_t=" << p2.settle_t
      << " final_s1_weight=" << p2.final_s1_weight
      << " max_ratio_error=" << p2.max_ratio_error
      << " monotone=" << (p2.monotone ? "yes" : "no")
      << " final_distance=" << p2.final_distance << '\n';
  return p1.pass && p2.pass ? kOk : kNumericalError;
}

inline void WriteObservabilityCsv(std::ostream& os, const Game& game) {
  os << "player,leaf,observed\n";
  for (Player p : {Player::kOne, Player::kTwo}) {
    for (const Leaf& leaf : game.tree.leaves()) {
      os << (p == Player::kOne ? 1 : 2) << ',' << leaf.label << ',';
      const auto set = Observe(game, p, leaf.label);
      for (std::size_t i = 0; i < set.size(); ++i) {
        os << (i ? ";" : "") << set[i];
      }
      os << '\n';
    }
  }
}

inline int RunDumpGameCommand(const std::string& game_id,
                              const fs::path& out_dir, spdlog::logger& log) {
  PrepareDirectory(out_dir);
  const Game game = BuildGame(game_id);
  const SequenceFormGame sf = DeriveSequenceForm(game.tree);
  auto rows = [&](Player p) {
    std::vector<std::string> r{std::string(kEmptySequenceLabel)};
    const auto& sets = sf.infoset_labels[Index(p)];
    r.insert(r.end(), sets.begin(), sets.end());
    return r;
  };
  {
    auto os = OpenOutput(out_dir / "E.csv");
    WriteMatrixCsv(os, sf.E, rows(Player::kOne), sf.sequence_labels[0]);
  }
  {
    auto os = OpenOutput(out_dir / "F.csv");
    WriteMatrixCsv(os, sf.F, rows(Player::kTwo), sf.sequence_labels[1]);
  }
  {
    auto os = OpenOutput(out_dir / "A.csv");
    WriteMatrixCsv(os, sf.A_exact, sf.sequence_labels[0], sf.sequence_labels[1]);
  }
  {
    auto os = OpenOutput(out_dir / "observability.csv");
    WriteObservabilityCsv(os, game);
  }
  log.info("wrote E.csv, F.csv, A.csv, observability.csv to {}",
           out_dir.string());
  return kOk;
}

// Entry point shared by the binary and the tests.
inline int RunCli(int argc, const char* const* argv,
                  std::ostream& out = std::cout,
                  std::ostream& err = std::cerr) {
  CLI::App app{"Bayesian opponent modeling in sequence-form games", "seqmodel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  MatchConfig config;
  std::string algos = "fmap,bbr,map,thompson,bestnash,bestresponse";
  std::string out_dir = "results";
  std::string manifest;

  auto* experiment = app.add_subcommand("experiment", "run repeated matches");
  experiment->add_option("--game", config.game, "kuhn or rps")
      ->check(CLI::IsMember({"kuhn", "rps"}))
      ->capture_default_str();
  experiment->add_option("--algos", algos, "comma-separated algorithms")
      ->capture_default_str();
  experiment->add_option("--opponents", config.opponents)->capture_default_str();
  experiment->add_option("--iterations", config.iterations)
      ->capture_default_str();
  experiment->add_option("--samples", config.samples, "k for sampled baselines")
      ->capture_default_str();
  experiment->add_option("--alpha", config.alpha, "symmetric Dirichlet alpha")
      ->capture_default_str();
  experiment->add_option("--seed", config.seed, "master seed")
      ->capture_default_str();
  experiment->add_option("--jobs", config.jobs, "worker threads, 0 = all cores")
      ->capture_default_str();
  experiment->add_option("--out", out_dir, "output directory")
      ->capture_default_str();
  experiment->add_option("--manifest", manifest,
                         "replay the configuration recorded in a manifest");

  std::string game_id = "kuhn";
  std::string dump_dir = ".";
  auto* dump = app.add_subcommand("dump-game", "write E, F, A and observability");
  dump->add_option("--game", game_id)
      ->check(CLI::IsMember({"kuhn", "rps"}))
      ->capture_default_str();
  dump->add_option("--out", dump_dir, "output directory")->capture_default_str();

  auto* props = app.add_subcommand("props", "reproduce the RPS counterexamples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    auto log = MakeLogger();
    if (*experiment) {
      if (!manifest.empty()) {
        std::ifstream is(manifest);
        if (!is) throw InvalidArgument("cannot read manifest '" + manifest + "'");
        const int jobs = config.jobs;
        try {
          config = ConfigFromJson(json::parse(is).at("config"));
        } catch (const json::exception& e) {
          throw InvalidArgument(std::string("bad manifest: ") + e.what());
        }
        config.jobs = jobs;
      } else {
        config.algorithms = ParseAlgorithms(algos);
      }
      return RunExperimentCommand(std::move(config), out_dir, *log);
    }
    if (*dump) return RunDumpGameCommand(game_id, dump_dir, *log);
    if (*props) return RunPropsCommand(out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const DomainError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace seqmodel::cli

#endif  // SEQMODEL_TOOLS_CLI_APP_H_
