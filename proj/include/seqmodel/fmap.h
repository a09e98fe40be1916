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

#ifndef SEQMODEL_FMAP_H_
#define SEQMODEL_FMAP_H_

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seqmodel/bayesian.h"
#include "seqmodel/error.h"
#include "seqmodel/projection.h"
#include "seqmodel/sequence_form.h"

namespace seqmodel {

struct PGDConfig {
  double initial_step = 1.0;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double min_step = 1e-16;  // safeguard on the step size
  double tolerance = 1e-7;  // on ||y_{k+1} - y_k||_2
  int max_iterations = 1000;
  double floor = 1e-6;  // lower bound on every sequence weight

  void Validate() const {
    if (!(armijo_c > 0.0 && armijo_c < 1.0) ||
        !(backtrack > 0.0 && backtrack < 1.0) || !(floor > 0.0) ||
        !(tolerance > 0.0) || !(initial_step > 0.0) || !(min_step > 0.0) ||
        max_iterations < 1) {
      throw InvalidArgument("PGD configuration out of range");
    }
  }
};

enum class Termination { kConverged, kMaxIterations, kStepSafeguard };

inline const char* ToString(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kMaxIterations: return "max-iterations";
    case Termination::kStepSafeguard: return "step-safeguard";
  }
  return "?";
}

struct SolverResult {
  RealizationPlan estimate;
  double objective = 0.0;
  int iterations = 0;
  Termination reason = Termination::kConverged;
};

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  double step = 0.0;
};

inline void WriteTraceCsv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "iteration,objective,step\n";
  os.precision(17);
  for (const auto& r : rows) {
    os << r.iteration << ',' << r.objective << ',' << r.step << '\n';
  }
}

// Full-posterior MAP estimate of the modeled player's realization plan:
// projected gradient descent on the negative log posterior over
// {F y = f, y >= floor}, with Armijo backtracking from the initial step on
// every iteration.
class FmapSolver {
 public:
  FmapSolver(const SequenceFormGame& game, PGDConfig config = {},
             Player modeled = Player::kTwo)
      : config_(Validated(config)),
        projector_(game.Constraints(modeled), game.ConstraintRhs(modeled),
                   config_.floor),
        start_(StartingPoint(game, modeled)) {}

  const PGDConfig& config() const { return config_; }
  const PolytopeProjector& projector() const { return projector_; }

  SolverResult Estimate(const DirichletPrior& prior, const ObservationLog& log,
                        const std::optional<RealizationPlan>& warm_start = {},
                        std::vector<TraceRow>* trace = nullptr) const {
    if (prior.exponents.size() != projector_.dimension()) {
      throw InvalidArgument("prior does not match the modeled player");
    }
    if (prior.MinExponent() < 1.0) {
      throw PreconditionError(
          "posterior objective is convex only when every alpha >= 1");
    }
    RealizationPlan y = start_;
    if (warm_start) {
      CheckWarmStart(*warm_start);
      y = *warm_start;
    }

    const auto& cfg = config_;
    double fy = NegLogPosterior(y, prior, log);
    if (trace) trace->push_back({0, fy, 0.0});
    for (int k = 0; k < cfg.max_iterations; ++k) {
      const Eigen::VectorXd grad = NegLogPosteriorGradient(y, prior, log);
      if (k == 0 && grad.norm() < 1e-14) {
        return {y, fy, 0, Termination::kConverged};
      }
      double eta = cfg.initial_step;
      RealizationPlan next;
      double f_next = 0.0;
      while (true) {
        next = projector_.Project(y - eta * grad);
        f_next = NegLogPosterior(next, prior, log);
        if (f_next <= fy + cfg.armijo_c * grad.dot(next - y)) break;
        eta *= cfg.backtrack;
        if (eta < cfg.min_step) {
          return {y, fy, k, Termination::kStepSafeguard};
        }
      }
      const double moved = (next - y).norm();
      y = std::move(next);
      fy = f_next;
      if (trace) trace->push_back({k + 1, fy, eta});
      if (moved < cfg.tolerance) {
        return {y, fy, k + 1, Termination::kConverged};
      }
    }
    return {y, fy, cfg.max_iterations, Termination::kMaxIterations};
  }

 private:
  static PGDConfig Validated(PGDConfig config) {
    config.Validate();
    return config;
  }

  // Uniform behavioral strategy (the mode of a symmetric prior), projected
  // in case a deep tree pushes some weight below the floor.
  RealizationPlan StartingPoint(const SequenceFormGame& game, Player p) const {
    RealizationPlan y = BehavioralToRealization(game, p, UniformBehavioral(game, p));
    if (y.minCoeff() < config_.floor) y = projector_.Project(y);
    return y;
  }

  void CheckWarmStart(const RealizationPlan& y) const {
    if (y.size() != projector_.dimension()) {
      throw InvalidArgument("warm start has the wrong dimension");
    }
    const double eq =
        (projector_.constraints() * y - projector_.rhs()).lpNorm<Eigen::Infinity>();
    if (eq > 1e-8 || y.minCoeff() < config_.floor - 1e-10) {
      throw InvalidArgument("warm start is infeasible");
    }
  }

  PGDConfig config_;
  PolytopeProjector projector_;
  RealizationPlan start_;
};

inline SolverResult EstimateFmap(const SequenceFormGame& game,
                                 const DirichletPrior& prior,
                                 const ObservationLog& log,
                                 const std::optional<RealizationPlan>& warm_start = {},
                                 const PGDConfig& config = {}) {
  return FmapSolver(game, config, prior.player).Estimate(prior, log, warm_start);
}

}  // namespace seqmodel

#endif  // SEQMODEL_FMAP_H_
