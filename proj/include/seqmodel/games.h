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

#ifndef SEQMODEL_GAMES_H_
#define SEQMODEL_GAMES_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "seqmodel/game_tree.h"

namespace seqmodel {

namespace internal {

// Action label with the acting player's card stripped ("Ch_K" -> "Ch").
inline std::string_view ActionName(std::string_view label) {
  return label.substr(0, label.find('_'));
}

// Space-separated labels of `leaf` with card suffixes removed.
inline std::string Skeleton(std::string_view leaf) {
  std::string out;
  std::size_t pos = 0;
  while (pos <= leaf.size()) {
    std::size_t end = leaf.find(' ', pos);
    if (end == std::string_view::npos) end = leaf.size();
    if (!out.empty()) out += ' ';
    out += ActionName(leaf.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

}  // namespace internal

// Kuhn poker with the card order K, Q, J. Player 1's information sets are
// declared K, K-after-check-bet, Q, ..., player 2's as Q-facing-bet,
// Q-facing-check, J..., K..., so the sequence columns come out in the usual
// table order. Deals are (K,Q), (K,J), (Q,K), (Q,J), (J,K), (J,Q).
inline Game BuildKuhn() {
  constexpr std::array<char, 3> kCards{'K', 'Q', 'J'};
  auto rank = [](char c) { return c == 'K' ? 2 : c == 'Q' ? 1 : 0; };
  auto suffixed = [](std::string a, char c) { return a + "_" + c; };

  GameTree tree("kuhn");
  std::array<int, 3> p1_open{}, p1_facing_bet{};
  for (int c = 0; c < 3; ++c) {
    const char card = kCards[c];
    p1_open[c] = tree.AddInfoSet(Player::kOne, std::string(1, card),
                                 {suffixed("B", card), suffixed("Ch", card)});
    p1_facing_bet[c] = tree.AddInfoSet(
        Player::kOne, std::string(1, card) + " Ch b",
        {suffixed("Ca", card), suffixed("F", card)});
  }
  // Player 2 declares Q, J, K.
  constexpr std::array<int, 3> kP2Order{1, 2, 0};
  std::array<int, 3> p2_facing_bet{}, p2_facing_check{};
  for (int c : kP2Order) {
    const char card = kCards[c];
    p2_facing_bet[c] = tree.AddInfoSet(
        Player::kTwo, std::string(1, card) + " B",
        {suffixed("ca", card), suffixed("f", card)});
    p2_facing_check[c] = tree.AddInfoSet(
        Player::kTwo, std::string(1, card) + " Ch",
        {suffixed("b", card), suffixed("ch", card)});
  }

  std::vector<std::string> deal_labels;
  std::vector<std::array<int, 2>> deals;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      deals.push_back({a, b});
      deal_labels.push_back(std::string{kCards[a], kCards[b]});
    }
  }
  const int root = tree.AddChance(
      std::nullopt, deal_labels,
      std::vector<Rational>(deals.size(), Rational(1, 6)));

  for (int d = 0; d < static_cast<int>(deals.size()); ++d) {
    const int c1 = deals[d][0], c2 = deals[d][1];
    const int sign = rank(kCards[c1]) > rank(kCards[c2]) ? 1 : -1;
    auto leaf = [&](Edge e, int p1_payoff) {
      tree.AddLeaf(e, Rational(p1_payoff), Rational(-p1_payoff));
    };
    const int open = tree.AddDecision(Edge{root, d}, Player::kOne, p1_open[c1]);
    // Bet: call -> showdown for 2, fold -> player 1 takes the ante.
    const int vs_bet =
        tree.AddDecision(Edge{open, 0}, Player::kTwo, p2_facing_bet[c2]);
    leaf({vs_bet, 0}, 2 * sign);
    leaf({vs_bet, 1}, 1);
    // Check: bet -> player 1 calls or folds; check -> showdown for 1.
    const int vs_check =
        tree.AddDecision(Edge{open, 1}, Player::kTwo, p2_facing_check[c2]);
    const int facing =
        tree.AddDecision(Edge{vs_check, 0}, Player::kOne, p1_facing_bet[c1]);
    leaf({facing, 0}, 2 * sign);
    leaf({facing, 1}, -1);
    leaf({vs_check, 1}, sign);
  }
  tree.Finalize();

  // A fold hides the opponent's card; a showdown reveals it.
  auto fold_ended = [&](int l) {
    const std::string skel = internal::Skeleton(tree.leaf(l).label);
    return skel == "B f" || skel == "Ch b F";
  };
  auto obs = ObservabilityFunction::FromRelation(
      tree, [&](Player p, int l, int m) {
        const auto& a = tree.leaf(l);
        const auto& b = tree.leaf(m);
        return fold_ended(l) && a.sequence[Index(p)] == b.sequence[Index(p)] &&
               internal::Skeleton(a.label) == internal::Skeleton(b.label);
      });
  return Game{"kuhn", std::move(tree), std::move(obs)};
}

// Rock-Paper-Scissors as a two-move tree: player 2 chooses without seeing
// player 1's move. Both moves are revealed afterwards.
inline Game BuildRps() {
  const std::vector<std::string> kMoves{"Rock", "Paper", "Scissors"};
  GameTree tree("rps");
  const int p1 = tree.AddInfoSet(Player::kOne, "P1", kMoves);
  const int p2 = tree.AddInfoSet(Player::kTwo, "P2", kMoves);
  const int root = tree.AddDecision(std::nullopt, Player::kOne, p1);
  for (int a = 0; a < 3; ++a) {
    const int reply = tree.AddDecision(Edge{root, a}, Player::kTwo, p2);
    for (int b = 0; b < 3; ++b) {
      // Move a beats move (a + 2) % 3.
      const int u = a == b ? 0 : (a + 2) % 3 == b ? 1 : -1;
      tree.AddLeaf(Edge{reply, b}, Rational(u), Rational(-u));
    }
  }
  tree.Finalize();
  auto obs = ObservabilityFunction::FromRelation(
      tree, [](Player, int, int) { return false; });
  return Game{"rps", std::move(tree), std::move(obs)};
}

inline Game BuildGame(std::string_view id) {
  if (id == "kuhn") return BuildKuhn();
  if (id == "rps") return BuildRps();
  throw InvalidArgument("unknown game '" + std::string(id) + "'");
}

}  // namespace seqmodel

#endif  // SEQMODEL_GAMES_H_
