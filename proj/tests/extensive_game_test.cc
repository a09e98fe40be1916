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

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kuhn_tables.h"
#include "seqmodel/error.h"
#include "seqmodel/game_tree.h"
#include "seqmodel/games.h"

namespace seqmodel {
namespace {

using StringSet = std::set<std::string>;

StringSet AsSet(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

TEST(KuhnTree, Shape) {
  const Game g = BuildKuhn();
  const Node& root = g.tree.node(g.tree.root());
  ASSERT_EQ(root.kind, NodeKind::kChance);
  ASSERT_EQ(root.chance_probs.size(), 6u);
  for (const auto& p : root.chance_probs) EXPECT_EQ(p, Rational(1, 6));
  EXPECT_EQ(g.tree.infosets(Player::kOne).size(), 6u);
  EXPECT_EQ(g.tree.infosets(Player::kTwo).size(), 6u);
  EXPECT_EQ(g.tree.SequenceCount(Player::kOne), 13);
  EXPECT_EQ(g.tree.SequenceCount(Player::kTwo), 13);
  EXPECT_EQ(g.tree.leaves().size(), 30u);
  EXPECT_TRUE(g.tree.zero_sum());
}

TEST(KuhnTree, SequenceLabels) {
  const Game g = BuildKuhn();
  for (int s = 0; s < 13; ++s) {
    EXPECT_EQ(g.tree.SequenceLabels(Player::kOne)[s], testing::kPlayer1Sequences[s]);
    EXPECT_EQ(g.tree.SequenceLabels(Player::kTwo)[s], testing::kPlayer2Sequences[s]);
  }
}

TEST(KuhnTree, ObservabilityMatchesPublishedTable) {
  const Game g = BuildKuhn();
  const auto& rows = testing::KuhnObservability();
  ASSERT_EQ(rows.size(), g.tree.leaves().size());
  int checked = 0;
  for (const auto& row : rows) {
    SCOPED_TRACE(row.leaf);
    EXPECT_EQ(AsSet(Observe(g, Player::kOne, row.leaf)), AsSet(row.o1));
    EXPECT_EQ(AsSet(Observe(g, Player::kTwo, row.leaf)), AsSet(row.o2));
    ++checked;
  }
  EXPECT_EQ(checked, 30);
}

TEST(KuhnTree, ObservabilityExamples) {
  const Game g = BuildKuhn();
  EXPECT_EQ(AsSet(Observe(g, Player::kOne, "B_K f_Q")),
            (StringSet{"B_K f_Q", "B_K f_J"}));
  EXPECT_EQ(AsSet(Observe(g, Player::kTwo, "Ch_K ch_Q")), (StringSet{"Ch_K ch_Q"}));
  EXPECT_EQ(AsSet(Observe(g, Player::kOne, "Ch_K b_J F_K")),
            (StringSet{"Ch_K b_J F_K", "Ch_K b_Q F_K"}));
  EXPECT_EQ(AsSet(Observe(g, Player::kTwo, "B_Q f_J")),
            (StringSet{"B_Q f_J", "B_K f_J"}));
  EXPECT_EQ(AsSet(Observe(g, Player::kOne, "B_K ca_Q")), (StringSet{"B_K ca_Q"}));
}

TEST(KuhnTree, ObservationSetsShareOwnSequence) {
  const Game g = BuildKuhn();
  for (int l = 0; l < static_cast<int>(g.tree.leaves().size()); ++l) {
    for (Player p : {Player::kOne, Player::kTwo}) {
      for (int m : g.observability.Observe(p, l)) {
        EXPECT_EQ(g.tree.leaf(m).sequence[Index(p)],
                  g.tree.leaf(l).sequence[Index(p)]);
      }
    }
  }
}

TEST(KuhnTree, UnknownLeafIsRejected) {
  const Game g = BuildKuhn();
  EXPECT_THROW(Observe(g, Player::kOne, "B_K xx_Q"), InvalidArgument);
  EXPECT_THROW(g.observability.Observe(Player::kOne, 30), InvalidArgument);
}

TEST(RpsTree, Shape) {
  const Game g = BuildRps();
  EXPECT_EQ(g.tree.leaves().size(), 9u);
  EXPECT_EQ(g.tree.SequenceCount(Player::kTwo), 4);
  EXPECT_EQ(Observe(g, Player::kOne, "Paper Rock"),
            std::vector<std::string>{"Paper Rock"});
  EXPECT_EQ(g.tree.leaf(g.tree.FindLeaf("Paper Rock")).payoff[0], Rational(1));
  EXPECT_EQ(g.tree.leaf(g.tree.FindLeaf("Rock Paper")).payoff[0], Rational(-1));
  EXPECT_EQ(g.tree.leaf(g.tree.FindLeaf("Rock Scissors")).payoff[0], Rational(1));
}

TEST(BuildGame, UnknownIdIsRejected) {
  EXPECT_THROW(BuildGame("chess"), InvalidArgument);
}

TEST(GameTree, ChanceProbabilitiesMustSumToOne) {
  GameTree t("bad");
  const int c = t.AddChance(std::nullopt, {"a", "b"}, {Rational(1, 3), Rational(1, 3)});
  t.AddLeaf(Edge{c, 0}, Rational(0), Rational(0));
  t.AddLeaf(Edge{c, 1}, Rational(0), Rational(0));
  EXPECT_THROW(t.Finalize(), InvalidArgument);
}

TEST(GameTree, PerfectRecallIsEnforced) {
  // Player 1 reaches the same set after two different own actions.
  GameTree t("forgetful");
  const int first = t.AddInfoSet(Player::kOne, "first", {"x", "y"});
  const int second = t.AddInfoSet(Player::kOne, "second", {"u", "v"});
  const int root = t.AddDecision(std::nullopt, Player::kOne, first);
  for (int a = 0; a < 2; ++a) {
    const int n = t.AddDecision(Edge{root, a}, Player::kOne, second);
    t.AddLeaf(Edge{n, 0}, Rational(0), Rational(0));
    t.AddLeaf(Edge{n, 1}, Rational(0), Rational(0));
  }
  EXPECT_THROW(t.Finalize(), InvalidArgument);
}

TEST(GameTree, UnattachedChildIsRejected) {
  GameTree t("open");
  const int s = t.AddInfoSet(Player::kOne, "s", {"x", "y"});
  const int root = t.AddDecision(std::nullopt, Player::kOne, s);
  t.AddLeaf(Edge{root, 0}, Rational(0), Rational(0));
  EXPECT_THROW(t.Finalize(), InvalidArgument);
}

TEST(GameTree, NonZeroSumIsDetected) {
  GameTree t("general");
  const int s = t.AddInfoSet(Player::kOne, "s", {"x", "y"});
  const int root = t.AddDecision(std::nullopt, Player::kOne, s);
  t.AddLeaf(Edge{root, 0}, Rational(1), Rational(1));
  t.AddLeaf(Edge{root, 1}, Rational(0), Rational(0));
  t.Finalize();
  EXPECT_FALSE(t.zero_sum());
}

TEST(Observability, SetMustContainItsLeaf) {
  const Game g = BuildRps();
  std::array<ObservabilityFunction::LeafSets, 2> sets;
  for (auto& s : sets) s.assign(9, {0});
  EXPECT_THROW(ObservabilityFunction(g.tree, sets), InvalidArgument);
}

}  // namespace
}  // namespace seqmodel
