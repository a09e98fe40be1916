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

#ifndef SEQMODEL_GAME_TREE_H_
#define SEQMODEL_GAME_TREE_H_

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "seqmodel/error.h"

namespace seqmodel {

using Rational = boost::rational<std::int64_t>;

inline double ToDouble(const Rational& r) {
  return boost::rational_cast<double>(r);
}

enum class Player { kOne = 0, kTwo = 1 };

inline constexpr int Index(Player p) { return static_cast<int>(p); }
inline constexpr Player Opponent(Player p) {
  return p == Player::kOne ? Player::kTwo : Player::kOne;
}

enum class NodeKind { kChance, kDecision, kTerminal };

// Identifies the child slot `action` of node `node`.
struct Edge {
  int node;
  int action;
};

// Label used for the empty action sequence of either player.
inline constexpr std::string_view kEmptySequenceLabel = "∅";

struct Node {
  NodeKind kind = NodeKind::kTerminal;
  Player player = Player::kOne;  // decision nodes only
  int infoset = -1;              // index into the owner's information sets
  int chance_index = -1;         // dense index among chance nodes
  int leaf = -1;                 // dense index among terminal nodes
  int parent = -1;
  int parent_action = -1;
  std::vector<int> children;  // one slot per action / chance outcome
  std::vector<std::string> outcome_labels;  // chance nodes
  std::vector<Rational> chance_probs;       // chance nodes
  // Sequence index of each player's last move on the path to this node;
  // 0 is the empty sequence. Filled by GameTree::Finalize.
  std::array<int, 2> sequence{0, 0};
};

struct InfoSet {
  Player owner = Player::kOne;
  std::string label;
  std::vector<std::string> actions;
  std::vector<int> nodes;
  int parent_sequence = 0;  // owner's sequence leading into this set
  int first_sequence = 0;   // sequence index of actions[0]
};

struct Leaf {
  int node = -1;
  std::string label;  // player actions along the path, space separated
  Rational chance_prob{1};
  std::array<Rational, 2> payoff{};
  std::array<int, 2> sequence{0, 0};
};

// Two-player extensive-form game with chance moves. Nodes are added through
// the Add* calls and the tree becomes read-only after Finalize(), which
// checks structure and perfect recall and enumerates action sequences.
//
// Sequences of a player are numbered 0 (empty), then information set by
// information set in declaration order, actions in their listed order. The
// declaration order of information sets is therefore the canonical order of
// rows and columns of the sequence-form matrices.
class GameTree {
 public:
  explicit GameTree(std::string name) : name_(std::move(name)) {}

  int AddInfoSet(Player owner, std::string label,
                 std::vector<std::string> actions) {
    RequireMutable();
    if (actions.empty()) {
      throw InvalidArgument("information set '" + label + "' has no actions");
    }
    auto& sets = infosets_[Index(owner)];
    sets.push_back(InfoSet{owner, std::move(label), std::move(actions), {}});
    return static_cast<int>(sets.size()) - 1;
  }

  int AddChance(std::optional<Edge> from, std::vector<std::string> labels,
                std::vector<Rational> probs) {
    if (labels.size() != probs.size() || labels.empty()) {
      throw InvalidArgument("chance node needs one probability per outcome");
    }
    Node n;
    n.kind = NodeKind::kChance;
    n.chance_index = chance_count_++;
    n.children.assign(labels.size(), -1);
    n.outcome_labels = std::move(labels);
    n.chance_probs = std::move(probs);
    return Attach(from, std::move(n));
  }

  int AddDecision(std::optional<Edge> from, Player player, int infoset) {
    const auto& sets = infosets_[Index(player)];
    if (infoset < 0 || infoset >= static_cast<int>(sets.size())) {
      throw InvalidArgument("unknown information set");
    }
    Node n;
    n.kind = NodeKind::kDecision;
    n.player = player;
    n.infoset = infoset;
    n.children.assign(sets[infoset].actions.size(), -1);
    return Attach(from, std::move(n));
  }

  int AddLeaf(std::optional<Edge> from, Rational payoff1, Rational payoff2) {
    Node n;
    n.kind = NodeKind::kTerminal;
    n.leaf = static_cast<int>(leaves_.size());
    const int id = Attach(from, std::move(n));
    Leaf leaf;
    leaf.node = id;
    leaf.payoff = {payoff1, payoff2};
    leaves_.push_back(std::move(leaf));
    return id;
  }

  void Finalize();

  const std::string& name() const { return name_; }
  bool finalized() const { return finalized_; }
  int root() const { return 0; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int id) const { return nodes_.at(id); }
  const std::vector<InfoSet>& infosets(Player p) const {
    return infosets_[Index(p)];
  }
  const std::vector<Leaf>& leaves() const { return leaves_; }
  const Leaf& leaf(int id) const {
    if (id < 0 || id >= static_cast<int>(leaves_.size())) {
      throw InvalidArgument("unknown leaf index " + std::to_string(id));
    }
    return leaves_[id];
  }
  int chance_node_count() const { return chance_count_; }
  bool zero_sum() const { return zero_sum_; }

  int FindLeaf(std::string_view label) const {
    auto it = leaf_by_label_.find(std::string(label));
    if (it == leaf_by_label_.end()) {
      throw InvalidArgument("unknown leaf '" + std::string(label) + "'");
    }
    return it->second;
  }

  // Number of sequences of `p`, including the empty one.
  int SequenceCount(Player p) const {
    return static_cast<int>(sequence_labels_[Index(p)].size());
  }
  int SequenceIndex(Player p, int infoset, int action) const {
    return infosets_[Index(p)].at(infoset).first_sequence + action;
  }
  const std::vector<std::string>& SequenceLabels(Player p) const {
    return sequence_labels_[Index(p)];
  }
  int FindSequence(Player p, std::string_view label) const;

 private:
  void RequireMutable() const {
    if (finalized_) throw InvalidArgument("game tree already finalized");
  }

  int Attach(std::optional<Edge> from, Node n) {
    RequireMutable();
    const int id = static_cast<int>(nodes_.size());
    if (!from) {
      if (!nodes_.empty()) throw InvalidArgument("tree already has a root");
    } else {
      if (from->node < 0 || from->node >= id) {
        throw InvalidArgument("edge refers to an unknown node");
      }
      auto& parent = nodes_[from->node];
      if (from->action < 0 ||
          from->action >= static_cast<int>(parent.children.size()) ||
          parent.children[from->action] != -1) {
        throw InvalidArgument("edge slot invalid or already used");
      }
      parent.children[from->action] = id;
      n.parent = from->node;
      n.parent_action = from->action;
    }
    nodes_.push_back(std::move(n));
    return id;
  }

  std::string name_;
  std::vector<Node> nodes_;
  std::array<std::vector<InfoSet>, 2> infosets_;
  std::vector<Leaf> leaves_;
  std::array<std::vector<std::string>, 2> sequence_labels_;
  std::unordered_map<std::string, int> leaf_by_label_;
  int chance_count_ = 0;
  bool zero_sum_ = true;
  bool finalized_ = false;
};

inline int GameTree::FindSequence(Player p, std::string_view label) const {
  const auto& labels = sequence_labels_[Index(p)];
  for (int s = 0; s < static_cast<int>(labels.size()); ++s) {
    if (labels[s] == label) return s;
  }
  throw InvalidArgument("unknown sequence '" + std::string(label) + "'");
}

inline void GameTree::Finalize() {
  RequireMutable();
  if (nodes_.empty()) throw InvalidArgument("empty game tree");

  for (auto& sets : infosets_) {
    int next = 1;
    for (auto& set : sets) {
      set.first_sequence = next;
      next += static_cast<int>(set.actions.size());
      set.nodes.clear();
    }
  }

  // Depth-first walk carrying each player's last sequence, chance reach and
  // the action labels of the path.
  struct Frame {
    int node;
    std::array<int, 2> sequence;
    Rational reach;
    std::vector<std::string> path;
  };
  std::vector<Frame> stack{{root(), {0, 0}, Rational(1), {}}};
  std::vector<bool> seen(nodes_.size(), false);
  std::array<std::vector<bool>, 2> infoset_seen{
      std::vector<bool>(infosets_[0].size(), false),
      std::vector<bool>(infosets_[1].size(), false)};

  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();
    Node& n = nodes_[fr.node];
    seen[fr.node] = true;
    n.sequence = fr.sequence;
    for (int c : n.children) {
      if (c < 0) {
        throw InvalidArgument("node " + std::to_string(fr.node) +
                              " has an unattached child slot");
      }
    }
    switch (n.kind) {
      case NodeKind::kChance: {
        Rational total(0);
        for (const auto& p : n.chance_probs) {
          if (p <= Rational(0)) throw InvalidArgument("chance probability must be > 0");
          total += p;
        }
        if (total != Rational(1)) {
          throw InvalidArgument("chance probabilities do not sum to 1");
        }
        for (int a = static_cast<int>(n.children.size()) - 1; a >= 0; --a) {
          stack.push_back({n.children[a], fr.sequence,
                           fr.reach * n.chance_probs[a], fr.path});
        }
        break;
      }
      case NodeKind::kDecision: {
        const int p = Index(n.player);
        InfoSet& set = infosets_[p][n.infoset];
        if (!infoset_seen[p][n.infoset]) {
          infoset_seen[p][n.infoset] = true;
          set.parent_sequence = fr.sequence[p];
        } else if (set.parent_sequence != fr.sequence[p]) {
          throw InvalidArgument("perfect recall violated at information set '" +
                                set.label + "'");
        }
        set.nodes.push_back(fr.node);
        for (int a = static_cast<int>(n.children.size()) - 1; a >= 0; --a) {
          Frame child{n.children[a], fr.sequence, fr.reach, fr.path};
          child.sequence[p] = set.first_sequence + a;
          child.path.push_back(set.actions[a]);
          stack.push_back(std::move(child));
        }
        break;
      }
      case NodeKind::kTerminal: {
        Leaf& leaf = leaves_[n.leaf];
        leaf.chance_prob = fr.reach;
        leaf.sequence = fr.sequence;
        leaf.label.clear();
        for (const auto& a : fr.path) {
          if (!leaf.label.empty()) leaf.label += ' ';
          leaf.label += a;
        }
        if (leaf.payoff[1] != -leaf.payoff[0]) zero_sum_ = false;
        break;
      }
    }
  }
  for (bool s : seen) {
    if (!s) throw InvalidArgument("tree contains unreachable nodes");
  }
  for (int p = 0; p < 2; ++p) {
    for (std::size_t i = 0; i < infosets_[p].size(); ++i) {
      if (!infoset_seen[p][i]) {
        throw InvalidArgument("information set '" + infosets_[p][i].label +
                              "' contains no nodes");
      }
    }
  }

  for (int p = 0; p < 2; ++p) {
    auto& labels = sequence_labels_[p];
    labels.assign(1, std::string(kEmptySequenceLabel));
    for (const auto& set : infosets_[p]) {
      for (const auto& a : set.actions) {
        labels.push_back(set.parent_sequence == 0
                             ? a
                             : labels[set.parent_sequence] + " " + a);
      }
    }
  }

  leaf_by_label_.clear();
  for (int l = 0; l < static_cast<int>(leaves_.size()); ++l) {
    if (!leaf_by_label_.emplace(leaves_[l].label, l).second) {
      throw InvalidArgument("duplicate leaf label '" + leaves_[l].label + "'");
    }
  }
  finalized_ = true;
}

// Per-player map from a reached leaf to the set of leaves the player cannot
// tell apart from it. Sets are sorted leaf indices.
class ObservabilityFunction {
 public:
  using LeafSets = std::vector<std::vector<int>>;

  ObservabilityFunction() = default;

  // Checks that every set contains its leaf and that all members share the
  // observer's own action sequence.
  ObservabilityFunction(const GameTree& tree, std::array<LeafSets, 2> sets)
      : sets_(std::move(sets)) {
    const int n = static_cast<int>(tree.leaves().size());
    for (int p = 0; p < 2; ++p) {
      if (static_cast<int>(sets_[p].size()) != n) {
        throw InvalidArgument("observability needs one set per leaf");
      }
      for (int l = 0; l < n; ++l) {
        auto& set = sets_[p][l];
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        if (!std::binary_search(set.begin(), set.end(), l)) {
          throw InvalidArgument("observation of leaf '" +
                                tree.leaf(l).label + "' omits the leaf");
        }
        for (int m : set) {
          if (tree.leaf(m).sequence[p] != tree.leaf(l).sequence[p]) {
            throw InvalidArgument("observation of leaf '" +
                                  tree.leaf(l).label +
                                  "' mixes the observer's own sequences");
          }
        }
      }
    }
  }

  // Builds o_i(l) = { m : same(i, l, m) } for every leaf.
  template <typename Relation>
  static ObservabilityFunction FromRelation(const GameTree& tree,
                                            Relation&& same) {
    const int n = static_cast<int>(tree.leaves().size());
    std::array<LeafSets, 2> sets{LeafSets(n), LeafSets(n)};
    for (int p = 0; p < 2; ++p) {
      for (int l = 0; l < n; ++l) {
        for (int m = 0; m < n; ++m) {
          if (m == l || same(static_cast<Player>(p), l, m)) {
            sets[p][l].push_back(m);
          }
        }
      }
    }
    return ObservabilityFunction(tree, std::move(sets));
  }

  const std::vector<int>& Observe(Player p, int leaf) const {
    const auto& sets = sets_[Index(p)];
    if (leaf < 0 || leaf >= static_cast<int>(sets.size())) {
      throw InvalidArgument("unknown leaf index " + std::to_string(leaf));
    }
    return sets[leaf];
  }

 private:
  std::array<LeafSets, 2> sets_;
};

struct Game {
  std::string id;
  GameTree tree;
  ObservabilityFunction observability;
};

// o_p(label) as leaf labels, in leaf index order.
inline std::vector<std::string> Observe(const Game& game, Player p,
                                        std::string_view leaf_label) {
  std::vector<std::string> out;
  for (int m : game.observability.Observe(p, game.tree.FindLeaf(leaf_label))) {
    out.push_back(game.tree.leaf(m).label);
  }
  return out;
}

}  // namespace seqmodel

#endif  // SEQMODEL_GAME_TREE_H_
