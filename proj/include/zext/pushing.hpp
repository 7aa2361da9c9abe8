#pragma once

#include <optional>
#include <vector>

#include "zext/flow.hpp"
#include "zext/instance.hpp"

namespace zext {

struct PushingStats {
    long long stage1_nodes = 0, stage1_outputs = 0;
    long long stage2_nodes = 0, stage2_outputs = 0;
    long long assign_calls = 0;
    long long initial_doubled_p = 0;  // after terminal reduction and pre-marking
};

// One node of the marking search: a working graph, the committed crossing
// edges, and the running lower bound (half-integers stored doubled).
// Marked edges are never contracted.
struct BranchState {
    MultiGraph g;
    std::vector<char> marked;  // indexed by edge id
    long long doubled_p = 0;
};

// Relabels the furthest-min-cut-reachable superset of labels^-1(label) to
// `label`. Requires a metric cost function; never increases the cost.
std::vector<int> push(const Instance& inst, const std::vector<int>& labels, int label);

// Contracts each terminal out to its furthest isolating min-cut, to a
// fixpoint. Afterwards delta(t) is the unique isolating min-cut of every
// terminal. Expects same-label terminals already identified.
void reduce_terminals_graph(MultiGraph& g, const std::vector<int>& terminals);
Instance reduce_terminals(const Instance& inst);

// Marks every terminal-incident edge across at most 4^(k-p) branches.
std::vector<BranchState> stage1(const Instance& reduced, int k, PushingStats* stats = nullptr);

// Extends a stage-1 output until every remaining edge is marked.
std::vector<BranchState> stage2(const BranchState& state, const Instance& inst, int k,
                                PushingStats* stats = nullptr);

// Exhaustive assignment over the contracted graph, lifted to the original.
std::optional<Solution> assign(const BranchState& state, const Instance& inst);

std::optional<Solution> solve_metric(const Instance& inst, int k, PushingStats* stats = nullptr);

}  // namespace zext
