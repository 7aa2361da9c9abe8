#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zext/metric.hpp"
#include "zext/multigraph.hpp"

namespace zext {

// Cost specification: an explicit matrix or a tree with distinguished nodes.
// Exactly one of the two is engaged.
struct CostSpec {
    std::optional<CostMatrix> matrix;
    std::optional<MetricTree> tree;

    bool is_tree() const { return tree.has_value(); }
    int num_labels() const;
    long long mu(int a, int b) const;  // integral labels
    const std::vector<std::string>& label_names() const;
    int label_by_name(const std::string& name) const;  // -1 if absent
};

struct Instance {
    std::string name;
    MultiGraph g;
    // (original vertex, label index), sorted by vertex, at most one per vertex
    std::vector<std::pair<int, int>> terminals;
    CostSpec cost;
    // unary costs per original vertex x label index
    std::optional<std::vector<std::vector<long long>>> unary;
    long long q = 0;
    std::optional<int> k;
    std::optional<long long> expected_cost;  // derived metadata carried by fixtures

    std::optional<int> terminal_label(int orig_vertex) const;
    int num_labels() const { return cost.num_labels(); }
};

struct Solution {
    std::vector<int> labels;  // per original vertex, label index
    long long cost = 0;
    std::vector<int> crossing_edges;
    int crossing = 0;
};

// Recomputes cost and crossing set from scratch for a full labelling over
// original vertices (integral labels). Includes unary costs when present.
Solution evaluate(const Instance& inst, const std::vector<int>& labels);

// Cost of a labelling by tree nodes over the relaxed domain V(T). Unary
// costs are taken from sigma_ext when provided (indexed vertex x node).
long long evaluate_relaxed(const Instance& inst, const std::vector<int>& node_labels,
                           const std::vector<std::vector<long long>>* sigma_ext = nullptr);

bool extends_terminals(const Instance& inst, const std::vector<int>& labels);

// Current terminal map over representatives of inst.g; nullopt when two
// terminals with different labels were identified (infeasible instance).
std::optional<std::map<int, int>> current_terminals(const Instance& inst);

// Merges all vertices sharing a terminal label into one representative.
void identify_same_label_terminals(Instance& inst);

// Picks min(cost, labels) — the deterministic merge used by all solvers.
bool better_solution(const std::optional<Solution>& a, const std::optional<Solution>& b);

// Sub-instance over the same original vertex and edge id spaces: replicates
// the contraction state, keeps only the listed edges, and keeps terminals
// whose representative lies in `reps`.
Instance restrict_to(const Instance& inst, const std::vector<int>& reps,
                     const std::vector<int>& edge_ids);

}  // namespace zext
