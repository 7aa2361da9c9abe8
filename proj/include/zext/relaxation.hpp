#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "zext/flow.hpp"
#include "zext/instance.hpp"

namespace zext {

struct GapStats {
    long long nodes = 0;        // search tree nodes visited
    long long branchings = 0;   // nodes that expanded children
    long long emissions = 0;
    long long root_rho = 0;     // relaxed value before any branching
};

// One flow network per tree edge; their max-flow values sum to the relaxed
// optimum. Forced assignments are realised as infinite-capacity side ties.
// Copy the object for branch-local (undoable) changes.
class TreeEdgeNetworks {
public:
    explicit TreeEdgeNetworks(const Instance& inst);

    long long total_value();                 // re-augments everything first
    void force(int vertex, int node);        // tie `vertex` to the side of `node` in every network
    const std::map<int, int>& forced() const { return forced_; }

    // Vertices on the maximal `node`-side of the network at the tree edge
    // above `node` (which must be a leaf for the partition step).
    std::vector<int> furthest_region(int node);
    // Vertices on the minimal child side of tree edge (parent(node), node).
    std::vector<int> closest_region(int node);

    int tree_edge_count() const { return static_cast<int>(edges_.size()); }
    const Instance& instance() const { return inst_; }
    const std::vector<std::pair<int, int>>& oriented_edges() const { return edges_; }

    // Anchor = a leaf carrying a terminal or a forced vertex; order keys
    // break partition ties (terminal vertex id, else beyond all vertices).
    struct Anchor {
        int node;
        int order_key;
        int label;  // integral label of that node
    };
    std::vector<Anchor> anchors() const;

private:
    int edge_index_of_child(int node) const;
    int side_of(int tree_edge, int node) const;  // 0 = parent side, 1 = child side

    Instance inst_;
    std::vector<std::pair<int, int>> edges_;   // (parent, child), rooted at node 0
    std::vector<std::vector<char>> child_side_;  // per edge, per tree node
    std::vector<FlowState> flows_;
    std::map<int, int> forced_;  // graph vertex -> tree node
};

// Builds the per-tree-edge networks with maximum flows. Requires a tree
// cost spec and that every connected component contains a terminal.
TreeEdgeNetworks build_networks(const Instance& inst);

long long relaxed_value(TreeEdgeNetworks& nets);

void force_assignment(TreeEdgeNetworks& nets, int vertex, int node);

// A labelling over V(T) achieving the relaxed value, reconstructed from
// closest min-cut regions with root-to-leaf consistency repair; falls back
// to the exhaustive relaxed oracle if the repair misses the value.
std::vector<int> relaxed_assignment(TreeEdgeNetworks& nets);

// Labels d in D_I whose forcing keeps the relaxed value unchanged.
std::vector<int> integral_support(TreeEdgeNetworks& nets, int vertex);

std::optional<Solution> solve_leaf_gap(const Instance& inst, GapStats* stats = nullptr);
std::optional<Solution> solve_tree_gap(const Instance& inst, GapStats* stats = nullptr);

// Telescoping decomposition of extended unary costs along root-oriented
// tree edges: delta[edge][v] = sigma_ext(v, child) - sigma_ext(v, parent).
std::vector<std::vector<long long>> unary_gradients(
    const std::vector<std::vector<long long>>& sigma_ext, const MetricTree& t, int root,
    const std::vector<std::pair<int, int>>& oriented_edges);

// Relaxed Metric Labelling optimum via per-tree-edge min-cuts with unary
// gradient arcs. sigma_ext must satisfy the interpolation property.
long long relaxed_value_ml(const Instance& inst,
                           const std::vector<std::vector<long long>>& sigma_ext,
                           const std::map<int, int>& forced = {});

enum class MlOracle { Flow, Brute };

struct MlNotApplicable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gap solver for Metric Labelling on induced tree metrics. Throws
// MlNotApplicable when some unary row admits no interpolation.
std::optional<Solution> solve_ml_gap(const Instance& inst, GapStats* stats = nullptr,
                                     MlOracle oracle = MlOracle::Flow);

}  // namespace zext
