#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace zext {

struct CostMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<long long>> mu;

    int size() const { return static_cast<int>(labels.size()); }
    long long at(int a, int b) const { return mu[a][b]; }
};

enum class MetricClass {
    SimpleCost,               // symmetric, nonnegative, zero diagonal
    Metric,                   // + triangle inequality
    TreeMetric,               // + realised exactly by a unit-edge tree
    InducedTreeCandidate,     // four-point condition holds, no realization found
};

struct CostValidation {
    bool ok = false;                       // structurally a simple cost function
    MetricClass cls = MetricClass::SimpleCost;
    std::string error;                     // set when !ok
    std::optional<std::array<int, 3>> triangle_witness;   // mu(a,c) > mu(a,b)+mu(b,c)
    std::optional<std::array<int, 4>> four_point_witness;
};

// Unit-edge tree with a distinguished label subset D_I embedded in its nodes.
struct MetricTree {
    std::vector<std::pair<int, int>> edges;
    std::vector<std::string> node_names;   // size = node count
    std::vector<int> label_nodes;          // label index -> tree node
    std::vector<std::string> label_names;

    std::vector<std::vector<int>> adj;     // built by finalize()
    std::vector<std::vector<int>> dist;

    int nodes() const { return static_cast<int>(node_names.size()); }
    int labels() const { return static_cast<int>(label_nodes.size()); }
    void finalize();                       // builds adjacency + all-pairs distances; validates tree shape
    bool is_leaf_metric() const;           // label nodes are exactly the degree-1 nodes
    int d(int a, int b) const { return dist[a][b]; }
    long long mu(int la, int lb) const { return dist[label_nodes[la]][label_nodes[lb]]; }
    std::vector<int> path(int x, int y) const;  // node sequence from x to y
    int node_by_name(const std::string& name) const;  // -1 if absent
};

CostValidation validate_cost(const CostMatrix& m);

struct ReconstructionError {
    std::array<int, 4> witness{};  // offending labels (may repeat)
    std::string message;
};

// Exact unit-edge realization of an integral tree metric, labels embedded.
// Labels at distance zero share a node.
std::optional<MetricTree> reconstruct_tree(const CostMatrix& m, ReconstructionError* err = nullptr);

// Rooted-tree operators. Paths and distances are those of the unit-edge tree.
int midup(const MetricTree& t, int root, int x, int y);
int middown(const MetricTree& t, int root, int x, int y);
int lca(const MetricTree& t, int root, int x, int y);
int lcaskew(const MetricTree& t, int root, int x, int y);
// Majority operation composed from the weak pair.
int majority_op(const MetricTree& t, int root, int a, int b, int c);

enum class OperatorPair { Strong, Weak };

struct MultimorphismWitness {
    std::vector<int> xs, ys;
};

// Exhaustively verifies f(x)+f(y) >= f(x o y)+f(x * y) over domain^arity
// tuple pairs; returns the first violating pair otherwise.
std::optional<MultimorphismWitness> check_multimorphism(
    const std::function<long long(const std::vector<int>&)>& f, int arity,
    OperatorPair pair, const MetricTree& t, int root, const std::vector<int>& domain);

// True iff ((a,b),(x,y)) is preserved under equality by the strong pair,
// decided by the path-order characterization (all four nodes collinear and
// a,b <= x,y or a,x <= b,y along the path, up to orientation).
bool equality_support(const MetricTree& t, int root, std::pair<int, int> ab,
                      std::pair<int, int> xy);

struct InterpolationWitness {
    int u = -1, v = -1, i = -1;
};

// Verifies f(w_i)*d <= (d-i)*f(u) + i*f(v) for all node pairs and interior
// positions, in exact integer form.
std::optional<InterpolationWitness> check_interpolation(const std::vector<long long>& f,
                                                        const MetricTree& t);

// Extends f0 (indexed by label) to all tree nodes so the interpolation
// property holds. Leaf-metric case uses zero padding; otherwise iterated
// tightening from the maximum, validated before returning.
std::optional<std::vector<long long>> extend_unary(const std::vector<long long>& f0,
                                                   const MetricTree& t);

// Generators used across tests and the CLI.
MetricTree random_tree(int n, uint64_t seed);
CostMatrix tree_to_matrix(const MetricTree& t);
CostMatrix random_metric_matrix(int labels, int max_weight, uint64_t seed);
CostMatrix random_simple_cost(int labels, int max_value, uint64_t seed);

}  // namespace zext
