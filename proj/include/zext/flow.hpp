#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "zext/multigraph.hpp"

namespace zext {

struct CutResult {
    std::vector<int> cut_edges;    // graph edge ids, ascending
    std::vector<int> source_side;  // graph representatives, ascending
    int value = 0;
};

// Unit-capacity flow over a MultiGraph snapshot with the source set
// identified into one node and the sink set into another. Supports
// incremental augmentation after infinite-capacity attachments.
// Infinite capacity is realised as (#finite edges + #attachments + 1),
// which exceeds every finite cut, so such edges never appear in a min-cut.
// Self-contained after construction: copies are independent, which is how
// branch-local undo works.
class FlowState {
public:
    FlowState(const MultiGraph& g, std::vector<int> sources, std::vector<int> sinks);

    // Augments until no path remains, or until value exceeds cap_limit
    // (sets the aborted flag). Returns the flow value.
    long long augment_to_max(long long cap_limit = -1);

    long long value() const { return value_; }
    bool aborted() const { return aborted_; }
    bool maximum() const { return maximum_; }

    // Infinite-capacity attachments; call augment_to_max afterwards.
    void add_infinite_edge(int graph_u, int graph_v);
    void tie_to_source(int graph_v);
    void tie_to_sink(int graph_v);

    // Min-cut whose source side is inclusion-minimal.
    CutResult closest_min_cut() const;
    // Min-cut whose source side is inclusion-maximal.
    CutResult furthest_min_cut() const;

    // Graph vertices residual-reachable from the source node.
    std::vector<int> source_reachable() const;
    // Graph vertices that reach the sink node in the residual structure.
    std::vector<int> sink_reaching() const;

    const std::vector<int>& sources() const { return sources_; }
    const std::vector<int>& sinks() const { return sinks_; }

private:
    struct Arc {
        int from, to;
        long long cap, flow;
        int edge_id;  // -1 for attachments
    };

    int node(int graph_v) const;
    std::vector<char> reach_forward() const;
    std::vector<char> reach_to_sink() const;
    CutResult cut_from(const std::vector<char>& in_side) const;
    void add_arc_pair(int a, int b, long long cap, int edge_id);

    std::vector<int> sources_, sinks_;
    std::vector<int> node_of_;                // per original vertex id
    std::vector<std::vector<int>> members_;   // node -> graph reps
    std::vector<std::vector<int>> adj_;       // node -> arc indices
    std::vector<Arc> arcs_;
    long long inf_ = 0;
    long long value_ = 0;
    bool aborted_ = false;
    bool maximum_ = false;
    int s_ = -1, t_ = -1;
};

// Maximum set of edge-disjoint S-T paths as a flow.
FlowState max_flow_unit(const MultiGraph& g, const std::vector<int>& S,
                        const std::vector<int>& T, long long cap_limit = -1);

CutResult closest_min_cut(const FlowState& f);
CutResult furthest_min_cut(const FlowState& f);

// Sum over terminals t of maxflow(t, S-t), i.e. twice the half-integral
// path-packing lower bound. Returned doubled so it stays integral.
long long half_integral_bound_doubled(const MultiGraph& g, const std::vector<int>& terminals);

struct Separation {
    std::vector<int> left, right;  // representatives
    std::vector<int> cut_edges;
};

// Balanced small cut with connected sides, or nullopt when the graph is
// (sigma,k)-connected as far as the search can tell. Exhaustive for
// n <= exhaustive_limit, randomised contraction trials beyond that.
std::optional<Separation> good_separation(const MultiGraph& g, int sigma, int k,
                                          uint64_t seed = 1, int trials = 2000,
                                          int exhaustive_limit = 20);

}  // namespace zext
