#pragma once

#include <vector>

namespace zext {

// Minimal directed max-flow (BFS augmenting paths, integral capacities).
// Arcs can be added after a run; augmentation then continues incrementally.
struct DirectedFlow {
    struct Arc {
        int from, to;
        long long cap, flow;
    };

    explicit DirectedFlow(int n) : adj(n) {}

    int add_node() {
        adj.push_back({});
        return static_cast<int>(adj.size()) - 1;
    }

    int add_arc(int from, int to, long long cap) {
        int i = static_cast<int>(arcs.size());
        arcs.push_back({from, to, cap, 0});
        arcs.push_back({to, from, 0, 0});
        adj[from].push_back(i);
        adj[to].push_back(i + 1);
        return i;
    }

    long long max_flow(int s, int t);

    // nodes residual-reachable from s (call after max_flow)
    std::vector<char> reachable(int s) const;

    std::vector<std::vector<int>> adj;
    std::vector<Arc> arcs;
    long long value = 0;
};

}  // namespace zext
