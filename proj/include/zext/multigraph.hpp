#pragma once

#include <vector>

namespace zext {

// Undirected multigraph with stable edge identities that survive
// contraction. Vertex ids are assigned once and never reused; after a
// contraction, find() maps any original vertex to its current
// representative. Parallel edges are kept, self-loops produced by
// contraction are dropped.
struct EdgeRec {
    int id = -1;
    int u = -1, v = -1;  // current representatives
    bool alive = false;
};

class MultiGraph {
public:
    MultiGraph() = default;
    explicit MultiGraph(int n);

    int add_vertex();
    int add_edge(int u, int v);
    // Places an edge at a fixed id (padding with dead records); lets
    // sub-instances share the parent's edge-id space.
    int add_edge_with_id(int id, int u, int v);

    int num_vertices() const { return n_; }
    int num_edges() const { return m_; }
    int original_vertices() const { return static_cast<int>(parent_.size()); }
    int total_edges() const { return static_cast<int>(edges_.size()); }

    bool vertex_alive(int v) const;
    bool edge_alive(int e) const;
    const EdgeRec& edge(int e) const { return edges_[e]; }

    std::vector<int> vertices() const;  // live representatives, ascending
    std::vector<int> edge_ids() const;  // live edge ids, ascending

    // Contraction map: original vertex -> current representative.
    // Total over original vertices and idempotent.
    int find(int v) const;

    // Identifies two live representatives; the smaller id survives.
    int merge(int a, int b);
    void contract_edge(int e);
    void contract_edges(const std::vector<int>& es);

    std::vector<int> incident(int v) const;  // live edge ids at rep v
    int degree(int v) const;
    int other_end(int e, int v) const;

    std::vector<int> component_of(int v) const;
    std::vector<std::vector<int>> components() const;
    bool connected() const;

private:
    std::vector<int> parent_;
    std::vector<EdgeRec> edges_;
    int n_ = 0;
    int m_ = 0;
};

}  // namespace zext
