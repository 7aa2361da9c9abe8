#include "zext/multigraph.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace zext {

MultiGraph::MultiGraph(int n) {
    for (int i = 0; i < n; i++) add_vertex();
}

int MultiGraph::add_vertex() {
    int id = static_cast<int>(parent_.size());
    parent_.push_back(id);
    n_++;
    return id;
}

int MultiGraph::add_edge(int u, int v) {
    return add_edge_with_id(static_cast<int>(edges_.size()), u, v);
}

int MultiGraph::add_edge_with_id(int id, int u, int v) {
    if (u < 0 || v < 0 || u >= original_vertices() || v >= original_vertices())
        throw std::out_of_range("add_edge: bad vertex id");
    int ru = find(u), rv = find(v);
    if (ru == rv) throw std::invalid_argument("add_edge: endpoints identified, would be a self-loop");
    if (id < static_cast<int>(edges_.size())) {
        if (edges_[id].alive) throw std::invalid_argument("add_edge_with_id: id already live");
    } else {
        while (static_cast<int>(edges_.size()) < id) {
            int pad = static_cast<int>(edges_.size());
            edges_.push_back({pad, -1, -1, false});
        }
        edges_.push_back({id, -1, -1, false});
    }
    edges_[id] = {id, ru, rv, true};
    m_++;
    return id;
}

bool MultiGraph::vertex_alive(int v) const {
    return v >= 0 && v < original_vertices() && parent_[v] == v;
}

bool MultiGraph::edge_alive(int e) const {
    return e >= 0 && e < total_edges() && edges_[e].alive;
}

std::vector<int> MultiGraph::vertices() const {
    std::vector<int> out;
    out.reserve(n_);
    for (int v = 0; v < original_vertices(); v++)
        if (parent_[v] == v) out.push_back(v);
    return out;
}

std::vector<int> MultiGraph::edge_ids() const {
    std::vector<int> out;
    out.reserve(m_);
    for (const auto& e : edges_)
        if (e.alive) out.push_back(e.id);
    return out;
}

int MultiGraph::find(int v) const {
    while (parent_[v] != v) v = parent_[v];
    return v;
}

int MultiGraph::merge(int a, int b) {
    int ra = find(a), rb = find(b);
    if (ra == rb) return ra;
    int keep = std::min(ra, rb), gone = std::max(ra, rb);
    parent_[gone] = keep;
    n_--;
    for (auto& e : edges_) {
        if (!e.alive) continue;
        if (e.u == gone) e.u = keep;
        if (e.v == gone) e.v = keep;
        if (e.u == e.v) {
            e.alive = false;
            m_--;
        }
    }
    return keep;
}

void MultiGraph::contract_edge(int e) {
    if (!edge_alive(e)) throw std::invalid_argument("contract_edge: dead edge id");
    merge(edges_[e].u, edges_[e].v);
}

void MultiGraph::contract_edges(const std::vector<int>& es) {
    for (int e : es) {
        if (e < 0 || e >= total_edges()) throw std::invalid_argument("contract_edges: bad edge id");
        if (!edges_[e].alive) throw std::invalid_argument("contract_edges: dead edge id");
    }
    // A listed edge may become a self-loop while the set is processed; that
    // counts as contracted, not as an error.
    for (int e : es)
        if (edges_[e].alive) contract_edge(e);
}

std::vector<int> MultiGraph::incident(int v) const {
    int r = find(v);
    std::vector<int> out;
    for (const auto& e : edges_)
        if (e.alive && (e.u == r || e.v == r)) out.push_back(e.id);
    return out;
}

int MultiGraph::degree(int v) const {
    return static_cast<int>(incident(v).size());
}

int MultiGraph::other_end(int e, int v) const {
    const auto& rec = edges_[e];
    int r = find(v);
    return rec.u == r ? rec.v : rec.u;
}

std::vector<int> MultiGraph::component_of(int v) const {
    int r = find(v);
    std::vector<char> seen(original_vertices(), 0);
    std::vector<int> out;
    std::queue<int> q;
    q.push(r);
    seen[r] = 1;
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        out.push_back(x);
        for (const auto& e : edges_) {
            if (!e.alive) continue;
            int y = -1;
            if (e.u == x) y = e.v;
            else if (e.v == x) y = e.u;
            if (y >= 0 && !seen[y]) {
                seen[y] = 1;
                q.push(y);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<int>> MultiGraph::components() const {
    std::vector<char> seen(original_vertices(), 0);
    std::vector<std::vector<int>> out;
    for (int v : vertices()) {
        if (seen[v]) continue;
        auto comp = component_of(v);
        for (int x : comp) seen[x] = 1;
        out.push_back(std::move(comp));
    }
    return out;
}

bool MultiGraph::connected() const {
    if (n_ <= 1) return true;
    return static_cast<int>(component_of(vertices().front()).size()) == n_;
}

}  // namespace zext
