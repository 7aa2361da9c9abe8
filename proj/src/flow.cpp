#include "zext/flow.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

namespace zext {

FlowState::FlowState(const MultiGraph& g, std::vector<int> sources, std::vector<int> sinks)
    : sources_(std::move(sources)), sinks_(std::move(sinks)) {
    std::set<int> src, snk;
    for (int v : sources_) src.insert(g.find(v));
    for (int v : sinks_) snk.insert(g.find(v));
    for (int v : src)
        if (snk.count(v)) throw std::invalid_argument("flow: source and sink sets overlap");

    node_of_.assign(g.original_vertices(), -1);
    members_.clear();
    members_.push_back({});  // s
    members_.push_back({});  // t
    s_ = 0;
    t_ = 1;
    for (int v : g.vertices()) {
        int n;
        if (src.count(v)) n = s_;
        else if (snk.count(v)) n = t_;
        else {
            n = static_cast<int>(members_.size());
            members_.push_back({});
        }
        members_[n].push_back(v);
        node_of_[v] = n;
    }
    // resolve every original vertex so later lookups need no graph
    for (int v = 0; v < g.original_vertices(); v++) node_of_[v] = node_of_[g.find(v)];
    adj_.assign(members_.size(), {});
    inf_ = g.num_edges() + 1;
    for (int e : g.edge_ids()) {
        const auto& rec = g.edge(e);
        int a = node_of_[rec.u], b = node_of_[rec.v];
        if (a == b) continue;  // both endpoints inside one terminal group
        add_arc_pair(a, b, 1, e);
    }
}

int FlowState::node(int graph_v) const { return node_of_[graph_v]; }

void FlowState::add_arc_pair(int a, int b, long long cap, int edge_id) {
    int i = static_cast<int>(arcs_.size());
    arcs_.push_back({a, b, cap, 0, edge_id});
    arcs_.push_back({b, a, cap, 0, edge_id});
    adj_[a].push_back(i);
    adj_[b].push_back(i + 1);
}

void FlowState::add_infinite_edge(int graph_u, int graph_v) {
    inf_ += 1;
    int a = node(graph_u), b = node(graph_v);
    if (a == b) return;
    add_arc_pair(a, b, inf_, -1);
    maximum_ = false;
}

void FlowState::tie_to_source(int graph_v) {
    inf_ += 1;
    int a = node(graph_v);
    if (a == s_) return;
    add_arc_pair(s_, a, inf_, -1);
    maximum_ = false;
}

void FlowState::tie_to_sink(int graph_v) {
    inf_ += 1;
    int a = node(graph_v);
    if (a == t_) return;
    add_arc_pair(a, t_, inf_, -1);
    maximum_ = false;
}

long long FlowState::augment_to_max(long long cap_limit) {
    int N = static_cast<int>(adj_.size());
    std::vector<int> par(N);
    while (true) {
        if (cap_limit >= 0 && value_ > cap_limit) {
            aborted_ = true;
            maximum_ = false;
            return value_;
        }
        std::fill(par.begin(), par.end(), -1);
        par[s_] = -2;
        std::queue<int> q;
        q.push(s_);
        bool found = false;
        while (!q.empty() && !found) {
            int x = q.front();
            q.pop();
            for (int i : adj_[x]) {
                const Arc& a = arcs_[i];
                if (a.cap - a.flow <= 0 || par[a.to] != -1) continue;
                par[a.to] = i;
                if (a.to == t_) {
                    found = true;
                    break;
                }
                q.push(a.to);
            }
        }
        if (!found) break;
        long long push = inf_;
        for (int x = t_; x != s_;) {
            const Arc& a = arcs_[par[x]];
            push = std::min(push, a.cap - a.flow);
            x = a.from;
        }
        if (cap_limit >= 0) push = std::min(push, cap_limit + 1 - value_);
        for (int x = t_; x != s_;) {
            int i = par[x];
            arcs_[i].flow += push;
            arcs_[i ^ 1].flow -= push;
            x = arcs_[i].from;
        }
        value_ += push;
    }
    aborted_ = false;
    maximum_ = true;
    return value_;
}

std::vector<char> FlowState::reach_forward() const {
    std::vector<char> seen(adj_.size(), 0);
    std::queue<int> q;
    q.push(s_);
    seen[s_] = 1;
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int i : adj_[x]) {
            const Arc& a = arcs_[i];
            if (a.cap - a.flow > 0 && !seen[a.to]) {
                seen[a.to] = 1;
                q.push(a.to);
            }
        }
    }
    return seen;
}

std::vector<char> FlowState::reach_to_sink() const {
    // x reaches t iff some residual arc x->y with y reaching t.
    std::vector<char> seen(adj_.size(), 0);
    std::queue<int> q;
    q.push(t_);
    seen[t_] = 1;
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int i : adj_[x]) {
            // arcs_[i] leaves x; its pair enters x from arcs_[i].to.
            const Arc& rev = arcs_[i ^ 1];
            if (rev.cap - rev.flow > 0 && !seen[rev.from]) {
                seen[rev.from] = 1;
                q.push(rev.from);
            }
        }
    }
    return seen;
}

CutResult FlowState::cut_from(const std::vector<char>& in_side) const {
    CutResult out;
    std::set<int> cut;
    for (size_t i = 0; i < arcs_.size(); i += 2) {
        const Arc& a = arcs_[i];
        if (in_side[a.from] == in_side[a.to]) continue;
        if (a.edge_id < 0) throw std::logic_error("flow: infinite edge crosses a min-cut");
        cut.insert(a.edge_id);
    }
    out.cut_edges.assign(cut.begin(), cut.end());
    for (size_t n = 0; n < members_.size(); n++)
        if (in_side[n])
            for (int v : members_[n]) out.source_side.push_back(v);
    std::sort(out.source_side.begin(), out.source_side.end());
    out.value = static_cast<int>(out.cut_edges.size());
    return out;
}

CutResult FlowState::closest_min_cut() const {
    if (!maximum_) throw std::logic_error("closest_min_cut: flow not maximum");
    return cut_from(reach_forward());
}

CutResult FlowState::furthest_min_cut() const {
    if (!maximum_) throw std::logic_error("furthest_min_cut: flow not maximum");
    auto to_sink = reach_to_sink();
    std::vector<char> side(to_sink.size());
    for (size_t i = 0; i < side.size(); i++) side[i] = !to_sink[i];
    return cut_from(side);
}

std::vector<int> FlowState::source_reachable() const {
    auto seen = reach_forward();
    std::vector<int> out;
    for (size_t n = 0; n < members_.size(); n++)
        if (seen[n])
            for (int v : members_[n]) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> FlowState::sink_reaching() const {
    auto seen = reach_to_sink();
    std::vector<int> out;
    for (size_t n = 0; n < members_.size(); n++)
        if (seen[n])
            for (int v : members_[n]) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

FlowState max_flow_unit(const MultiGraph& g, const std::vector<int>& S,
                        const std::vector<int>& T, long long cap_limit) {
    FlowState f(g, S, T);
    f.augment_to_max(cap_limit);
    return f;
}

CutResult closest_min_cut(const FlowState& f) { return f.closest_min_cut(); }
CutResult furthest_min_cut(const FlowState& f) { return f.furthest_min_cut(); }

long long half_integral_bound_doubled(const MultiGraph& g, const std::vector<int>& terminals) {
    if (terminals.size() < 2) return 0;
    long long total = 0;
    for (size_t i = 0; i < terminals.size(); i++) {
        std::vector<int> rest;
        for (size_t j = 0; j < terminals.size(); j++)
            if (j != i) rest.push_back(terminals[j]);
        total += max_flow_unit(g, {terminals[i]}, rest).value();
    }
    return total;
}

namespace {

bool subgraph_connected(const MultiGraph& g, const std::vector<int>& verts) {
    if (verts.empty()) return false;
    std::set<int> in(verts.begin(), verts.end());
    std::set<int> seen;
    std::queue<int> q;
    q.push(verts[0]);
    seen.insert(verts[0]);
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int e : g.incident(x)) {
            int y = g.other_end(e, x);
            if (in.count(y) && !seen.count(y)) {
                seen.insert(y);
                q.push(y);
            }
        }
    }
    return seen.size() == in.size();
}

std::vector<int> cut_between(const MultiGraph& g, const std::set<int>& left) {
    std::vector<int> cut;
    for (int e : g.edge_ids()) {
        const auto& rec = g.edge(e);
        if (left.count(rec.u) != left.count(rec.v)) cut.push_back(e);
    }
    return cut;
}

}  // namespace

std::optional<Separation> good_separation(const MultiGraph& g, int sigma, int k,
                                          uint64_t seed, int trials, int exhaustive_limit) {
    auto verts = g.vertices();
    int n = static_cast<int>(verts.size());
    if (n < 2 * sigma + 2) return std::nullopt;

    if (n <= exhaustive_limit) {
        for (uint32_t mask = 1; mask < (1u << (n - 1)); mask++) {
            // vertex 0 pinned to the left side to skip mirrored partitions
            std::vector<int> left = {verts[0]}, right;
            for (int i = 1; i < n; i++)
                ((mask >> (i - 1)) & 1 ? left : right).push_back(verts[i]);
            if (static_cast<int>(left.size()) <= sigma || static_cast<int>(right.size()) <= sigma)
                continue;
            std::set<int> ls(left.begin(), left.end());
            auto cut = cut_between(g, ls);
            if (static_cast<int>(cut.size()) > k) continue;
            if (!subgraph_connected(g, left) || !subgraph_connected(g, right)) continue;
            return Separation{left, right, cut};
        }
        return std::nullopt;
    }

    // Randomised fallback: contract random edges down to two blobs; each blob
    // is connected by construction, so only sizes and cut width need checking.
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; t++) {
        MultiGraph h = g;
        while (h.num_vertices() > 2 && h.num_edges() > 0) {
            auto es = h.edge_ids();
            h.contract_edge(es[rng() % es.size()]);
        }
        if (h.num_vertices() != 2) continue;
        auto blobs = h.vertices();
        std::vector<int> left, right;
        for (int v : verts)
            (h.find(v) == blobs[0] ? left : right).push_back(v);
        if (static_cast<int>(left.size()) <= sigma || static_cast<int>(right.size()) <= sigma)
            continue;
        std::set<int> ls(left.begin(), left.end());
        auto cut = cut_between(g, ls);
        if (static_cast<int>(cut.size()) > k) continue;
        return Separation{left, right, cut};
    }
    return std::nullopt;
}

}  // namespace zext
