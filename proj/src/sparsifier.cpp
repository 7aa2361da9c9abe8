#include "zext/sparsifier.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "zext/dflow.hpp"
#include "zext/pushing.hpp"

namespace zext {

GammoidDigraph digraph_for_gammoid(const MultiGraph& g, const std::vector<int>& terminals) {
    GammoidDigraph gd;
    auto edges = g.edge_ids();
    std::map<int, std::vector<int>> copies;  // vertex rep -> its copy nodes
    for (int v : g.vertices()) {
        int d = g.degree(v);
        for (int i = 0; i < d; i++) copies[v].push_back(gd.nodes++);
    }
    gd.element_node.assign(g.total_edges(), -1);
    gd.sink_node.assign(g.total_edges(), -1);
    for (int e : edges) gd.element_node[e] = gd.nodes++;
    for (int e : edges) gd.sink_node[e] = gd.nodes++;
    for (int e : edges) {
        const auto& rec = g.edge(e);
        int x = gd.element_node[e];
        for (int end : {rec.u, rec.v}) {
            for (int c : copies[end]) {
                gd.arcs.push_back({x, c});
                gd.arcs.push_back({c, x});
                gd.arcs.push_back({c, gd.sink_node[e]});
            }
        }
    }
    std::set<int> term_reps;
    for (int t : terminals) term_reps.insert(g.find(t));
    for (int e : edges) {
        const auto& rec = g.edge(e);
        if (term_reps.count(rec.u) || term_reps.count(rec.v))
            gd.sources.push_back(gd.element_node[e]);
    }
    return gd;
}

int linkage_value(const GammoidDigraph& gd, const std::vector<int>& targets) {
    // node-split construction: every digraph node may carry one path
    int N = gd.nodes;
    DirectedFlow df(2 * N + 2);
    int SS = 2 * N, TT = 2 * N + 1;
    for (int v = 0; v < N; v++) df.add_arc(v, N + v, 1);  // in -> out
    for (auto [a, b] : gd.arcs) df.add_arc(N + a, b, 1);
    for (int s : gd.sources) df.add_arc(SS, s, 1);
    for (int t : targets) df.add_arc(N + t, TT, 1);
    return static_cast<int>(df.max_flow(SS, TT));
}

PrimeFieldMatrix gammoid_rep(const GammoidDigraph& gd, const std::vector<int>& ground_nodes,
                             uint64_t p, uint64_t seed) {
    // transversal system: each non-source node u may consume itself or one
    // in-neighbour; the gammoid is the dual of that transversal matroid
    std::set<int> src(gd.sources.begin(), gd.sources.end());
    std::vector<int> left;  // non-source nodes
    for (int v = 0; v < gd.nodes; v++)
        if (!src.count(v)) left.push_back(v);
    std::vector<std::set<int>> in_nbrs(gd.nodes);
    for (auto [a, b] : gd.arcs) in_nbrs[b].insert(a);

    std::mt19937_64 rng(seed);
    auto rnd = [&]() { return 1 + rng() % (p - 1); };

    PrimeFieldMatrix b = PrimeFieldMatrix::zero(static_cast<int>(left.size()), gd.nodes, p);
    for (int j = 0; j < b.cols; j++) b.col_labels[j] = j;
    for (size_t i = 0; i < left.size(); i++) {
        int u = left[i];
        b.a[i][u] = rnd();
        for (int w : in_nbrs[u]) b.a[i][w] = rnd();
    }
    PrimeFieldMatrix dual = dual_representation(b);

    PrimeFieldMatrix out = PrimeFieldMatrix::zero(dual.rows, static_cast<int>(ground_nodes.size()), p);
    for (size_t j = 0; j < ground_nodes.size(); j++) {
        out.col_labels[j] = ground_nodes[j];
        for (int i = 0; i < dual.rows; i++) out.a[i][j] = dual.a[i][ground_nodes[j]];
    }
    return out;
}

std::optional<LayeredMatroid> build_layered(const MultiGraph& g,
                                            const std::vector<int>& terminals, int k, int s,
                                            uint64_t p, uint64_t seed) {
    std::set<int> term_reps;
    for (int t : terminals) term_reps.insert(g.find(t));
    auto edges = g.edge_ids();
    std::vector<int> es_edges;
    for (int e : edges) {
        const auto& rec = g.edge(e);
        if (term_reps.count(rec.u) || term_reps.count(rec.v)) es_edges.push_back(e);
    }
    if (static_cast<int>(es_edges.size()) > 2 * k) return std::nullopt;

    auto gd = digraph_for_gammoid(g, terminals);
    std::vector<int> ground;
    for (int e : edges) ground.push_back(gd.element_node[e]);
    for (int e : edges) ground.push_back(gd.sink_node[e]);
    PrimeFieldMatrix layer = gammoid_rep(gd, ground, p, seed);

    int lr = layer.rows, lc = layer.cols;
    int m = static_cast<int>(edges.size());
    LayeredMatroid out;
    out.s = s;
    out.k = k;
    out.mat = PrimeFieldMatrix::zero(lr * s + k, lc * s + m, p);
    out.col_edge.assign(s, {});
    out.col_sink.assign(s, {});
    for (int layer_i = 0; layer_i < s; layer_i++) {
        for (int i = 0; i < lr; i++)
            for (int j = 0; j < lc; j++)
                out.mat.a[layer_i * lr + i][layer_i * lc + j] = layer.a[i][j];
        for (int j = 0; j < m; j++) {
            out.col_edge[layer_i][edges[j]] = layer_i * lc + j;
            out.col_sink[layer_i][edges[j]] = layer_i * lc + m + j;
        }
    }
    // uniform layer: Vandermonde columns, any k of them independent
    for (int j = 0; j < m; j++) {
        int col = lc * s + j;
        out.col_unif[edges[j]] = col;
        uint64_t x = 1;
        for (int i = 0; i < k; i++) {
            out.mat.a[lr * s + i][col] = x;
            x = f_mul(x, static_cast<uint64_t>(j + 2), p);
        }
    }
    return out;
}

namespace {

std::vector<std::vector<int>> subsets_of_size(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i <= n - (k - static_cast<int>(cur.size())); i++) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

}  // namespace

std::vector<int> representative_set(const PrimeFieldMatrix& m,
                                    const std::vector<std::vector<int>>& families) {
    if (families.empty()) return {};
    int sp = static_cast<int>(families[0].size());
    PrimeFieldMatrix red = row_reduce(m);
    int R = red.rows;
    if (R < sp) return {};  // nothing of size sp can be independent

    auto row_sets = subsets_of_size(R, sp);
    int W = static_cast<int>(row_sets.size());

    // greedy maximal linearly independent subfamily of the wedge vectors
    std::vector<std::vector<uint64_t>> basis;  // reduced vectors
    std::vector<int> pivot_of;                 // pivot coordinate per basis row
    std::vector<int> kept;
    for (size_t yi = 0; yi < families.size(); yi++) {
        const auto& cols = families[yi];
        if (static_cast<int>(cols.size()) != sp)
            throw std::invalid_argument("representative_set: family size mismatch");
        std::vector<uint64_t> w(W);
        bool nonzero = false;
        for (int t = 0; t < W; t++) {
            w[t] = minor_det(red, row_sets[t], cols);
            if (w[t]) nonzero = true;
        }
        if (!nonzero) continue;  // dependent family, cannot extend anything
        for (size_t b = 0; b < basis.size(); b++) {
            uint64_t c = w[pivot_of[b]];
            if (!c) continue;
            for (int t = 0; t < W; t++) w[t] = f_sub(w[t], f_mul(c, basis[b][t], m.p), m.p);
        }
        int piv = -1;
        for (int t = 0; t < W; t++)
            if (w[t]) {
                piv = t;
                break;
            }
        if (piv < 0) continue;
        uint64_t inv = f_inv(w[piv], m.p);
        for (int t = 0; t < W; t++) w[t] = f_mul(w[t], inv, m.p);
        basis.push_back(std::move(w));
        pivot_of.push_back(piv);
        kept.push_back(static_cast<int>(yi));
    }
    if (static_cast<long long>(kept.size()) > static_cast<long long>(W))
        throw std::logic_error("representative_set: size bound violated");
    return kept;
}

std::vector<int> essential_candidates(const MultiGraph& g, const std::vector<int>& terminals,
                                      int k, int s, uint64_t p, uint64_t seed) {
    auto lm = build_layered(g, terminals, k, s, p, seed);
    if (!lm) throw std::invalid_argument("essential_candidates: terminal degrees exceed 2k");
    std::set<int> term_reps;
    for (int t : terminals) term_reps.insert(g.find(t));

    std::vector<int> cand_edges;
    std::vector<std::vector<int>> families;
    for (int e : g.edge_ids()) {
        const auto& rec = g.edge(e);
        if (term_reps.count(rec.u) || term_reps.count(rec.v)) continue;
        std::vector<int> cols;
        for (int layer = 0; layer < s; layer++) cols.push_back(lm->col_sink[layer][e]);
        cols.push_back(lm->col_unif[e]);
        cand_edges.push_back(e);
        families.push_back(std::move(cols));
    }
    auto kept = representative_set(lm->mat, families);
    std::vector<int> out;
    for (int i : kept) out.push_back(cand_edges[i]);
    return out;
}

SparsifyResult sparsify(const MultiGraph& g, const std::vector<int>& terminals, int k, int s,
                        uint64_t p, uint64_t seed) {
    if (s < 2) throw std::invalid_argument("sparsify: s must be at least 2");
    SparsifyResult out;
    out.g = g;
    reduce_terminals_graph(out.g, terminals);

    while (true) {
        std::set<int> term_reps;
        for (int t : terminals) term_reps.insert(out.g.find(t));
        long long degsum = 0;
        for (int t : term_reps) degsum += out.g.degree(t);
        std::set<int> protected_edges;
        for (int e : out.g.edge_ids()) {
            const auto& rec = out.g.edge(e);
            if (term_reps.count(rec.u) || term_reps.count(rec.v)) protected_edges.insert(e);
        }
        if (degsum > 2LL * k) {
            // no injective labelling fits the budget; contracting everything
            // else keeps that property
            for (int e : out.g.edge_ids())
                if (!protected_edges.count(e) && out.g.edge_alive(e)) out.g.contract_edge(e);
            out.kept_edges = out.g.edge_ids();
            out.rejected = true;
            return out;
        }
        auto z0 = essential_candidates(out.g, terminals, k, s, p, seed);
        std::set<int> keep(z0.begin(), z0.end());
        keep.insert(protected_edges.begin(), protected_edges.end());
        int victim = -1;
        for (int e : out.g.edge_ids())
            if (!keep.count(e)) {
                victim = e;
                break;
            }
        if (victim < 0) {
            out.kept_edges = out.g.edge_ids();
            return out;
        }
        out.g.contract_edge(victim);
        reduce_terminals_graph(out.g, terminals);
    }
}

Instance kernelize(const Instance& inst, uint64_t p, uint64_t seed) {
    if (inst.unary) throw std::invalid_argument("kernelize: unary costs unsupported");
    for (auto [v1, l1] : inst.terminals)
        for (auto [v2, l2] : inst.terminals)
            if (l1 != l2 && inst.cost.mu(l1, l2) == 0)
                throw std::invalid_argument(
                    "kernelize: identify labels at distance zero before kernelizing");
    Instance norm = inst;
    identify_same_label_terminals(norm);
    auto terms = current_terminals(norm);
    if (!terms) throw std::invalid_argument("kernelize: conflicting terminals");
    std::vector<int> term_verts;
    for (auto [v, l] : *terms) term_verts.push_back(v);

    long long k = norm.q;
    if (k > 1000000) throw std::invalid_argument("kernelize: budget too large for a kernel pass");
    auto res = sparsify(norm.g, term_verts, static_cast<int>(k), norm.num_labels(), p, seed);
    Instance out = norm;
    out.g = res.g;
    return out;
}

}  // namespace zext
