#include "zext/oracle.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace zext {

namespace {

struct Enumeration {
    std::vector<int> verts;        // live reps, ascending
    std::vector<int> fixed;        // -1 = free, else value
    std::vector<int> free_verts;   // ascending
    int domain = 0;                // values are 0..domain-1
    bool feasible = true;
};

Enumeration prepare(const Instance& inst, const BruteOptions& opt) {
    Enumeration en;
    en.verts = inst.g.vertices();
    en.domain = opt.relaxed ? inst.cost.tree->nodes() : inst.num_labels();
    en.fixed.assign(inst.g.original_vertices(), -1);
    auto terms = current_terminals(inst);
    if (!terms) {
        en.feasible = false;
        return en;
    }
    for (auto [v, l] : *terms) {
        int value = opt.relaxed ? inst.cost.tree->label_nodes[l] : l;
        en.fixed[v] = value;
    }
    for (auto [v, val] : opt.forced) {
        int r = inst.g.find(v);
        if (en.fixed[r] >= 0 && en.fixed[r] != val) {
            en.feasible = false;
            return en;
        }
        en.fixed[r] = val;
    }
    for (int v : en.verts)
        if (en.fixed[v] < 0) en.free_verts.push_back(v);
    return en;
}

void check_cap(const Enumeration& en, long long cap) {
    long long total = 1;
    for (size_t i = 0; i < en.free_verts.size(); i++) {
        total *= en.domain;
        if (total > cap)
            throw std::runtime_error("oracle: enumeration exceeds cap, refusing");
    }
}

// Calls fn for every assignment, in lexicographic order (vertices by id,
// values ascending). The labelling spans original vertex ids.
template <typename Fn>
void enumerate(const Instance& inst, const Enumeration& en, Fn&& fn) {
    std::vector<int> lab(inst.g.original_vertices(), 0);
    for (int v = 0; v < inst.g.original_vertices(); v++) {
        int r = inst.g.find(v);
        lab[v] = en.fixed[r] >= 0 ? en.fixed[r] : 0;
    }
    auto sync = [&] {
        for (int v = 0; v < inst.g.original_vertices(); v++) lab[v] = lab[inst.g.find(v)];
    };
    int nf = static_cast<int>(en.free_verts.size());
    std::vector<int> idx(nf, 0);
    while (true) {
        sync();
        fn(lab);
        int pos = nf - 1;
        while (pos >= 0 && idx[pos] == en.domain - 1) {
            idx[pos] = 0;
            lab[en.free_verts[pos]] = 0;
            pos--;
        }
        if (pos < 0) break;
        idx[pos]++;
        lab[en.free_verts[pos]] = idx[pos];
    }
}

long long cost_of(const Instance& inst, const BruteOptions& opt, const std::vector<int>& lab) {
    if (opt.relaxed) return evaluate_relaxed(inst, lab, opt.sigma_ext);
    return evaluate(inst, lab).cost;
}

int crossing_of(const Instance& inst, const std::vector<int>& lab) {
    int c = 0;
    for (int e = 0; e < inst.g.total_edges(); e++) {
        if (!inst.g.edge_alive(e)) continue;
        const auto& rec = inst.g.edge(e);
        if (lab[rec.u] != lab[rec.v]) c++;
    }
    return c;
}

}  // namespace

std::optional<Solution> brute_solve(const Instance& inst, const BruteOptions& opt) {
    auto en = prepare(inst, opt);
    if (!en.feasible) return std::nullopt;
    check_cap(en, opt.cap);
    std::optional<std::vector<int>> best;
    long long best_cost = 0;
    enumerate(inst, en, [&](const std::vector<int>& lab) {
        if (opt.max_crossing && crossing_of(inst, lab) > *opt.max_crossing) return;
        long long c = cost_of(inst, opt, lab);
        if (!best || c < best_cost) {
            best = lab;
            best_cost = c;
        }
    });
    if (!best) return std::nullopt;
    Solution s;
    s.labels = *best;
    s.cost = best_cost;
    for (int e = 0; e < inst.g.total_edges(); e++) {
        if (!inst.g.edge_alive(e)) continue;
        const auto& rec = inst.g.edge(e);
        if ((*best)[rec.u] != (*best)[rec.v]) s.crossing_edges.push_back(e);
    }
    s.crossing = static_cast<int>(s.crossing_edges.size());
    return s;
}

std::optional<long long> brute_k_bounded(const Instance& inst, int k, const BruteOptions& opt) {
    auto en = prepare(inst, opt);
    if (!en.feasible) return std::nullopt;
    check_cap(en, opt.cap);
    std::optional<long long> best;
    enumerate(inst, en, [&](const std::vector<int>& lab) {
        if (crossing_of(inst, lab) > k) return;
        long long c = cost_of(inst, opt, lab);
        if (!best || c < *best) best = c;
    });
    return best;
}

OptProjection projections(const Instance& inst, const BruteOptions& opt) {
    auto en = prepare(inst, opt);
    if (!en.feasible) throw std::runtime_error("projections: infeasible instance");
    check_cap(en, opt.cap);
    std::optional<long long> best;
    enumerate(inst, en, [&](const std::vector<int>& lab) {
        long long c = cost_of(inst, opt, lab);
        if (!best || c < *best) best = c;
    });
    OptProjection out;
    out.opt_cost = *best;
    std::set<int> integral_nodes;
    if (opt.relaxed)
        for (int nd : inst.cost.tree->label_nodes) integral_nodes.insert(nd);
    auto verts = inst.g.vertices();
    enumerate(inst, en, [&](const std::vector<int>& lab) {
        if (cost_of(inst, opt, lab) != *best) return;
        out.num_optima++;
        for (size_t i = 0; i < verts.size(); i++) {
            int u = verts[i];
            out.dom[u].insert(lab[u]);
            if (!opt.relaxed || integral_nodes.count(lab[u]))
                out.dom_integral[u].insert(lab[u]);
            for (size_t j = i + 1; j < verts.size(); j++) {
                int v = verts[j];
                out.rel[{u, v}].insert({lab[u], lab[v]});
                bool ui = !opt.relaxed || integral_nodes.count(lab[u]);
                bool vi = !opt.relaxed || integral_nodes.count(lab[v]);
                if (ui && vi) out.rel_integral[{u, v}].insert({lab[u], lab[v]});
            }
        }
    });
    return out;
}

std::optional<Solution> brute_by_crossing_sets(const Instance& inst, int k) {
    auto terms = current_terminals(inst);
    if (!terms) return std::nullopt;
    auto edges = inst.g.edge_ids();
    int m = static_cast<int>(edges.size());
    int D = inst.num_labels();
    std::optional<Solution> best;

    std::vector<int> subset;
    // enumerate all candidate crossing sets of size <= k
    auto consider = [&]() {
        MultiGraph h = inst.g;
        std::set<int> cut(subset.begin(), subset.end());
        // components of G - C, via contracting everything else
        for (int e : edges)
            if (!cut.count(e) && h.edge_alive(e)) h.contract_edge(e);
        // each surviving blob is labelled as one; terminals pin blobs
        std::vector<int> blobs = h.vertices();
        std::map<int, int> pinned;
        for (auto [v, l] : *terms) {
            int b = h.find(v);
            auto it = pinned.find(b);
            if (it != pinned.end() && it->second != l) return;  // conflicting blob
            pinned[b] = l;
        }
        // only blobs touching a cut edge need enumeration; isolated free
        // blobs contribute nothing and take label 0
        std::set<int> touched;
        for (int e : subset) {
            if (!h.edge_alive(e)) continue;
            touched.insert(h.edge(e).u);
            touched.insert(h.edge(e).v);
        }
        std::vector<int> free_blobs;
        for (int b : blobs)
            if (!pinned.count(b) && touched.count(b)) free_blobs.push_back(b);
        for (int b : blobs)
            if (!pinned.count(b) && !touched.count(b)) pinned[b] = 0;
        std::vector<int> choice(free_blobs.size(), 0);
        while (true) {
            std::vector<int> lab(inst.g.original_vertices(), 0);
            std::map<int, int> blob_label = pinned;
            for (size_t i = 0; i < free_blobs.size(); i++) blob_label[free_blobs[i]] = choice[i];
            for (int v = 0; v < inst.g.original_vertices(); v++)
                lab[v] = blob_label[h.find(inst.g.find(v))];
            Solution cand = evaluate(inst, lab);
            if (cand.crossing <= k && extends_terminals(inst, lab)) {
                if (better_solution(best, cand)) best = cand;
            }
            size_t pos = 0;
            while (pos < choice.size() && choice[pos] == D - 1) choice[pos++] = 0;
            if (pos == choice.size()) break;
            choice[pos]++;
        }
    };

    // subsets in increasing size then lexicographic order
    std::function<void(int, int)> rec = [&](int start, int remaining) {
        consider();
        if (remaining == 0) return;
        for (int i = start; i < m; i++) {
            subset.push_back(edges[i]);
            rec(i + 1, remaining - 1);
            subset.pop_back();
        }
    };
    rec(0, std::min(k, m));
    return best;
}

}  // namespace zext
