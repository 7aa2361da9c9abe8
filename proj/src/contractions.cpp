#include "zext/contractions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "zext/oracle.hpp"

namespace zext {

EdgeSplitterFamily edge_splitter(const std::vector<int>& edges, int a, int b, double eps,
                                 uint64_t seed) {
    EdgeSplitterFamily fam;
    fam.a = a;
    fam.b = b;
    fam.seed = seed;
    if (a == 0) {
        fam.sets.push_back({});
        return fam;
    }
    if (b == 0) {
        fam.sets.push_back(edges);
        return fam;
    }
    double p = static_cast<double>(a) / (a + b);
    double succ = std::pow(p, a) * std::pow(1 - p, b);
    long long N = 500000;  // family size cap
    if (succ > 0)
        N = std::min<long long>(
            std::max<long long>(static_cast<long long>(std::ceil(std::log(eps) / std::log1p(-succ))), 1),
            N);
    std::mt19937_64 rng(seed);
    auto coin = [&]() { return static_cast<double>(rng() >> 11) / 9007199254740992.0 < p; };
    for (long long i = 0; i < N; i++) {
        std::vector<int> h;
        for (int e : edges)
            if (coin()) h.push_back(e);
        fam.sets.push_back(std::move(h));
    }
    return fam;
}

namespace {

void require_no_unary(const Instance& inst, const char* who) {
    if (inst.unary)
        throw std::invalid_argument(std::string(who) + ": unary costs are not supported");
}

std::vector<std::vector<int>> blue_components(const MultiGraph& g, const std::set<int>& blue) {
    std::set<int> seen;
    std::vector<std::vector<int>> comps;
    for (int v : g.vertices()) {
        if (seen.count(v)) continue;
        std::vector<int> comp;
        std::queue<int> q;
        q.push(v);
        seen.insert(v);
        while (!q.empty()) {
            int x = q.front();
            q.pop();
            comp.push_back(x);
            for (int e : g.incident(x)) {
                if (!blue.count(e)) continue;
                int y = g.other_end(e, x);
                if (seen.insert(y).second) q.push(y);
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

// Tries every assignment of one label per part; parts without terminals and
// without outgoing edges take label 0 directly. Keeps only candidates whose
// crossing number fits the budget, so a wrong partition can only produce an
// over-estimate, never an under-report.
std::optional<Solution> evaluate_parts(const Instance& inst,
                                       const std::vector<std::vector<int>>& parts,
                                       const std::map<int, int>& terms, int k,
                                       GeneralStats* stats) {
    int P = static_cast<int>(parts.size());
    std::vector<int> part_of(inst.g.original_vertices(), -1);
    for (int i = 0; i < P; i++)
        for (int v : parts[i]) part_of[v] = i;
    std::vector<int> pin(P, -1);
    for (auto [v, l] : terms) {
        int i = part_of[v];
        if (pin[i] >= 0 && pin[i] != l) return std::nullopt;
        pin[i] = l;
    }
    std::vector<char> has_external(P, 0);
    for (int e : inst.g.edge_ids()) {
        const auto& rec = inst.g.edge(e);
        if (part_of[rec.u] != part_of[rec.v]) {
            has_external[part_of[rec.u]] = 1;
            has_external[part_of[rec.v]] = 1;
        }
    }
    std::vector<int> free_parts;
    for (int i = 0; i < P; i++)
        if (pin[i] < 0) {
            if (has_external[i]) free_parts.push_back(i);
            else pin[i] = 0;
        }
    if (free_parts.size() > static_cast<size_t>(k + 1)) return std::nullopt;

    int D = inst.num_labels();
    std::optional<Solution> best;
    std::vector<int> choice(free_parts.size(), 0);
    while (true) {
        std::vector<int> assign = pin;
        for (size_t i = 0; i < free_parts.size(); i++) assign[free_parts[i]] = choice[i];
        std::vector<int> lab(inst.g.original_vertices(), 0);
        for (int v = 0; v < inst.g.original_vertices(); v++)
            lab[v] = assign[part_of[inst.g.find(v)]];
        Solution cand = evaluate(inst, lab);
        if (stats) stats->candidates++;
        if (cand.crossing <= k && extends_terminals(inst, lab) && better_solution(best, cand))
            best = cand;
        size_t pos = 0;
        while (pos < choice.size() && choice[pos] == D - 1) choice[pos++] = 0;
        if (pos == choice.size()) break;
        choice[pos]++;
    }
    return best;
}

}  // namespace

std::optional<Solution> solve_high_conn(const Instance& inst, int sigma, int k, double eps,
                                        uint64_t seed, GeneralStats* stats) {
    require_no_unary(inst, "solve_high_conn");
    auto terms_opt = current_terminals(inst);
    if (!terms_opt) return std::nullopt;
    const auto& terms = *terms_opt;
    int n = inst.g.num_vertices();

    if (k == 0) return evaluate_parts(inst, inst.g.components(), terms, 0, stats);
    if (n <= sigma * k) return brute_by_crossing_sets(inst, k);

    auto splitter = edge_splitter(inst.g.edge_ids(), 2 * sigma * k, k, eps, seed);
    std::optional<Solution> best;
    std::vector<int> guesses;  // terminal in the big component, -1 = none
    for (auto [v, l] : terms) guesses.push_back(v);
    guesses.push_back(-1);

    for (const auto& hset : splitter.sets) {
        if (stats) stats->colourings++;
        std::set<int> blue(hset.begin(), hset.end());
        auto comps = blue_components(inst.g, blue);
        int C = static_cast<int>(comps.size());
        std::vector<char> small(C, 0);
        std::map<int, int> comp_of;
        for (int i = 0; i < C; i++) {
            small[i] = static_cast<int>(comps[i].size()) <= sigma;
            for (int v : comps[i]) comp_of[v] = i;
        }
        for (int guess : guesses) {
            // mark small components holding other terminals, then propagate
            // marking across red edges exhaustively
            std::vector<char> markd(C, 0);
            for (auto [v, l] : terms)
                if (v != guess && small[comp_of[v]]) markd[comp_of[v]] = 1;
            bool changed = true;
            while (changed) {
                changed = false;
                for (int e : inst.g.edge_ids()) {
                    if (blue.count(e)) continue;
                    const auto& rec = inst.g.edge(e);
                    int a = comp_of[rec.u], b = comp_of[rec.v];
                    if (markd[a] && small[b] && !markd[b]) {
                        markd[b] = 1;
                        changed = true;
                    }
                    if (markd[b] && small[a] && !markd[a]) {
                        markd[a] = 1;
                        changed = true;
                    }
                }
            }
            std::vector<std::vector<int>> parts;
            std::vector<int> rest;  // unmarked region stays one piece
            for (int i = 0; i < C; i++) {
                if (markd[i]) parts.push_back(comps[i]);
                else rest.insert(rest.end(), comps[i].begin(), comps[i].end());
            }
            if (static_cast<int>(parts.size()) > k) continue;
            if (!rest.empty()) {
                std::sort(rest.begin(), rest.end());
                parts.push_back(std::move(rest));
            }
            auto cand = evaluate_parts(inst, parts, terms, k, stats);
            if (cand && better_solution(best, cand)) best = cand;
        }
    }
    return best;
}

namespace {

// Canonical key of (graph, terminal labelling) for memoising sub-instances.
std::string graph_key(const Instance& inst) {
    std::ostringstream os;
    std::map<int, int> rename;
    for (int v : inst.g.vertices()) {
        int id = static_cast<int>(rename.size());
        rename[v] = id;
    }
    std::vector<std::pair<int, int>> es;
    for (int e : inst.g.edge_ids()) {
        const auto& rec = inst.g.edge(e);
        int a = rename[rec.u], b = rename[rec.v];
        es.push_back({std::min(a, b), std::max(a, b)});
    }
    std::sort(es.begin(), es.end());
    for (auto [a, b] : es) os << a << "-" << b << ";";
    os << "|";
    auto terms = current_terminals(inst);
    if (terms)
        for (auto [v, l] : *terms) os << rename[v] << ":" << l << ",";
    else os << "conflict";
    return os.str();
}

struct GeneralCtx {
    double eps;
    uint64_t seed;
    GeneralStats* stats;
    int depth = 0;
    std::map<std::pair<std::string, int>, std::optional<Solution>> memo;
};

std::optional<Solution> solve_multi(GeneralCtx& ctx, const Instance& inst, int k);

// Recursive understanding over one connected piece (isolated leftover
// vertices are tolerated and labelled 0 by the caller).
std::optional<Solution> solve_connected(GeneralCtx& ctx, Instance inst, int k) {
    if (ctx.stats) ctx.stats->recursive_calls++;
    auto terms_opt = current_terminals(inst);
    if (!terms_opt) return std::nullopt;
    std::set<int> labels_used;
    for (auto [v, l] : *terms_opt) labels_used.insert(l);
    if (static_cast<int>(labels_used.size()) > k + 1) return std::nullopt;

    long long sigma_ll = 1;
    for (int i = 0; i < k && sigma_ll <= 1000000; i++) sigma_ll *= inst.num_labels();
    int sigma = static_cast<int>(std::min<long long>(sigma_ll, 1000000)) + 1;

    while (true) {
        auto sep = good_separation(inst.g, sigma, k, ctx.seed + 17);
        if (!sep) break;
        if (ctx.stats) ctx.stats->separations++;
        terms_opt = current_terminals(inst);  // reps move as the graph shrinks
        if (!terms_opt) return std::nullopt;

        std::set<int> left(sep->left.begin(), sep->left.end());
        std::set<int> boundary;
        for (int e : sep->cut_edges) {
            const auto& rec = inst.g.edge(e);
            boundary.insert(left.count(rec.u) ? rec.u : rec.v);
        }
        std::vector<int> bnd(boundary.begin(), boundary.end());

        std::set<int> keep_edges;  // edges of G[left]
        for (int e : inst.g.edge_ids()) {
            const auto& rec = inst.g.edge(e);
            if (left.count(rec.u) && left.count(rec.v)) keep_edges.insert(e);
        }

        std::set<int> useful;  // crossing edges of some boundary-guess optimum
        int D = inst.num_labels();
        std::vector<int> guess(bnd.size(), 0);
        while (true) {
            bool consistent = true;
            std::map<int, int> subterms;
            for (auto [v, l] : *terms_opt)
                if (left.count(v)) subterms[v] = l;
            for (size_t i = 0; i < bnd.size(); i++) {
                auto it = subterms.find(bnd[i]);
                if (it != subterms.end() && it->second != guess[i]) consistent = false;
                subterms[bnd[i]] = guess[i];
            }
            if (consistent) {
                Instance sub = restrict_to(inst, sep->left,
                                           std::vector<int>(keep_edges.begin(), keep_edges.end()));
                sub.terminals.clear();
                for (auto [v, l] : subterms) sub.terminals.push_back({v, l});
                identify_same_label_terminals(sub);
                auto key = std::make_pair(graph_key(sub), k);
                std::optional<Solution> sol;
                auto hit = ctx.memo.find(key);
                if (hit != ctx.memo.end()) {
                    sol = hit->second;
                } else {
                    sol = solve_multi(ctx, sub, k);
                    ctx.memo[key] = sol;
                }
                if (sol)
                    for (int e : sol->crossing_edges) useful.insert(e);
            }
            size_t pos = 0;
            while (pos < guess.size() && guess[pos] == D - 1) guess[pos++] = 0;
            if (pos == guess.size()) break;
            guess[pos]++;
        }

        std::vector<int> contractable;
        for (int e : keep_edges)
            if (!useful.count(e)) contractable.push_back(e);
        if (contractable.empty()) {
            // no safe contraction found; resolve the piece exhaustively
            return brute_by_crossing_sets(inst, k);
        }
        if (ctx.stats) ctx.stats->contracted_edges += contractable.size();
        for (int e : contractable)
            if (inst.g.edge_alive(e)) inst.g.contract_edge(e);
        if (!current_terminals(inst)) return std::nullopt;
    }

    return solve_high_conn(inst, sigma, k, ctx.eps, ctx.seed, ctx.stats);
}

// Splits the crossing budget across connected components.
std::optional<Solution> solve_multi(GeneralCtx& ctx, const Instance& inst, int k) {
    auto terms_opt = current_terminals(inst);
    if (!terms_opt) return std::nullopt;
    auto comps = inst.g.components();

    // trivial pieces: no edges, at most one terminal
    std::vector<std::vector<int>> real;
    std::vector<int> base_label(inst.g.original_vertices(), 0);
    for (auto& comp : comps) {
        bool has_edge = false;
        for (int v : comp)
            if (inst.g.degree(v) > 0) has_edge = true;
        if (!has_edge) {
            for (int v : comp) {
                auto it = terms_opt->find(v);
                base_label[v] = it != terms_opt->end() ? it->second : 0;
            }
        } else {
            real.push_back(comp);
        }
    }

    auto build_sub = [&](const std::vector<int>& comp) {
        std::set<int> in(comp.begin(), comp.end());
        std::vector<int> keep;
        for (int e : inst.g.edge_ids()) {
            const auto& rec = inst.g.edge(e);
            if (in.count(rec.u) && in.count(rec.v)) keep.push_back(e);
        }
        Instance sub = restrict_to(inst, comp, keep);
        sub.unary.reset();
        return sub;
    };

    std::vector<int> lab = base_label;
    if (real.empty()) {
        // nothing but isolated blobs
        Solution out;
        out.labels = lab;
        for (int v = 0; v < inst.g.original_vertices(); v++) out.labels[v] = lab[inst.g.find(v)];
        out.cost = 0;
        out.crossing = 0;
        return out;
    }
    if (real.size() == 1) {
        auto sol = solve_connected(ctx, build_sub(real[0]), k);
        if (!sol) return std::nullopt;
        for (int v : real[0]) lab[v] = sol->labels[v];
        std::vector<int> full(inst.g.original_vertices());
        for (int v = 0; v < inst.g.original_vertices(); v++) full[v] = lab[inst.g.find(v)];
        Solution out;
        out.labels = full;
        out.cost = sol->cost;
        out.crossing_edges = sol->crossing_edges;
        out.crossing = sol->crossing;
        return out;
    }

    // dynamic program over per-component budgets
    std::vector<std::vector<std::optional<Solution>>> table;
    for (const auto& comp : real) {
        Instance sub = build_sub(comp);
        std::vector<std::optional<Solution>> row(k + 1);
        for (int j = 0; j <= k; j++) row[j] = solve_connected(ctx, sub, j);
        table.push_back(std::move(row));
    }
    std::vector<std::optional<std::pair<long long, std::vector<int>>>> dp(k + 1);
    dp[0] = std::make_pair(0LL, std::vector<int>{});
    for (size_t c = 0; c < real.size(); c++) {
        std::vector<std::optional<std::pair<long long, std::vector<int>>>> nx(k + 1);
        for (int used = 0; used <= k; used++) {
            if (!dp[used]) continue;
            for (int j = 0; j <= k - used; j++) {
                if (!table[c][j]) continue;
                int nu = used + table[c][j]->crossing;
                if (nu > k) continue;
                long long cost = dp[used]->first + table[c][j]->cost;
                auto picks = dp[used]->second;
                picks.push_back(j);
                if (!nx[nu] || cost < nx[nu]->first) nx[nu] = std::make_pair(cost, picks);
            }
        }
        dp = std::move(nx);
    }
    std::optional<std::pair<long long, std::vector<int>>> chosen;
    for (int used = 0; used <= k; used++)
        if (dp[used] && (!chosen || dp[used]->first < chosen->first)) chosen = dp[used];
    if (!chosen) return std::nullopt;

    for (size_t c = 0; c < real.size(); c++) {
        const auto& sol = table[c][chosen->second[c]];
        for (int v : real[c]) lab[v] = sol->labels[v];
    }
    std::vector<int> full(inst.g.original_vertices());
    for (int v = 0; v < inst.g.original_vertices(); v++) full[v] = lab[inst.g.find(v)];
    Solution out;
    out.labels = full;
    out.cost = chosen->first;
    for (int e : inst.g.edge_ids()) {
        const auto& rec = inst.g.edge(e);
        if (full[rec.u] != full[rec.v]) out.crossing_edges.push_back(e);
    }
    out.crossing = static_cast<int>(out.crossing_edges.size());
    return out;
}

}  // namespace

std::optional<Solution> solve_general(const Instance& inst, int k, double eps, uint64_t seed,
                                      GeneralStats* stats) {
    require_no_unary(inst, "solve_general");
    Instance norm = inst;
    identify_same_label_terminals(norm);
    GeneralCtx ctx{eps, seed, stats};
    auto sol = solve_multi(ctx, norm, k);
    if (!sol) return std::nullopt;
    Solution out = evaluate(inst, sol->labels);
    if (out.crossing > k || !extends_terminals(inst, sol->labels)) return std::nullopt;
    return out;
}

}  // namespace zext
