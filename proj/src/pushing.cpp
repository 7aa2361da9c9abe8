#include "zext/pushing.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>

namespace zext {

namespace {

std::vector<int> terminal_reps(const Instance& inst) {
    auto terms = current_terminals(inst);
    if (!terms) throw std::runtime_error("terminals conflict after identification");
    std::vector<int> out;
    for (auto [v, l] : *terms) out.push_back(v);
    return out;
}

// Vertices reachable from `from` without using edges of `cut`.
std::vector<int> reachable_avoiding(const MultiGraph& g, const std::vector<int>& from,
                                    const std::vector<int>& cut) {
    std::set<int> blocked(cut.begin(), cut.end());
    std::set<int> seen;
    std::queue<int> q;
    for (int v : from) {
        int r = g.find(v);
        if (seen.insert(r).second) q.push(r);
    }
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int e : g.incident(x)) {
            if (blocked.count(e)) continue;
            int y = g.other_end(e, x);
            if (seen.insert(y).second) q.push(y);
        }
    }
    return {seen.begin(), seen.end()};
}

}  // namespace

std::vector<int> push(const Instance& inst, const std::vector<int>& labels, int label) {
    if (label < 0 || label >= inst.num_labels())
        throw std::invalid_argument("push: label outside the label set");
    std::vector<int> region;
    for (int v : inst.g.vertices())
        if (labels[v] == label) region.push_back(v);
    if (region.empty()) return labels;

    auto terms = current_terminals(inst);
    if (!terms) throw std::runtime_error("push: conflicting terminals");
    std::vector<int> others;
    for (auto [v, l] : *terms)
        if (l != label) others.push_back(v);

    std::vector<int> grown;
    if (others.empty()) {
        grown = reachable_avoiding(inst.g, region, {});
    } else {
        auto f = max_flow_unit(inst.g, region, others);
        auto cut = f.furthest_min_cut();
        grown = reachable_avoiding(inst.g, region, cut.cut_edges);
    }
    std::vector<int> out = labels;
    for (int v : grown) out[v] = label;
    for (int v = 0; v < inst.g.original_vertices(); v++) out[v] = out[inst.g.find(v)];
    return out;
}

void reduce_terminals_graph(MultiGraph& g, const std::vector<int>& terminals) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (int t0 : terminals) {
            int t = g.find(t0);
            std::vector<int> others;
            for (int o : terminals)
                if (g.find(o) != t) others.push_back(g.find(o));
            std::sort(others.begin(), others.end());
            others.erase(std::unique(others.begin(), others.end()), others.end());
            std::vector<int> region;
            if (others.empty()) {
                region = g.component_of(t);
            } else {
                auto f = max_flow_unit(g, {t}, others);
                auto cut = f.furthest_min_cut();
                region = reachable_avoiding(g, {t}, cut.cut_edges);
            }
            for (int v : region)
                if (v != t) {
                    t = g.merge(t, v);
                    changed = true;
                }
        }
    }
}

Instance reduce_terminals(const Instance& inst) {
    Instance out = inst;
    identify_same_label_terminals(out);
    reduce_terminals_graph(out.g, terminal_reps(out));
    return out;
}

namespace {

long long doubled_lower_bound(const BranchState& st, const std::set<int>& term_set) {
    long long p2 = 0;
    for (int e : st.g.edge_ids()) {
        const auto& rec = st.g.edge(e);
        bool tu = term_set.count(rec.u), tv = term_set.count(rec.v);
        if (st.marked[e]) p2 += 2;
        else if (tu != tv) p2 += 1;
    }
    return p2;
}

std::set<int> term_reps_set(const Instance& inst, const MultiGraph& g) {
    std::set<int> out;
    for (auto [v, l] : inst.terminals) out.insert(g.find(v));
    return out;
}

// Any edge joining two terminals is a committed crossing edge.
void mark_terminal_terminal(BranchState& st, const std::set<int>& term_set) {
    for (int e : st.g.edge_ids()) {
        const auto& rec = st.g.edge(e);
        if (term_set.count(rec.u) && term_set.count(rec.v)) st.marked[e] = 1;
    }
}

// Contracts t out to its furthest min-cut. Returns false when the region
// would swallow a marked edge (inconsistent branch).
bool push_terminal(BranchState& st, int t, const std::set<int>& term_set) {
    std::vector<int> others(term_set.begin(), term_set.end());
    others.erase(std::remove(others.begin(), others.end(), t), others.end());
    std::vector<int> region;
    if (others.empty()) {
        region = st.g.component_of(t);
    } else {
        auto f = max_flow_unit(st.g, {t}, others);
        region = reachable_avoiding(st.g, {t}, f.furthest_min_cut().cut_edges);
    }
    std::set<int> in(region.begin(), region.end());
    for (int e : st.g.edge_ids()) {
        if (!st.marked[e]) continue;
        const auto& rec = st.g.edge(e);
        if (in.count(rec.u) && in.count(rec.v)) return false;
    }
    for (int v : region)
        if (v != t) t = st.g.merge(t, v);
    return true;
}

struct Stage1Ctx {
    const Instance* inst;
    int k;
    PushingStats* stats;
    std::vector<BranchState> out;
};

void stage1_rec(Stage1Ctx& ctx, BranchState st) {
    if (ctx.stats) ctx.stats->stage1_nodes++;
    auto term_set = term_reps_set(*ctx.inst, st.g);
    mark_terminal_terminal(st, term_set);
    st.doubled_p = doubled_lower_bound(st, term_set);
    if (st.doubled_p > 2LL * ctx.k) return;

    int pick = -1;
    for (int e : st.g.edge_ids()) {
        if (st.marked[e]) continue;
        const auto& rec = st.g.edge(e);
        if (term_set.count(rec.u) != term_set.count(rec.v)) {
            pick = e;
            break;
        }
    }
    if (pick < 0) {
        if (ctx.stats) ctx.stats->stage1_outputs++;
        ctx.out.push_back(std::move(st));
        return;
    }

    const auto& rec = st.g.edge(pick);
    int t = term_set.count(rec.u) ? rec.u : rec.v;

    // contract into the terminal, then push back out to the furthest cut
    BranchState contract_branch = st;
    contract_branch.g.contract_edge(pick);
    int tc = contract_branch.g.find(t);
    auto term_set_c = term_reps_set(*ctx.inst, contract_branch.g);
    if (push_terminal(contract_branch, tc, term_set_c))
        stage1_rec(ctx, std::move(contract_branch));

    BranchState mark_branch = std::move(st);
    mark_branch.marked[pick] = 1;
    stage1_rec(ctx, std::move(mark_branch));
}

}  // namespace

std::vector<BranchState> stage1(const Instance& reduced, int k, PushingStats* stats) {
    auto term_set = term_reps_set(reduced, reduced.g);
    std::vector<int> terms(term_set.begin(), term_set.end());

    // initial path packing, abandoned once more than 2k paths exist
    long long packed = 0;
    for (int t : terms) {
        std::vector<int> others;
        for (int o : terms)
            if (o != t) others.push_back(o);
        if (others.empty()) continue;
        auto f = max_flow_unit(reduced.g, {t}, others, 2LL * k - packed);
        packed += f.value();
        if (f.aborted() || packed > 2LL * k) return {};
    }

    BranchState init;
    init.g = reduced.g;
    init.marked.assign(reduced.g.total_edges(), 0);

    Stage1Ctx ctx{&reduced, k, stats, {}};
    if (stats) stats->initial_doubled_p = 0;
    stage1_rec(ctx, std::move(init));
    if (stats) {
        BranchState probe;
        probe.g = reduced.g;
        probe.marked.assign(reduced.g.total_edges(), 0);
        auto ts = term_reps_set(reduced, probe.g);
        mark_terminal_terminal(probe, ts);
        stats->initial_doubled_p = doubled_lower_bound(probe, ts);
    }
    return ctx.out;
}

namespace {

struct Stage2Ctx {
    const Instance* inst;
    int k;
    PushingStats* stats;
    std::vector<BranchState> out;
};

long long marked_count(const BranchState& st) {
    long long c = 0;
    for (int e : st.g.edge_ids())
        if (st.marked[e]) c++;
    return c;
}

void stage2_rec(Stage2Ctx& ctx, BranchState st) {
    if (ctx.stats) ctx.stats->stage2_nodes++;
    if (marked_count(st) > ctx.k) return;

    while (true) {
        auto term_set = term_reps_set(*ctx.inst, st.g);
        int v = -1;
        for (int cand : st.g.vertices()) {
            if (term_set.count(cand)) continue;
            for (int e : st.g.incident(cand))
                if (!st.marked[e]) {
                    v = cand;
                    break;
                }
            if (v >= 0) break;
        }
        if (v < 0) {
            if (ctx.stats) ctx.stats->stage2_outputs++;
            ctx.out.push_back(std::move(st));
            return;
        }

        std::vector<int> terms(term_set.begin(), term_set.end());
        std::vector<int> region;
        if (terms.empty()) {
            region = st.g.component_of(v);
        } else {
            auto f = max_flow_unit(st.g, {v}, terms, ctx.k);
            if (f.aborted() || f.value() > ctx.k) return;  // cut around v too wide
            region = reachable_avoiding(st.g, {v}, f.furthest_min_cut().cut_edges);
        }
        std::set<int> in(region.begin(), region.end());
        for (int e : st.g.edge_ids()) {
            if (!st.marked[e]) continue;
            const auto& rec = st.g.edge(e);
            if (in.count(rec.u) && in.count(rec.v)) return;  // inconsistent choices
        }
        for (int u : region)
            if (u != v) v = st.g.merge(v, u);

        int pick = -1;
        for (int e : st.g.edge_ids()) {
            if (st.marked[e]) continue;
            const auto& rec = st.g.edge(e);
            if (rec.u == v || rec.v == v) {
                pick = e;
                break;
            }
        }
        if (pick < 0) continue;  // all of delta(v) marked, move to the next seed

        BranchState contract_branch = st;
        contract_branch.g.contract_edge(pick);
        stage2_rec(ctx, std::move(contract_branch));

        st.marked[pick] = 1;
        if (marked_count(st) > ctx.k) return;
        // fall through: same node continues as the marking branch
        if (ctx.stats) ctx.stats->stage2_nodes++;
    }
}

}  // namespace

std::vector<BranchState> stage2(const BranchState& state, const Instance& inst, int k,
                                PushingStats* stats) {
    Stage2Ctx ctx{&inst, k, stats, {}};
    stage2_rec(ctx, state);
    return ctx.out;
}

std::optional<Solution> assign(const BranchState& state, const Instance& inst) {
    auto terms = current_terminals(inst);
    if (!terms) return std::nullopt;
    std::map<int, int> pinned;  // rep in state.g -> label
    for (auto [v, l] : *terms) {
        int r = state.g.find(v);
        auto it = pinned.find(r);
        if (it != pinned.end() && it->second != l) return std::nullopt;
        pinned[r] = l;
    }
    int D = inst.num_labels();
    std::vector<int> free;
    for (int v : state.g.vertices()) {
        if (pinned.count(v)) continue;
        if (state.g.degree(v) > 0) free.push_back(v);
        else pinned[v] = 0;  // isolated blob, any label costs nothing
    }

    std::optional<Solution> best;
    std::vector<int> choice(free.size(), 0);
    while (true) {
        std::map<int, int> lab = pinned;
        for (size_t i = 0; i < free.size(); i++) lab[free[i]] = choice[i];
        std::vector<int> full(inst.g.original_vertices(), 0);
        for (int v = 0; v < inst.g.original_vertices(); v++)
            full[v] = lab[state.g.find(inst.g.find(v))];
        Solution cand = evaluate(inst, full);
        for (int e : cand.crossing_edges)
            if (!state.marked[e]) throw std::logic_error("assign: crossing edge outside marked set");
        if (better_solution(best, cand)) best = cand;
        size_t pos = 0;
        while (pos < choice.size() && choice[pos] == D - 1) choice[pos++] = 0;
        if (pos == choice.size()) break;
        choice[pos]++;
    }
    return best;
}

std::optional<Solution> solve_metric(const Instance& inst, int k, PushingStats* stats) {
    if (!inst.cost.is_tree()) {
        auto val = validate_cost(*inst.cost.matrix);
        if (!val.ok || val.cls == MetricClass::SimpleCost)
            throw std::invalid_argument("solve_metric: cost function is not a metric");
    }
    Instance reduced = reduce_terminals(inst);
    std::optional<Solution> best;
    for (auto& s1 : stage1(reduced, k, stats)) {
        for (auto& s2 : stage2(s1, reduced, k, stats)) {
            if (stats) stats->assign_calls++;
            auto cand = assign(s2, inst);
            if (cand && cand->crossing <= k && better_solution(best, cand)) best = cand;
        }
    }
    return best;
}

}  // namespace zext
