#include "zext/relaxation.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>

#include "zext/dflow.hpp"
#include "zext/oracle.hpp"

namespace zext {

long long DirectedFlow::max_flow(int s, int t) {
    std::vector<int> par(adj.size());
    while (true) {
        std::fill(par.begin(), par.end(), -1);
        par[s] = -2;
        std::queue<int> q;
        q.push(s);
        bool found = false;
        while (!q.empty() && !found) {
            int x = q.front();
            q.pop();
            for (int i : adj[x]) {
                const Arc& a = arcs[i];
                if (a.cap - a.flow <= 0 || par[a.to] != -1) continue;
                par[a.to] = i;
                if (a.to == t) {
                    found = true;
                    break;
                }
                q.push(a.to);
            }
        }
        if (!found) break;
        long long push = arcs[par[t]].cap;
        for (int x = t; x != s;) {
            const Arc& a = arcs[par[x]];
            push = std::min(push, a.cap - a.flow);
            x = a.from;
        }
        for (int x = t; x != s;) {
            int i = par[x];
            arcs[i].flow += push;
            arcs[i ^ 1].flow -= push;
            x = arcs[i].from;
        }
        value += push;
    }
    return value;
}

std::vector<char> DirectedFlow::reachable(int s) const {
    std::vector<char> seen(adj.size(), 0);
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int i : adj[x]) {
            const Arc& a = arcs[i];
            if (a.cap - a.flow > 0 && !seen[a.to]) {
                seen[a.to] = 1;
                q.push(a.to);
            }
        }
    }
    return seen;
}

namespace {

const MetricTree& tree_of(const Instance& inst) {
    if (!inst.cost.is_tree())
        throw std::invalid_argument("relaxation: tree cost specification required");
    return *inst.cost.tree;
}

std::vector<std::pair<int, int>> orient_edges(const MetricTree& t, int root) {
    std::vector<std::pair<int, int>> out;
    std::vector<char> seen(t.nodes(), 0);
    std::queue<int> q;
    q.push(root);
    seen[root] = 1;
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int y : t.adj[x])
            if (!seen[y]) {
                seen[y] = 1;
                out.push_back({x, y});
                q.push(y);
            }
    }
    return out;
}

int label_index_of_node(const MetricTree& t, int node) {
    for (int l = 0; l < t.labels(); l++)
        if (t.label_nodes[l] == node) return l;
    return -1;
}

}  // namespace

TreeEdgeNetworks::TreeEdgeNetworks(const Instance& inst) : inst_(inst) {
    const MetricTree& t = tree_of(inst_);
    edges_ = orient_edges(t, 0);
    child_side_.assign(edges_.size(), std::vector<char>(t.nodes(), 0));
    for (size_t i = 0; i < edges_.size(); i++) {
        auto [x, y] = edges_[i];
        for (int nd = 0; nd < t.nodes(); nd++) child_side_[i][nd] = t.d(nd, y) < t.d(nd, x);
    }
    auto terms = current_terminals(inst_);
    if (!terms) throw std::invalid_argument("networks: conflicting terminals");
    for (size_t i = 0; i < edges_.size(); i++) {
        std::vector<int> src, snk;
        for (auto [v, l] : *terms)
            (child_side_[i][t.label_nodes[l]] ? snk : src).push_back(v);
        flows_.emplace_back(inst_.g, src, snk);
    }
    total_value();
}

long long TreeEdgeNetworks::total_value() {
    long long total = 0;
    for (auto& f : flows_) total += f.augment_to_max();
    return total;
}

void TreeEdgeNetworks::force(int vertex, int node) {
    auto it = forced_.find(vertex);
    if (it != forced_.end()) {
        if (it->second != node) throw std::invalid_argument("force: vertex already forced elsewhere");
        return;
    }
    forced_[vertex] = node;
    for (size_t i = 0; i < edges_.size(); i++) {
        if (child_side_[i][node]) flows_[i].tie_to_sink(vertex);
        else flows_[i].tie_to_source(vertex);
    }
}

int TreeEdgeNetworks::edge_index_of_child(int node) const {
    for (size_t i = 0; i < edges_.size(); i++)
        if (edges_[i].second == node) return static_cast<int>(i);
    return -1;
}

std::vector<int> TreeEdgeNetworks::furthest_region(int node) {
    total_value();
    int ei = edge_index_of_child(node);
    std::vector<int> other_side;
    if (ei >= 0) {
        other_side = flows_[ei].source_reachable();
    } else {
        // the root: use its unique down edge (root must be a leaf here)
        for (size_t i = 0; i < edges_.size(); i++)
            if (edges_[i].first == node) {
                ei = static_cast<int>(i);
                break;
            }
        if (ei < 0) throw std::invalid_argument("furthest_region: node has no incident tree edge");
        other_side = flows_[ei].sink_reaching();
    }
    std::set<int> out_set(other_side.begin(), other_side.end());
    std::vector<int> region;
    for (int v : inst_.g.vertices())
        if (!out_set.count(v)) region.push_back(v);
    return region;
}

std::vector<int> TreeEdgeNetworks::closest_region(int node) {
    total_value();
    int ei = edge_index_of_child(node);
    if (ei < 0) throw std::invalid_argument("closest_region: not a child node");
    return flows_[ei].sink_reaching();
}

std::vector<TreeEdgeNetworks::Anchor> TreeEdgeNetworks::anchors() const {
    const MetricTree& t = *inst_.cost.tree;
    auto terms = current_terminals(inst_);
    std::map<int, Anchor> by_node;
    for (auto [v, l] : *terms) {
        int nd = t.label_nodes[l];
        auto it = by_node.find(nd);
        if (it == by_node.end() || it->second.order_key > v) by_node[nd] = {nd, v, l};
    }
    for (auto [v, nd] : forced_) {
        if (by_node.count(nd)) continue;
        by_node[nd] = {nd, inst_.g.original_vertices() + nd, label_index_of_node(t, nd)};
    }
    std::vector<Anchor> out;
    for (auto& [nd, a] : by_node) out.push_back(a);
    return out;
}

TreeEdgeNetworks build_networks(const Instance& inst) {
    auto terms = current_terminals(inst);
    if (!terms) throw std::invalid_argument("build_networks: conflicting terminals");
    for (const auto& comp : inst.g.components()) {
        bool has = false;
        for (int v : comp)
            if (terms->count(v)) has = true;
        if (!has)
            throw std::invalid_argument(
                "build_networks: component without a terminal (solve it separately)");
    }
    const MetricTree& t = tree_of(inst);
    for (auto [v, l] : *terms)
        if (l < 0 || l >= t.labels())
            throw std::invalid_argument("build_networks: terminal label outside the domain");
    return TreeEdgeNetworks(inst);
}

long long relaxed_value(TreeEdgeNetworks& nets) { return nets.total_value(); }

void force_assignment(TreeEdgeNetworks& nets, int vertex, int node) {
    const MetricTree& t = *nets.instance().cost.tree;
    if (node < 0 || node >= t.nodes())
        throw std::invalid_argument("force_assignment: not a tree node");
    nets.force(vertex, node);
    nets.total_value();
}

std::vector<int> relaxed_assignment(TreeEdgeNetworks& nets) {
    long long rho = nets.total_value();
    const Instance& inst = nets.instance();
    const MetricTree& t = *inst.cost.tree;
    const auto& oe = nets.oriented_edges();

    std::map<int, std::set<int>> region;  // child node -> vertices on its side
    for (auto [x, y] : oe) {
        auto r = nets.closest_region(y);
        region[y] = std::set<int>(r.begin(), r.end());
    }
    // oriented edges run parents-first, so intersecting with the parent's
    // region in order repairs nesting violations top-down
    for (auto [x, y] : oe) {
        if (x == 0) continue;
        std::set<int> merged;
        for (int v : region[y])
            if (region[x].count(v)) merged.insert(v);
        region[y] = std::move(merged);
    }
    std::map<int, std::vector<int>> kids;
    for (auto [x, y] : oe) kids[x].push_back(y);

    bool consistent = true;
    std::vector<int> node_lab(inst.g.original_vertices(), 0);
    for (int v : inst.g.vertices()) {
        int cur = 0;
        while (consistent) {
            int next = -1, hits = 0;
            for (int c : kids[cur])
                if (region[c].count(v)) {
                    next = c;
                    hits++;
                }
            if (hits > 1) {
                consistent = false;
                break;
            }
            if (hits == 0) break;
            cur = next;
        }
        node_lab[v] = cur;
    }
    if (consistent) {
        for (int v = 0; v < inst.g.original_vertices(); v++) node_lab[v] = node_lab[inst.g.find(v)];
        for (auto [v, nd] : nets.forced())
            if (node_lab[inst.g.find(v)] != nd) consistent = false;
        if (consistent && evaluate_relaxed(inst, node_lab) == rho) return node_lab;
    }
    // repair missed the witness; fall back to the exhaustive relaxed oracle
    BruteOptions bo;
    bo.relaxed = true;
    for (auto [v, nd] : nets.forced()) bo.forced[v] = nd;
    auto sol = brute_solve(inst, bo);
    if (!sol || sol->cost != rho)
        throw std::logic_error("relaxed_assignment: value mismatch against the exhaustive oracle");
    return sol->labels;
}

std::vector<int> integral_support(TreeEdgeNetworks& nets, int vertex) {
    long long rho = nets.total_value();
    const MetricTree& t = *nets.instance().cost.tree;
    std::vector<int> out;
    for (int d = 0; d < t.labels(); d++) {
        TreeEdgeNetworks probe = nets;
        probe.force(vertex, t.label_nodes[d]);
        if (probe.total_value() == rho) out.push_back(d);
    }
    return out;
}

// ---------------------------------------------------------------------------
// gap solvers
// ---------------------------------------------------------------------------

namespace {

struct CompPieces {
    std::vector<Instance> insts;
    std::vector<std::vector<int>> verts;  // live reps per kept component
    std::vector<int> orphans;             // vertices of terminal-free components
};

CompPieces split_components(const Instance& inst, bool keep_terminal_free) {
    CompPieces out;
    auto terms = current_terminals(inst);
    if (!terms) throw std::invalid_argument("split: conflicting terminals");
    for (const auto& comp : inst.g.components()) {
        bool has = false;
        for (int v : comp)
            if (terms->count(v)) has = true;
        if (!has && !keep_terminal_free) {
            out.orphans.insert(out.orphans.end(), comp.begin(), comp.end());
            continue;
        }
        std::set<int> in(comp.begin(), comp.end());
        std::vector<int> keep;
        for (int e : inst.g.edge_ids()) {
            const auto& rec = inst.g.edge(e);
            if (in.count(rec.u) && in.count(rec.v)) keep.push_back(e);
        }
        out.insts.push_back(restrict_to(inst, comp, keep));
        out.verts.push_back(comp);
    }
    return out;
}

struct LeafSearch {
    const Instance* comp;
    const std::vector<int>* comp_verts;
    long long budget;
    GapStats* stats;
    std::optional<Solution> best;

    void rec(TreeEdgeNetworks nets) {
        if (stats) stats->nodes++;
        long long rho = nets.total_value();
        if (rho > budget) return;
        const MetricTree& t = *comp->cost.tree;

        auto as = nets.anchors();
        std::map<int, std::vector<int>> vertex_anchors;
        for (size_t ai = 0; ai < as.size(); ai++)
            for (int v : nets.furthest_region(as[ai].node)) vertex_anchors[v].push_back(static_cast<int>(ai));

        int u = -1;
        for (int v : *comp_verts)
            if (vertex_anchors[v].empty()) {
                u = v;
                break;
            }
        if (u >= 0) {
            // no furthest region holds u: it is fractional in every relaxed
            // optimum, so branch over its integral values
            if (stats) stats->branchings++;
            for (int d = 0; d < t.labels(); d++) {
                TreeEdgeNetworks child = nets;
                child.force(u, t.label_nodes[d]);
                rec(std::move(child));
            }
            return;
        }

        if (stats) stats->emissions++;
        std::vector<int> lab(comp->g.original_vertices(), 0);
        for (int v : *comp_verts) {
            int node;
            auto f = nets.forced().find(v);
            if (f != nets.forced().end()) {
                node = f->second;
            } else {
                auto& list = vertex_anchors[v];
                if (list.size() > 2)
                    throw std::logic_error("leaf gap: vertex inside three furthest regions");
                const auto* pick = &as[list[0]];
                if (list.size() == 2 && as[list[1]].order_key < pick->order_key)
                    pick = &as[list[1]];
                node = pick->node;
            }
            int l = label_index_of_node(t, node);
            if (l < 0) throw std::logic_error("leaf gap: emission hit a non-label node");
            lab[v] = l;
        }
        for (int v = 0; v < comp->g.original_vertices(); v++) lab[v] = lab[comp->g.find(v)];
        Solution cand = evaluate(*comp, lab);
        if (!extends_terminals(*comp, lab))
            throw std::logic_error("leaf gap: emission breaks a terminal");
        if (cand.cost != rho)
            throw std::logic_error("leaf gap: emitted labelling misses the relaxed value");
        if (better_solution(best, cand)) best = cand;
    }
};

struct TreeSearch {
    const Instance* comp;
    const std::vector<int>* comp_verts;
    long long budget;
    GapStats* stats;
    std::optional<Solution> best;

    void rec(TreeEdgeNetworks nets) {
        if (stats) stats->nodes++;
        long long rho = nets.total_value();
        if (rho > budget) return;
        const MetricTree& t = *comp->cost.tree;
        auto terms = current_terminals(*comp);

        std::map<int, int> choice;
        int branch_v = -1;
        for (int v : *comp_verts) {
            auto ti = terms->find(v);
            if (ti != terms->end()) {
                choice[v] = ti->second;
                continue;
            }
            auto fi = nets.forced().find(v);
            if (fi != nets.forced().end()) {
                choice[v] = label_index_of_node(t, fi->second);
                continue;
            }
            std::vector<int> support;
            for (int d = 0; d < t.labels(); d++) {
                TreeEdgeNetworks probe = nets;
                probe.force(v, t.label_nodes[d]);
                if (probe.total_value() == rho) support.push_back(d);
            }
            if (support.empty()) {
                branch_v = v;
                break;
            }
            choice[v] = support.front();  // earliest value in the domain order
        }
        if (branch_v >= 0) {
            if (stats) stats->branchings++;
            for (int d = 0; d < t.labels(); d++) {
                TreeEdgeNetworks child = nets;
                child.force(branch_v, t.label_nodes[d]);
                rec(std::move(child));
            }
            return;
        }

        if (stats) stats->emissions++;
        std::vector<int> lab(comp->g.original_vertices(), 0);
        for (auto [v, l] : choice) lab[v] = l;
        for (int v = 0; v < comp->g.original_vertices(); v++) lab[v] = lab[comp->g.find(v)];
        Solution cand = evaluate(*comp, lab);
        if (cand.cost != rho)
            throw std::logic_error("tree gap: emitted labelling misses the relaxed value");
        if (better_solution(best, cand)) best = cand;
    }
};

// shared scaffolding: orphan removal, per-component budgets, final assembly
template <typename Search>
std::optional<Solution> run_gap(const Instance& inst, GapStats* stats) {
    if (inst.unary) throw std::invalid_argument("gap solver: unary costs unsupported here");
    const MetricTree& t = tree_of(inst);
    Instance norm = inst;
    identify_same_label_terminals(norm);
    if (!current_terminals(norm)) return std::nullopt;

    if (t.nodes() == 1 || norm.terminals.empty()) {
        std::vector<int> lab(norm.g.original_vertices(), 0);
        if (!norm.terminals.empty())
            for (auto [v, l] : norm.terminals)
                for (int o = 0; o < norm.g.original_vertices(); o++)
                    if (norm.g.find(o) == norm.g.find(v)) lab[o] = l;
        Solution out = evaluate(inst, lab);
        if (stats) stats->root_rho = out.cost;
        return out.cost <= inst.q ? std::optional<Solution>(out) : std::nullopt;
    }

    auto pieces = split_components(norm, false);
    std::vector<long long> rho0(pieces.insts.size());
    long long sum_rho = 0;
    for (size_t i = 0; i < pieces.insts.size(); i++) {
        TreeEdgeNetworks nets(pieces.insts[i]);
        rho0[i] = nets.total_value();
        sum_rho += rho0[i];
    }
    if (stats) stats->root_rho = sum_rho;
    if (sum_rho > norm.q) return std::nullopt;

    std::vector<int> full(norm.g.original_vertices(), 0);
    long long total = 0;
    for (size_t i = 0; i < pieces.insts.size(); i++) {
        Search search;
        search.comp = &pieces.insts[i];
        search.comp_verts = &pieces.verts[i];
        search.budget = norm.q - (sum_rho - rho0[i]);
        search.stats = stats;
        search.rec(TreeEdgeNetworks(pieces.insts[i]));
        if (!search.best) return std::nullopt;
        total += search.best->cost;
        for (int v : pieces.verts[i])
            for (int o = 0; o < norm.g.original_vertices(); o++)
                if (norm.g.find(o) == v) full[o] = search.best->labels[o];
    }
    if (total > norm.q) return std::nullopt;
    Solution out = evaluate(inst, full);
    if (out.cost != total) throw std::logic_error("gap solver: assembly cost drifted");
    return out;
}

}  // namespace

std::optional<Solution> solve_leaf_gap(const Instance& inst, GapStats* stats) {
    if (!tree_of(inst).is_leaf_metric())
        throw std::invalid_argument("leaf-gap: the metric is not a leaf metric");
    return run_gap<LeafSearch>(inst, stats);
}

std::optional<Solution> solve_tree_gap(const Instance& inst, GapStats* stats) {
    return run_gap<TreeSearch>(inst, stats);
}

// ---------------------------------------------------------------------------
// Metric Labelling
// ---------------------------------------------------------------------------

std::vector<std::vector<long long>> unary_gradients(
    const std::vector<std::vector<long long>>& sigma_ext, const MetricTree& t, int root,
    const std::vector<std::pair<int, int>>& oriented_edges) {
    size_t V = sigma_ext.size();
    std::vector<std::vector<long long>> delta(oriented_edges.size(), std::vector<long long>(V, 0));
    for (size_t i = 0; i < oriented_edges.size(); i++) {
        auto [x, y] = oriented_edges[i];
        for (size_t v = 0; v < V; v++) delta[i][v] = sigma_ext[v][y] - sigma_ext[v][x];
    }
    // telescoping identity along every root-to-node path
    for (size_t v = 0; v < V; v++)
        for (int z = 0; z < t.nodes(); z++) {
            long long acc = 0;
            auto p = t.path(root, z);
            std::set<std::pair<int, int>> onpath;
            for (size_t j = 0; j + 1 < p.size(); j++) onpath.insert({p[j], p[j + 1]});
            for (size_t i = 0; i < oriented_edges.size(); i++)
                if (onpath.count(oriented_edges[i])) acc += delta[i][v];
            if (acc != sigma_ext[v][z] - sigma_ext[v][root])
                throw std::logic_error("unary_gradients: telescoping identity failed");
        }
    return delta;
}

namespace {

constexpr long long kMlInf = 1LL << 40;

long long ml_value(const Instance& inst, const std::vector<int>& verts,
                   const std::vector<std::vector<long long>>& sigma_ext,
                   const std::map<int, int>& assigned) {
    const MetricTree& t = tree_of(inst);
    auto oe = orient_edges(t, 0);
    long long total = 0;
    for (int v : verts) total += sigma_ext[v][0];
    for (auto [x, y] : oe) {
        auto on_child_side = [&](int nd) { return t.d(nd, y) < t.d(nd, x); };
        DirectedFlow df(2 + inst.g.original_vertices());
        for (int e : inst.g.edge_ids()) {
            const auto& rec = inst.g.edge(e);
            df.add_arc(2 + rec.u, 2 + rec.v, 1);
            df.add_arc(2 + rec.v, 2 + rec.u, 1);
        }
        long long offset = 0;
        for (int v : verts) {
            long long d = sigma_ext[v][y] - sigma_ext[v][x];
            if (d > 0) df.add_arc(0, 2 + v, d);
            else if (d < 0) {
                df.add_arc(2 + v, 1, -d);
                offset += d;
            }
        }
        for (auto [v, nd] : assigned) {
            if (on_child_side(nd)) df.add_arc(2 + inst.g.find(v), 1, kMlInf);
            else df.add_arc(0, 2 + inst.g.find(v), kMlInf);
        }
        total += df.max_flow(0, 1) + offset;
    }
    return total;
}

}  // namespace

long long relaxed_value_ml(const Instance& inst,
                           const std::vector<std::vector<long long>>& sigma_ext,
                           const std::map<int, int>& forced) {
    const MetricTree& t = tree_of(inst);
    auto oe = orient_edges(t, 0);
    unary_gradients(sigma_ext, t, 0, oe);  // validates the decomposition
    std::map<int, int> assigned = forced;
    auto terms = current_terminals(inst);
    if (!terms) throw std::invalid_argument("relaxed_value_ml: conflicting terminals");
    for (auto [v, l] : *terms) assigned[v] = t.label_nodes[l];
    return ml_value(inst, inst.g.vertices(), sigma_ext, assigned);
}

namespace {

struct MlCtx {
    long long q;
    MlOracle oracle;
    GapStats* stats;
};

// Extends every live row; throws MlNotApplicable when a row has no
// interpolating extension.
std::vector<std::vector<long long>> extend_rows(const Instance& comp,
                                                const std::vector<int>& verts,
                                                const std::vector<std::vector<long long>>& sigma) {
    const MetricTree& t = *comp.cost.tree;
    std::vector<std::vector<long long>> ext(comp.g.original_vertices(),
                                            std::vector<long long>(t.nodes(), 0));
    for (int v : verts) {
        auto e = extend_unary(sigma[v], t);
        if (!e) throw MlNotApplicable("a unary cost row admits no interpolation");
        ext[v] = *e;
    }
    return ext;
}

long long ml_oracle_value(const MlCtx& ctx, const Instance& comp, const std::vector<int>& verts,
                          const std::vector<std::vector<long long>>& sigma_ext,
                          const std::map<int, int>& assigned) {
    if (ctx.oracle == MlOracle::Flow) return ml_value(comp, verts, sigma_ext, assigned);
    BruteOptions bo;
    bo.relaxed = true;
    bo.sigma_ext = &sigma_ext;
    bo.forced = assigned;
    // vertices outside this component would be enumerated too; pin them
    std::set<int> in(verts.begin(), verts.end());
    for (int v : comp.g.vertices())
        if (!in.count(v) && !bo.forced.count(v)) bo.forced[v] = 0;
    auto sol = brute_solve(comp, bo);
    if (!sol) throw std::logic_error("ml oracle: infeasible relaxed instance");
    long long junk = 0;
    for (int v : comp.g.vertices())
        if (!in.count(v)) junk += sigma_ext[v][sol->labels[v]];
    return sol->cost - junk;
}

struct MlSearch {
    MlCtx* ctx;
    const Instance* comp;
    const std::vector<int>* verts;
    const std::vector<std::vector<long long>>* sigma_ext;
    long long budget;
    std::optional<Solution> best;

    void rec(std::map<int, int> assigned, const std::map<int, int>& forced_labels) {
        if (ctx->stats) ctx->stats->nodes++;
        long long rho = ml_oracle_value(*ctx, *comp, *verts, *sigma_ext, assigned);
        if (rho > budget) return;
        const MetricTree& t = *comp->cost.tree;

        std::map<int, int> choice = forced_labels;
        int branch_v = -1;
        for (int v : *verts) {
            if (choice.count(v)) continue;
            std::vector<int> support;
            for (int d = 0; d < t.labels(); d++) {
                auto probe = assigned;
                probe[v] = t.label_nodes[d];
                if (ml_oracle_value(*ctx, *comp, *verts, *sigma_ext, probe) == rho)
                    support.push_back(d);
            }
            if (support.empty()) {
                branch_v = v;
                break;
            }
            choice[v] = support.front();
        }
        if (branch_v >= 0) {
            if (ctx->stats) ctx->stats->branchings++;
            for (int d = 0; d < t.labels(); d++) {
                auto sub_assigned = assigned;
                sub_assigned[branch_v] = t.label_nodes[d];
                auto sub_forced = forced_labels;
                sub_forced[branch_v] = d;
                rec(std::move(sub_assigned), sub_forced);
            }
            return;
        }

        if (ctx->stats) ctx->stats->emissions++;
        std::vector<int> lab(comp->g.original_vertices(), 0);
        for (auto [v, l] : choice) lab[v] = l;
        for (int v = 0; v < comp->g.original_vertices(); v++) lab[v] = lab[comp->g.find(v)];
        Solution cand = evaluate(*comp, lab);
        if (cand.cost != rho)
            throw std::logic_error("ml gap: emitted labelling misses the relaxed value");
        if (better_solution(best, cand)) best = cand;
    }
};

// Branching phase on a component that already carries >= 2 terminals (or
// whatever it was born with plus the guessed ones).
std::optional<Solution> ml_branch(MlCtx& ctx, const Instance& comp, const std::vector<int>& verts,
                                  const std::vector<std::vector<long long>>& sigma,
                                  long long budget) {
    auto sigma_ext = extend_rows(comp, verts, sigma);
    auto terms = current_terminals(comp);
    if (!terms) return std::nullopt;
    const MetricTree& t = *comp.cost.tree;
    std::map<int, int> assigned, forced_labels;
    for (auto [v, l] : *terms) {
        assigned[v] = t.label_nodes[l];
        forced_labels[v] = l;
    }
    MlSearch search{&ctx, &comp, &verts, &sigma_ext, budget, std::nullopt};
    search.rec(assigned, forced_labels);
    return search.best;
}

// Guessing phase: fixes labels of two vertices (identifying on ties) until
// the component behaves like a two-terminal instance.
void ml_guess(MlCtx& ctx, Instance comp, std::vector<int> verts,
              std::vector<std::vector<long long>> sigma, long long budget,
              std::optional<Solution>& best) {
    // refresh the live representative list
    {
        std::set<int> live;
        for (int v : verts) live.insert(comp.g.find(v));
        verts.assign(live.begin(), live.end());
    }
    const MetricTree& t = *comp.cost.tree;
    int D = t.labels();

    if (verts.size() == 1) {
        int v = verts[0];
        auto terms = current_terminals(comp);
        if (!terms) return;
        std::vector<int> options;
        auto it = terms->find(v);
        if (it != terms->end()) options = {it->second};
        else
            for (int d = 0; d < D; d++) options.push_back(d);
        for (int d : options) {
            std::vector<int> lab(comp.g.original_vertices(), 0);
            for (int o = 0; o < comp.g.original_vertices(); o++)
                if (comp.g.find(o) == v) lab[o] = d;
            Instance with_sigma = comp;
            with_sigma.unary = sigma;
            Solution cand = evaluate(with_sigma, lab);
            if (cand.cost <= budget && better_solution(best, cand)) best = cand;
        }
        return;
    }

    auto terms = current_terminals(comp);
    if (!terms) return;
    std::vector<int> term_list;
    for (auto [v, l] : *terms) term_list.push_back(v);

    if (term_list.size() >= 2) {
        Instance with_sigma = comp;
        with_sigma.unary = sigma;
        auto sol = ml_branch(ctx, with_sigma, verts, sigma, budget);
        if (sol && better_solution(best, sol)) best = sol;
        return;
    }

    // pick the vertices to guess
    std::vector<int> free_verts;
    for (int v : verts)
        if (!terms->count(v)) free_verts.push_back(v);

    if (term_list.size() == 1) {
        int tvert = term_list[0];
        int tl = terms->at(tvert);
        int u = free_verts[0];
        for (int d = 0; d < D; d++) {
            if (d == tl) {
                Instance merged = comp;
                int keep = merged.g.merge(tvert, u);
                auto sig = sigma;
                int gone = tvert == keep ? u : tvert;
                // careful: representatives moved, fold the absorbed row in
                for (int l = 0; l < D; l++) sig[keep][l] = sigma[tvert][l] + sigma[u][l];
                for (int l = 0; l < D; l++) sig[gone][l] = 0;
                ml_guess(ctx, std::move(merged), verts, std::move(sig), budget, best);
            } else {
                Instance guessed = comp;
                guessed.terminals.push_back({u, d});
                std::sort(guessed.terminals.begin(), guessed.terminals.end());
                Instance with_sigma = guessed;
                with_sigma.unary = sigma;
                auto sol = ml_branch(ctx, with_sigma, verts, sigma, budget);
                if (sol && better_solution(best, sol)) best = sol;
            }
        }
        return;
    }

    // no terminals: guess an ordered pair of labels for the two lowest vertices
    int u = free_verts[0], v = free_verts[1];
    for (int a = 0; a < D; a++)
        for (int b = 0; b < D; b++) {
            if (a == b) {
                if (a != 0) continue;  // identification is label-independent; do it once
                Instance merged = comp;
                int keep = merged.g.merge(u, v);
                int gone = keep == u ? v : u;
                auto sig = sigma;
                for (int l = 0; l < D; l++) sig[keep][l] = sigma[u][l] + sigma[v][l];
                for (int l = 0; l < D; l++) sig[gone][l] = 0;
                ml_guess(ctx, std::move(merged), verts, std::move(sig), budget, best);
            } else {
                Instance guessed = comp;
                guessed.terminals.push_back({u, a});
                guessed.terminals.push_back({v, b});
                std::sort(guessed.terminals.begin(), guessed.terminals.end());
                Instance with_sigma = guessed;
                with_sigma.unary = sigma;
                auto sol = ml_branch(ctx, with_sigma, verts, sigma, budget);
                if (sol && better_solution(best, sol)) best = sol;
            }
        }
}

}  // namespace

std::optional<Solution> solve_ml_gap(const Instance& inst, GapStats* stats, MlOracle oracle) {
    const MetricTree& t = tree_of(inst);
    Instance norm = inst;
    identify_same_label_terminals(norm);
    auto terms = current_terminals(norm);
    if (!terms) return std::nullopt;
    int D = t.labels();

    std::vector<std::vector<long long>> sigma(norm.g.original_vertices(),
                                              std::vector<long long>(D, 0));
    if (norm.unary) {
        // fold unary rows onto representatives
        for (int v = 0; v < norm.g.original_vertices(); v++) {
            int r = norm.g.find(v);
            for (int l = 0; l < D; l++) sigma[r][l] += (*norm.unary)[v][l];
        }
    }

    MlCtx ctx{norm.q, oracle, stats};
    auto pieces = split_components(norm, true);

    // per-component relaxed floors for budget splitting
    std::vector<long long> rho0(pieces.insts.size(), 0);
    long long sum_rho = 0;
    for (size_t i = 0; i < pieces.insts.size(); i++) {
        std::vector<std::vector<long long>> comp_sigma(norm.g.original_vertices(),
                                                       std::vector<long long>(D, 0));
        for (int v : pieces.verts[i]) comp_sigma[v] = sigma[v];
        auto ext = extend_rows(pieces.insts[i], pieces.verts[i], comp_sigma);
        std::map<int, int> assigned;
        auto cterms = current_terminals(pieces.insts[i]);
        for (auto [v, l] : *cterms) assigned[v] = t.label_nodes[l];
        rho0[i] = ml_oracle_value(ctx, pieces.insts[i], pieces.verts[i], ext, assigned);
        sum_rho += rho0[i];
    }
    if (stats) stats->root_rho = sum_rho;
    if (sum_rho > norm.q) return std::nullopt;

    std::vector<int> full(norm.g.original_vertices(), 0);
    long long total = 0;
    for (size_t i = 0; i < pieces.insts.size(); i++) {
        std::vector<std::vector<long long>> comp_sigma(norm.g.original_vertices(),
                                                       std::vector<long long>(D, 0));
        for (int v : pieces.verts[i]) comp_sigma[v] = sigma[v];
        std::optional<Solution> best;
        ml_guess(ctx, pieces.insts[i], pieces.verts[i], comp_sigma,
                 norm.q - (sum_rho - rho0[i]), best);
        if (!best) return std::nullopt;
        total += best->cost;
        for (int v : pieces.verts[i])
            for (int o = 0; o < norm.g.original_vertices(); o++)
                if (norm.g.find(o) == v) full[o] = best->labels[o];
    }
    if (total > norm.q) return std::nullopt;

    Instance check = inst;
    Solution out = evaluate(check, full);
    if (out.cost != total) throw std::logic_error("ml gap: assembly cost drifted");
    return out;
}

}  // namespace zext
