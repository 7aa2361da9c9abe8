#include "zext/io.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "zext/contractions.hpp"
#include "zext/oracle.hpp"
#include "zext/pushing.hpp"
#include "zext/relaxation.hpp"

namespace zext {

using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

int to_vertex(const std::string& key, int n, const std::string& where) {
    try {
        size_t pos = 0;
        int v = std::stoi(key, &pos);
        if (pos != key.size()) throw std::invalid_argument("");
        if (v < 0 || v >= n) fail(where, "vertex " + key + " not declared");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        fail(where, "bad vertex id '" + key + "'");
    }
}

}  // namespace

Instance parse_instance(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        fail("document", e.what());
    }
    Instance inst;
    if (j.contains("name")) inst.name = j["name"].get<std::string>();
    if (!j.contains("vertices")) fail("vertices", "missing");
    int n = j["vertices"].get<int>();
    if (n < 0) fail("vertices", "negative count");
    inst.g = MultiGraph(n);

    if (!j.contains("edges") || !j["edges"].is_array()) fail("edges", "missing list");
    int ei = 0;
    for (const auto& e : j["edges"]) {
        std::string where = "edges[" + std::to_string(ei++) + "]";
        if (!e.is_array() || e.size() != 2) fail(where, "expected a pair");
        int u = e[0].get<int>(), v = e[1].get<int>();
        if (u < 0 || u >= n || v < 0 || v >= n) fail(where, "endpoint not declared");
        if (u == v) fail(where, "self-loop");
        inst.g.add_edge(u, v);
    }

    if (!j.contains("metric") || !j["metric"].is_object()) fail("metric", "missing");
    const auto& jm = j["metric"];
    std::string kind = jm.value("kind", "");
    if (kind == "matrix") {
        CostMatrix m;
        if (!jm.contains("labels")) fail("metric.labels", "missing");
        for (const auto& l : jm["labels"]) m.labels.push_back(l.get<std::string>());
        if (!jm.contains("rows")) fail("metric.rows", "missing");
        int ri = 0;
        for (const auto& row : jm["rows"]) {
            std::string where = "metric.rows[" + std::to_string(ri++) + "]";
            if (!row.is_array() || row.size() != m.labels.size()) fail(where, "row length");
            std::vector<long long> r;
            for (const auto& x : row) r.push_back(x.get<long long>());
            m.mu.push_back(std::move(r));
        }
        if (m.mu.size() != m.labels.size()) fail("metric.rows", "row count");
        auto val = validate_cost(m);
        if (!val.ok) fail("metric", val.error);
        std::string cls = jm.value("class", "cost");
        if (cls == "metric" && val.cls == MetricClass::SimpleCost) {
            auto w = *val.triangle_witness;
            fail("metric", "declared metric but triangle inequality fails at (" +
                               m.labels[w[0]] + "," + m.labels[w[1]] + "," + m.labels[w[2]] + ")");
        } else if (cls != "metric" && cls != "cost") {
            fail("metric.class", "unknown class '" + cls + "'");
        }
        inst.cost.matrix = std::move(m);
    } else if (kind == "tree") {
        MetricTree t;
        if (!jm.contains("nodes")) fail("metric.nodes", "missing");
        for (const auto& x : jm["nodes"]) t.node_names.push_back(x.get<std::string>());
        if (!jm.contains("edges")) fail("metric.edges", "missing");
        int ti = 0;
        for (const auto& e : jm["edges"]) {
            std::string where = "metric.edges[" + std::to_string(ti++) + "]";
            if (!e.is_array() || e.size() != 2) fail(where, "expected a pair");
            int a = -1, b = -1;
            for (size_t i = 0; i < t.node_names.size(); i++) {
                if (t.node_names[i] == e[0].get<std::string>()) a = static_cast<int>(i);
                if (t.node_names[i] == e[1].get<std::string>()) b = static_cast<int>(i);
            }
            if (a < 0 || b < 0) fail(where, "undeclared node");
            t.edges.push_back({a, b});
        }
        if (!jm.contains("labels")) fail("metric.labels", "missing");
        for (const auto& l : jm["labels"]) {
            std::string name = l.get<std::string>();
            int nd = -1;
            for (size_t i = 0; i < t.node_names.size(); i++)
                if (t.node_names[i] == name) nd = static_cast<int>(i);
            if (nd < 0) fail("metric.labels", "label '" + name + "' is not a tree node");
            t.label_nodes.push_back(nd);
            t.label_names.push_back(name);
        }
        if (t.label_nodes.empty()) fail("metric.labels", "empty label set");
        try {
            t.finalize();
        } catch (const std::exception& e) {
            fail("metric", e.what());
        }
        inst.cost.tree = std::move(t);
    } else {
        fail("metric.kind", "expected 'matrix' or 'tree'");
    }

    if (j.contains("terminals")) {
        for (auto it = j["terminals"].begin(); it != j["terminals"].end(); ++it) {
            int v = to_vertex(it.key(), n, "terminals");
            std::string label = it.value().get<std::string>();
            int l = inst.cost.label_by_name(label);
            if (l < 0) fail("terminals", "label '" + label + "' not declared");
            inst.terminals.push_back({v, l});
        }
        std::sort(inst.terminals.begin(), inst.terminals.end());
        for (size_t i = 1; i < inst.terminals.size(); i++)
            if (inst.terminals[i].first == inst.terminals[i - 1].first)
                fail("terminals", "vertex listed twice");
    }

    if (j.contains("unary")) {
        std::vector<std::vector<long long>> u(n, std::vector<long long>(inst.num_labels(), 0));
        for (auto it = j["unary"].begin(); it != j["unary"].end(); ++it) {
            int v = to_vertex(it.key(), n, "unary");
            for (auto lt = it.value().begin(); lt != it.value().end(); ++lt) {
                int l = inst.cost.label_by_name(lt.key());
                if (l < 0) fail("unary", "label '" + lt.key() + "' not declared");
                long long c = lt.value().get<long long>();
                if (c < 0) fail("unary", "negative cost");
                u[v][l] = c;
            }
        }
        inst.unary = std::move(u);
    }

    if (!j.contains("q")) fail("q", "missing");
    inst.q = j["q"].get<long long>();
    if (j.contains("k")) inst.k = j["k"].get<int>();
    if (j.contains("expected") && j["expected"].contains("cost"))
        inst.expected_cost = j["expected"]["cost"].get<long long>();
    return inst;
}

std::string write_instance(const Instance& inst) {
    ordered_json j;
    if (!inst.name.empty()) j["name"] = inst.name;
    j["vertices"] = inst.g.original_vertices();
    ordered_json edges = ordered_json::array();
    for (int e = 0; e < inst.g.total_edges(); e++) {
        if (!inst.g.edge_alive(e)) continue;
        const auto& rec = inst.g.edge(e);
        edges.push_back({std::min(rec.u, rec.v), std::max(rec.u, rec.v)});
    }
    j["edges"] = edges;
    ordered_json terms = ordered_json::object();
    for (auto [v, l] : inst.terminals)
        terms[std::to_string(v)] = inst.cost.label_names()[l];
    j["terminals"] = terms;

    ordered_json jm;
    if (inst.cost.is_tree()) {
        const MetricTree& t = *inst.cost.tree;
        jm["kind"] = "tree";
        jm["nodes"] = t.node_names;
        ordered_json te = ordered_json::array();
        for (auto [a, b] : t.edges) te.push_back({t.node_names[a], t.node_names[b]});
        jm["edges"] = te;
        jm["labels"] = t.label_names;
    } else {
        const CostMatrix& m = *inst.cost.matrix;
        jm["kind"] = "matrix";
        auto val = validate_cost(m);
        jm["class"] = val.cls == MetricClass::SimpleCost ? "cost" : "metric";
        jm["labels"] = m.labels;
        jm["rows"] = m.mu;
    }
    j["metric"] = jm;

    if (inst.unary) {
        ordered_json ju = ordered_json::object();
        for (int v = 0; v < inst.g.original_vertices(); v++) {
            ordered_json row = ordered_json::object();
            for (int l = 0; l < inst.num_labels(); l++)
                if ((*inst.unary)[v][l] != 0)
                    row[inst.cost.label_names()[l]] = (*inst.unary)[v][l];
            if (!row.empty()) ju[std::to_string(v)] = row;
        }
        j["unary"] = ju;
    }
    j["q"] = inst.q;
    if (inst.k) j["k"] = *inst.k;
    if (inst.expected_cost) j["expected"] = {{"cost", *inst.expected_cost}, {"source", "derived"}};
    return j.dump(2) + "\n";
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    Instance inst = parse_instance(ss.str());
    if (inst.name.empty()) inst.name = std::filesystem::path(path).stem().string();
    return inst;
}

void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << write_instance(inst);
}

namespace {

MultiGraph random_connected_graph(int n, int extra_edges, std::mt19937_64& rng) {
    MultiGraph g(n);
    for (int v = 1; v < n; v++) g.add_edge(static_cast<int>(rng() % v), v);
    for (int e = 0; e < extra_edges; e++) {
        int u = static_cast<int>(rng() % n), v = static_cast<int>(rng() % n);
        if (u != v) g.add_edge(u, v);
    }
    return g;
}

void attach_terminals(Instance& inst, int want, std::mt19937_64& rng) {
    int n = inst.g.original_vertices();
    int D = inst.num_labels();
    want = std::min({want, n, D});
    std::vector<int> verts(n);
    for (int i = 0; i < n; i++) verts[i] = i;
    std::shuffle(verts.begin(), verts.end(), rng);
    std::vector<int> labels(D);
    for (int i = 0; i < D; i++) labels[i] = i;
    std::shuffle(labels.begin(), labels.end(), rng);
    for (int i = 0; i < want; i++) inst.terminals.push_back({verts[i], labels[i]});
    std::sort(inst.terminals.begin(), inst.terminals.end());
}

void derive_budget(Instance& inst) {
    double size = 1;
    int free_cnt = inst.g.original_vertices() - static_cast<int>(inst.terminals.size());
    for (int i = 0; i < free_cnt; i++) size *= inst.num_labels();
    if (size <= 200000) {
        auto sol = brute_solve(inst);
        if (sol) {
            inst.expected_cost = sol->cost;
            inst.q = sol->cost;
            return;
        }
    }
    long long worst = 0;
    for (int a = 0; a < inst.num_labels(); a++)
        for (int b = 0; b < inst.num_labels(); b++) worst = std::max(worst, inst.cost.mu(a, b));
    inst.q = worst * inst.g.num_edges();
}

}  // namespace

Instance generate(const GenParams& params) {
    std::mt19937_64 rng(params.seed);
    Instance inst;
    inst.name = params.kind + "-" + std::to_string(params.seed);

    if (params.kind == "tree") {
        MetricTree t = random_tree(params.tree_nodes, rng());
        for (int v = 0; v < t.nodes(); v++)
            if (static_cast<int>(t.adj[v].size()) <= 1) {
                t.label_nodes.push_back(v);
                t.label_names.push_back(t.node_names[v]);
            }
        inst.cost.tree = std::move(t);
        inst.g = MultiGraph(1);
        inst.q = 0;
        return inst;
    }

    if (params.kind == "leaf-metric-instance" || params.kind == "tree-metric-instance" ||
        params.kind == "ml-instance") {
        MetricTree t = random_tree(params.tree_nodes, rng());
        std::vector<int> pool;
        if (params.kind == "tree-metric-instance") {
            for (int v = 0; v < t.nodes(); v++) pool.push_back(v);
            std::shuffle(pool.begin(), pool.end(), rng);
            int want = std::max(2, std::min(params.labels, t.nodes()));
            pool.resize(want);
            std::sort(pool.begin(), pool.end());
        } else {
            for (int v = 0; v < t.nodes(); v++)
                if (static_cast<int>(t.adj[v].size()) <= 1) pool.push_back(v);
        }
        for (int nd : pool) {
            t.label_nodes.push_back(nd);
            t.label_names.push_back(t.node_names[nd]);
        }
        inst.cost.tree = std::move(t);
        inst.g = random_connected_graph(params.n, params.extra_edges, rng);
        attach_terminals(inst, params.terminals, rng);
        if (params.kind == "ml-instance") {
            std::vector<std::vector<long long>> u(
                params.n, std::vector<long long>(inst.num_labels(), 0));
            for (auto& row : u)
                for (auto& x : row) x = static_cast<long long>(rng() % (params.max_unary + 1));
            inst.unary = std::move(u);
        }
        inst.k = params.k;
        derive_budget(inst);
        return inst;
    }

    if (params.kind == "matrix-metric-instance") {
        inst.cost.matrix = random_metric_matrix(params.labels, params.max_weight, rng());
        inst.g = random_connected_graph(params.n, params.extra_edges, rng);
        attach_terminals(inst, params.terminals, rng);
        inst.k = params.k ? params.k : std::optional<int>(2 + static_cast<int>(rng() % 2));
        derive_budget(inst);
        return inst;
    }

    throw ParseError("generate: unknown kind '" + params.kind + "'");
}

std::string run_record_csv_header() {
    return "instance,algorithm,seed,n,m,labels,k,q,rho,gap,cost,crossings,branches,ms,verified";
}

std::string run_record_csv_line(const RunRecord& r) {
    std::ostringstream os;
    os << r.instance << "," << r.algorithm << "," << r.seed << "," << r.n << "," << r.m << ","
       << r.labels << ",";
    if (r.k) os << *r.k;
    os << "," << r.q << ",";
    if (r.rho) os << *r.rho;
    os << ",";
    if (r.gap) os << *r.gap;
    os << ",";
    if (r.cost) os << *r.cost;
    else os << "no";
    os << "," << r.crossings << "," << r.branches << "," << r.ms << ","
       << (r.verified ? "true" : "false");
    return os.str();
}

std::vector<std::string> applicable_algorithms(const Instance& inst) {
    std::vector<std::string> out = {"brute"};
    if (inst.unary) {
        if (inst.cost.is_tree()) out.push_back("ml-gap");
        return out;
    }
    if (inst.cost.is_tree()) {
        if (inst.cost.tree->is_leaf_metric()) out.push_back("leaf-gap");
        out.push_back("tree-gap");
        out.push_back("pushing");
        out.push_back("contractions");
        return out;
    }
    auto val = validate_cost(*inst.cost.matrix);
    if (val.cls != MetricClass::SimpleCost) out.push_back("pushing");
    out.push_back("contractions");
    return out;
}

RunRecord run_algorithm(const Instance& inst, const std::string& algorithm, uint64_t seed,
                        double eps) {
    RunRecord r;
    r.instance = inst.name;
    r.algorithm = algorithm;
    r.seed = seed;
    r.n = inst.g.num_vertices();
    r.m = inst.g.num_edges();
    r.labels = inst.num_labels();
    r.q = inst.q;
    int k = inst.k ? *inst.k : inst.g.num_edges();
    if (algorithm == "pushing" || algorithm == "contractions") r.k = k;

    auto start = std::chrono::steady_clock::now();
    std::optional<Solution> sol;
    if (algorithm == "brute") {
        BruteOptions bo;
        if (inst.k) bo.max_crossing = k;
        sol = brute_solve(inst, bo);
    } else if (algorithm == "pushing") {
        PushingStats st;
        sol = solve_metric(inst, k, &st);
        r.branches = st.stage1_nodes + st.stage2_nodes;
    } else if (algorithm == "contractions") {
        GeneralStats st;
        sol = solve_general(inst, k, eps, seed, &st);
        r.branches = st.recursive_calls + st.candidates;
    } else if (algorithm == "leaf-gap") {
        GapStats st;
        sol = solve_leaf_gap(inst, &st);
        r.branches = st.branchings;
        r.rho = st.root_rho;
        r.gap = inst.q - st.root_rho;
    } else if (algorithm == "tree-gap") {
        GapStats st;
        sol = solve_tree_gap(inst, &st);
        r.branches = st.branchings;
        r.rho = st.root_rho;
        r.gap = inst.q - st.root_rho;
    } else if (algorithm == "ml-gap") {
        GapStats st;
        sol = solve_ml_gap(inst, &st);
        r.branches = st.branchings;
        r.rho = st.root_rho;
        r.gap = inst.q - st.root_rho;
    } else {
        throw ParseError("unknown algorithm '" + algorithm + "'");
    }
    auto end = std::chrono::steady_clock::now();
    r.ms = std::chrono::duration<double, std::milli>(end - start).count();

    if (sol) {
        Solution check = evaluate(inst, sol->labels);
        r.cost = check.cost;
        r.crossings = check.crossing;
        r.verified = check.cost == sol->cost && extends_terminals(inst, sol->labels);
    }
    return r;
}

bool CrosscheckReport::ok() const { return failures == 0; }

CrosscheckReport crosscheck(const std::vector<std::string>& files, double eps, uint64_t seed) {
    CrosscheckReport rep;
    rep.eps = eps;
    for (const auto& path : files) {
        Instance inst = load_instance(path);
        rep.instances++;
        int k = inst.k ? *inst.k : inst.g.num_edges();

        std::optional<Solution> opt = brute_solve(inst);
        std::optional<long long> opt_k = brute_k_bounded(inst, k);

        if (inst.expected_cost) {
            rep.comparisons++;
            if (!opt || opt->cost != *inst.expected_cost) {
                rep.failures++;
                rep.lines.push_back(inst.name + ": recorded expected cost " +
                                    std::to_string(*inst.expected_cost) + " but oracle finds " +
                                    (opt ? std::to_string(opt->cost) : std::string("none")));
            }
        }

        for (const auto& alg : applicable_algorithms(inst)) {
            if (alg == "brute") continue;
            RunRecord r = run_algorithm(inst, alg, seed, eps);
            rep.comparisons++;
            std::optional<long long> want;
            if (alg == "pushing" || alg == "contractions") {
                want = opt_k;
            } else {
                if (opt && opt->cost <= inst.q) want = opt->cost;
            }
            bool match = (want && r.cost && *want == *r.cost) || (!want && !r.cost);
            bool under = want && r.cost && *r.cost < *want;
            bool claims_without_solution = !want && r.cost.has_value();
            if (alg == "contractions") {
                rep.contraction_runs++;
                if (under || claims_without_solution) {
                    rep.failures++;
                    rep.lines.push_back(inst.name + ": contractions under-reported (seed " +
                                        std::to_string(seed) + ")");
                } else if (!match) {
                    rep.contraction_mismatches++;
                    rep.lines.push_back(inst.name + ": contractions missed the optimum (seed " +
                                        std::to_string(seed) + ", within Monte Carlo budget)");
                }
            } else if (!match) {
                rep.failures++;
                rep.lines.push_back(
                    inst.name + ": " + alg + " answered " +
                    (r.cost ? std::to_string(*r.cost) : std::string("none")) + ", oracle says " +
                    (want ? std::to_string(*want) : std::string("none")));
            }
            if (r.cost && !r.verified) {
                rep.failures++;
                rep.lines.push_back(inst.name + ": " + alg + " returned an unverifiable labelling");
            }
        }
    }
    // Monte Carlo allowance: mismatches beyond the declared budget fail
    long long allowed = static_cast<long long>(std::max(1.0, eps * rep.contraction_runs + 0.5));
    if (rep.contraction_mismatches > allowed) rep.failures += rep.contraction_mismatches;
    return rep;
}

std::vector<std::string> corpus_files(const std::string& dir) {
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            out.push_back(entry.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace zext
