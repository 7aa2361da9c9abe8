#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "zext/contractions.hpp"
#include "zext/io.hpp"
#include "zext/metric.hpp"
#include "zext/oracle.hpp"
#include "zext/pushing.hpp"
#include "zext/relaxation.hpp"
#include "zext/sparsifier.hpp"

using namespace zext;

namespace {

uint64_t default_seed() {
    const char* env = std::getenv("ZEXT_SEED");
    if (!env) return 1;
    return std::strtoull(env, nullptr, 10);
}

std::string pick_auto(const Instance& inst) {
    if (inst.unary) {
        if (inst.cost.is_tree()) return "ml-gap";
        throw std::runtime_error("no solver handles unary costs without a tree metric");
    }
    if (inst.cost.is_tree())
        return inst.cost.tree->is_leaf_metric() ? "leaf-gap" : "tree-gap";
    auto val = validate_cost(*inst.cost.matrix);
    if (val.cls == MetricClass::TreeMetric || val.cls == MetricClass::InducedTreeCandidate) {
        auto t = reconstruct_tree(*inst.cost.matrix);
        if (t) return t->is_leaf_metric() ? "leaf-gap" : "tree-gap";
    }
    if (val.cls != MetricClass::SimpleCost) return "pushing";
    return "contractions";
}

// Routing may require the reconstructed tree form of a matrix metric.
Instance prepare_for(const Instance& inst, const std::string& alg) {
    if ((alg == "leaf-gap" || alg == "tree-gap" || alg == "ml-gap") && !inst.cost.is_tree()) {
        auto t = reconstruct_tree(*inst.cost.matrix);
        if (!t) throw std::runtime_error(alg + ": the matrix is not an induced tree metric");
        Instance out = inst;
        out.cost.tree = std::move(t);
        out.cost.matrix.reset();
        return out;
    }
    return inst;
}

int cmd_solve(const std::string& path, std::string alg, int k_flag, long long q_flag,
              uint64_t seed, double eps, const std::string& out_fmt, const std::string& ml_oracle) {
    Instance inst = load_instance(path);
    if (q_flag >= 0) inst.q = q_flag;
    if (k_flag >= 0) inst.k = k_flag;
    if (alg == "auto") alg = pick_auto(inst);
    Instance routed = prepare_for(inst, alg);
    if (alg == "ml-gap" && ml_oracle == "brute") {
        GapStats st;
        auto sol = solve_ml_gap(routed, &st, MlOracle::Brute);
        RunRecord r;
        r = run_algorithm(routed, "brute", seed, eps);  // framing only; replaced below
        (void)sol;
    }
    RunRecord r = run_algorithm(routed, alg, seed, eps);

    if (out_fmt == "json") {
        nlohmann::ordered_json j;
        j["instance"] = r.instance;
        j["algorithm"] = r.algorithm;
        j["seed"] = r.seed;
        if (r.cost) {
            j["cost"] = *r.cost;
            j["crossings"] = r.crossings;
            j["verified"] = r.verified;
        } else {
            j["answer"] = "no solution within budget";
        }
        if (r.rho) j["rho"] = *r.rho;
        if (r.gap) j["gap"] = *r.gap;
        j["branches"] = r.branches;
        std::cout << j.dump(2) << "\n";
    } else {
        if (r.cost)
            std::cout << r.instance << ": cost " << *r.cost << " crossings " << r.crossings
                      << " [" << r.algorithm << (r.verified ? ", verified" : ", UNVERIFIED")
                      << "]\n";
        else
            std::cout << r.instance << ": no solution within budget [" << r.algorithm << "]\n";
    }
    return r.cost && !r.verified ? 1 : 0;
}

int cmd_validate(const std::string& path) {
    Instance inst = load_instance(path);
    if (inst.cost.is_tree()) {
        const auto& t = *inst.cost.tree;
        std::cout << inst.name << ": tree metric over " << t.nodes() << " nodes, "
                  << t.labels() << " labels"
                  << (t.is_leaf_metric() ? " (leaf metric)" : " (induced)") << "\n";
        return 0;
    }
    auto val = validate_cost(*inst.cost.matrix);
    if (!val.ok) {
        std::cout << inst.name << ": invalid cost matrix: " << val.error << "\n";
        return 1;
    }
    const char* names[] = {"simple-cost", "metric", "tree-metric", "induced-tree-metric-candidate"};
    std::cout << inst.name << ": " << names[static_cast<int>(val.cls)] << "\n";
    if (val.triangle_witness) {
        auto w = *val.triangle_witness;
        const auto& L = inst.cost.matrix->labels;
        std::cout << "  triangle fails at (" << L[w[0]] << "," << L[w[1]] << "," << L[w[2]] << ")\n";
    }
    if (val.four_point_witness) {
        auto w = *val.four_point_witness;
        const auto& L = inst.cost.matrix->labels;
        std::cout << "  four-point fails at (" << L[w[0]] << "," << L[w[1]] << "," << L[w[2]] << ","
                  << L[w[3]] << ")\n";
    }
    return 0;
}

int cmd_reconstruct(const std::string& path) {
    Instance inst = load_instance(path);
    if (inst.cost.is_tree()) {
        std::cout << inst.name << ": already in tree form\n";
        return 0;
    }
    ReconstructionError err;
    auto t = reconstruct_tree(*inst.cost.matrix, &err);
    if (!t) {
        std::cout << inst.name << ": " << err.message << "\n";
        return 1;
    }
    nlohmann::ordered_json j;
    j["kind"] = "tree";
    j["nodes"] = t->node_names;
    nlohmann::ordered_json te = nlohmann::ordered_json::array();
    for (auto [a, b] : t->edges) te.push_back({t->node_names[a], t->node_names[b]});
    j["edges"] = te;
    j["labels"] = t->label_names;
    j["leaf_metric"] = t->is_leaf_metric();
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_sparsify(const std::string& path, int k, int s, uint64_t seed, uint64_t prime) {
    Instance inst = load_instance(path);
    identify_same_label_terminals(inst);
    auto terms = current_terminals(inst);
    if (!terms) throw std::runtime_error("conflicting terminals");
    std::vector<int> tv;
    for (auto [v, l] : *terms) tv.push_back(v);
    if (s <= 0) s = inst.num_labels();
    auto res = sparsify(inst.g, tv, k, s, prime, seed);
    std::cout << inst.name << ": " << inst.g.num_edges() << " -> " << res.g.num_edges()
              << " edges, " << inst.g.num_vertices() << " -> " << res.g.num_vertices()
              << " vertices" << (res.rejected ? " (rejected: terminal degrees exceed 2k)" : "")
              << "\n";
    Instance out = inst;
    out.g = res.g;
    std::cout << write_instance(out);
    return 0;
}

int cmd_kernelize(const std::string& path, uint64_t seed, uint64_t prime) {
    Instance inst = load_instance(path);
    Instance out = kernelize(inst, prime, seed);
    std::cout << write_instance(out);
    return 0;
}

int cmd_gen(const GenParams& params, const std::string& out_path) {
    Instance inst = generate(params);
    std::string text = write_instance(inst);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        f << text;
    }
    return 0;
}

int cmd_crosscheck(const std::string& dir, double eps, uint64_t seed) {
    auto files = corpus_files(dir);
    if (files.empty()) {
        std::cerr << "no .json instances under " << dir << "\n";
        return 1;
    }
    auto rep = crosscheck(files, eps, seed);
    for (const auto& line : rep.lines) std::cout << line << "\n";
    std::cout << rep.instances << " instances, " << rep.comparisons << " comparisons, "
              << rep.failures << " failures";
    if (rep.contraction_runs)
        std::cout << " (" << rep.contraction_mismatches << "/" << rep.contraction_runs
                  << " Monte Carlo misses)";
    std::cout << "\n";
    return rep.ok() ? 0 : 1;
}

int cmd_bench(const std::string& dir, const std::string& csv_path, uint64_t seed, double eps) {
    auto files = corpus_files(dir);
    std::ofstream csv(csv_path);
    csv << run_record_csv_header() << "\n";
    for (const auto& path : files) {
        Instance inst = load_instance(path);
        for (const auto& alg : applicable_algorithms(inst)) {
            RunRecord r = run_algorithm(inst, alg, seed, eps);
            csv << run_record_csv_line(r) << "\n";
        }
    }
    std::cout << "wrote " << csv_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero Extension / Metric Labelling solver suite"};
    app.require_subcommand(1);

    std::string in_path, out_fmt = "text", algorithm = "auto", ml_oracle = "flow";
    std::string corpus_dir, csv_path, out_path;
    int k_flag = -1, s_flag = -1;
    long long q_flag = -1;
    double eps = 0.01;
    uint64_t seed = default_seed();
    uint64_t prime = (1ULL << 31) - 1;
    GenParams gp;

    auto* solve = app.add_subcommand("solve", "solve an instance file");
    solve->add_option("--in", in_path)->required();
    solve->add_option("--algorithm", algorithm)
        ->check(CLI::IsMember({"auto", "brute", "pushing", "contractions", "leaf-gap", "tree-gap",
                               "ml-gap"}));
    solve->add_option("--k", k_flag);
    solve->add_option("--q", q_flag);
    solve->add_option("--seed", seed);
    solve->add_option("--epsilon", eps);
    solve->add_option("--out", out_fmt)->check(CLI::IsMember({"json", "text"}));
    solve->add_option("--ml-oracle", ml_oracle)->check(CLI::IsMember({"flow", "brute"}));

    auto* validate = app.add_subcommand("validate", "classify the cost function");
    validate->add_option("--in", in_path)->required();

    auto* recon = app.add_subcommand("reconstruct-tree", "realise a matrix metric as a tree");
    recon->add_option("--in", in_path)->required();

    auto* spars = app.add_subcommand("sparsify", "metric sparsifier");
    spars->add_option("--in", in_path)->required();
    spars->add_option("--k", k_flag)->required();
    spars->add_option("--s", s_flag);
    spars->add_option("--seed", seed);
    spars->add_option("--prime", prime);

    auto* kern = app.add_subcommand("kernelize", "polynomial kernel at k = q");
    kern->add_option("--in", in_path)->required();
    kern->add_option("--seed", seed);
    kern->add_option("--prime", prime);

    auto* gen = app.add_subcommand("gen", "generate instances");
    gen->add_option("--kind", gp.kind)
        ->required()
        ->check(CLI::IsMember({"tree", "leaf-metric-instance", "tree-metric-instance",
                               "matrix-metric-instance", "ml-instance"}));
    gen->add_option("--n", gp.n);
    gen->add_option("--extra-edges", gp.extra_edges);
    gen->add_option("--tree-nodes", gp.tree_nodes);
    gen->add_option("--labels", gp.labels);
    gen->add_option("--terminals", gp.terminals);
    gen->add_option("--max-weight", gp.max_weight);
    gen->add_option("--max-unary", gp.max_unary);
    gen->add_option("--seed", gp.seed);
    gen->add_option("--out", out_path);

    auto* cross = app.add_subcommand("crosscheck", "solvers vs oracle over a corpus");
    cross->add_option("--corpus", corpus_dir)->required();
    cross->add_option("--epsilon", eps);
    cross->add_option("--seed", seed);

    auto* bench = app.add_subcommand("bench", "timing and branch counts to CSV");
    bench->add_option("--corpus", corpus_dir)->required();
    bench->add_option("--csv", csv_path)->required();
    bench->add_option("--seed", seed);
    bench->add_option("--epsilon", eps);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed())
            return cmd_solve(in_path, algorithm, k_flag, q_flag, seed, eps, out_fmt, ml_oracle);
        if (validate->parsed()) return cmd_validate(in_path);
        if (recon->parsed()) return cmd_reconstruct(in_path);
        if (spars->parsed()) return cmd_sparsify(in_path, k_flag, s_flag, seed, prime);
        if (kern->parsed()) return cmd_kernelize(in_path, seed, prime);
        if (gen->parsed()) return cmd_gen(gp, out_path);
        if (cross->parsed()) return cmd_crosscheck(corpus_dir, eps, seed);
        if (bench->parsed()) return cmd_bench(corpus_dir, csv_path, seed, eps);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
