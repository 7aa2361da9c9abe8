#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zext/instance.hpp"

namespace zext {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One document = one instance. Matrices carry a declared class ("cost" or
// "metric") and are validated against it.
Instance parse_instance(const std::string& text);
std::string write_instance(const Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

struct GenParams {
    std::string kind;  // tree | leaf-metric-instance | tree-metric-instance |
                       // matrix-metric-instance | ml-instance
    int n = 6;
    int extra_edges = 2;
    int tree_nodes = 6;
    int labels = 3;
    int terminals = 3;
    int max_weight = 3;
    int max_unary = 3;
    std::optional<int> k;
    uint64_t seed = 1;
};

// Deterministic per seed; embeds the brute-force optimum as expected-value
// metadata when the instance is small enough.
Instance generate(const GenParams& params);

struct RunRecord {
    std::string instance;
    std::string algorithm;
    uint64_t seed = 0;
    int n = 0, m = 0, labels = 0;
    std::optional<int> k;
    long long q = 0;
    std::optional<long long> rho;
    std::optional<long long> gap;
    std::optional<long long> cost;  // nullopt = no solution within budget
    int crossings = 0;
    long long branches = 0;
    double ms = 0;
    bool verified = false;
};

std::string run_record_csv_header();
std::string run_record_csv_line(const RunRecord& r);

// Applicable solver names for an instance ("brute" always included).
std::vector<std::string> applicable_algorithms(const Instance& inst);

// Runs one named algorithm, recomputing the reported cost from the returned
// labelling before trusting it. `brute_ml_oracle` reroutes the ml-gap value
// oracle onto the exhaustive one.
RunRecord run_algorithm(const Instance& inst, const std::string& algorithm, uint64_t seed,
                        double eps, bool brute_ml_oracle = false);

struct CrosscheckReport {
    int instances = 0;
    int comparisons = 0;
    int failures = 0;
    int contraction_mismatches = 0;
    int contraction_runs = 0;
    std::vector<std::string> lines;
    bool ok() const;
    double eps = 0.01;
};

CrosscheckReport crosscheck(const std::vector<std::string>& files, double eps, uint64_t seed);

std::vector<std::string> corpus_files(const std::string& dir);

}  // namespace zext
