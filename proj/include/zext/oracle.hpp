#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "zext/instance.hpp"

namespace zext {

struct BruteOptions {
    bool relaxed = false;                        // domain = V(T) instead of the labels
    std::map<int, int> forced;                   // original vertex -> value, on top of terminals
    const std::vector<std::vector<long long>>* sigma_ext = nullptr;  // relaxed unary costs
    std::optional<int> max_crossing;             // ignore labellings beyond this many
    long long cap = 10'000'000;                  // enumeration size refusal threshold
};

// Globally optimal extension by exhaustive enumeration. Ties broken by
// lexicographic labelling (vertices by id, labels by input order).
// Throws when the enumeration would exceed the cap; returns nullopt only
// for infeasible instances (conflicting terminal identifications).
std::optional<Solution> brute_solve(const Instance& inst, const BruteOptions& opt = {});

// Minimum cost over extensions with crossing number <= k; nullopt = infinity.
std::optional<long long> brute_k_bounded(const Instance& inst, int k,
                                         const BruteOptions& opt = {});

struct OptProjection {
    long long opt_cost = 0;
    long long num_optima = 0;
    std::map<int, std::set<int>> dom;                               // D(v), live reps
    std::map<std::pair<int, int>, std::set<std::pair<int, int>>> rel;  // R(u,v), u < v
    std::map<int, std::set<int>> dom_integral;                      // D_I(v)
    std::map<std::pair<int, int>, std::set<std::pair<int, int>>> rel_integral;
};

// Enumerates every optimum and projects onto vertices and pairs.
OptProjection projections(const Instance& inst, const BruteOptions& opt = {});

// Independent route to the k-bounded optimum: enumerate candidate crossing
// sets (edge subsets of size <= k) and optimal per-component assignments.
std::optional<Solution> brute_by_crossing_sets(const Instance& inst, int k);

}  // namespace zext
