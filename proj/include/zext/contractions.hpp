#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "zext/flow.hpp"
#include "zext/instance.hpp"

namespace zext {

// Family of random edge subsets ("blue" sets). Each member colours every
// edge blue independently with probability a/(a+b); the family is sized so
// that any fixed disjoint (A,B) with |A|<=a, |B|<=b is split correctly
// (A blue, B red) by some member with probability at least 1-eps.
struct EdgeSplitterFamily {
    int a = 0, b = 0;
    uint64_t seed = 0;
    std::vector<std::vector<int>> sets;  // edge ids per member
};

EdgeSplitterFamily edge_splitter(const std::vector<int>& edges, int a, int b, double eps,
                                 uint64_t seed);

struct GeneralStats {
    long long separations = 0;
    long long contracted_edges = 0;
    long long colourings = 0;
    long long candidates = 0;
    long long recursive_calls = 0;
};

// Solver for (sigma,k)-connected graphs, sigma > k. Small graphs
// (n <= sigma*k) are handled by exhaustive crossing-set enumeration.
// Monte Carlo otherwise; candidates are always feasible labellings, so the
// result never under-reports.
std::optional<Solution> solve_high_conn(const Instance& inst, int sigma, int k, double eps,
                                        uint64_t seed, GeneralStats* stats = nullptr);

// Recursive-understanding driver for arbitrary simple cost functions,
// parameterized by the number of crossing edges.
std::optional<Solution> solve_general(const Instance& inst, int k, double eps, uint64_t seed,
                                      GeneralStats* stats = nullptr);

}  // namespace zext
