#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "zext/field.hpp"
#include "zext/instance.hpp"
#include "zext/multigraph.hpp"

namespace zext {

// Digraph whose vertex-disjoint linkages encode edge-disjoint flows of the
// underlying graph: edges are subdivided (element node), vertices are
// multiplied into degree-many copies, and every edge gets a sink-copy with
// in-arcs only.
struct GammoidDigraph {
    int nodes = 0;
    std::vector<std::pair<int, int>> arcs;
    std::vector<int> element_node;  // graph edge id -> its subdivision node, -1 if dead
    std::vector<int> sink_node;     // graph edge id -> its sink-copy, -1 if dead
    std::vector<int> sources;       // element nodes of terminal-incident edges
};

GammoidDigraph digraph_for_gammoid(const MultiGraph& g, const std::vector<int>& terminals);

// Maximum number of vertex-disjoint paths from the sources onto `targets`
// (distinct endpoints, zero-length paths allowed). The independence oracle.
int linkage_value(const GammoidDigraph& gd, const std::vector<int>& targets);

// Random-entry representation of the gammoid on `ground_nodes`: a column
// subset is independent iff the node set is fully linked from the sources.
PrimeFieldMatrix gammoid_rep(const GammoidDigraph& gd, const std::vector<int>& ground_nodes,
                             uint64_t p, uint64_t seed);

// Disjoint union of s gammoid layers and the rank-k uniform matroid.
struct LayeredMatroid {
    PrimeFieldMatrix mat;
    int s = 0, k = 0;
    std::vector<std::map<int, int>> col_edge;  // layer -> edge id -> column of its element
    std::vector<std::map<int, int>> col_sink;  // layer -> edge id -> column of its sink-copy
    std::map<int, int> col_unif;               // edge id -> column in the uniform layer
};

// nullopt when the terminal-incident edge set exceeds 2k (no injective
// labelling can then stay within k crossing edges).
std::optional<LayeredMatroid> build_layered(const MultiGraph& g,
                                            const std::vector<int>& terminals, int k, int s,
                                            uint64_t p, uint64_t seed);

// Wedge-vector representative set: keeps a subfamily (indices into
// `families`) preserving "extends some independent set" queries. Families
// that are themselves dependent are skipped.
std::vector<int> representative_set(const PrimeFieldMatrix& m,
                                    const std::vector<std::vector<int>>& families);

// Superset of the edges essential for some instance over (g, terminals).
std::vector<int> essential_candidates(const MultiGraph& g, const std::vector<int>& terminals,
                                      int k, int s, uint64_t p, uint64_t seed);

struct SparsifyResult {
    MultiGraph g;                // contracted graph (same id spaces)
    std::vector<int> kept_edges;
    bool rejected = false;       // terminal degrees already exceed 2k
};

// Contracts irrelevant edges one at a time until the candidate set covers
// everything. Preserves k'-bounded costs for every metric on <= s labels,
// every injective terminal labelling, and every k' <= k.
SparsifyResult sparsify(const MultiGraph& g, const std::vector<int>& terminals, int k, int s,
                        uint64_t p, uint64_t seed);

// Polynomial kernel: sparsify with k = q. Requires an integer metric with
// no distinct terminal labels at distance zero.
Instance kernelize(const Instance& inst, uint64_t p, uint64_t seed);

}  // namespace zext
