#include "zext/instance.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace zext {

int CostSpec::num_labels() const {
    return tree ? tree->labels() : matrix->size();
}

long long CostSpec::mu(int a, int b) const {
    return tree ? tree->mu(a, b) : matrix->at(a, b);
}

const std::vector<std::string>& CostSpec::label_names() const {
    return tree ? tree->label_names : matrix->labels;
}

int CostSpec::label_by_name(const std::string& name) const {
    const auto& names = label_names();
    for (size_t i = 0; i < names.size(); i++)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

std::optional<int> Instance::terminal_label(int orig_vertex) const {
    for (auto [v, l] : terminals)
        if (v == orig_vertex) return l;
    return std::nullopt;
}

Solution evaluate(const Instance& inst, const std::vector<int>& labels) {
    if (static_cast<int>(labels.size()) != inst.g.original_vertices())
        throw std::invalid_argument("evaluate: labelling size mismatch");
    Solution s;
    s.labels = labels;
    for (int e = 0; e < inst.g.total_edges(); e++) {
        if (!inst.g.edge_alive(e)) continue;
        const auto& rec = inst.g.edge(e);
        int lu = labels[rec.u], lv = labels[rec.v];
        s.cost += inst.cost.mu(lu, lv);
        if (lu != lv) s.crossing_edges.push_back(e);
    }
    s.crossing = static_cast<int>(s.crossing_edges.size());
    if (inst.unary)
        for (int v : inst.g.vertices()) s.cost += (*inst.unary)[v][labels[v]];
    return s;
}

long long evaluate_relaxed(const Instance& inst, const std::vector<int>& node_labels,
                           const std::vector<std::vector<long long>>* sigma_ext) {
    if (!inst.cost.is_tree()) throw std::invalid_argument("evaluate_relaxed: needs a tree cost spec");
    const MetricTree& t = *inst.cost.tree;
    long long total = 0;
    for (int e = 0; e < inst.g.total_edges(); e++) {
        if (!inst.g.edge_alive(e)) continue;
        const auto& rec = inst.g.edge(e);
        total += t.d(node_labels[rec.u], node_labels[rec.v]);
    }
    if (sigma_ext)
        for (int v : inst.g.vertices()) total += (*sigma_ext)[v][node_labels[v]];
    return total;
}

bool extends_terminals(const Instance& inst, const std::vector<int>& labels) {
    for (auto [v, l] : inst.terminals)
        if (labels[inst.g.find(v)] != l) return false;
    return true;
}

std::optional<std::map<int, int>> current_terminals(const Instance& inst) {
    std::map<int, int> out;
    for (auto [v, l] : inst.terminals) {
        int r = inst.g.find(v);
        auto it = out.find(r);
        if (it != out.end() && it->second != l) return std::nullopt;
        out[r] = l;
    }
    return out;
}

void identify_same_label_terminals(Instance& inst) {
    std::map<int, int> rep_of_label;
    for (auto [v, l] : inst.terminals) {
        int r = inst.g.find(v);
        auto it = rep_of_label.find(l);
        if (it == rep_of_label.end()) {
            rep_of_label[l] = r;
        } else if (inst.g.find(it->second) != r) {
            rep_of_label[l] = inst.g.merge(it->second, r);
        }
    }
}

bool better_solution(const std::optional<Solution>& a, const std::optional<Solution>& b) {
    if (!b) return false;
    if (!a) return true;
    if (b->cost != a->cost) return b->cost < a->cost;
    return b->labels < a->labels;
}

Instance restrict_to(const Instance& inst, const std::vector<int>& reps,
                     const std::vector<int>& edge_ids) {
    Instance sub;
    sub.name = inst.name;
    sub.cost = inst.cost;
    sub.unary = inst.unary;
    sub.q = inst.q;
    sub.k = inst.k;
    sub.g = MultiGraph(inst.g.original_vertices());
    for (int v = 0; v < inst.g.original_vertices(); v++) {
        int r = inst.g.find(v);
        if (r != v) sub.g.merge(r, v);
    }
    for (int e : edge_ids) {
        const auto& rec = inst.g.edge(e);
        sub.g.add_edge_with_id(e, rec.u, rec.v);
    }
    std::set<int> in(reps.begin(), reps.end());
    sub.terminals.clear();
    for (auto [v, l] : inst.terminals)
        if (in.count(inst.g.find(v))) sub.terminals.push_back({v, l});
    return sub;
}

}  // namespace zext
