#include "zext/metric.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

namespace zext {

void MetricTree::finalize() {
    int n = nodes();
    if (n == 0) throw std::invalid_argument("tree: no nodes");
    if (static_cast<int>(edges.size()) != n - 1) throw std::invalid_argument("tree: edge count");
    adj.assign(n, {});
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n || b >= n || a == b)
            throw std::invalid_argument("tree: bad edge");
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    dist.assign(n, std::vector<int>(n, -1));
    for (int s = 0; s < n; s++) {
        std::queue<int> q;
        dist[s][s] = 0;
        q.push(s);
        while (!q.empty()) {
            int x = q.front();
            q.pop();
            for (int y : adj[x])
                if (dist[s][y] < 0) {
                    dist[s][y] = dist[s][x] + 1;
                    q.push(y);
                }
        }
        for (int y = 0; y < n; y++)
            if (dist[s][y] < 0) throw std::invalid_argument("tree: disconnected");
    }
    for (int la : label_nodes)
        if (la < 0 || la >= n) throw std::invalid_argument("tree: label node out of range");
}

bool MetricTree::is_leaf_metric() const {
    std::set<int> leaves;
    for (int v = 0; v < nodes(); v++)
        if (static_cast<int>(adj[v].size()) <= 1) leaves.insert(v);
    std::set<int> ln(label_nodes.begin(), label_nodes.end());
    return ln.size() == label_nodes.size() && ln == leaves;
}

std::vector<int> MetricTree::path(int x, int y) const {
    std::vector<int> par(nodes(), -1);
    std::queue<int> q;
    par[x] = x;
    q.push(x);
    while (!q.empty()) {
        int c = q.front();
        q.pop();
        if (c == y) break;
        for (int w : adj[c])
            if (par[w] < 0) {
                par[w] = c;
                q.push(w);
            }
    }
    std::vector<int> p;
    for (int c = y; c != x; c = par[c]) p.push_back(c);
    p.push_back(x);
    std::reverse(p.begin(), p.end());
    return p;
}

int MetricTree::node_by_name(const std::string& name) const {
    for (int i = 0; i < nodes(); i++)
        if (node_names[i] == name) return i;
    return -1;
}

namespace {

bool four_point_ok(const CostMatrix& m, std::array<int, 4>* witness) {
    int n = m.size();
    for (int a = 0; a < n; a++)
        for (int b = a + 1; b < n; b++)
            for (int c = b + 1; c < n; c++)
                for (int d = c + 1; d < n; d++) {
                    long long s1 = m.at(a, b) + m.at(c, d);
                    long long s2 = m.at(a, c) + m.at(b, d);
                    long long s3 = m.at(a, d) + m.at(b, c);
                    long long mx = std::max({s1, s2, s3});
                    int hits = (s1 == mx) + (s2 == mx) + (s3 == mx);
                    if (hits < 2) {
                        if (witness) *witness = {a, b, c, d};
                        return false;
                    }
                }
    return true;
}

bool perimeters_even(const CostMatrix& m) {
    int n = m.size();
    for (int a = 0; a < n; a++)
        for (int b = a + 1; b < n; b++)
            for (int c = b + 1; c < n; c++)
                if ((m.at(a, b) + m.at(b, c) + m.at(a, c)) % 2 != 0) return false;
    return true;
}

}  // namespace

CostValidation validate_cost(const CostMatrix& m) {
    CostValidation out;
    int n = m.size();
    if (static_cast<int>(m.mu.size()) != n) {
        out.error = "matrix is not square";
        return out;
    }
    for (int a = 0; a < n; a++) {
        if (static_cast<int>(m.mu[a].size()) != n) {
            out.error = "matrix is not square";
            return out;
        }
        if (m.at(a, a) != 0) {
            out.error = "nonzero diagonal at label " + m.labels[a];
            return out;
        }
        for (int b = 0; b < n; b++) {
            if (m.at(a, b) < 0) {
                out.error = "negative entry at (" + m.labels[a] + "," + m.labels[b] + ")";
                return out;
            }
            if (m.at(a, b) != m.at(b, a)) {
                out.error = "asymmetric at (" + m.labels[a] + "," + m.labels[b] + ")";
                return out;
            }
        }
    }
    out.ok = true;
    out.cls = MetricClass::SimpleCost;
    for (int a = 0; a < n; a++)
        for (int b = 0; b < n; b++)
            for (int c = 0; c < n; c++)
                if (m.at(a, c) > m.at(a, b) + m.at(b, c)) {
                    out.triangle_witness = {a, b, c};
                    return out;
                }
    out.cls = MetricClass::Metric;
    std::array<int, 4> w4;
    if (!four_point_ok(m, &w4)) {
        out.four_point_witness = w4;
        return out;
    }
    if (!perimeters_even(m)) return out;
    out.cls = reconstruct_tree(m) ? MetricClass::TreeMetric : MetricClass::InducedTreeCandidate;
    return out;
}

namespace {

// Growable unit-edge tree used during reconstruction.
struct BuildTree {
    std::vector<std::set<int>> adj;
    int add_node() {
        adj.push_back({});
        return static_cast<int>(adj.size()) - 1;
    }
    void add_edge(int a, int b) {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    std::vector<int> path(int x, int y) const {
        std::vector<int> par(adj.size(), -1);
        std::queue<int> q;
        par[x] = x;
        q.push(x);
        while (!q.empty()) {
            int c = q.front();
            q.pop();
            for (int w : adj[c])
                if (par[w] < 0) {
                    par[w] = c;
                    q.push(w);
                }
        }
        std::vector<int> p;
        for (int c = y; c != x; c = par[c]) p.push_back(c);
        p.push_back(x);
        std::reverse(p.begin(), p.end());
        return p;
    }
    int dist(int x, int y) const { return static_cast<int>(path(x, y).size()) - 1; }
    // Grows a chain of `len` fresh nodes from `from`; returns the far end.
    int grow_chain(int from, int len) {
        int cur = from;
        for (int i = 0; i < len; i++) {
            int nxt = add_node();
            add_edge(cur, nxt);
            cur = nxt;
        }
        return cur;
    }
};

}  // namespace

std::optional<MetricTree> reconstruct_tree(const CostMatrix& m, ReconstructionError* err) {
    int n = m.size();
    if (n == 0) {
        if (err) err->message = "empty label set";
        return std::nullopt;
    }
    // labels at distance zero share a node
    std::vector<int> cls(n, -1);
    std::vector<int> reps;
    for (int a = 0; a < n; a++) {
        for (int r : reps)
            if (m.at(a, r) == 0) {
                cls[a] = cls[r];
                break;
            }
        if (cls[a] < 0) {
            cls[a] = static_cast<int>(reps.size());
            reps.push_back(a);
        }
    }
    int k = static_cast<int>(reps.size());

    BuildTree bt;
    std::vector<int> pos(k, -1);  // representative class -> node
    pos[0] = bt.add_node();
    if (k >= 2) pos[1] = bt.grow_chain(pos[0], static_cast<int>(m.at(reps[0], reps[1])));

    for (int ci = 2; ci < k; ci++) {
        int c = reps[ci];
        bool placed = false;
        std::array<int, 4> bad{reps[0], reps[1], c, c};
        for (int ai = 0; ai < ci && !placed; ai++)
            for (int bi = 0; bi < ci && !placed; bi++) {
                if (ai == bi) continue;
                int a = reps[ai], b = reps[bi];
                long long twice_alpha = m.at(a, c) + m.at(a, b) - m.at(b, c);
                if (twice_alpha < 0 || twice_alpha % 2 != 0) continue;
                long long alpha = twice_alpha / 2;
                if (alpha > m.at(a, b) || alpha > m.at(a, c)) continue;
                BuildTree trial = bt;
                auto p = trial.path(pos[ai], pos[bi]);
                int attach = p[alpha];
                int cpos = trial.grow_chain(attach, static_cast<int>(m.at(a, c) - alpha));
                bool good = true;
                for (int di = 0; di < ci; di++)
                    if (trial.dist(cpos, pos[di]) != m.at(c, reps[di])) {
                        bad = {a, b, c, reps[di]};
                        good = false;
                        break;
                    }
                if (good) {
                    bt = trial;
                    pos[ci] = cpos;
                    placed = true;
                }
            }
        if (!placed) {
            if (err) {
                err->witness = bad;
                err->message = "no integral unit-edge realization";
            }
            return std::nullopt;
        }
    }

    MetricTree t;
    for (size_t i = 0; i < bt.adj.size(); i++) t.node_names.push_back("#" + std::to_string(i));
    for (size_t a = 0; a < bt.adj.size(); a++)
        for (int b : bt.adj[a])
            if (static_cast<int>(a) < b) t.edges.push_back({static_cast<int>(a), b});
    t.label_nodes.resize(n);
    t.label_names = m.labels;
    for (int a = 0; a < n; a++) {
        t.label_nodes[a] = pos[cls[a]];
        t.node_names[pos[cls[a]]] = m.labels[a];
    }
    t.finalize();
    // final verification: the embedding reproduces every entry exactly
    for (int a = 0; a < n; a++)
        for (int b = 0; b < n; b++)
            if (t.mu(a, b) != m.at(a, b)) {
                if (err) {
                    err->witness = {a, b, a, b};
                    err->message = "verification failed";
                }
                return std::nullopt;
            }
    return t;
}

namespace {

std::vector<int> bfs_parent(const MetricTree& t, int root) {
    std::vector<int> par(t.nodes(), -1);
    std::queue<int> q;
    par[root] = root;
    q.push(root);
    while (!q.empty()) {
        int c = q.front();
        q.pop();
        for (int w : t.adj[c])
            if (par[w] < 0) {
                par[w] = c;
                q.push(w);
            }
    }
    return par;
}

}  // namespace

int midup(const MetricTree& t, int root, int x, int y) {
    auto p = t.path(x, y);
    int len = static_cast<int>(p.size()) - 1;
    if (len % 2 == 0) return p[len / 2];
    int m1 = p[(len - 1) / 2], m2 = p[(len + 1) / 2];
    // adjacent mid nodes: the ancestor is the one closer to the root
    return t.d(root, m1) < t.d(root, m2) ? m1 : m2;
}

int middown(const MetricTree& t, int root, int x, int y) {
    auto p = t.path(x, y);
    int len = static_cast<int>(p.size()) - 1;
    if (len % 2 == 0) return p[len / 2];
    int m1 = p[(len - 1) / 2], m2 = p[(len + 1) / 2];
    return t.d(root, m1) < t.d(root, m2) ? m2 : m1;
}

int lca(const MetricTree& t, int root, int x, int y) {
    auto par = bfs_parent(t, root);
    std::set<int> anc;
    for (int c = x;; c = par[c]) {
        anc.insert(c);
        if (c == root) break;
    }
    for (int c = y;; c = par[c]) {
        if (anc.count(c)) return c;
        if (c == root) break;
    }
    return root;
}

int lcaskew(const MetricTree& t, int root, int x, int y) {
    int w = lca(t, root, x, y);
    auto p = t.path(x, y);
    return p[t.d(y, w)];
}

int majority_op(const MetricTree& t, int root, int a, int b, int c) {
    int ab = lca(t, root, a, b);
    int ac = lca(t, root, a, c);
    int bc = lca(t, root, b, c);
    return lcaskew(t, root, lcaskew(t, root, ab, ac), bc);
}

std::optional<MultimorphismWitness> check_multimorphism(
    const std::function<long long(const std::vector<int>&)>& f, int arity,
    OperatorPair pair, const MetricTree& t, int root, const std::vector<int>& domain) {
    int dn = static_cast<int>(domain.size());
    std::map<std::pair<int, int>, std::pair<int, int>> ops;
    for (int a : domain)
        for (int b : domain) {
            if (pair == OperatorPair::Strong)
                ops[{a, b}] = {midup(t, root, a, b), middown(t, root, a, b)};
            else
                ops[{a, b}] = {lca(t, root, a, b), lcaskew(t, root, a, b)};
        }
    long long total = 1;
    for (int i = 0; i < arity; i++) total *= dn;
    std::vector<int> xs(arity), ys(arity), lo(arity), hi(arity);
    for (long long ix = 0; ix < total; ix++) {
        long long rx = ix;
        for (int i = 0; i < arity; i++) {
            xs[i] = domain[rx % dn];
            rx /= dn;
        }
        for (long long iy = 0; iy < total; iy++) {
            long long ry = iy;
            for (int i = 0; i < arity; i++) {
                ys[i] = domain[ry % dn];
                ry /= dn;
            }
            for (int i = 0; i < arity; i++) {
                auto [l, h] = ops[{xs[i], ys[i]}];
                lo[i] = l;
                hi[i] = h;
            }
            if (f(xs) + f(ys) < f(lo) + f(hi)) return MultimorphismWitness{xs, ys};
        }
    }
    return std::nullopt;
}

bool equality_support(const MetricTree& t, int /*root*/, std::pair<int, int> ab,
                      std::pair<int, int> xy) {
    std::array<int, 4> nodes = {ab.first, ab.second, xy.first, xy.second};
    // endpoints of the smallest spanning path, if the four nodes admit one
    int u = nodes[0], v = nodes[0], best = 0;
    for (int i = 0; i < 4; i++)
        for (int j = 0; j < 4; j++)
            if (t.d(nodes[i], nodes[j]) > best) {
                best = t.d(nodes[i], nodes[j]);
                u = nodes[i];
                v = nodes[j];
            }
    for (int w : nodes)
        if (t.d(u, w) + t.d(w, v) != t.d(u, v)) return false;
    int pa = t.d(u, ab.first), pb = t.d(u, ab.second);
    int px = t.d(u, xy.first), py = t.d(u, xy.second);
    bool ab_before_xy = std::max(pa, pb) <= std::min(px, py) ||
                        std::max(px, py) <= std::min(pa, pb);
    bool ax_before_by = std::max(pa, px) <= std::min(pb, py) ||
                        std::max(pb, py) <= std::min(pa, px);
    return ab_before_xy || ax_before_by;
}

std::optional<InterpolationWitness> check_interpolation(const std::vector<long long>& f,
                                                        const MetricTree& t) {
    for (int u = 0; u < t.nodes(); u++)
        for (int v = 0; v < t.nodes(); v++) {
            int d = t.d(u, v);
            if (d < 2) continue;
            auto p = t.path(u, v);
            for (int i = 1; i < d; i++)
                if (f[p[i]] * d > (long long)(d - i) * f[u] + (long long)i * f[v])
                    return InterpolationWitness{u, v, i};
        }
    return std::nullopt;
}

std::optional<std::vector<long long>> extend_unary(const std::vector<long long>& f0,
                                                   const MetricTree& t) {
    if (static_cast<int>(f0.size()) != t.labels())
        throw std::invalid_argument("extend_unary: size mismatch");
    std::vector<char> fixed(t.nodes(), 0);
    std::vector<long long> f(t.nodes(), 0);
    for (int l = 0; l < t.labels(); l++) {
        int nd = t.label_nodes[l];
        if (fixed[nd] && f[nd] != f0[l]) return std::nullopt;
        fixed[nd] = 1;
        f[nd] = f0[l];
    }
    if (t.is_leaf_metric()) {
        // zero padding on interior nodes is always a valid extension
        if (check_interpolation(f, t)) return std::nullopt;
        return f;
    }
    long long top = 0;
    for (long long x : f0) top = std::max(top, x);
    for (int v = 0; v < t.nodes(); v++)
        if (!fixed[v]) f[v] = top;
    // tighten every interior value against all pairs until stable
    bool changed = true;
    while (changed) {
        changed = false;
        for (int u = 0; u < t.nodes(); u++)
            for (int v = 0; v < t.nodes(); v++) {
                int d = t.d(u, v);
                if (d < 2) continue;
                auto p = t.path(u, v);
                for (int i = 1; i < d; i++) {
                    long long num = (long long)(d - i) * f[u] + (long long)i * f[v];
                    long long bound = num >= 0 ? num / d : -((-num + d - 1) / d);
                    int w = p[i];
                    if (f[w] <= bound) continue;
                    if (fixed[w]) return std::nullopt;
                    f[w] = bound;
                    changed = true;
                }
            }
    }
    for (long long x : f)
        if (x < 0) return std::nullopt;
    if (check_interpolation(f, t)) return std::nullopt;
    return f;
}

MetricTree random_tree(int n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("random_tree: n < 1");
    MetricTree t;
    for (int i = 0; i < n; i++) t.node_names.push_back("n" + std::to_string(i));
    if (n >= 2) {
        std::mt19937_64 rng(seed);
        if (n == 2) {
            t.edges.push_back({0, 1});
        } else {
            std::vector<int> pruefer(n - 2);
            for (auto& x : pruefer) x = static_cast<int>(rng() % n);
            std::vector<int> deg(n, 1);
            for (int x : pruefer) deg[x]++;
            std::set<int> leaves;
            for (int i = 0; i < n; i++)
                if (deg[i] == 1) leaves.insert(i);
            for (int x : pruefer) {
                int leaf = *leaves.begin();
                leaves.erase(leaves.begin());
                t.edges.push_back({leaf, x});
                if (--deg[x] == 1) leaves.insert(x);
            }
            int a = *leaves.begin();
            int b = *std::next(leaves.begin());
            t.edges.push_back({a, b});
        }
    }
    t.finalize();
    return t;
}

CostMatrix tree_to_matrix(const MetricTree& t) {
    CostMatrix m;
    m.labels = t.label_names;
    int n = t.labels();
    m.mu.assign(n, std::vector<long long>(n, 0));
    for (int a = 0; a < n; a++)
        for (int b = 0; b < n; b++) m.mu[a][b] = t.mu(a, b);
    return m;
}

namespace {

std::string label_name(int i) {
    if (i < 26) return std::string(1, static_cast<char>('a' + i));
    return "l" + std::to_string(i);
}

}  // namespace

CostMatrix random_metric_matrix(int labels, int max_weight, uint64_t seed) {
    std::mt19937_64 rng(seed);
    // shortest-path closure of a random connected weighted graph
    std::vector<std::vector<long long>> w(labels, std::vector<long long>(labels, 1LL << 40));
    for (int i = 0; i < labels; i++) w[i][i] = 0;
    auto connect = [&](int a, int b) {
        long long c = 1 + static_cast<long long>(rng() % max_weight);
        w[a][b] = std::min(w[a][b], c);
        w[b][a] = w[a][b];
    };
    for (int i = 1; i < labels; i++) connect(static_cast<int>(rng() % i), i);
    int extra = labels > 1 ? static_cast<int>(rng() % labels) : 0;
    for (int e = 0; e < extra; e++) {
        int a = static_cast<int>(rng() % labels), b = static_cast<int>(rng() % labels);
        if (a != b) connect(a, b);
    }
    for (int k = 0; k < labels; k++)
        for (int i = 0; i < labels; i++)
            for (int j = 0; j < labels; j++)
                w[i][j] = std::min(w[i][j], w[i][k] + w[k][j]);
    CostMatrix m;
    for (int i = 0; i < labels; i++) m.labels.push_back(label_name(i));
    m.mu = w;
    return m;
}

CostMatrix random_simple_cost(int labels, int max_value, uint64_t seed) {
    std::mt19937_64 rng(seed);
    CostMatrix m;
    for (int i = 0; i < labels; i++) m.labels.push_back(label_name(i));
    m.mu.assign(labels, std::vector<long long>(labels, 0));
    for (int a = 0; a < labels; a++)
        for (int b = a + 1; b < labels; b++) {
            long long c = static_cast<long long>(rng() % (max_value + 1));
            m.mu[a][b] = m.mu[b][a] = c;
        }
    return m;
}

}  // namespace zext
