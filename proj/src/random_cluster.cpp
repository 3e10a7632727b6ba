#include "gibbslab/random_cluster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>

namespace gibbslab {

void Graph::add_edge(std::int32_t u, std::int32_t v) {
    if (u == v) throw std::invalid_argument("graph: self-loop");
    if (u < 0 || v < 0 || u >= n_vertices || v >= n_vertices)
        throw std::invalid_argument("graph: edge endpoint out of range");
    edges.emplace_back(u, v);
}

void Graph::validate() const {
    for (auto& [u, v] : edges) {
        if (u == v) throw std::invalid_argument("graph: self-loop");
        if (u < 0 || v < 0 || u >= n_vertices || v >= n_vertices)
            throw std::invalid_argument("graph: edge endpoint out of range");
    }
}

Graph read_edge_list(std::istream& in) {
    Graph g;
    std::string tag;
    if (!(in >> tag) || tag != "vertices")
        throw std::invalid_argument("edge list: expected 'vertices N' header");
    if (!(in >> g.n_vertices) || g.n_vertices < 0)
        throw std::invalid_argument("edge list: bad vertex count");
    std::int32_t u, v;
    while (in >> u >> v) g.add_edge(u, v);
    return g;
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << "vertices " << g.n_vertices << "\n";
    for (auto& [u, v] : g.edges) out << u << " " << v << "\n";
}

ClusterView clusters_of(const Graph& g, std::uint64_t open_mask) {
    UnionFind uf(g.n_vertices);
    for (std::int32_t e = 0; e < g.edge_count(); ++e)
        if ((open_mask >> e) & 1) uf.unite(g.edges[e].first, g.edges[e].second);
    ClusterView cv;
    cv.graph = &g;
    cv.open_mask = open_mask;
    cv.component.resize(static_cast<std::size_t>(g.n_vertices));
    for (std::int32_t v = 0; v < g.n_vertices; ++v) cv.component[v] = uf.find(v);
    cv.n_components = uf.component_count();
    return cv;
}

std::int32_t WiredGraph::super_vertex(int color) const {
    for (std::size_t k = 0; k < super_colors.size(); ++k)
        if (super_colors[k] == color)
            return interior_count + static_cast<std::int32_t>(k);
    throw std::invalid_argument("wired graph has no super-vertex of color " +
                                std::to_string(color));
}

bool WiredGraph::cond_holds(const ClusterView& cv) const {
    for (std::size_t a = 0; a < super_colors.size(); ++a)
        for (std::size_t b = a + 1; b < super_colors.size(); ++b)
            if (super_colors[a] != super_colors[b] &&
                cv.connected(interior_count + static_cast<std::int32_t>(a),
                             interior_count + static_cast<std::int32_t>(b)))
                return false;
    return true;
}

WiredGraph wire_boundary(const Box& box, const BoundaryCondition& bc) {
    WiredGraph wg;
    wg.interior_count = box.interior_count();
    wg.super_colors = bc.used_colors();
    wg.graph.n_vertices =
        wg.interior_count + static_cast<std::int32_t>(wg.super_colors.size());
    for (auto& [i, j] : box.interior_bonds()) wg.graph.add_edge(i, j);
    for (auto& [i, b] : box.boundary_bonds()) {
        int w = bc.value(b);
        if (w == 0) continue;
        wg.graph.add_edge(i, wg.super_vertex(w));
    }
    return wg;
}

// ---- exact random-cluster measure ----

namespace {

struct RcHistogram {
    // counts[open * (V+1) + components]
    std::vector<std::uint64_t> counts;
    std::int32_t v1;
    RcHistogram(std::int32_t n_edges, std::int32_t n_vertices)
        : counts(static_cast<std::size_t>(n_edges + 1) * (n_vertices + 1), 0),
          v1(n_vertices + 1) {}
    void bump(std::int32_t open, std::int32_t comps) {
        ++counts[static_cast<std::size_t>(open) * v1 + comps];
    }
};

double log_weight_of(std::int32_t open, std::int32_t comps,
                     std::int32_t n_edges, double q, double p) {
    if (p == 0.0 && open > 0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0 && open < n_edges)
        return -std::numeric_limits<double>::infinity();
    double lw = comps * std::log(q);
    if (open > 0) lw += open * std::log(p);
    if (open < n_edges) lw += (n_edges - open) * std::log1p(-p);
    return lw;
}

double rc_histogram_lse(const RcHistogram& h, std::int32_t n_edges, double q,
                        double p) {
    LogSumExp lse;
    for (std::int32_t o = 0; o <= n_edges; ++o)
        for (std::int32_t c = 0; c < h.v1; ++c) {
            std::uint64_t n = h.counts[static_cast<std::size_t>(o) * h.v1 + c];
            if (!n) continue;
            double lw = log_weight_of(o, c, n_edges, q, p);
            if (std::isinf(lw)) continue;
            lse.add(lw + std::log(static_cast<double>(n)));
        }
    return lse.value();
}

}  // namespace

template <typename Visit>
void RandomClusterMeasure::for_each_mask(Visit&& visit) const {
    const std::int32_t ne = graph_.edge_count();
    const std::int64_t total = std::int64_t{1} << ne;
    UnionFind uf;
    ClusterView cv;
    cv.graph = &graph_;
    cv.component.resize(static_cast<std::size_t>(graph_.n_vertices));
    for (std::int64_t mask = 0; mask < total; ++mask) {
        uf.reset(graph_.n_vertices);
        for (std::int32_t e = 0; e < ne; ++e)
            if ((mask >> e) & 1)
                uf.unite(graph_.edges[e].first, graph_.edges[e].second);
        cv.open_mask = static_cast<std::uint64_t>(mask);
        for (std::int32_t v = 0; v < graph_.n_vertices; ++v)
            cv.component[v] = uf.find(v);
        cv.n_components = uf.component_count();
        visit(cv, static_cast<std::int32_t>(
                      std::popcount(static_cast<std::uint64_t>(mask))));
    }
}

RandomClusterMeasure RandomClusterMeasure::enumerate(const Graph& g, double q,
                                                     double p,
                                                     const RcLimits& limits) {
    if (q < 1.0)
        throw std::invalid_argument("random cluster: q must be >= 1");
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("random cluster: p must be in [0,1]");
    g.validate();
    auto n = checked_pow(2, g.edge_count(), limits.max_edge_configs);
    if (!n)
        throw CapExceeded("random cluster: 2^" +
                          std::to_string(g.edge_count()) +
                          " edge configurations exceed cap " +
                          std::to_string(limits.max_edge_configs));
    RandomClusterMeasure m(g, q, p, limits);
    RcHistogram h(g.edge_count(), g.n_vertices);
    m.for_each_mask([&](const ClusterView& cv, std::int32_t open) {
        h.bump(open, cv.n_components);
    });
    m.log_z_ = rc_histogram_lse(h, g.edge_count(), q, p);
    return m;
}

std::vector<double> RandomClusterMeasure::expectations(
    std::span<const ClusterFunctional> fns) const {
    const std::int32_t ne = graph_.edge_count();
    const std::int32_t v1 = graph_.n_vertices + 1;
    const std::size_t bins = static_cast<std::size_t>(ne + 1) * v1;
    std::vector<std::vector<KahanSum>> sums(fns.size(),
                                            std::vector<KahanSum>(bins));
    for_each_mask([&](const ClusterView& cv, std::int32_t open) {
        std::size_t bin = static_cast<std::size_t>(open) * v1 + cv.n_components;
        for (std::size_t k = 0; k < fns.size(); ++k)
            sums[k][bin].add(fns[k](cv));
    });
    std::vector<double> out(fns.size(), 0.0);
    for (std::size_t k = 0; k < fns.size(); ++k) {
        KahanSum acc;
        for (std::int32_t o = 0; o <= ne; ++o)
            for (std::int32_t c = 0; c < v1; ++c) {
                double s = sums[k][static_cast<std::size_t>(o) * v1 + c].value();
                if (s == 0.0) continue;
                double lw = log_weight_of(o, c, ne, q_, p_);
                if (std::isinf(lw)) continue;
                acc.add(s * std::exp(lw - log_z_));
            }
        out[k] = acc.value();
    }
    return out;
}

double RandomClusterMeasure::expectation(const ClusterFunctional& f) const {
    return expectations({&f, 1})[0];
}

double RandomClusterMeasure::prob(
    const std::function<bool(const ClusterView&)>& ev) const {
    ClusterFunctional f = [&ev](const ClusterView& cv) {
        return ev(cv) ? 1.0 : 0.0;
    };
    return expectation(f);
}

std::array<double, 3> RandomClusterMeasure::conditional_pair(
    const ClusterFunctional& f, const ClusterFunctional& g,
    const std::function<bool(const ClusterView&)>& given) const {
    std::array<ClusterFunctional, 4> fns = {
        [&](const ClusterView& cv) { return given(cv) ? f(cv) * g(cv) : 0.0; },
        [&](const ClusterView& cv) { return given(cv) ? f(cv) : 0.0; },
        [&](const ClusterView& cv) { return given(cv) ? g(cv) : 0.0; },
        [&](const ClusterView& cv) { return given(cv) ? 1.0 : 0.0; }};
    auto e = expectations(fns);
    if (e[3] <= 0.0)
        throw std::invalid_argument(
            "random cluster: conditioning event has probability 0");
    return {e[0] / e[3], e[1] / e[3], e[2] / e[3]};
}

// ---- cluster functionals ----

double cluster_functional_fA(const ClusterView& cv, const WiredGraph& wg,
                             std::span<const std::int32_t> a_vertices,
                             int color, int q) {
    std::vector<std::int32_t> free_roots;
    for (auto a : a_vertices) {
        std::int32_t root = cv.component[a];
        bool wired = false;
        for (std::size_t k = 0; k < wg.super_colors.size(); ++k) {
            std::int32_t sv = wg.interior_count + static_cast<std::int32_t>(k);
            if (cv.component[sv] == root) {
                if (wg.super_colors[k] != color) return 0.0;
                wired = true;
            }
        }
        if (!wired && std::find(free_roots.begin(), free_roots.end(), root) ==
                          free_roots.end())
            free_roots.push_back(root);
    }
    return std::pow(1.0 / q, static_cast<double>(free_roots.size()));
}

double cluster_functional_joint(const ClusterView& cv, const WiredGraph& wg,
                                std::span<const std::int32_t> a_vertices,
                                int color_i,
                                std::span<const std::int32_t> b_vertices,
                                int color_j, int q) {
    for (auto a : a_vertices)
        for (auto b : b_vertices) {
            if (!cv.connected(a, b)) continue;
            // shared cluster: fine only if wired (then one of the two
            // single-set factors is already 0 unless colors clash)
            std::int32_t root = cv.component[a];
            bool wired = false;
            for (std::size_t k = 0; k < wg.super_colors.size(); ++k)
                if (cv.component[wg.interior_count +
                                 static_cast<std::int32_t>(k)] == root)
                    wired = true;
            if (!wired) return 0.0;
        }
    return cluster_functional_fA(cv, wg, a_vertices, color_i, q) *
           cluster_functional_fA(cv, wg, b_vertices, color_j, q);
}

double cluster_functional_fA_literal(const ClusterView& cv,
                                     const WiredGraph& wg,
                                     std::span<const std::int32_t> a_vertices,
                                     int color, int q) {
    const std::size_t n = a_vertices.size();
    if (n > 20)
        throw std::invalid_argument("literal functional limited to |A| <= 20");
    std::int32_t sv = wg.super_vertex(color);
    std::int32_t sv_root = cv.component[sv];
    double total = 0.0;
    for (std::uint32_t x = 0; x < (1u << n); ++x) {
        bool ok = true;
        std::vector<std::int32_t> rest_roots;
        for (std::size_t k = 0; k < n && ok; ++k) {
            std::int32_t root = cv.component[a_vertices[k]];
            if ((x >> k) & 1) {
                if (root != sv_root) ok = false;  // X must touch E_i
            } else {
                if (root == sv_root)
                    ok = false;  // A\X must avoid E_i
                else if (std::find(rest_roots.begin(), rest_roots.end(),
                                   root) == rest_roots.end())
                    rest_roots.push_back(root);
            }
        }
        if (ok)
            total += std::pow(1.0 / q, static_cast<double>(rest_roots.size()));
    }
    return total;
}

// ---- Edwards-Sokal coupling ----

std::vector<double> es_spin_marginal(const Box& box,
                                     const BoundaryCondition& bc,
                                     const ModelParams& params,
                                     const RcLimits& limits) {
    const int q = params.q;
    const double p = params.bond_probability();
    auto wg = wire_boundary(box, bc);
    const std::int32_t ne = wg.graph.edge_count();
    if (!checked_pow(2, ne, limits.max_edge_configs))
        throw CapExceeded("es_spin_marginal: 2^" + std::to_string(ne) +
                          " edge configurations exceed cap " +
                          std::to_string(limits.max_edge_configs));
    const std::int32_t n_int = box.interior_count();
    auto n_spins = checked_pow(q, n_int, std::int64_t{1} << 22);
    if (!n_spins)
        throw CapExceeded("es_spin_marginal: spin table too large");

    std::vector<double> table(static_cast<std::size_t>(*n_spins), 0.0);
    std::vector<std::int64_t> place(static_cast<std::size_t>(n_int));
    std::int64_t pl = 1;
    for (std::int32_t j = n_int - 1; j >= 0; --j) {
        place[static_cast<std::size_t>(j)] = pl;
        pl *= q;
    }

    KahanSum z_cond;
    UnionFind uf;
    const std::int64_t total = std::int64_t{1} << ne;
    std::vector<int> forced_color(static_cast<std::size_t>(wg.graph.n_vertices));
    std::vector<std::int32_t> root_of(static_cast<std::size_t>(n_int));
    std::vector<std::int32_t> free_roots;
    std::vector<std::int32_t> free_index(
        static_cast<std::size_t>(wg.graph.n_vertices));
    std::vector<int> coloring;
    for (std::int64_t mask = 0; mask < total; ++mask) {
        uf.reset(wg.graph.n_vertices);
        for (std::int32_t e = 0; e < ne; ++e)
            if ((mask >> e) & 1)
                uf.unite(wg.graph.edges[e].first, wg.graph.edges[e].second);
        // forced colors via super-vertices; reject cond(w) violations
        std::fill(forced_color.begin(), forced_color.end(), 0);
        bool ok = true;
        for (std::size_t k = 0; k < wg.super_colors.size() && ok; ++k) {
            std::int32_t root =
                uf.find(wg.interior_count + static_cast<std::int32_t>(k));
            if (forced_color[root] != 0 &&
                forced_color[root] != wg.super_colors[k])
                ok = false;
            forced_color[root] = wg.super_colors[k];
        }
        if (!ok) continue;
        std::int32_t open = static_cast<std::int32_t>(
            std::popcount(static_cast<std::uint64_t>(mask)));
        double lw = log_weight_of(open, 0, ne, 1.0, p);  // bond factor only
        if (std::isinf(lw)) continue;
        double w = std::exp(lw);

        free_roots.clear();
        for (std::int32_t v = 0; v < n_int; ++v) {
            std::int32_t root = uf.find(v);
            root_of[static_cast<std::size_t>(v)] = root;
            if (forced_color[root] == 0 &&
                std::find(free_roots.begin(), free_roots.end(), root) ==
                    free_roots.end()) {
                free_index[root] = static_cast<std::int32_t>(free_roots.size());
                free_roots.push_back(root);
            }
        }
        const std::size_t n_free = free_roots.size();
        // every vertex is interior or a super-vertex, so each free
        // cluster contains an interior vertex
        z_cond.add(w *
                   std::pow(static_cast<double>(q), static_cast<double>(n_free)));

        std::int64_t n_col = 1;
        for (std::size_t k = 0; k < n_free; ++k) n_col *= q;
        coloring.assign(n_free, 1);
        for (std::int64_t ci = 0; ci < n_col; ++ci) {
            std::int64_t rem = ci;
            for (std::size_t k = 0; k < n_free; ++k) {
                coloring[k] = static_cast<int>(rem % q) + 1;
                rem /= q;
            }
            std::int64_t idx = 0;
            for (std::int32_t v = 0; v < n_int; ++v) {
                std::int32_t root = root_of[static_cast<std::size_t>(v)];
                int c = forced_color[root];
                if (c == 0)
                    c = coloring[static_cast<std::size_t>(free_index[root])];
                idx += place[static_cast<std::size_t>(v)] * (c - 1);
            }
            table[static_cast<std::size_t>(idx)] += w;
        }
    }
    if (z_cond.value() <= 0.0)
        throw std::runtime_error("es_spin_marginal: cond(w) has zero mass");
    for (auto& t : table) t /= z_cond.value();
    return table;
}

std::pair<double, double> verify_es_identity(
    const Box& box, const BoundaryCondition& bc, const ModelParams& params,
    const std::vector<std::vector<int>>& a_sites,
    const std::vector<std::vector<int>>& b_sites, int color_i, int color_j,
    const RcLimits& limits, const EnumerationLimits& spin_limits) {
    if (color_i == color_j)
        throw std::invalid_argument("verify_es_identity: colors must differ");
    auto m = ExactMeasure::enumerate(box, bc, params, spin_limits);
    Event ev_a =
        a_sites.empty() ? event_full() : event_all_color(box, a_sites, color_i);
    Event ev_b =
        b_sites.empty() ? event_full() : event_all_color(box, b_sites, color_j);
    double lhs = m.prob(event_and(ev_a, ev_b));

    auto wg = wire_boundary(box, bc);
    // both colors need a super-vertex for f_A/f_B to be evaluable, even
    // if the bc does not use one of them (it is then just disconnected)
    for (int c : {color_i, color_j}) {
        bool present = false;
        for (int sc : wg.super_colors) present |= (sc == c);
        if (!present) {
            wg.super_colors.push_back(c);
            wg.graph.n_vertices += 1;
        }
    }
    std::vector<std::int32_t> a_idx, b_idx;
    for (const auto& c : a_sites) a_idx.push_back(box.require_interior(c));
    for (const auto& c : b_sites) b_idx.push_back(box.require_interior(c));

    auto rc = RandomClusterMeasure::enumerate(
        wg.graph, params.q, params.bond_probability(), limits);
    ClusterFunctional joint = [&](const ClusterView& cv) {
        return cluster_functional_joint(cv, wg, a_idx, color_i, b_idx, color_j,
                                        params.q);
    };
    ClusterFunctional one = [](const ClusterView&) { return 1.0; };
    auto given = [&](const ClusterView& cv) { return wg.cond_holds(cv); };
    auto cp = rc.conditional_pair(joint, one, given);
    return {lhs, cp[1]};
}

}  // namespace gibbslab
