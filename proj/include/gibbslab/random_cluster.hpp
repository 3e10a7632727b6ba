#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gibbslab/exact.hpp"
#include "gibbslab/lattice.hpp"
#include "gibbslab/util.hpp"

namespace gibbslab {

/// Finite graph for the random-cluster model. Parallel edges are allowed
/// (boundary contraction produces them); self-loops are not.
struct Graph {
    std::int32_t n_vertices = 0;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;

    std::int32_t edge_count() const {
        return static_cast<std::int32_t>(edges.size());
    }
    void add_edge(std::int32_t u, std::int32_t v);
    void validate() const;
};

/// Edge-list text format: first line "vertices N", then one "u v" per line.
Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);

/// Cluster structure of one edge configuration (open-edge bitmask).
struct ClusterView {
    const Graph* graph = nullptr;
    std::uint64_t open_mask = 0;
    std::vector<std::int32_t> component;  // root-normalized component ids
    std::int32_t n_components = 0;

    bool connected(std::int32_t u, std::int32_t v) const {
        return component[u] == component[v];
    }
    bool edge_open(std::int32_t e) const { return (open_mask >> e) & 1; }
};

ClusterView clusters_of(const Graph& g, std::uint64_t open_mask);

/// Wired boundary data for a lattice graph: interior sites become
/// vertices 0..N-1 and every boundary color class is contracted to one
/// super-vertex.
struct WiredGraph {
    Graph graph;
    std::int32_t interior_count = 0;
    std::vector<int> super_colors;  // color of vertex interior_count + k

    std::int32_t super_vertex(int color) const;
    bool is_super(std::int32_t v) const { return v >= interior_count; }
    int color_of_super(std::int32_t v) const {
        return super_colors[static_cast<std::size_t>(v - interior_count)];
    }
    /// cond(w): no two differently colored super-vertices are connected.
    bool cond_holds(const ClusterView& cv) const;
};

WiredGraph wire_boundary(const Box& box, const BoundaryCondition& bc);

/// Function of an edge configuration through its cluster structure.
using ClusterFunctional = std::function<double(const ClusterView&)>;

struct RcLimits {
    std::int64_t max_edge_configs = std::int64_t{1} << 22;
};

/// Exact random-cluster measure phi_{q,p} on a finite graph, weight
/// p^open (1-p)^closed q^{#components} with components counted over all
/// vertices. Enumeration uses an integer (open, components) histogram,
/// so probabilities come out exact up to the final few-term sums.
class RandomClusterMeasure {
public:
    static RandomClusterMeasure enumerate(const Graph& g, double q, double p,
                                          const RcLimits& limits = {});

    double log_partition() const { return log_z_; }
    const Graph& graph() const { return graph_; }

    /// One pass; returns E[f] for each functional.
    std::vector<double> expectations(
        std::span<const ClusterFunctional> fns) const;
    double expectation(const ClusterFunctional& f) const;

    /// P(event) for boolean functionals.
    double prob(const std::function<bool(const ClusterView&)>& ev) const;

    /// (E[fg | given], E[f | given], E[g | given]); throws if P(given)=0.
    std::array<double, 3> conditional_pair(
        const ClusterFunctional& f, const ClusterFunctional& g,
        const std::function<bool(const ClusterView&)>& given) const;

private:
    RandomClusterMeasure(Graph g, double q, double p, RcLimits limits)
        : graph_(std::move(g)), q_(q), p_(p), limits_(limits) {}

    template <typename Visit>
    void for_each_mask(Visit&& visit) const;

    Graph graph_;
    double q_, p_;
    RcLimits limits_;
    double log_z_ = 0.0;
};

/// Conditional coloring probability that every site of A takes color i,
/// given the cluster structure of a wired configuration:
///   0 if some cluster meeting A contains a super-vertex of color != i,
///   q^{-#free clusters meeting A} otherwise.
double cluster_functional_fA(const ClusterView& cv, const WiredGraph& wg,
                             std::span<const std::int32_t> a_vertices,
                             int color, int q);

/// Joint conditional coloring probability P(A == i and B == j | clusters)
/// for i != j: zero whenever a free cluster meets both A and B (one
/// cluster cannot take two colors), otherwise f_A * f_B. The plain
/// product overcounts exactly those shared-cluster configurations.
double cluster_functional_joint(const ClusterView& cv, const WiredGraph& wg,
                                std::span<const std::int32_t> a_vertices,
                                int color_i,
                                std::span<const std::int32_t> b_vertices,
                                int color_j, int q);

/// Literal subset-sum form of the same functional (slow; |A| <= 20):
/// sum over X subset A of q^{-#clusters meeting A\X} * 1{every x in X
/// connected to the color-i super-vertex} * 1{A\X disconnected from it}.
/// Kept as an independent cross-check; it differs from
/// cluster_functional_fA exactly on configurations where A touches a
/// differently colored super-vertex (it then counts that cluster as free
/// instead of forbidden).
double cluster_functional_fA_literal(const ClusterView& cv,
                                     const WiredGraph& wg,
                                     std::span<const std::int32_t> a_vertices,
                                     int color, int q);

/// Exact Potts spin distribution obtained through the Edwards-Sokal
/// coupling: random-cluster configurations on the wired graph with
/// p = 1 - e^{-beta}, conditioned on cond(w); wired clusters take their
/// boundary color, free clusters take i.i.d. uniform colors. Indexed
/// like ExactMeasure::full_distribution.
std::vector<double> es_spin_marginal(const Box& box,
                                     const BoundaryCondition& bc,
                                     const ModelParams& params,
                                     const RcLimits& limits = {});

/// lhs: Potts probability P(all A = i, all B = j) by direct enumeration.
/// rhs: E_FK[f_A f_B | cond(w)] on the wired graph. Equal for the
/// coupling to be consistent.
std::pair<double, double> verify_es_identity(
    const Box& box, const BoundaryCondition& bc, const ModelParams& params,
    const std::vector<std::vector<int>>& a_sites,
    const std::vector<std::vector<int>>& b_sites, int color_i, int color_j,
    const RcLimits& limits = {}, const EnumerationLimits& spin_limits = {});

}  // namespace gibbslab
