#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gibbslab/exact.hpp"
#include "gibbslab/lattice.hpp"
#include "gibbslab/random_cluster.hpp"
#include "gibbslab/samplers.hpp"

namespace gibbslab {

enum class Monotonicity { Increasing, Decreasing };

/// Event with declared monotonicity in the Ising partial order
/// (color 2 above color 1, sitewise).
struct MonotoneEvent {
    Event event;
    Monotonicity direction = Monotonicity::Increasing;
};

MonotoneEvent increasing_site(const Box& box, std::span<const int> coord);
MonotoneEvent decreasing_site(const Box& box, std::span<const int> coord);
MonotoneEvent increasing_majority(const Box& box, std::span<const int> center,
                                  int m);
MonotoneEvent decreasing_majority(const Box& box, std::span<const int> center,
                                  int m);

/// Exhaustively verifies the declared monotonicity on boxes with at most
/// `max_sites` sites (q = 2) by checking every single-site cover pair.
/// Returns false if the declaration is wrong; true if verified. Boxes
/// that are too large are trusted (the documented trust boundary).
bool verify_monotonicity(const Box& box, const MonotoneEvent& ev,
                         int max_sites = 16);

struct InequalityReport {
    std::string inequality_id;
    std::string instance;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs; >= 0 means the inequality holds
    std::string method;  // "exact" | "mc"
    double stderr_of_slack = 0.0;  // 0 for exact
    std::string verdict;  // "holds" | "violated"
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
};

/// Absolute slack tolerance for exact checks; grows logarithmically with
/// the enumerated state count (the integer-histogram oracle keeps the
/// actual error independent of it, so this is conservative).
double exact_slack_tolerance(std::int64_t n_states);

std::string verdict_of(double slack, double tol);
std::string verdict_of_mc(double slack, double stderr_of_slack);

/// FKG check on an Ising measure: for two increasing (or two decreasing)
/// events tests E[fg] >= E[f]E[g]; for a mixed pair tests
/// E[fg] <= E[f]E[g]. Monotonicity declarations are verified on small
/// boxes and trusted otherwise.
InequalityReport check_fkg(const SpinMeasure& measure, const MonotoneEvent& f,
                           const MonotoneEvent& g,
                           std::int64_t n_states_hint = 0);

/// Result of the exhaustive FKG scan over all single-site and two-site
/// monotone events on a small Ising box (subset-sum transforms, so the
/// cost is ~2^n * n plus #pairs arithmetic).
struct FkgScanResult {
    double min_slack = 0.0;
    std::int64_t n_pairs = 0;
    std::string worst_pair;
};
FkgScanResult exhaustive_fkg_ising(const ExactMeasure& measure);

/// P(A == i | B == j) <= P(A == i) for the free-boundary Potts measure
/// (and its violation hunt for other boundary conditions).
InequalityReport check_schonmann_ab(const Box& box, const BoundaryCondition& bc,
                                    const ModelParams& params,
                                    const std::vector<std::vector<int>>& a,
                                    const std::vector<std::vector<int>>& b,
                                    int color_i, int color_j,
                                    const EnumerationLimits& limits = {});

/// P(A == i | B == i) >= P(A == i).
InequalityReport check_schonmann_aa(const Box& box, const BoundaryCondition& bc,
                                    const ModelParams& params,
                                    const std::vector<std::vector<int>>& a,
                                    const std::vector<std::vector<int>>& b,
                                    int color_i,
                                    const EnumerationLimits& limits = {});

/// Conditional positive association in the random-cluster model:
/// E[fg | S-/-T] >= E[f | S-/-T] E[g | S-/-T] for f, g increasing in C_S
/// and decreasing in C_T. Monotonicity of the supplied functionals is
/// spot-verified by single-edge additions that change only one of the
/// two cluster sets.
InequalityReport check_vdberg(const Graph& g, double q, double p,
                              const std::vector<std::int32_t>& s_vertices,
                              const std::vector<std::int32_t>& t_vertices,
                              const ClusterFunctional& f,
                              const ClusterFunctional& g_fn,
                              const RcLimits& limits = {},
                              bool verify_monotone = true);

/// Bicolor boundary condition version of the ab inequality; rejects
/// boundary conditions using more than the two stated colors.
InequalityReport check_bicolor(const Box& box, const BoundaryCondition& bc,
                               const ModelParams& params,
                               const std::vector<std::vector<int>>& a,
                               const std::vector<std::vector<int>>& b,
                               int color_i, int color_j,
                               const EnumerationLimits& limits = {});

/// Monte Carlo ab-check in product form: slack = P(A)P(B) - P(A and B),
/// pooled over chains, with a delta-method standard error from the
/// across-chain covariance. Violation requires slack < -4 stderr.
InequalityReport check_corr_ab_mc(const Box& box, const BoundaryCondition& bc,
                                  const ModelParams& params,
                                  const std::vector<int>& site_x,
                                  const std::vector<int>& site_y, int color_i,
                                  int color_j, SamplerKind sampler,
                                  const RunOptions& opts);

/// Grid-then-bisection search for the smallest beta at which the
/// half/half interface mixture on the box violates the (increasing,
/// decreasing) FKG bound for ({sigma_z = +}, {sigma_zhat = -}).
struct MixtureViolationSearch {
    bool found = false;
    double beta_first_violation = 0.0;  // refined by bisection when found
    std::vector<InequalityReport> reports;
};
MixtureViolationSearch search_fkg_mixture(const Box& box, int z,
                                          const std::vector<double>& beta_grid,
                                          double bisect_tol = 1e-3,
                                          const EnumerationLimits& limits = {});

/// Generic budgeted search driver: runs instances until the budget
/// (milliseconds) runs out, collecting violation reports. An empty
/// result is a legitimate "not found within budget".
std::vector<InequalityReport> search_violation(
    const std::vector<std::function<InequalityReport()>>& instances,
    std::int64_t budget_ms, bool only_violations = true);

}  // namespace gibbslab
