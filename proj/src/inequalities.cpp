#include "gibbslab/inequalities.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>

namespace gibbslab {

MonotoneEvent increasing_site(const Box& box, std::span<const int> coord) {
    return {event_site_color(box, coord, 2), Monotonicity::Increasing};
}
MonotoneEvent decreasing_site(const Box& box, std::span<const int> coord) {
    return {event_site_color(box, coord, 1), Monotonicity::Decreasing};
}
MonotoneEvent increasing_majority(const Box& box, std::span<const int> center,
                                  int m) {
    return {event_block_majority(box, center, m, +1), Monotonicity::Increasing};
}
MonotoneEvent decreasing_majority(const Box& box, std::span<const int> center,
                                  int m) {
    return {event_block_majority(box, center, m, -1), Monotonicity::Decreasing};
}

bool verify_monotonicity(const Box& box, const MonotoneEvent& ev,
                         int max_sites) {
    const std::int32_t n = box.interior_count();
    if (n > max_sites) return true;  // trusted beyond the exhaustive range
    SpinConfig lo(box), hi(box);
    const std::int64_t total = std::int64_t{1} << n;
    for (std::int64_t mask = 0; mask < total; ++mask) {
        for (std::int32_t i = 0; i < n; ++i)
            lo.set(i, ((mask >> i) & 1) ? 2 : 1);
        bool f_lo = ev.event.pred(lo);
        for (std::int32_t i = 0; i < n; ++i) {
            if ((mask >> i) & 1) continue;
            hi = lo;
            hi.set(i, 2);
            bool f_hi = ev.event.pred(hi);
            bool ok = ev.direction == Monotonicity::Increasing
                          ? (!f_lo || f_hi)    // f_lo <= f_hi
                          : (!f_hi || f_lo);   // f_hi <= f_lo
            if (!ok) return false;
        }
    }
    return true;
}

nlohmann::json InequalityReport::to_json() const {
    return {{"inequality", inequality_id},
            {"instance", instance},
            {"lhs", lhs},
            {"rhs", rhs},
            {"slack", slack},
            {"method", method},
            {"stderr", stderr_of_slack},
            {"verdict", verdict},
            {"seed", seed}};
}

double exact_slack_tolerance(std::int64_t n_states) {
    double bits = std::log2(static_cast<double>(std::max<std::int64_t>(2, n_states)));
    return 1e-12 * std::max(1.0, bits);
}

std::string verdict_of(double slack, double tol) {
    return slack < -tol ? "violated" : "holds";
}

std::string verdict_of_mc(double slack, double stderr_of_slack) {
    return slack < -4.0 * stderr_of_slack ? "violated" : "holds";
}

InequalityReport check_fkg(const SpinMeasure& measure, const MonotoneEvent& f,
                           const MonotoneEvent& g,
                           std::int64_t n_states_hint) {
    if (measure.params().q != 2)
        throw std::invalid_argument("check_fkg: Ising (q = 2) only");
    if (!verify_monotonicity(measure.box(), f) ||
        !verify_monotonicity(measure.box(), g))
        throw std::invalid_argument(
            "check_fkg: declared monotonicity failed verification");
    std::array<Event, 3> evs{event_and(f.event, g.event), f.event, g.event};
    auto p = measure.probabilities(evs);
    bool same_direction = f.direction == g.direction;
    InequalityReport rep;
    rep.inequality_id = "fkg";
    rep.instance = f.event.name + " vs " + g.event.name;
    rep.method = "exact";
    if (same_direction) {
        // E[fg] >= E[f]E[g]
        rep.lhs = p[1] * p[2];
        rep.rhs = p[0];
    } else {
        // E[fg] <= E[f]E[g]
        rep.lhs = p[0];
        rep.rhs = p[1] * p[2];
    }
    rep.slack = rep.rhs - rep.lhs;
    std::int64_t ns = n_states_hint;
    if (ns == 0)
        if (auto* em = dynamic_cast<const ExactMeasure*>(&measure))
            ns = em->state_count();
    rep.verdict = verdict_of(rep.slack, exact_slack_tolerance(ns));
    return rep;
}

FkgScanResult exhaustive_fkg_ising(const ExactMeasure& measure) {
    if (measure.params().q != 2)
        throw std::invalid_argument("exhaustive_fkg_ising: q = 2 only");
    const std::int32_t n = measure.box().interior_count();
    if (n > 20)
        throw std::invalid_argument("exhaustive_fkg_ising: box too large");
    const std::size_t total = std::size_t{1} << n;

    // p[mask]: mass of the configuration whose color-2 sites are exactly
    // the set bits of mask (full_distribution index bits match site
    // values by construction)
    std::vector<double> up = measure.full_distribution();
    std::vector<double> dn = up;
    // superset sums: up[S] = P(all of S is color 2)
    for (std::int32_t b = 0; b < n; ++b)
        for (std::size_t s = 0; s < total; ++s)
            if (!((s >> b) & 1)) up[s] += up[s | (std::size_t{1} << b)];
    // subset sums then complement: dn[S] = P(all of S is color 1)
    for (std::int32_t b = 0; b < n; ++b)
        for (std::size_t s = 0; s < total; ++s)
            if ((s >> b) & 1) dn[s] += dn[s ^ (std::size_t{1} << b)];
    // now dn[T] = P(configuration subset of T); reindex by complement
    std::vector<double> dn_by_set(total);
    for (std::size_t s = 0; s < total; ++s)
        dn_by_set[s] = dn[(total - 1) ^ s];
    dn.swap(dn_by_set);

    std::vector<std::size_t> sets;
    for (std::int32_t i = 0; i < n; ++i)
        sets.push_back(std::size_t{1} << i);
    for (std::int32_t i = 0; i < n; ++i)
        for (std::int32_t j = i + 1; j < n; ++j)
            sets.push_back((std::size_t{1} << i) | (std::size_t{1} << j));

    auto joint_up_dn = [&](std::size_t a, std::size_t b) {
        // P(A all 2, B all 1) by inclusion-exclusion over subsets of B
        double s = 0.0;
        std::size_t t = 0;
        for (;;) {
            int parity = std::popcount(t) & 1;
            s += (parity ? -1.0 : 1.0) * up[a | t];
            if (t == b) break;
            t = (t - b) & b;  // next subset of b
        }
        return s;
    };

    FkgScanResult res;
    res.min_slack = std::numeric_limits<double>::infinity();
    auto consider = [&](double slack, const std::string& desc) {
        ++res.n_pairs;
        if (slack < res.min_slack) {
            res.min_slack = slack;
            res.worst_pair = desc;
        }
    };
    for (std::size_t ia = 0; ia < sets.size(); ++ia) {
        for (std::size_t ib = ia; ib < sets.size(); ++ib) {
            std::size_t a = sets[ia], b = sets[ib];
            consider(up[a | b] - up[a] * up[b], "up/up");
            consider(dn[a | b] - dn[a] * dn[b], "dn/dn");
        }
        for (std::size_t ib = 0; ib < sets.size(); ++ib) {
            std::size_t a = sets[ia], b = sets[ib];
            // increasing vs decreasing: joint must not exceed the product
            consider(up[a] * dn[b] - joint_up_dn(a, b), "up/dn");
        }
    }
    return res;
}

namespace {

InequalityReport ab_report(const char* id, const SpinMeasure& m,
                           const std::vector<std::vector<int>>& a,
                           const std::vector<std::vector<int>>& b, int color_i,
                           int color_j, bool same_color_positive,
                           std::int64_t n_states) {
    Event ev_a = event_all_color(m.box(), a, color_i);
    Event ev_b = event_all_color(m.box(), b, color_j);
    std::array<Event, 3> evs{event_and(ev_a, ev_b), ev_b, ev_a};
    auto p = m.probabilities(evs);
    if (p[1] <= 0.0)
        throw std::invalid_argument(
            std::string(id) + ": conditioning event has probability 0");
    double cond = p[0] / p[1];
    double marg = p[2];
    InequalityReport rep;
    rep.inequality_id = id;
    rep.instance = ev_a.name + " given " + ev_b.name;
    rep.method = "exact";
    if (same_color_positive) {
        // conditional >= marginal
        rep.lhs = marg;
        rep.rhs = cond;
    } else {
        // conditional <= marginal
        rep.lhs = cond;
        rep.rhs = marg;
    }
    rep.slack = rep.rhs - rep.lhs;
    rep.verdict = verdict_of(rep.slack, exact_slack_tolerance(n_states));
    return rep;
}

}  // namespace

InequalityReport check_schonmann_ab(const Box& box, const BoundaryCondition& bc,
                                    const ModelParams& params,
                                    const std::vector<std::vector<int>>& a,
                                    const std::vector<std::vector<int>>& b,
                                    int color_i, int color_j,
                                    const EnumerationLimits& limits) {
    if (color_i == color_j)
        throw std::invalid_argument("corr-ab: colors must differ");
    auto m = ExactMeasure::enumerate(box, bc, params, limits);
    return ab_report("corr-ab", m, a, b, color_i, color_j, false,
                     m.state_count());
}

InequalityReport check_schonmann_aa(const Box& box, const BoundaryCondition& bc,
                                    const ModelParams& params,
                                    const std::vector<std::vector<int>>& a,
                                    const std::vector<std::vector<int>>& b,
                                    int color_i,
                                    const EnumerationLimits& limits) {
    auto m = ExactMeasure::enumerate(box, bc, params, limits);
    return ab_report("corr-aa", m, a, b, color_i, color_i, true,
                     m.state_count());
}

InequalityReport check_bicolor(const Box& box, const BoundaryCondition& bc,
                               const ModelParams& params,
                               const std::vector<std::vector<int>>& a,
                               const std::vector<std::vector<int>>& b,
                               int color_i, int color_j,
                               const EnumerationLimits& limits) {
    if (color_i == color_j)
        throw std::invalid_argument("corr-ab-bicolor: colors must differ");
    for (int c : bc.used_colors())
        if (c != color_i && c != color_j)
            throw std::invalid_argument(
                "corr-ab-bicolor: boundary condition uses color " +
                std::to_string(c) + " outside {i, j, free}");
    auto m = ExactMeasure::enumerate(box, bc, params, limits);
    auto rep = ab_report("corr-ab-bicolor", m, a, b, color_i, color_j, false,
                         m.state_count());
    return rep;
}

InequalityReport check_vdberg(const Graph& g, double q, double p,
                              const std::vector<std::int32_t>& s_vertices,
                              const std::vector<std::int32_t>& t_vertices,
                              const ClusterFunctional& f,
                              const ClusterFunctional& g_fn,
                              const RcLimits& limits, bool verify_monotone) {
    for (auto s : s_vertices)
        for (auto t : t_vertices)
            if (s == t)
                throw std::invalid_argument("vdberg: S and T must be disjoint");

    auto connected_any = [&](const ClusterView& cv) {
        for (auto s : s_vertices)
            for (auto t : t_vertices)
                if (cv.connected(s, t)) return true;
        return false;
    };
    auto given = [&](const ClusterView& cv) { return !connected_any(cv); };

    if (verify_monotone && g.edge_count() <= 18) {
        // single-edge additions that enlarge exactly one of C_S, C_T must
        // move each functional the declared way
        auto touches = [&](const ClusterView& cv,
                           const std::vector<std::int32_t>& set,
                           std::int32_t v) {
            for (auto s : set)
                if (cv.connected(s, v)) return true;
            return false;
        };
        const std::int64_t total = std::int64_t{1} << g.edge_count();
        for (std::int64_t mask = 0; mask < total; ++mask) {
            auto cv = clusters_of(g, static_cast<std::uint64_t>(mask));
            for (std::int32_t e = 0; e < g.edge_count(); ++e) {
                if ((mask >> e) & 1) continue;
                auto cv2 = clusters_of(
                    g, static_cast<std::uint64_t>(mask) | (1ull << e));
                auto [u, v] = g.edges[e];
                bool grew_s = (touches(cv, s_vertices, u) ||
                               touches(cv, s_vertices, v)) &&
                              !cv.connected(u, v);
                bool grew_t = (touches(cv, t_vertices, u) ||
                               touches(cv, t_vertices, v)) &&
                              !cv.connected(u, v);
                if (grew_s && !grew_t) {
                    if (f(cv2) < f(cv) - 1e-12 || g_fn(cv2) < g_fn(cv) - 1e-12)
                        throw std::invalid_argument(
                            "vdberg: functional not increasing in C_S");
                } else if (grew_t && !grew_s) {
                    if (f(cv2) > f(cv) + 1e-12 || g_fn(cv2) > g_fn(cv) + 1e-12)
                        throw std::invalid_argument(
                            "vdberg: functional not decreasing in C_T");
                }
            }
        }
    }

    auto rc = RandomClusterMeasure::enumerate(g, q, p, limits);
    auto cp = rc.conditional_pair(f, g_fn, given);
    InequalityReport rep;
    rep.inequality_id = "vdberg";
    rep.instance = "|V|=" + std::to_string(g.n_vertices) +
                   " |E|=" + std::to_string(g.edge_count()) +
                   " q=" + std::to_string(q) + " p=" + std::to_string(p);
    rep.method = "exact";
    rep.lhs = cp[1] * cp[2];
    rep.rhs = cp[0];
    rep.slack = rep.rhs - rep.lhs;
    rep.verdict =
        verdict_of(rep.slack, exact_slack_tolerance(
                                  std::int64_t{1} << g.edge_count()));
    return rep;
}

InequalityReport check_corr_ab_mc(const Box& box, const BoundaryCondition& bc,
                                  const ModelParams& params,
                                  const std::vector<int>& site_x,
                                  const std::vector<int>& site_y, int color_i,
                                  int color_j, SamplerKind sampler,
                                  const RunOptions& opts) {
    Event ev_a = event_site_color(box, site_x, color_i);
    Event ev_b = event_site_color(box, site_y, color_j);
    Event ev_ab = event_and(ev_a, ev_b);
    std::array<Observable, 3> obs{
        Observable{"a", [p = ev_a.pred](const SpinConfig& s) {
                       return p(s) ? 1.0 : 0.0;
                   }},
        Observable{"b", [p = ev_b.pred](const SpinConfig& s) {
                       return p(s) ? 1.0 : 0.0;
                   }},
        Observable{"ab", [p = ev_ab.pred](const SpinConfig& s) {
                       return p(s) ? 1.0 : 0.0;
                   }}};
    auto run = run_experiment(sampler, box, bc, params, obs, opts);
    const int n_chains = static_cast<int>(run.chain_means.size());
    if (n_chains < 2)
        throw std::invalid_argument("check_corr_ab_mc: need >= 2 chains");

    // pooled means and across-chain covariance
    double ma = 0, mb = 0, mab = 0;
    for (auto& cm : run.chain_means) {
        ma += cm[0];
        mb += cm[1];
        mab += cm[2];
    }
    ma /= n_chains;
    mb /= n_chains;
    mab /= n_chains;
    double cov[3][3] = {};
    for (auto& cm : run.chain_means) {
        double d[3] = {cm[0] - ma, cm[1] - mb, cm[2] - mab};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) cov[r][c] += d[r] * d[c];
    }
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            cov[r][c] /= static_cast<double>(n_chains - 1) * n_chains;

    // product-form slack P(A)P(B) - P(A and B); delta method gradient
    double grad[3] = {mb, ma, -1.0};
    double var = 0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) var += grad[r] * cov[r][c] * grad[c];
    InequalityReport rep;
    rep.inequality_id = "corr-ab";
    rep.instance = ev_a.name + " given " + ev_b.name + " (" +
                   sampler_name(sampler) + ")";
    rep.method = "mc";
    rep.lhs = mab;
    rep.rhs = ma * mb;
    rep.slack = rep.rhs - rep.lhs;
    rep.stderr_of_slack = std::sqrt(std::max(0.0, var));
    rep.seed = opts.seed;
    rep.verdict = verdict_of_mc(rep.slack, rep.stderr_of_slack);
    return rep;
}

MixtureViolationSearch search_fkg_mixture(const Box& box, int z,
                                          const std::vector<double>& beta_grid,
                                          double bisect_tol,
                                          const EnumerationLimits& limits) {
    const int axis = box.dimension() - 1;
    std::vector<int> zc(static_cast<std::size_t>(box.dimension()), 0);
    std::vector<int> zh = zc;
    zc[static_cast<std::size_t>(axis)] = z;
    zh[static_cast<std::size_t>(axis)] = -z - 1;

    auto slack_at = [&](double beta) {
        ModelParams p(2, beta);
        auto mix = dobrushin_mixture(box, p, axis, 0, 2, 1, limits);
        auto f = increasing_site(box, zc);
        auto g = decreasing_site(box, zh);
        return check_fkg(mix, f, g);
    };

    MixtureViolationSearch out;
    double prev_beta = -1;
    for (double beta : beta_grid) {
        auto rep = slack_at(beta);
        rep.instance += " beta=" + std::to_string(beta);
        bool violated = rep.verdict == "violated";
        out.reports.push_back(std::move(rep));
        if (violated && !out.found) {
            out.found = true;
            // bisect between the last holding beta and this one
            double lo = prev_beta >= 0 ? prev_beta : 0.0;
            double hi = beta;
            while (hi - lo > bisect_tol) {
                double mid = 0.5 * (lo + hi);
                if (slack_at(mid).verdict == "violated")
                    hi = mid;
                else
                    lo = mid;
            }
            out.beta_first_violation = hi;
        }
        prev_beta = beta;
    }
    return out;
}

std::vector<InequalityReport> search_violation(
    const std::vector<std::function<InequalityReport()>>& instances,
    std::int64_t budget_ms, bool only_violations) {
    auto start = std::chrono::steady_clock::now();
    std::vector<InequalityReport> out;
    for (const auto& inst : instances) {
        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
        if (elapsed > budget_ms) break;
        auto rep = inst();
        if (!only_violations || rep.verdict == "violated")
            out.push_back(std::move(rep));
    }
    return out;
}

}  // namespace gibbslab
