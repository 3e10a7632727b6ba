#include "gibbslab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gibbslab/inequalities.hpp"
#include "gibbslab/stats.hpp"

namespace gibbslab {

nlohmann::json WitnessReport::to_json() const {
    return {{"id", id},
            {"conditional", conditional},
            {"marginal", marginal},
            {"ceiling", ceiling},
            {"floor", floor_bound},
            {"method", method},
            {"stderr_conditional", stderr_cond},
            {"stderr_marginal", stderr_marg},
            {"witness", witness},
            {"details", details}};
}

nlohmann::json LocalizationTable::to_json() const {
    nlohmann::json rows_j = nlohmann::json::array();
    for (const auto& r : rows)
        rows_j.push_back({{"size", r.size},
                          {"var_h", r.var_h},
                          {"stderr_var", r.stderr_var}});
    return {{"dimension", dimension}, {"beta", beta}, {"rows", rows_j}};
}

Box centered_box(const std::vector<int>& sides) {
    std::vector<std::pair<int, int>> ranges;
    for (int n : sides) {
        if (n < 1) throw std::invalid_argument("centered_box: side must be >= 1");
        int lo = -(n / 2);  // even: [-n/2, n/2-1]; odd: centered at 0
        ranges.emplace_back(lo, lo + n - 1);
    }
    return Box::make(static_cast<int>(sides.size()), ranges);
}

void require_symmetric_interface_box(const Box& box) {
    int ax = box.dimension() - 1;
    if (box.lo(ax) != -(box.hi(ax) + 1))
        throw std::invalid_argument(
            "interface box must have last-axis range [-H, H-1] (symmetric "
            "under z -> -1-z); got [" +
            std::to_string(box.lo(ax)) + ", " + std::to_string(box.hi(ax)) +
            "]");
}

Estimate estimate_mstar(int dimension, double beta, int side,
                        std::int64_t n_sweeps, std::uint64_t seed,
                        SamplerKind kind, int n_chains) {
    auto box = centered_box(std::vector<int>(static_cast<std::size_t>(dimension),
                                             side));
    auto bc = BoundaryCondition::pure(box, 2);
    ModelParams params(2, beta);
    std::vector<int> center(static_cast<std::size_t>(dimension), 0);
    std::int32_t idx = box.require_interior(center);
    Observable spin{"m_center", [idx](const SpinConfig& s) {
                        return s.value(idx) == 2 ? 1.0 : -1.0;
                    }};
    RunOptions opts;
    opts.n_sweeps = n_sweeps;
    opts.n_chains = n_chains;
    opts.seed = seed;
    auto run = run_experiment(kind, box, bc, params, {&spin, 1}, opts);
    return run.estimates[0];
}

namespace {

std::vector<int> axis_site(const Box& box, int value) {
    std::vector<int> c(static_cast<std::size_t>(box.dimension()), 0);
    c[static_cast<std::size_t>(box.dimension() - 1)] = value;
    return c;
}

struct MixtureEventProbs {
    // per component k (0: high/low, 1: swapped), probabilities of
    // {joint, given, target}
    std::array<std::array<double, 3>, 2> comp;
    std::array<double, 3> mixture() const {
        std::array<double, 3> m;
        for (int e = 0; e < 3; ++e)
            m[static_cast<std::size_t>(e)] =
                0.5 * (comp[0][static_cast<std::size_t>(e)] +
                       comp[1][static_cast<std::size_t>(e)]);
        return m;
    }
};

}  // namespace

WitnessReport mixture_conditional_witness(const Box& box,
                                          const ModelParams& params, int z,
                                          std::uint64_t seed,
                                          const WitnessOptions& opts) {
    if (params.q != 2)
        throw std::invalid_argument("ising witness: q = 2 required");
    if (z < 0) throw std::invalid_argument("witness: z must be >= 0");
    require_symmetric_interface_box(box);
    const int axis = box.dimension() - 1;
    auto site_z = axis_site(box, z);
    auto site_zh = axis_site(box, -z - 1);
    box.require_interior(site_z);
    box.require_interior(site_zh);

    WitnessReport rep;
    rep.id = "ising-mixture";
    rep.ceiling = 0.5;
    rep.details = {{"z", z}, {"beta", params.beta}, {"box", box_to_json(box)}};

    auto states = checked_pow(params.q, box.interior_count(),
                              opts.limits.max_states);
    if (!opts.force_mc && states) {
        rep.method = "exact";
        auto mix = dobrushin_mixture(box, params, axis, 0, 2, 1, opts.limits);
        Event target = event_site_color(box, site_z, 2);
        Event given = event_site_color(box, site_zh, 1);
        std::array<Event, 3> evs{event_and(target, given), given, target};
        auto pm = mix.probabilities(evs);
        rep.conditional = pm[0] / pm[1];
        rep.marginal = pm[2];

        // the lower-bound chain on the plus/minus component
        const auto& plus = mix.component(0);
        auto pc = plus.probabilities(evs);
        double joint_pm = pc[0];
        double p_z_minus = 1.0 - pc[2];  // mu_pm(sigma_z = -)
        Event zhat_plus = event_site_color(box, site_zh, 2);
        double p_zh_plus = plus.prob(zhat_plus);
        double m_z = 2.0 * pc[2] - 1.0;          // mu_pm(sigma_z)
        double m_zh = 2.0 * p_zh_plus - 1.0;     // mu_pm(sigma_zhat)
        rep.floor_bound = m_z;
        double tol = exact_slack_tolerance(*states);
        bool step1 = pm[0] >= 0.5 * joint_pm - tol;
        bool step2 = joint_pm >= 1.0 - p_z_minus - p_zh_plus - tol;
        bool step3 =
            std::abs((1.0 - 0.5 * (1.0 - m_z) - 0.5 * (1.0 + m_zh)) - m_z) <=
            1e-12;
        bool antisym = std::abs(m_z + m_zh) <= 1e-12;
        bool sym_half = std::abs(rep.marginal - 0.5) <= 1e-12;
        rep.details["chain"] = {{"mix_joint", pm[0]},
                                {"half_component_joint", 0.5 * joint_pm},
                                {"union_bound", 1.0 - p_z_minus - p_zh_plus},
                                {"component_magnetization_z", m_z},
                                {"step1", step1},
                                {"step2", step2},
                                {"step3", step3},
                                {"antisymmetry", antisym},
                                {"marginal_is_half", sym_half}};
        if (!(step1 && step2 && step3 && antisym && sym_half))
            throw std::runtime_error(
                "witness: exact chain identities failed; this indicates a "
                "bug, not physics");
        rep.witness = rep.conditional > rep.ceiling + tol;
        return rep;
    }

    // Monte Carlo: sample the two interface ensembles separately and
    // combine with weights 1/2 (the mixture is not a single-chain target)
    rep.method = "mc";
    Event target = event_site_color(box, site_z, 2);
    Event given = event_site_color(box, site_zh, 1);
    Event joint = event_and(target, given);
    std::array<Observable, 3> obs{
        Observable{"joint", [p = joint.pred](const SpinConfig& s) {
                       return p(s) ? 1.0 : 0.0;
                   }},
        Observable{"given", [p = given.pred](const SpinConfig& s) {
                       return p(s) ? 1.0 : 0.0;
                   }},
        Observable{"target", [p = target.pred](const SpinConfig& s) {
                       return p(s) ? 1.0 : 0.0;
                   }}};
    RunOptions mc = opts.mc;
    mc.seed = seed;
    std::array<std::vector<std::vector<double>>, 2> chain_means;
    MixtureEventProbs probs{};
    for (int k = 0; k < 2; ++k) {
        auto bc = k == 0 ? BoundaryCondition::dobrushin(box, axis, 0, 2, 1)
                         : BoundaryCondition::dobrushin(box, axis, 0, 1, 2);
        RunOptions o = mc;
        o.seed = mc.seed + static_cast<std::uint64_t>(k) * 7919;
        auto run = run_experiment(SamplerKind::SwendsenWang, box, bc, params,
                                  obs, o);
        chain_means[static_cast<std::size_t>(k)] = run.chain_means;
        for (int e = 0; e < 3; ++e)
            probs.comp[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)] =
                run.estimates[static_cast<std::size_t>(e)].mean;
    }
    auto m = probs.mixture();
    rep.conditional = m[0] / m[1];
    rep.marginal = m[2];
    // delta-method errors from across-chain spread of the mixture stats
    auto chain_stat = [&](std::size_t c0, std::size_t c1, int e) {
        return 0.5 * (chain_means[0][c0][static_cast<std::size_t>(e)] +
                      chain_means[1][c1][static_cast<std::size_t>(e)]);
    };
    std::size_t n_chains = chain_means[0].size();
    std::vector<double> cond_samples, marg_samples;
    for (std::size_t c = 0; c < n_chains; ++c) {
        double j = chain_stat(c, c, 0), g = chain_stat(c, c, 1);
        if (g > 0) cond_samples.push_back(j / g);
        marg_samples.push_back(chain_stat(c, c, 2));
    }
    rep.stderr_cond = std::sqrt(
        variance_of(cond_samples) /
        std::max<std::size_t>(std::size_t{1}, cond_samples.size()));
    rep.stderr_marg = std::sqrt(variance_of(marg_samples) /
                                std::max<std::size_t>(std::size_t{1},
                                                      marg_samples.size()));
    rep.floor_bound = 2.0 * probs.comp[0][2] - 1.0;
    rep.witness = rep.conditional > rep.ceiling + 4.0 * rep.stderr_cond;
    return rep;
}

WitnessReport majority_witness(const Box& box, const ModelParams& params,
                               int z, int m, std::uint64_t seed,
                               const WitnessOptions& opts) {
    if (params.q != 2)
        throw std::invalid_argument("majority witness: q = 2 required");
    if (m < 1 || m % 2 == 0)
        throw std::invalid_argument("majority witness: m must be odd");
    require_symmetric_interface_box(box);
    const int axis = box.dimension() - 1;
    int half = (m - 1) / 2;
    if (z - half < 0)
        throw std::invalid_argument(
            "majority witness: block leaves the upper half-space");
    auto site_z = axis_site(box, z);
    auto site_zh = axis_site(box, -z - 1);

    WitnessReport rep;
    rep.id = "majority-mixture";
    rep.ceiling = 0.5;
    rep.details = {{"z", z}, {"m", m}, {"beta", params.beta}};

    Event target = event_block_majority(box, site_z, m, +1);
    Event given = event_block_majority(box, site_zh, m, -1);
    auto states = checked_pow(params.q, box.interior_count(),
                              opts.limits.max_states);
    if (!opts.force_mc && states) {
        rep.method = "exact";
        auto mix = dobrushin_mixture(box, params, axis, 0, 2, 1, opts.limits);
        std::array<Event, 3> evs{event_and(target, given), given, target};
        auto pm = mix.probabilities(evs);
        rep.conditional = pm[0] / pm[1];
        rep.marginal = pm[2];
        double tol = exact_slack_tolerance(*states);
        if (std::abs(rep.marginal - 0.5) > 1e-12)
            throw std::runtime_error(
                "majority witness: flip symmetry violated; bug");
        rep.witness = rep.conditional > rep.ceiling + tol;
        return rep;
    }

    rep.method = "mc";
    Event joint = event_and(target, given);
    std::array<Observable, 3> obs{
        Observable{"joint",
                   [p = joint.pred](const SpinConfig& s) {
                       return p(s) ? 1.0 : 0.0;
                   }},
        Observable{"given",
                   [p = given.pred](const SpinConfig& s) {
                       return p(s) ? 1.0 : 0.0;
                   }},
        Observable{"target", [p = target.pred](const SpinConfig& s) {
                       return p(s) ? 1.0 : 0.0;
                   }}};
    RunOptions mc = opts.mc;
    mc.seed = seed;
    std::array<std::array<double, 3>, 2> comp{};
    std::array<std::vector<std::vector<double>>, 2> chain_means;
    for (int k = 0; k < 2; ++k) {
        auto bc = k == 0 ? BoundaryCondition::dobrushin(box, axis, 0, 2, 1)
                         : BoundaryCondition::dobrushin(box, axis, 0, 1, 2);
        RunOptions o = mc;
        o.seed = mc.seed + static_cast<std::uint64_t>(k) * 7919;
        auto run = run_experiment(SamplerKind::SwendsenWang, box, bc, params,
                                  obs, o);
        chain_means[static_cast<std::size_t>(k)] = run.chain_means;
        for (int e = 0; e < 3; ++e)
            comp[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)] =
                run.estimates[static_cast<std::size_t>(e)].mean;
    }
    double j = 0.5 * (comp[0][0] + comp[1][0]);
    double g = 0.5 * (comp[0][1] + comp[1][1]);
    rep.conditional = j / g;
    rep.marginal = 0.5 * (comp[0][2] + comp[1][2]);
    std::vector<double> cond_samples;
    for (std::size_t c = 0; c < chain_means[0].size(); ++c) {
        double jc = 0.5 * (chain_means[0][c][0] + chain_means[1][c][0]);
        double gc = 0.5 * (chain_means[0][c][1] + chain_means[1][c][1]);
        if (gc > 0) cond_samples.push_back(jc / gc);
    }
    rep.stderr_cond = std::sqrt(
        variance_of(cond_samples) /
        std::max<std::size_t>(std::size_t{1}, cond_samples.size()));
    rep.witness = rep.conditional > rep.ceiling + 4.0 * rep.stderr_cond;
    return rep;
}

double alpha_mixture_ratio(double alpha, double mstar2, double mstar3) {
    if (!(alpha > 0.0 && alpha < 1.0) && alpha != 1.0)
        throw std::invalid_argument("alpha must lie in (0,1]");
    if (!(mstar2 >= 0 && mstar2 <= mstar3 && mstar3 <= 1.0))
        throw std::invalid_argument("need 0 <= m2 <= m3 <= 1");
    double denom =
        0.5 * (1.0 + mstar3) + ((1.0 - alpha) / alpha) * 0.5 * (1.0 - mstar2);
    return mstar2 / denom;
}

bool alpha_mixture_condition(double alpha, double mstar2, double mstar3) {
    return alpha_mixture_ratio(alpha, mstar2, mstar3) > 0.5;
}

WitnessReport potts_dobrushin_witness(const Box& box,
                                      const ModelParams& params, int z,
                                      std::uint64_t seed,
                                      const WitnessOptions& opts) {
    if (params.q < 3)
        throw std::invalid_argument("potts witness: q >= 3 required");
    if (z < 0) throw std::invalid_argument("witness: z must be >= 0");
    require_symmetric_interface_box(box);
    const int axis = box.dimension() - 1;
    auto site_z = axis_site(box, z);
    auto site_zh = axis_site(box, -z - 1);
    box.require_interior(site_z);
    box.require_interior(site_zh);

    WitnessReport rep;
    rep.id = "potts-mixture";
    rep.details = {{"z", z},
                   {"q", params.q},
                   {"beta", params.beta},
                   {"box", box_to_json(box)}};

    auto bc12 = BoundaryCondition::dobrushin(box, axis, 0, 1, 2);
    auto bc21 = BoundaryCondition::dobrushin(box, axis, 0, 2, 1);

    auto states =
        checked_pow(params.q, box.interior_count(), opts.limits.max_states);
    if (!opts.force_mc && states) {
        rep.method = "exact";
        auto m12 = std::make_shared<ExactMeasure>(
            ExactMeasure::enumerate(box, bc12, params, opts.limits));
        auto m21 = std::make_shared<ExactMeasure>(
            ExactMeasure::enumerate(box, bc21, params, opts.limits));
        MixtureMeasure mix({0.5, 0.5}, {m12, m21});
        Event target = event_site_color(box, site_z, 1);
        Event given = event_site_color(box, site_zh, 2);
        std::array<Event, 3> evs{event_and(target, given), given, target};
        auto pm = mix.probabilities(evs);
        rep.conditional = pm[0] / pm[1];
        rep.marginal = pm[2];
        rep.ceiling = rep.marginal;
        auto c12 = m12->probabilities(evs);
        auto c21 = m21->probabilities(evs);
        double tol = exact_slack_tolerance(*states);
        bool comp12_holds = c12[0] / c12[1] <= c12[2] + tol;
        bool comp21_holds = c21[0] / c21[1] <= c21[2] + tol;
        rep.details["component_ceiling"] = {
            {"p12_conditional", c12[0] / c12[1]},
            {"p12_marginal", c12[2]},
            {"p12_holds", comp12_holds},
            {"p21_conditional", c21[0] / c21[1]},
            {"p21_marginal", c21[2]},
            {"p21_holds", comp21_holds}};
        rep.floor_bound = c12[2];
        rep.witness = rep.conditional > rep.ceiling + tol;
        return rep;
    }

    // transfer-matrix path for thin boxes beyond the enumeration cap
    int n_layers = box.extent(axis);
    std::int64_t cs = box.interior_count() / n_layers;
    auto cs_states = checked_pow(params.q, static_cast<int>(cs),
                                 opts.transfer_limits.max_cross_states);
    if (!opts.force_mc && cs_states) {
        rep.method = "transfer";
        auto probs_for = [&](const BoundaryCondition& bc) {
            double lz =
                transfer_matrix_log_z(box, bc, params, axis, opts.transfer_limits);
            auto cyl = [&](const std::vector<std::pair<std::vector<int>, int>>&
                               cons) {
                return std::exp(transfer_matrix_log_weight_sum(
                                    box, bc, params, axis, cons,
                                    opts.transfer_limits) -
                                lz);
            };
            std::array<double, 3> p;
            p[0] = cyl({{site_z, 1}, {site_zh, 2}});
            p[1] = cyl({{site_zh, 2}});
            p[2] = cyl({{site_z, 1}});
            return p;
        };
        auto c12 = probs_for(bc12);
        auto c21 = probs_for(bc21);
        std::array<double, 3> pm;
        for (int e = 0; e < 3; ++e)
            pm[static_cast<std::size_t>(e)] =
                0.5 * (c12[static_cast<std::size_t>(e)] +
                       c21[static_cast<std::size_t>(e)]);
        rep.conditional = pm[0] / pm[1];
        rep.marginal = pm[2];
        rep.ceiling = rep.marginal;
        double tol = 1e-9;  // transfer path: layered floating point
        bool comp12_holds = c12[0] / c12[1] <= c12[2] + tol;
        bool comp21_holds = c21[0] / c21[1] <= c21[2] + tol;
        rep.details["component_ceiling"] = {{"p12_holds", comp12_holds},
                                            {"p21_holds", comp21_holds}};
        rep.floor_bound = c12[2];
        rep.witness = rep.conditional > rep.ceiling + tol;
        return rep;
    }

    rep.method = "mc";
    Event target = event_site_color(box, site_z, 1);
    Event given = event_site_color(box, site_zh, 2);
    Event joint = event_and(target, given);
    std::array<Observable, 3> obs{
        Observable{"joint",
                   [p = joint.pred](const SpinConfig& s) {
                       return p(s) ? 1.0 : 0.0;
                   }},
        Observable{"given",
                   [p = given.pred](const SpinConfig& s) {
                       return p(s) ? 1.0 : 0.0;
                   }},
        Observable{"target", [p = target.pred](const SpinConfig& s) {
                       return p(s) ? 1.0 : 0.0;
                   }}};
    RunOptions mc = opts.mc;
    mc.seed = seed;
    std::array<std::array<double, 3>, 2> comp{};
    for (int k = 0; k < 2; ++k) {
        const auto& bc = k == 0 ? bc12 : bc21;
        RunOptions o = mc;
        o.seed = mc.seed + static_cast<std::uint64_t>(k) * 7919;
        auto run =
            run_experiment(SamplerKind::SwendsenWang, box, bc, params, obs, o);
        for (int e = 0; e < 3; ++e)
            comp[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)] =
                run.estimates[static_cast<std::size_t>(e)].mean;
    }
    double j = 0.5 * (comp[0][0] + comp[1][0]);
    double g = 0.5 * (comp[0][1] + comp[1][1]);
    rep.conditional = j / g;
    rep.marginal = 0.5 * (comp[0][2] + comp[1][2]);
    rep.ceiling = rep.marginal;
    rep.witness = rep.conditional > rep.ceiling;  // no error bars: indicative
    return rep;
}

// ---- profiles and localization ----

ProfileResult interface_profile(const Box& box, const BoundaryCondition& bc,
                                const ModelParams& params,
                                const RunOptions& opts, bool split_x) {
    if (params.q != 2)
        throw std::invalid_argument("interface_profile: q = 2 only");
    const int d = box.dimension();
    const int axis = d - 1;

    std::vector<Observable> obs;
    std::vector<int> layers;
    for (int zl = box.lo(axis); zl <= box.hi(axis); ++zl) layers.push_back(zl);

    // per-layer mean +-1 spin
    std::vector<std::vector<std::int32_t>> layer_sites(layers.size());
    for (std::int32_t i = 0; i < box.interior_count(); ++i) {
        int zl = box.interior_coord(i)[axis];
        layer_sites[static_cast<std::size_t>(zl - box.lo(axis))].push_back(i);
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        obs.push_back(Observable{
            "layer_" + std::to_string(layers[l]),
            [sites = layer_sites[l]](const SpinConfig& s) {
                double acc = 0;
                for (auto i : sites) acc += s.value(i) == 2 ? 1.0 : -1.0;
                return acc / static_cast<double>(sites.size());
            }});
    }
    std::size_t n_layer_obs = obs.size();

    // split profiles for the one-step condition
    std::size_t n_half_obs = 0;
    if (split_x) {
        for (int half = 0; half < 2; ++half) {
            for (std::size_t l = 0; l < layers.size(); ++l) {
                std::vector<std::int32_t> sites;
                for (auto i : layer_sites[l]) {
                    bool right = box.interior_coord(i)[0] >= 0;
                    if ((half == 1) == right) sites.push_back(i);
                }
                if (sites.empty()) continue;
                obs.push_back(Observable{
                    (half ? "x+|layer_" : "x-|layer_") +
                        std::to_string(layers[l]),
                    [sites](const SpinConfig& s) {
                        double acc = 0;
                        for (auto i : sites)
                            acc += s.value(i) == 2 ? 1.0 : -1.0;
                        return acc / static_cast<double>(sites.size());
                    }});
                ++n_half_obs;
            }
        }
    }

    // column height fields: h and h^2 per column
    std::vector<std::vector<int>> columns;
    std::vector<std::vector<std::int32_t>> col_sites;
    {
        std::map<std::vector<int>, std::vector<std::int32_t>> by_col;
        for (std::int32_t i = 0; i < box.interior_count(); ++i) {
            auto c = box.interior_coord(i);
            std::vector<int> key(c.begin(), c.end() - 1);
            by_col[key].push_back(i);
        }
        for (auto& [key, sites] : by_col) {
            columns.push_back(key);
            col_sites.push_back(sites);
        }
    }
    std::size_t height_base = obs.size();
    for (std::size_t k = 0; k < columns.size(); ++k) {
        auto height = [sites = col_sites[k], axis, &box](const SpinConfig& s) {
            double h = 0;
            for (auto i : sites) {
                int zl = box.interior_coord(i)[axis];
                if (zl >= 0 && s.value(i) == 1) h += 1.0;
                if (zl < 0 && s.value(i) == 2) h -= 1.0;
            }
            return h;
        };
        std::string name = "h";
        for (int c : columns[k]) name += "_" + std::to_string(c);
        obs.push_back(Observable{name, height});
        obs.push_back(Observable{name + "^2", [height](const SpinConfig& s) {
                                     double h = height(s);
                                     return h * h;
                                 }});
    }

    auto run = run_experiment(SamplerKind::SwendsenWang, box, bc, params, obs,
                              opts);
    ProfileResult out;
    out.profile.layer = layers;
    out.profile.meta = {{"beta", params.beta}, {"box", box_to_json(box)}};
    for (std::size_t l = 0; l < layers.size(); ++l) {
        out.profile.mean.push_back(run.estimates[l].mean);
        out.profile.stderr_mean.push_back(run.estimates[l].stderr_of_mean);
    }
    if (split_x) {
        std::size_t idx = n_layer_obs;
        for (int half = 0; half < 2; ++half) {
            MagnetizationProfile prof;
            prof.meta = {{"half", half ? "x>=0" : "x<0"}};
            while (idx < n_layer_obs + n_half_obs &&
                   (run.estimates[idx].name[1] == (half ? '+' : '-'))) {
                prof.layer.push_back(std::stoi(
                    run.estimates[idx].name.substr(9)));  // after "x?|layer_"
                prof.mean.push_back(run.estimates[idx].mean);
                prof.stderr_mean.push_back(run.estimates[idx].stderr_of_mean);
                ++idx;
            }
            out.half_profiles.push_back(std::move(prof));
        }
    }
    out.heights.column = columns;
    out.heights.meta = out.profile.meta;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        double mh = run.estimates[height_base + 2 * k].mean;
        double mh2 = run.estimates[height_base + 2 * k + 1].mean;
        out.heights.mean_h.push_back(mh);
        out.heights.var_h.push_back(std::max(0.0, mh2 - mh * mh));
        double se_h2 = run.estimates[height_base + 2 * k + 1].stderr_of_mean;
        double se_h = run.estimates[height_base + 2 * k].stderr_of_mean;
        out.heights.stderr_var.push_back(
            std::sqrt(se_h2 * se_h2 + 4 * mh * mh * se_h * se_h));
    }
    out.final_configs = std::move(run.final_configs);
    return out;
}

LocalizationTable localization_scan(int dimension, double beta,
                                    const std::vector<int>& sizes,
                                    std::uint64_t seed, std::int64_t n_sweeps,
                                    int n_chains) {
    if (dimension != 2 && dimension != 3)
        throw std::invalid_argument("localization_scan: d in {2,3}");
    LocalizationTable table;
    table.dimension = dimension;
    table.beta = beta;
    for (int n : sizes) {
        auto box = centered_box(
            std::vector<int>(static_cast<std::size_t>(dimension), n));
        auto bc = BoundaryCondition::dobrushin(box, dimension - 1, 0, 2, 1);
        ModelParams params(2, beta);
        // central column height observable
        std::vector<std::int32_t> sites;
        for (std::int32_t i = 0; i < box.interior_count(); ++i) {
            auto c = box.interior_coord(i);
            bool central = true;
            for (int k = 0; k + 1 < dimension; ++k) central &= (c[k] == 0);
            if (central) sites.push_back(i);
        }
        const int axis = dimension - 1;
        Observable h{"h_center", [sites, axis, &box](const SpinConfig& s) {
                         double acc = 0;
                         for (auto i : sites) {
                             int zl = box.interior_coord(i)[axis];
                             if (zl >= 0 && s.value(i) == 1) acc += 1.0;
                             if (zl < 0 && s.value(i) == 2) acc -= 1.0;
                         }
                         return acc;
                     }};
        Observable h2{"h2", [&h](const SpinConfig& s) {
                          double v = h.fn(s);
                          return v * v;
                      }};
        std::array<Observable, 2> obs{h, h2};
        RunOptions opts;
        opts.n_sweeps = n_sweeps;
        opts.n_chains = n_chains;
        opts.seed = seed + static_cast<std::uint64_t>(n);
        auto run = run_experiment(SamplerKind::SwendsenWang, box, bc, params,
                                  obs, opts);
        LocalizationRow row;
        row.size = n;
        double mh = run.estimates[0].mean, mh2 = run.estimates[1].mean;
        row.var_h = std::max(0.0, mh2 - mh * mh);
        double se_h = run.estimates[0].stderr_of_mean;
        double se_h2 = run.estimates[1].stderr_of_mean;
        row.stderr_var = std::sqrt(se_h2 * se_h2 + 4 * mh * mh * se_h * se_h);
        table.rows.push_back(row);
    }
    return table;
}

void write_profile_csv(const std::string& path, const ProfileResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "kind,key,layer,mean,stderr\n";
    char buf[64];
    auto emit = [&](const std::string& kind, const std::string& key, int layer,
                    double mean, double se) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", mean, se);
        out << kind << "," << key << "," << layer << "," << buf << "\n";
    };
    for (std::size_t l = 0; l < result.profile.layer.size(); ++l)
        emit("profile", "all", result.profile.layer[l], result.profile.mean[l],
             result.profile.stderr_mean[l]);
    for (const auto& hp : result.half_profiles)
        for (std::size_t l = 0; l < hp.layer.size(); ++l)
            emit("profile", hp.meta.value("half", "?"), hp.layer[l],
                 hp.mean[l], hp.stderr_mean[l]);
    for (std::size_t k = 0; k < result.heights.column.size(); ++k) {
        std::string key;
        for (int c : result.heights.column[k])
            key += (key.empty() ? "" : ";") + std::to_string(c);
        emit("height_mean", key, 0, result.heights.mean_h[k], 0.0);
        emit("height_var", key, 0, result.heights.var_h[k],
             result.heights.stderr_var[k]);
    }
}

void write_estimates_csv(const std::string& path,
                         std::span<const Estimate> estimates) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "name,mean,stderr,n_samples,tau_int,seed\n";
    char buf[128];
    for (const auto& e : estimates) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", e.mean,
                      e.stderr_of_mean);
        out << e.name << "," << buf << "," << e.n_samples << "," << e.tau_int
            << "," << e.seed << "\n";
    }
}

}  // namespace gibbslab
