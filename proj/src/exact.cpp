#include "gibbslab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "gibbslab/rng.hpp"

namespace gibbslab {

// ---- prebuilt events ----

Event event_site_color(const Box& box, std::span<const int> coord, int color) {
    std::int32_t idx = box.require_interior(coord);
    std::string name = "sigma";
    for (int c : coord) name += "_" + std::to_string(c);
    name += "=" + std::to_string(color);
    return Event{name, [idx, color](const SpinConfig& s) {
                     return s.value(idx) == color;
                 }};
}

Event event_all_color(const Box& box,
                      const std::vector<std::vector<int>>& coords, int color) {
    std::vector<std::int32_t> idx;
    idx.reserve(coords.size());
    for (const auto& c : coords) idx.push_back(box.require_interior(c));
    std::string name =
        "all" + std::to_string(coords.size()) + "=" + std::to_string(color);
    return Event{name, [idx, color](const SpinConfig& s) {
                     for (auto i : idx)
                         if (s.value(i) != color) return false;
                     return true;
                 }};
}

Event event_full() {
    return Event{"full", [](const SpinConfig&) { return true; }};
}

Event event_and(Event a, Event b) {
    return Event{a.name + " & " + b.name,
                 [pa = std::move(a.pred), pb = std::move(b.pred)](
                     const SpinConfig& s) { return pa(s) && pb(s); }};
}

Event event_block_majority(const Box& box, std::span<const int> center, int m,
                           int sign) {
    if (m < 1 || m % 2 == 0)
        throw std::invalid_argument("block majority: side must be odd");
    if (sign != +1 && sign != -1)
        throw std::invalid_argument("block majority: sign must be +-1");
    // gather the block's interior indices
    std::vector<std::int32_t> idx;
    int d = box.dimension();
    std::vector<int> c(center.begin(), center.end());
    int half = (m - 1) / 2;
    std::vector<int> off(d, -half);
    for (;;) {
        std::vector<int> site(d);
        for (int k = 0; k < d; ++k) site[k] = c[k] + off[k];
        idx.push_back(box.require_interior(site));
        int k = d - 1;
        while (k >= 0 && off[k] == half) {
            off[k] = -half;
            --k;
        }
        if (k < 0) break;
        ++off[k];
    }
    std::string name = "majority_m" + std::to_string(m) + "_at";
    for (int x : c) name += "_" + std::to_string(x);
    name += (sign > 0 ? "=+1" : "=-1");
    return Event{name, [idx, sign](const SpinConfig& s) {
                     int plus = 0;
                     for (auto i : idx) plus += (s.value(i) == 2) ? 1 : -1;
                     return sign > 0 ? plus > 0 : plus < 0;
                 }};
}

// ---- Gray-code enumeration ----

// Modular base-q Gray code: gray_j = (d_j - d_{j-1}) mod q with d_{-1} = 0
// and position 0 most significant. Incrementing the plain counter changes
// exactly one gray digit, by +1 mod q, at the carry-stop position: the
// digits below it roll q-1 -> 0 in both d_j and d_{j-1}, which cancels.
void decode_gray_state(int q, std::int64_t rank, std::span<std::uint8_t> digits,
                       std::span<std::uint8_t> gray) {
    int n = static_cast<int>(digits.size());
    std::int64_t r = rank;
    for (int j = n - 1; j >= 0; --j) {
        digits[j] = static_cast<std::uint8_t>(r % q);
        r /= q;
    }
    for (int j = 0; j < n; ++j) {
        int above = j == 0 ? 0 : digits[j - 1];
        gray[j] = static_cast<std::uint8_t>((digits[j] - above + q) % q);
    }
}

void for_each_config(
    const Box& box, const BoundaryCondition& bc, int q,
    std::span<const std::int32_t> free_sites, SpinConfig& cfg,
    std::int64_t first, std::int64_t last,
    const std::function<void(const SpinConfig&, std::int64_t)>& visit) {
    const int n = static_cast<int>(free_sites.size());
    std::vector<std::uint8_t> digit(n), gray(n);
    decode_gray_state(q, first, digit, gray);

    for (int j = 0; j < n; ++j) cfg.set(free_sites[j], gray[j] + 1);
    std::int64_t agreements = agreement_count(box, bc, cfg);

    for (std::int64_t rank = first; rank < last; ++rank) {
        visit(cfg, agreements);
        if (rank + 1 == last) break;
        // advance the plain counter to find the carry-stop position
        int t = n - 1;
        while (digit[t] == q - 1) {
            digit[t] = 0;
            --t;
        }
        digit[t] += 1;
        int old_color = gray[t] + 1;
        gray[t] = static_cast<std::uint8_t>((gray[t] + 1) % q);
        int new_color = gray[t] + 1;

        std::int32_t site = free_sites[t];
        for (std::int32_t code : box.neighbors(site)) {
            int v = code >= 0 ? cfg.value(code)
                              : bc.value(Box::decode_boundary(code));
            if (v == 0) continue;
            agreements += (v == new_color) - (v == old_color);
        }
        cfg.set(site, new_color);
    }
}

namespace {

std::vector<std::int32_t> all_sites(const Box& box) {
    std::vector<std::int32_t> s(static_cast<std::size_t>(box.interior_count()));
    std::iota(s.begin(), s.end(), 0);
    return s;
}

std::int64_t total_bonds(const Box& box, const BoundaryCondition& bc) {
    std::int64_t b = static_cast<std::int64_t>(box.interior_bonds().size());
    for (auto& [i, bd] : box.boundary_bonds())
        if (bc.value(bd) != 0) ++b;
    return b;
}

std::int64_t require_states(const Box& box, int q, std::int64_t cap) {
    auto n = checked_pow(q, box.interior_count(), cap);
    if (!n)
        throw CapExceeded("state count q^|interior| = " + std::to_string(q) +
                          "^" + std::to_string(box.interior_count()) +
                          " exceeds cap " + std::to_string(cap));
    return *n;
}

struct HistogramSet {
    // counts[e][a]: configurations with agreement count a satisfying event e;
    // index n_events is the unconditional histogram.
    std::vector<std::vector<std::uint64_t>> counts;
    HistogramSet(std::size_t n_events, std::int64_t max_agree) {
        counts.assign(n_events + 1,
                      std::vector<std::uint64_t>(
                          static_cast<std::size_t>(max_agree) + 1, 0));
    }
    void merge(const HistogramSet& o) {
        for (std::size_t e = 0; e < counts.size(); ++e)
            for (std::size_t a = 0; a < counts[e].size(); ++a)
                counts[e][a] += o.counts[e][a];
    }
};

double histogram_lse(const std::vector<std::uint64_t>& counts, double beta) {
    LogSumExp lse;
    for (std::size_t a = 0; a < counts.size(); ++a)
        if (counts[a])
            lse.add(beta * static_cast<double>(a) +
                    std::log(static_cast<double>(counts[a])));
    return lse.value();
}

int pick_threads(int requested, std::int64_t n_states) {
    if (n_states < (std::int64_t{1} << 17)) return 1;
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    int t = requested > 0 ? requested : hw;
    std::int64_t capped = std::min<std::int64_t>(t, n_states / (1 << 14));
    return static_cast<int>(std::max<std::int64_t>(1, capped));
}

// Runs per-worker visitors over the configuration space, splitting the
// Gray counter range; one state per worker, folded by the caller in
// index order.
template <typename State>
void parallel_enumerate(const Box& box, const BoundaryCondition& bc, int q,
                        std::int64_t n_states, std::vector<State>& states,
                        const std::function<void(const SpinConfig&, std::int64_t,
                                                 State&)>& visit) {
    auto sites = all_sites(box);
    const int t = static_cast<int>(states.size());
    if (t == 1) {
        SpinConfig cfg(box);
        for_each_config(box, bc, q, sites, cfg, 0, n_states,
                        [&](const SpinConfig& c, std::int64_t agr) {
                            visit(c, agr, states[0]);
                        });
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::int64_t> cuts(static_cast<std::size_t>(t) + 1);
    for (int w = 0; w <= t; ++w) cuts[w] = n_states * w / t;
    for (int w = 0; w < t; ++w) {
        workers.emplace_back([&, w]() {
            SpinConfig cfg(box);
            for_each_config(box, bc, q, sites, cfg, cuts[w], cuts[w + 1],
                            [&](const SpinConfig& c, std::int64_t agr) {
                                visit(c, agr, states[w]);
                            });
        });
    }
    for (auto& th : workers) th.join();
}

}  // namespace

// ---- SpinMeasure ----

double SpinMeasure::prob(const Event& e) const {
    return probabilities({&e, 1})[0];
}

double SpinMeasure::conditional(const Event& target, const Event& given) const {
    Event both = event_and(target, given);
    std::array<Event, 2> ev{both, given};
    auto p = probabilities(ev);
    if (p[1] <= 0.0)
        throw std::invalid_argument("conditional: conditioning event " +
                                    given.name + " has probability 0");
    return p[0] / p[1];
}

// ---- ExactMeasure ----

ExactMeasure::ExactMeasure(std::shared_ptr<const Box> box,
                           std::shared_ptr<const BoundaryCondition> bc,
                           ModelParams params, EnumerationLimits limits)
    : box_(std::move(box)),
      bc_(std::move(bc)),
      params_(params),
      limits_(limits) {}

ExactMeasure ExactMeasure::enumerate(const Box& box,
                                     const BoundaryCondition& bc,
                                     const ModelParams& params,
                                     const EnumerationLimits& limits) {
    ExactMeasure m(std::make_shared<Box>(box),
                   std::make_shared<BoundaryCondition>(bc), params, limits);
    m.n_states_ = require_states(box, params.q, limits.max_states);
    m.max_agreements_ = total_bonds(box, bc);

    int t = pick_threads(limits.threads, m.n_states_);
    std::vector<HistogramSet> hs(static_cast<std::size_t>(t),
                                 HistogramSet(0, m.max_agreements_));
    parallel_enumerate<HistogramSet>(
        box, bc, params.q, m.n_states_, hs,
        [](const SpinConfig&, std::int64_t agr, HistogramSet& h) {
            ++h.counts[0][static_cast<std::size_t>(agr)];
        });
    for (int w = 1; w < t; ++w) hs[0].merge(hs[w]);
    m.log_z_ = histogram_lse(hs[0].counts[0], params.beta);
    return m;
}

std::vector<double> ExactMeasure::probabilities(
    std::span<const Event> events) const {
    int t = pick_threads(limits_.threads, n_states_);
    std::vector<HistogramSet> hs(static_cast<std::size_t>(t),
                                 HistogramSet(events.size(), max_agreements_));
    parallel_enumerate<HistogramSet>(
        *box_, *bc_, params_.q, n_states_, hs,
        [&events](const SpinConfig& cfg, std::int64_t agr, HistogramSet& h) {
            auto a = static_cast<std::size_t>(agr);
            for (std::size_t e = 0; e < events.size(); ++e)
                if (events[e].pred(cfg)) ++h.counts[e][a];
            ++h.counts[events.size()][a];
        });
    for (int w = 1; w < t; ++w) hs[0].merge(hs[w]);
    double log_z = histogram_lse(hs[0].counts[events.size()], params_.beta);
    std::vector<double> out(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) {
        double le = histogram_lse(hs[0].counts[e], params_.beta);
        out[e] = std::isinf(le) ? 0.0 : std::exp(le - log_z);
    }
    return out;
}

std::vector<double> ExactMeasure::expectations(
    std::span<const Observable> obs) const {
    struct SumSet {
        std::vector<std::vector<KahanSum>> sums;
        std::vector<std::uint64_t> counts;
    };
    int t = pick_threads(limits_.threads, n_states_);
    std::vector<SumSet> ss(static_cast<std::size_t>(t));
    for (auto& s : ss) {
        s.sums.assign(obs.size(),
                      std::vector<KahanSum>(
                          static_cast<std::size_t>(max_agreements_) + 1));
        s.counts.assign(static_cast<std::size_t>(max_agreements_) + 1, 0);
    }
    parallel_enumerate<SumSet>(
        *box_, *bc_, params_.q, n_states_, ss,
        [&obs](const SpinConfig& cfg, std::int64_t agr, SumSet& s) {
            auto a = static_cast<std::size_t>(agr);
            for (std::size_t o = 0; o < obs.size(); ++o)
                s.sums[o][a].add(obs[o].fn(cfg));
            ++s.counts[a];
        });
    for (int w = 1; w < t; ++w) {
        for (std::size_t o = 0; o < obs.size(); ++o)
            for (std::size_t a = 0; a <= static_cast<std::size_t>(max_agreements_); ++a)
                ss[0].sums[o][a].add(ss[w].sums[o][a].value());
        for (std::size_t a = 0; a <= static_cast<std::size_t>(max_agreements_); ++a)
            ss[0].counts[a] += ss[w].counts[a];
    }
    double log_z = histogram_lse(ss[0].counts, params_.beta);
    std::vector<double> out(obs.size(), 0.0);
    for (std::size_t o = 0; o < obs.size(); ++o) {
        KahanSum acc;
        for (std::size_t a = 0; a <= static_cast<std::size_t>(max_agreements_); ++a) {
            double s = ss[0].sums[o][a].value();
            if (s != 0.0)
                acc.add(s * std::exp(params_.beta * static_cast<double>(a) -
                                     log_z));
        }
        out[o] = acc.value();
    }
    return out;
}

std::vector<double> ExactMeasure::site_marginals() const {
    const int q = params_.q;
    const std::int32_t n = box_->interior_count();
    struct MarginalSet {
        // hist[(site*q + c) * (B+1) + a]
        std::vector<std::uint64_t> hist;
        std::vector<std::uint64_t> total;
    };
    int t = pick_threads(limits_.threads, n_states_);
    std::size_t bins = static_cast<std::size_t>(max_agreements_) + 1;
    std::vector<MarginalSet> ms(static_cast<std::size_t>(t));
    for (auto& m : ms) {
        m.hist.assign(static_cast<std::size_t>(n) * q * bins, 0);
        m.total.assign(bins, 0);
    }
    parallel_enumerate<MarginalSet>(
        *box_, *bc_, params_.q, n_states_, ms,
        [n, q, bins](const SpinConfig& cfg, std::int64_t agr, MarginalSet& m) {
            auto a = static_cast<std::size_t>(agr);
            ++m.total[a];
            for (std::int32_t i = 0; i < n; ++i) {
                std::size_t c = static_cast<std::size_t>(cfg.value(i)) - 1;
                ++m.hist[(static_cast<std::size_t>(i) * q + c) * bins + a];
            }
        });
    for (int w = 1; w < t; ++w) {
        for (std::size_t k = 0; k < ms[0].hist.size(); ++k)
            ms[0].hist[k] += ms[w].hist[k];
        for (std::size_t a = 0; a < bins; ++a) ms[0].total[a] += ms[w].total[a];
    }
    double log_z = histogram_lse(ms[0].total, params_.beta);
    std::vector<double> out(static_cast<std::size_t>(n) * q, 0.0);
    std::vector<std::uint64_t> tmp(bins);
    for (std::size_t sc = 0; sc < out.size(); ++sc) {
        std::copy_n(ms[0].hist.begin() + sc * bins, bins, tmp.begin());
        double le = histogram_lse(tmp, params_.beta);
        out[sc] = std::isinf(le) ? 0.0 : std::exp(le - log_z);
    }
    return out;
}

std::vector<double> ExactMeasure::full_distribution() const {
    // plain (non-Gray) indexing: site 0 most significant
    if (n_states_ > (std::int64_t{1} << 22))
        throw CapExceeded("full_distribution: " + std::to_string(n_states_) +
                          " states exceed the dense-table cap 2^22");
    const int q = params_.q;
    const std::int32_t n = box_->interior_count();
    std::vector<double> table(static_cast<std::size_t>(n_states_));
    auto sites = all_sites(*box_);
    SpinConfig cfg(*box_);
    std::vector<std::int64_t> place(static_cast<std::size_t>(n));
    std::int64_t a = 1;
    for (std::int32_t j = n - 1; j >= 0; --j) {
        place[j] = a;
        a *= q;
    }
    for_each_config(*box_, *bc_, q, sites, cfg, 0, n_states_,
                    [&](const SpinConfig& c, std::int64_t agr) {
                        std::int64_t idx = 0;
                        for (std::int32_t j = 0; j < n; ++j)
                            idx += place[j] * (c.value(j) - 1);
                        table[static_cast<std::size_t>(idx)] =
                            std::exp(params_.beta * static_cast<double>(agr) -
                                     log_z_);
                    });
    return table;
}

// ---- MixtureMeasure ----

MixtureMeasure::MixtureMeasure(
    std::vector<double> weights,
    std::vector<std::shared_ptr<const ExactMeasure>> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
    if (weights_.empty() || weights_.size() != components_.size())
        throw std::invalid_argument("mixture: weights/components mismatch");
    double total = 0;
    for (double w : weights_) {
        if (w < 0) throw std::invalid_argument("mixture: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("mixture: weights must sum to 1");
    for (auto& c : components_) {
        if (!c->box().same_shape(components_[0]->box()) ||
            !(c->params() == components_[0]->params()))
            throw std::invalid_argument(
                "mixture: components must share box and parameters");
    }
}

std::vector<double> MixtureMeasure::probabilities(
    std::span<const Event> events) const {
    std::vector<double> out(events.size(), 0.0);
    for (std::size_t k = 0; k < components_.size(); ++k) {
        auto p = components_[k]->probabilities(events);
        for (std::size_t e = 0; e < out.size(); ++e)
            out[e] += weights_[k] * p[e];
    }
    return out;
}

std::vector<double> MixtureMeasure::expectations(
    std::span<const Observable> obs) const {
    std::vector<double> out(obs.size(), 0.0);
    for (std::size_t k = 0; k < components_.size(); ++k) {
        auto p = components_[k]->expectations(obs);
        for (std::size_t e = 0; e < out.size(); ++e)
            out[e] += weights_[k] * p[e];
    }
    return out;
}

MixtureMeasure dobrushin_mixture(const Box& box, const ModelParams& params,
                                 int axis, int height, int color_a, int color_b,
                                 const EnumerationLimits& limits) {
    auto plus = std::make_shared<ExactMeasure>(ExactMeasure::enumerate(
        box, BoundaryCondition::dobrushin(box, axis, height, color_a, color_b),
        params, limits));
    auto minus = std::make_shared<ExactMeasure>(ExactMeasure::enumerate(
        box, BoundaryCondition::dobrushin(box, axis, height, color_b, color_a),
        params, limits));
    return MixtureMeasure({0.5, 0.5}, {plus, minus});
}

// ---- DLR consistency ----

double dlr_check(const Box& box, const BoundaryCondition& bc,
                 const ModelParams& params, const Box& subbox,
                 const EnumerationLimits& limits, int eta_samples,
                 std::uint64_t seed) {
    const int q = params.q;
    require_states(box, q, limits.max_states);

    // split interior sites into subbox sites and outer sites
    std::vector<std::int32_t> sub_sites, out_sites;
    std::vector<std::int32_t> sub_local;  // subbox-local index per sub site
    for (std::int32_t i = 0; i < box.interior_count(); ++i) {
        auto c = box.interior_coord(i);
        auto si = subbox.interior_index(c);
        if (si) {
            sub_sites.push_back(i);
            sub_local.push_back(*si);
        } else {
            out_sites.push_back(i);
        }
    }
    if (static_cast<std::int32_t>(sub_sites.size()) != subbox.interior_count())
        throw std::invalid_argument(
            "dlr_check: subbox interior must lie inside the box interior");

    auto n_sub = checked_pow(q, static_cast<int>(sub_sites.size()),
                             limits.max_states);
    if (!n_sub) throw CapExceeded("dlr_check: subbox too large");

    // subbox boundary sites resolve to either box-interior or box-boundary
    struct BdrySource {
        bool from_interior;
        std::int32_t index;  // box interior index or box boundary index
    };
    std::vector<BdrySource> sources;
    for (std::int32_t b = 0; b < subbox.boundary_count(); ++b) {
        auto c = subbox.boundary_coord(b);
        if (auto ii = box.interior_index(c)) {
            sources.push_back({true, *ii});
        } else if (auto bi = box.boundary_index(c)) {
            sources.push_back({false, *bi});
        } else {
            throw std::invalid_argument(
                "dlr_check: subbox boundary leaves the fattened box");
        }
    }

    auto n_out_opt = checked_pow(q, static_cast<int>(out_sites.size()),
                                 std::int64_t{1} << 16);
    bool exhaustive = n_out_opt.has_value();
    std::int64_t n_eta = exhaustive ? *n_out_opt : eta_samples;

    SpinConfig cfg(box);
    PhiloxRng rng(seed, 0x0d15);
    double worst = 0.0;
    std::vector<double> cond_weights(static_cast<std::size_t>(*n_sub));

    auto run_eta = [&](SpinConfig& full_cfg) {
        // conditional law of the subbox spins given the outer configuration
        LogSumExp lse;
        for_each_config(box, bc, q, sub_sites, full_cfg, 0, *n_sub,
                        [&](const SpinConfig&, std::int64_t agr) {
                            lse.add(params.beta * static_cast<double>(agr));
                        });
        double log_norm = lse.value();
        std::vector<std::int64_t> place(sub_sites.size());
        std::int64_t pl = 1;
        for (std::size_t j = sub_sites.size(); j-- > 0;) {
            place[j] = pl;
            pl *= q;
        }
        std::fill(cond_weights.begin(), cond_weights.end(), 0.0);
        for_each_config(
            box, bc, q, sub_sites, full_cfg, 0, *n_sub,
            [&](const SpinConfig& c, std::int64_t agr) {
                std::int64_t idx = 0;
                for (std::size_t j = 0; j < sub_sites.size(); ++j)
                    idx += place[j] * (c.value(sub_sites[j]) - 1);
                cond_weights[static_cast<std::size_t>(idx)] = std::exp(
                    params.beta * static_cast<double>(agr) - log_norm);
            });

        // the eta-induced boundary condition on the subbox
        std::vector<std::uint8_t> induced(sources.size());
        for (std::size_t b = 0; b < sources.size(); ++b)
            induced[b] = static_cast<std::uint8_t>(
                sources[b].from_interior
                    ? full_cfg.value(sources[b].index)
                    : bc.value(sources[b].index));
        auto spec = ExactMeasure::enumerate(
            subbox, BoundaryCondition::from_values(subbox, std::move(induced)),
            params, limits);
        auto spec_table = spec.full_distribution();

        // cond_weights indexes sub sites in box order; remap via sub_local
        // into the subbox's own site order.
        std::vector<std::int64_t> sub_place(sub_sites.size());
        std::int64_t pl2 = 1;
        for (std::int32_t j = subbox.interior_count() - 1; j >= 0; --j) {
            sub_place[static_cast<std::size_t>(j)] = pl2;
            pl2 *= q;
        }
        double tv = 0.0;
        for (std::int64_t idx = 0; idx < *n_sub; ++idx) {
            std::int64_t rem = idx;
            std::int64_t spec_idx = 0;
            for (std::size_t j = 0; j < sub_sites.size(); ++j) {
                std::int64_t p = place[j];
                int dig = static_cast<int>(rem / p);
                rem %= p;
                spec_idx += sub_place[static_cast<std::size_t>(sub_local[j])] * dig;
            }
            tv += std::abs(cond_weights[static_cast<std::size_t>(idx)] -
                           spec_table[static_cast<std::size_t>(spec_idx)]);
        }
        worst = std::max(worst, 0.5 * tv);
    };

    if (exhaustive) {
        std::int64_t n_out = *n_out_opt;
        for (std::int64_t e = 0; e < n_eta && e < n_out; ++e) {
            std::int64_t rem = e;
            for (std::size_t j = out_sites.size(); j-- > 0;) {
                cfg.set(out_sites[j], static_cast<int>(rem % q) + 1);
                rem /= q;
            }
            run_eta(cfg);
        }
    } else {
        for (int e = 0; e < eta_samples; ++e) {
            for (auto s : out_sites)
                cfg.set(s, static_cast<int>(rng.uniform_below(
                                static_cast<std::uint32_t>(q))) + 1);
            run_eta(cfg);
        }
    }
    return worst;
}

// ---- transfer matrix ----

namespace {

struct TransferSetup {
    int axis;
    int n_layers;
    std::int64_t n_states;           // q^(cross-section)
    int cs_sites;                    // sites per layer
    std::vector<std::int32_t> layer_site;  // [layer * cs_sites + k] interior idx
    std::vector<std::uint8_t> state_spin;  // [state * cs_sites + k] color
};

TransferSetup transfer_setup(const Box& box, int axis, int q,
                             const TransferLimits& limits) {
    if (axis < 0 || axis >= box.dimension())
        throw std::invalid_argument("transfer matrix: axis out of range");
    TransferSetup ts;
    ts.axis = axis;
    ts.n_layers = box.extent(axis);
    std::int64_t cs = box.interior_count() / ts.n_layers;
    ts.cs_sites = static_cast<int>(cs);
    auto st = checked_pow(q, ts.cs_sites, limits.max_cross_states);
    if (!st)
        throw CapExceeded(
            "transfer matrix: q^(cross-section) = " + std::to_string(q) + "^" +
            std::to_string(ts.cs_sites) + " exceeds cap " +
            std::to_string(limits.max_cross_states));
    ts.n_states = *st;

    // deterministic cross-section ordering: interior order of layer lo
    ts.layer_site.resize(static_cast<std::size_t>(ts.n_layers) * ts.cs_sites);
    std::vector<std::int32_t> first_layer;
    for (std::int32_t i = 0; i < box.interior_count(); ++i)
        if (box.interior_coord(i)[axis] == box.lo(axis))
            first_layer.push_back(i);
    for (int l = 0; l < ts.n_layers; ++l) {
        for (int k = 0; k < ts.cs_sites; ++k) {
            auto c0 = box.interior_coord(first_layer[k]);
            std::vector<int> c(c0.begin(), c0.end());
            c[axis] = box.lo(axis) + l;
            ts.layer_site[static_cast<std::size_t>(l) * ts.cs_sites + k] =
                box.require_interior(c);
        }
    }

    ts.state_spin.resize(static_cast<std::size_t>(ts.n_states) * ts.cs_sites);
    for (std::int64_t s = 0; s < ts.n_states; ++s) {
        std::int64_t rem = s;
        for (int k = ts.cs_sites - 1; k >= 0; --k) {
            ts.state_spin[static_cast<std::size_t>(s) * ts.cs_sites + k] =
                static_cast<std::uint8_t>(rem % q + 1);
            rem /= q;
        }
    }
    return ts;
}

}  // namespace

double transfer_matrix_log_weight_sum(
    const Box& box, const BoundaryCondition& bc, const ModelParams& params,
    int axis,
    const std::vector<std::pair<std::vector<int>, int>>& site_colors,
    const TransferLimits& limits) {
    const int q = params.q;
    const double beta = params.beta;
    auto ts = transfer_setup(box, axis, q, limits);
    const int n_cs = ts.cs_sites;
    const std::int64_t S = ts.n_states;

    // cross-section adjacency (bonds between layer positions), mapped from
    // interior bonds of the first layer
    std::vector<std::int32_t> pos_of_site(
        static_cast<std::size_t>(box.interior_count()), -1);
    for (int l = 0; l < ts.n_layers; ++l)
        for (int k = 0; k < n_cs; ++k)
            pos_of_site[ts.layer_site[static_cast<std::size_t>(l) * n_cs + k]] =
                k;
    std::vector<std::pair<int, int>> cs_bonds;
    for (auto& [i, j] : box.interior_bonds()) {
        auto ci = box.interior_coord(i), cj = box.interior_coord(j);
        if (ci[axis] == cj[axis] && ci[axis] == box.lo(axis))
            cs_bonds.emplace_back(pos_of_site[i], pos_of_site[j]);
    }

    // intra-layer agreement per state
    std::vector<int> intra(static_cast<std::size_t>(S), 0);
    for (std::int64_t s = 0; s < S; ++s) {
        const std::uint8_t* sp = &ts.state_spin[static_cast<std::size_t>(s) * n_cs];
        int a = 0;
        for (auto& [u, v] : cs_bonds) a += sp[u] == sp[v];
        intra[static_cast<std::size_t>(s)] = a;
    }

    // inter-layer agreement matrix
    std::vector<std::uint8_t> pair_agree(static_cast<std::size_t>(S) * S);
    for (std::int64_t s = 0; s < S; ++s) {
        const std::uint8_t* sp = &ts.state_spin[static_cast<std::size_t>(s) * n_cs];
        for (std::int64_t s2 = 0; s2 < S; ++s2) {
            const std::uint8_t* sp2 =
                &ts.state_spin[static_cast<std::size_t>(s2) * n_cs];
            int a = 0;
            for (int k = 0; k < n_cs; ++k) a += sp[k] == sp2[k];
            pair_agree[static_cast<std::size_t>(s) * S + s2] =
                static_cast<std::uint8_t>(a);
        }
    }

    // per-layer boundary agreements: boundary bonds whose interior endpoint
    // sits in the layer, evaluated against the actual bc values
    std::vector<std::vector<std::pair<int, int>>> layer_bdry(
        static_cast<std::size_t>(ts.n_layers));  // (cs position, bc color)
    std::vector<int> layer_of_site(
        static_cast<std::size_t>(box.interior_count()));
    for (int l = 0; l < ts.n_layers; ++l)
        for (int k = 0; k < n_cs; ++k)
            layer_of_site[ts.layer_site[static_cast<std::size_t>(l) * n_cs + k]] =
                l;
    for (auto& [i, b] : box.boundary_bonds()) {
        int w = bc.value(b);
        if (w == 0) continue;
        layer_bdry[static_cast<std::size_t>(layer_of_site[i])].emplace_back(
            pos_of_site[i], w);
    }

    // constraints per layer: (cs position, required color)
    std::vector<std::vector<std::pair<int, int>>> layer_constraints(
        static_cast<std::size_t>(ts.n_layers));
    for (auto& [coord, color] : site_colors) {
        std::int32_t i = box.require_interior(coord);
        if (color < 1 || color > q)
            throw std::invalid_argument("transfer constraint color out of range");
        layer_constraints[static_cast<std::size_t>(layer_of_site[i])]
            .emplace_back(pos_of_site[i], color);
    }

    auto layer_log_diag = [&](int l, std::vector<double>& d) {
        for (std::int64_t s = 0; s < S; ++s) {
            const std::uint8_t* sp =
                &ts.state_spin[static_cast<std::size_t>(s) * n_cs];
            bool ok = true;
            for (auto& [k, c] : layer_constraints[static_cast<std::size_t>(l)])
                if (sp[k] != c) {
                    ok = false;
                    break;
                }
            if (!ok) {
                d[static_cast<std::size_t>(s)] =
                    -std::numeric_limits<double>::infinity();
                continue;
            }
            int a = intra[static_cast<std::size_t>(s)];
            for (auto& [k, w] : layer_bdry[static_cast<std::size_t>(l)])
                a += sp[k] == w;
            d[static_cast<std::size_t>(s)] = beta * a;
        }
    };

    std::vector<double> v(static_cast<std::size_t>(S));
    layer_log_diag(0, v);
    std::vector<double> next(static_cast<std::size_t>(S));
    std::vector<double> diag(static_cast<std::size_t>(S));
    for (int l = 1; l < ts.n_layers; ++l) {
        layer_log_diag(l, diag);
        double shift = -std::numeric_limits<double>::infinity();
        for (double x : v) shift = std::max(shift, x);
        if (std::isinf(shift))
            return -std::numeric_limits<double>::infinity();
        for (std::int64_t s2 = 0; s2 < S; ++s2) {
            if (std::isinf(diag[static_cast<std::size_t>(s2)])) {
                next[static_cast<std::size_t>(s2)] =
                    -std::numeric_limits<double>::infinity();
                continue;
            }
            KahanSum acc;
            const std::uint8_t* col = &pair_agree[0];
            for (std::int64_t s = 0; s < S; ++s) {
                double lv = v[static_cast<std::size_t>(s)];
                if (std::isinf(lv)) continue;
                acc.add(std::exp(
                    lv - shift +
                    beta * col[static_cast<std::size_t>(s) * S + s2]));
            }
            next[static_cast<std::size_t>(s2)] =
                acc.value() > 0
                    ? shift + std::log(acc.value()) +
                          diag[static_cast<std::size_t>(s2)]
                    : -std::numeric_limits<double>::infinity();
        }
        std::swap(v, next);
    }
    LogSumExp lse;
    for (double x : v) lse.add(x);
    return lse.value();
}

double transfer_matrix_log_z(const Box& box, const BoundaryCondition& bc,
                             const ModelParams& params, int axis,
                             const TransferLimits& limits) {
    return transfer_matrix_log_weight_sum(box, bc, params, axis, {}, limits);
}

}  // namespace gibbslab
