#include "gibbslab/samplers.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <thread>

#include "gibbslab/stats.hpp"
#include "gibbslab/util.hpp"

namespace gibbslab {

SamplerKind sampler_from_name(const std::string& name) {
    if (name == "heatbath" || name == "heat-bath") return SamplerKind::HeatBath;
    if (name == "sw" || name == "swendsen-wang") return SamplerKind::SwendsenWang;
    if (name == "wolff") return SamplerKind::Wolff;
    throw std::invalid_argument("unknown sampler: " + name);
}

std::string sampler_name(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::HeatBath: return "heatbath";
        case SamplerKind::SwendsenWang: return "sw";
        case SamplerKind::Wolff: return "wolff";
    }
    return "?";
}

ChainState ChainState::random_init(const Box& box, const ModelParams& params,
                                   std::uint64_t seed, std::uint64_t stream) {
    ChainState st{SpinConfig(box), PhiloxRng(seed, stream), 0};
    for (std::int32_t i = 0; i < box.interior_count(); ++i)
        st.config.set(i, static_cast<int>(st.rng.uniform_below(
                             static_cast<std::uint32_t>(params.q))) + 1);
    return st;
}

void heat_bath_sweep(ChainState& state, const Box& box,
                     const BoundaryCondition& bc, const ModelParams& params) {
    const int q = params.q;
    const double beta = params.beta;
    std::vector<double> w(static_cast<std::size_t>(q));
    std::vector<int> neighbor_count(static_cast<std::size_t>(q));
    for (std::int32_t i = 0; i < box.interior_count(); ++i) {
        std::fill(neighbor_count.begin(), neighbor_count.end(), 0);
        for (std::int32_t code : box.neighbors(i)) {
            int v = code >= 0 ? state.config.value(code)
                              : bc.value(Box::decode_boundary(code));
            if (v != 0) ++neighbor_count[static_cast<std::size_t>(v - 1)];
        }
        int max_n = 0;
        for (int c = 0; c < q; ++c)
            max_n = std::max(max_n, neighbor_count[static_cast<std::size_t>(c)]);
        double total = 0;
        for (int c = 0; c < q; ++c) {
            w[static_cast<std::size_t>(c)] = std::exp(
                beta * (neighbor_count[static_cast<std::size_t>(c)] - max_n));
            total += w[static_cast<std::size_t>(c)];
        }
        double u = state.rng.next_double() * total;
        int chosen = q - 1;
        for (int c = 0; c < q; ++c) {
            u -= w[static_cast<std::size_t>(c)];
            if (u < 0) {
                chosen = c;
                break;
            }
        }
        state.config.set(i, chosen + 1);
    }
    ++state.sweeps_done;
}

void swendsen_wang_sweep(ChainState& state, const Box& box,
                         const BoundaryCondition& bc,
                         const ModelParams& params) {
    const int q = params.q;
    const double p = params.bond_probability();
    const std::int32_t n = box.interior_count();
    auto colors = bc.used_colors();
    const auto n_sup = static_cast<std::int32_t>(colors.size());

    thread_local UnionFind uf;
    uf.reset(n + n_sup);
    auto super_of = [&](int color) {
        for (std::int32_t k = 0; k < n_sup; ++k)
            if (colors[static_cast<std::size_t>(k)] == color) return n + k;
        return std::int32_t{-1};
    };

    // bond step: open equal-value bonds with probability p
    for (auto& [i, j] : box.interior_bonds())
        if (state.config.value(i) == state.config.value(j) &&
            state.rng.bernoulli(p))
            uf.unite(i, j);
    for (auto& [i, b] : box.boundary_bonds()) {
        int w = bc.value(b);
        if (w != 0 && state.config.value(i) == w && state.rng.bernoulli(p))
            uf.unite(i, super_of(w));
    }

    // wired color per root; a cluster can never carry two colors when the
    // starting configuration is consistent (bonds open only on equal values)
    std::vector<int> wired(static_cast<std::size_t>(n + n_sup), 0);
    for (std::int32_t k = 0; k < n_sup; ++k) {
        std::int32_t root = uf.find(n + k);
        int c = colors[static_cast<std::size_t>(k)];
        assert(wired[static_cast<std::size_t>(root)] == 0 ||
               wired[static_cast<std::size_t>(root)] == c);
        wired[static_cast<std::size_t>(root)] = c;
    }

    // cluster step: wired clusters keep their color, free clusters are
    // recolored uniformly; one draw per root, in site order
    std::vector<int> new_color(static_cast<std::size_t>(n + n_sup), 0);
    for (std::int32_t i = 0; i < n; ++i) {
        std::int32_t root = uf.find(i);
        int& c = new_color[static_cast<std::size_t>(root)];
        if (c == 0) {
            int w = wired[static_cast<std::size_t>(root)];
            if (w != 0) {
                assert(w == state.config.value(i));
                c = w;
            } else {
                c = static_cast<int>(state.rng.uniform_below(
                        static_cast<std::uint32_t>(q))) + 1;
            }
        }
        state.config.set(i, c);
    }
    ++state.sweeps_done;
}

void wolff_step(ChainState& state, const Box& box, const BoundaryCondition& bc,
                const ModelParams& params) {
    const int q = params.q;
    const double p = params.bond_probability();
    const std::int32_t n = box.interior_count();
    std::int32_t seed_site =
        static_cast<std::int32_t>(state.rng.uniform_below(
            static_cast<std::uint32_t>(n)));
    const int c0 = state.config.value(seed_site);

    thread_local std::vector<std::uint8_t> in_cluster;
    in_cluster.assign(static_cast<std::size_t>(n), 0);
    thread_local std::vector<std::int32_t> stack, members;
    stack.clear();
    members.clear();
    stack.push_back(seed_site);
    members.push_back(seed_site);
    in_cluster[static_cast<std::size_t>(seed_site)] = 1;
    bool touched_boundary = false;

    while (!stack.empty() && !touched_boundary) {
        std::int32_t s = stack.back();
        stack.pop_back();
        for (std::int32_t code : box.neighbors(s)) {
            if (code >= 0) {
                if (in_cluster[static_cast<std::size_t>(code)]) continue;
                if (state.config.value(code) != c0) continue;
                if (state.rng.bernoulli(p)) {
                    in_cluster[static_cast<std::size_t>(code)] = 1;
                    stack.push_back(code);
                    members.push_back(code);
                }
            } else {
                int w = bc.value(Box::decode_boundary(code));
                if (w == c0 && state.rng.bernoulli(p)) {
                    touched_boundary = true;  // reject the whole move
                    break;
                }
            }
        }
    }
    if (!touched_boundary) {
        int offset = 1 + static_cast<int>(state.rng.uniform_below(
                             static_cast<std::uint32_t>(q - 1)));
        int c_new = 1 + (c0 - 1 + offset) % q;
        for (auto s : members) state.config.set(s, c_new);
    }
}

void wolff_sweep(ChainState& state, const Box& box, const BoundaryCondition& bc,
                 const ModelParams& params) {
    for (std::int32_t k = 0; k < box.interior_count(); ++k)
        wolff_step(state, box, bc, params);
    ++state.sweeps_done;
}

void sweep(SamplerKind kind, ChainState& state, const Box& box,
           const BoundaryCondition& bc, const ModelParams& params) {
    switch (kind) {
        case SamplerKind::HeatBath: heat_bath_sweep(state, box, bc, params); break;
        case SamplerKind::SwendsenWang:
            swendsen_wang_sweep(state, box, bc, params);
            break;
        case SamplerKind::Wolff: wolff_sweep(state, box, bc, params); break;
    }
}

namespace {

struct ChainSeries {
    // per observable, per post-burn-in sweep
    std::vector<std::vector<double>> values;
    SpinConfig final_config;
};

ChainSeries run_chain(SamplerKind kind, const Box& box,
                      const BoundaryCondition& bc, const ModelParams& params,
                      std::span<const Observable> observables,
                      std::uint64_t seed, std::uint64_t stream,
                      std::int64_t burn_in, std::int64_t n_sweeps) {
    ChainState st = ChainState::random_init(box, params, seed, stream);
    for (std::int64_t s = 0; s < burn_in; ++s) sweep(kind, st, box, bc, params);
    ChainSeries out;
    out.values.assign(observables.size(), {});
    std::int64_t keep = n_sweeps - burn_in;
    for (auto& v : out.values) v.reserve(static_cast<std::size_t>(keep));
    for (std::int64_t s = 0; s < keep; ++s) {
        sweep(kind, st, box, bc, params);
        for (std::size_t o = 0; o < observables.size(); ++o)
            out.values[o].push_back(observables[o].fn(st.config));
    }
    out.final_config = st.config;
    return out;
}

}  // namespace

RunResult run_experiment(SamplerKind kind, const Box& box,
                         const BoundaryCondition& bc, const ModelParams& params,
                         std::span<const Observable> observables,
                         const RunOptions& opts) {
    if (opts.n_sweeps < 1 || opts.n_chains < 1)
        throw std::invalid_argument("run_experiment: need sweeps, chains >= 1");

    std::int64_t burn_in = opts.burn_in;
    if (burn_in < 0) {
        // pilot on a dedicated stream to estimate the autocorrelation time
        std::int64_t pilot_len = std::min<std::int64_t>(2000, opts.n_sweeps);
        double tau = 1.0;
        if (!observables.empty() && pilot_len >= 16) {
            ChainState st = ChainState::random_init(box, params, opts.seed, 0);
            std::vector<double> series;
            series.reserve(static_cast<std::size_t>(pilot_len));
            for (std::int64_t s = 0; s < pilot_len; ++s) {
                sweep(kind, st, box, bc, params);
                series.push_back(observables[0].fn(st.config));
            }
            tau = integrated_autocorrelation_time(series);
        }
        burn_in = std::max<std::int64_t>(1000,
                                         static_cast<std::int64_t>(10.0 * tau));
    }
    burn_in = std::min(burn_in, opts.n_sweeps / 2);

    std::vector<ChainSeries> chains(static_cast<std::size_t>(opts.n_chains));
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    int threads = opts.threads > 0 ? opts.threads : std::max(1, hw);
    threads = std::min(threads, opts.n_chains);
    std::vector<std::thread> workers;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t) {
        workers.emplace_back([&]() {
            for (;;) {
                int c = next.fetch_add(1);
                if (c >= opts.n_chains) return;
                chains[static_cast<std::size_t>(c)] = run_chain(
                    kind, box, bc, params, observables, opts.seed,
                    static_cast<std::uint64_t>(c) + 1, burn_in, opts.n_sweeps);
            }
        });
    }
    for (auto& th : workers) th.join();

    RunResult res;
    res.burn_in_used = burn_in;
    res.chain_means.resize(static_cast<std::size_t>(opts.n_chains));
    for (int c = 0; c < opts.n_chains; ++c) {
        auto& cm = res.chain_means[static_cast<std::size_t>(c)];
        for (std::size_t o = 0; o < observables.size(); ++o)
            cm.push_back(mean_of(chains[static_cast<std::size_t>(c)].values[o]));
    }
    std::ofstream csv;
    if (!opts.batch_csv_path.empty()) {
        csv.open(opts.batch_csv_path);
        csv << "chain,observable,batch,mean\n";
    }
    for (std::size_t o = 0; o < observables.size(); ++o) {
        std::vector<double> pooled_batches;
        double tau_acc = 0;
        std::int64_t n_total = 0;
        for (int c = 0; c < opts.n_chains; ++c) {
            auto& series = chains[static_cast<std::size_t>(c)].values[o];
            auto bm = batch_means(series);
            for (std::size_t k = 0; k < bm.batch_means.size(); ++k) {
                pooled_batches.push_back(bm.batch_means[k]);
                if (csv.is_open())
                    csv << c << "," << observables[o].name << "," << k << ","
                        << bm.batch_means[k] << "\n";
            }
            tau_acc += integrated_autocorrelation_time(series);
            n_total += static_cast<std::int64_t>(series.size());
        }
        Estimate est;
        est.name = observables[o].name;
        est.mean = mean_of(pooled_batches);
        est.stderr_of_mean = std::sqrt(
            variance_of(pooled_batches) /
            static_cast<double>(std::max<std::size_t>(1, pooled_batches.size())));
        est.n_samples = n_total;
        est.seed = opts.seed;
        est.tau_int = tau_acc / opts.n_chains;
        res.estimates.push_back(std::move(est));
    }
    for (auto& c : chains)
        res.final_configs.push_back(std::move(c.final_config));
    return res;
}

}  // namespace gibbslab
