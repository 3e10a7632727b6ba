#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gibbslab/exact.hpp"
#include "gibbslab/lattice.hpp"
#include "gibbslab/rng.hpp"

namespace gibbslab {

enum class SamplerKind { HeatBath, SwendsenWang, Wolff };

SamplerKind sampler_from_name(const std::string& name);
std::string sampler_name(SamplerKind kind);

/// One Markov chain: configuration plus its private RNG stream.
struct ChainState {
    SpinConfig config;
    PhiloxRng rng;
    std::int64_t sweeps_done = 0;

    static ChainState random_init(const Box& box, const ModelParams& params,
                                  std::uint64_t seed, std::uint64_t stream);
};

/// Single-site heat-bath sweep in deterministic site order: each site is
/// resampled from its exact conditional given the neighbors.
void heat_bath_sweep(ChainState& state, const Box& box,
                     const BoundaryCondition& bc, const ModelParams& params);

/// Swendsen-Wang sweep with colored-boundary wiring: equal-value bonds
/// (including bonds to colored boundary sites) open with probability
/// p = 1 - e^{-beta}; wired clusters keep their boundary color, free
/// clusters get i.i.d. uniform colors.
void swendsen_wang_sweep(ChainState& state, const Box& box,
                         const BoundaryCondition& bc,
                         const ModelParams& params);

/// Single Wolff cluster step: grows one cluster from a uniform seed with
/// probability p across equal values; a cluster that reaches a colored
/// boundary site is discarded (the move is rejected), otherwise it is
/// recolored to a uniformly chosen different color.
void wolff_step(ChainState& state, const Box& box, const BoundaryCondition& bc,
                const ModelParams& params);

/// One "sweep" of Wolff = interior_count steps.
void wolff_sweep(ChainState& state, const Box& box, const BoundaryCondition& bc,
                 const ModelParams& params);

void sweep(SamplerKind kind, ChainState& state, const Box& box,
           const BoundaryCondition& bc, const ModelParams& params);

/// Monte Carlo estimate with batch-means error bars.
struct Estimate {
    std::string name;
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    double tau_int = 1.0;
};

struct RunOptions {
    std::int64_t n_sweeps = 10000;
    int n_chains = 4;
    std::uint64_t seed = 1;
    /// < 0: max(1000, 10 x pilot autocorrelation time), capped at
    /// n_sweeps / 2.
    std::int64_t burn_in = -1;
    int threads = 0;  // 0 = hardware
    /// Optional per-batch CSV stream (chain, observable, batch, mean).
    std::string batch_csv_path;
};

struct RunResult {
    std::vector<Estimate> estimates;
    std::int64_t burn_in_used = 0;
    /// chain_means[chain][observable]: per-chain post-burn-in means, the
    /// raw material for across-chain error estimates of derived
    /// quantities (ratios, products).
    std::vector<std::vector<double>> chain_means;
    std::vector<SpinConfig> final_configs;
};

/// Runs independent seeded chains (stream id = chain index + 1) in
/// parallel and pools batch means across chains. Bitwise reproducible
/// for fixed (seed, n_chains, schedule) regardless of thread count.
RunResult run_experiment(SamplerKind kind, const Box& box,
                         const BoundaryCondition& bc, const ModelParams& params,
                         std::span<const Observable> observables,
                         const RunOptions& opts);

}  // namespace gibbslab
