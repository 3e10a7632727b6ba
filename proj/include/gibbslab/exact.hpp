#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gibbslab/lattice.hpp"
#include "gibbslab/util.hpp"

namespace gibbslab {

/// A decidable event on interior spin configurations.
struct Event {
    std::string name;
    std::function<bool(const SpinConfig&)> pred;
};

/// A bounded real observable of the interior configuration.
struct Observable {
    std::string name;
    std::function<double(const SpinConfig&)> fn;
};

// Common prebuilt events.
Event event_site_color(const Box& box, std::span<const int> coord, int color);
Event event_all_color(const Box& box,
                      const std::vector<std::vector<int>>& coords, int color);
Event event_full();
Event event_and(Event a, Event b);
/// Ising block majority: sign of the +/- majority in the odd-sided cube
/// of side m centered at `center` (q = 2; +1 means color 2 wins).
Event event_block_majority(const Box& box, std::span<const int> center, int m,
                           int sign);

struct EnumerationLimits {
    std::int64_t max_states = std::int64_t{1} << 26;
    int threads = 0;  // 0 = hardware concurrency
};

/// Read-only query interface shared by exact measures and mixtures.
class SpinMeasure {
public:
    virtual ~SpinMeasure() = default;
    virtual std::vector<double> probabilities(std::span<const Event> events) const = 0;
    virtual std::vector<double> expectations(std::span<const Observable> obs) const = 0;
    virtual const Box& box() const = 0;
    virtual const ModelParams& params() const = 0;

    double prob(const Event& e) const;
    /// P(target | given); throws on a null conditioning event.
    double conditional(const Event& target, const Event& given) const;
};

/// Exact finite-volume Gibbs distribution, represented implicitly: the
/// log partition function is stored, queries re-enumerate configurations
/// with O(d) incremental Hamiltonian updates and integer energy
/// histograms (so probabilities carry no accumulation error that grows
/// with the state count).
class ExactMeasure final : public SpinMeasure {
public:
    static ExactMeasure enumerate(const Box& box, const BoundaryCondition& bc,
                                  const ModelParams& params,
                                  const EnumerationLimits& limits = {});

    double log_partition() const { return log_z_; }
    std::int64_t state_count() const { return n_states_; }

    std::vector<double> probabilities(std::span<const Event> events) const override;
    std::vector<double> expectations(std::span<const Observable> obs) const override;
    const Box& box() const override { return *box_; }
    const ModelParams& params() const override { return params_; }
    const BoundaryCondition& bc() const { return *bc_; }

    /// P(sigma_x = c) for every interior site and color; layout
    /// [site * q + (c-1)].
    std::vector<double> site_marginals() const;

    /// Full probability table indexed by sum_j (sigma_j - 1) q^{n-1-j}
    /// (site 0 most significant). Guarded by the limits cap.
    std::vector<double> full_distribution() const;

private:
    ExactMeasure(std::shared_ptr<const Box> box,
                 std::shared_ptr<const BoundaryCondition> bc,
                 ModelParams params, EnumerationLimits limits);

    std::shared_ptr<const Box> box_;
    std::shared_ptr<const BoundaryCondition> bc_;
    ModelParams params_;
    EnumerationLimits limits_;
    std::int64_t n_states_ = 0;
    std::int64_t max_agreements_ = 0;
    double log_z_ = 0.0;
};

/// Convex mixture of exact measures on the same box and parameters.
class MixtureMeasure final : public SpinMeasure {
public:
    MixtureMeasure(std::vector<double> weights,
                   std::vector<std::shared_ptr<const ExactMeasure>> components);

    std::vector<double> probabilities(std::span<const Event> events) const override;
    std::vector<double> expectations(std::span<const Observable> obs) const override;
    const Box& box() const override { return components_[0]->box(); }
    const ModelParams& params() const override { return components_[0]->params(); }

    const std::vector<double>& weights() const { return weights_; }
    const ExactMeasure& component(std::size_t k) const { return *components_[k]; }
    std::size_t component_count() const { return components_.size(); }

private:
    std::vector<double> weights_;
    std::vector<std::shared_ptr<const ExactMeasure>> components_;
};

/// Symmetric half/half mixture of the two reflected interface measures
/// (high/low colors swapped).
MixtureMeasure dobrushin_mixture(const Box& box, const ModelParams& params,
                                 int axis, int height, int color_a, int color_b,
                                 const EnumerationLimits& limits = {});

/// Finite-volume consistency of the Gibbsian specification: for outer
/// configurations eta on box \ subbox, compares the conditional law on
/// the subbox against the subbox Gibbs measure with the eta-induced
/// boundary condition. Returns the maximum total-variation discrepancy.
/// Exhaustive over eta when feasible, otherwise over `eta_samples`
/// seeded uniform draws.
double dlr_check(const Box& box, const BoundaryCondition& bc,
                 const ModelParams& params, const Box& subbox,
                 const EnumerationLimits& limits = {}, int eta_samples = 200,
                 std::uint64_t seed = 0);

struct TransferLimits {
    std::int64_t max_cross_states = std::int64_t{1} << 12;
};

/// log Z by transfer matrix along `axis`; exact for arbitrary boundary
/// conditions on product boxes, feasible whenever q^(cross-section)
/// fits the cap.
double transfer_matrix_log_z(const Box& box, const BoundaryCondition& bc,
                             const ModelParams& params, int axis,
                             const TransferLimits& limits = {});

/// log of the weight sum restricted to configurations taking the given
/// colors at the given interior sites. P(cylinder) =
/// exp(constrained - unconstrained).
double transfer_matrix_log_weight_sum(
    const Box& box, const BoundaryCondition& bc, const ModelParams& params,
    int axis,
    const std::vector<std::pair<std::vector<int>, int>>& site_colors,
    const TransferLimits& limits = {});

/// Low-level enumeration driver: visits every assignment of `free_sites`
/// (other sites of `cfg` stay frozen) with rank in [first, last), in
/// reflected base-q Gray order, reporting the current agreement count.
/// The visitor must not retain the config reference.
void for_each_config(
    const Box& box, const BoundaryCondition& bc, int q,
    std::span<const std::int32_t> free_sites, SpinConfig& cfg,
    std::int64_t first, std::int64_t last,
    const std::function<void(const SpinConfig&, std::int64_t)>& visit);

/// Gray-code rank decoding used by the parallel driver; exposed for tests.
void decode_gray_state(int q, std::int64_t rank, std::span<std::uint8_t> digits,
                       std::span<std::uint8_t> gray);

}  // namespace gibbslab
