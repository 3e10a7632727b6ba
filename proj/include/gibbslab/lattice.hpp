#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace gibbslab {

/// A finite axis-aligned region of Z^d. Holds the interior site list
/// (lexicographic order), the outer boundary (exterior endpoints of
/// nearest-neighbor edges leaving the interior), per-site neighbor
/// tables and the bond lists the Hamiltonian runs over.
class Box {
public:
    /// Neighbor code: >= 0 interior site index, < 0 boundary site
    /// encoded as -(boundary_index + 1).
    static std::int32_t encode_boundary(std::int32_t b) { return -(b + 1); }
    static std::int32_t decode_boundary(std::int32_t code) { return -code - 1; }

    static Box make(int dimension,
                    const std::vector<std::pair<int, int>>& ranges);

    int dimension() const { return dim_; }
    int lo(int axis) const { return lo_[axis]; }
    int hi(int axis) const { return hi_[axis]; }
    int extent(int axis) const { return hi_[axis] - lo_[axis] + 1; }

    std::int32_t interior_count() const { return n_interior_; }
    std::int32_t boundary_count() const { return n_boundary_; }

    std::span<const int> interior_coord(std::int32_t i) const {
        return {interior_coords_.data() + static_cast<std::size_t>(i) * dim_,
                static_cast<std::size_t>(dim_)};
    }
    std::span<const int> boundary_coord(std::int32_t b) const {
        return {boundary_coords_.data() + static_cast<std::size_t>(b) * dim_,
                static_cast<std::size_t>(dim_)};
    }

    /// 2d neighbor codes of an interior site.
    std::span<const std::int32_t> neighbors(std::int32_t i) const {
        return {neighbors_.data() + static_cast<std::size_t>(i) * 2 * dim_,
                static_cast<std::size_t>(2 * dim_)};
    }

    /// Interior-interior nearest-neighbor bonds, each listed once (i < j).
    const std::vector<std::pair<std::int32_t, std::int32_t>>& interior_bonds()
        const {
        return interior_bonds_;
    }
    /// (interior, boundary) bonds.
    const std::vector<std::pair<std::int32_t, std::int32_t>>& boundary_bonds()
        const {
        return boundary_bonds_;
    }

    std::optional<std::int32_t> interior_index(std::span<const int> coord) const;
    std::optional<std::int32_t> boundary_index(std::span<const int> coord) const;

    /// Interior index for a coordinate; throws if outside the interior.
    std::int32_t require_interior(std::span<const int> coord) const;

    bool same_shape(const Box& other) const {
        return lo_ == other.lo_ && hi_ == other.hi_;
    }

private:
    Box() = default;

    std::int32_t lookup(std::span<const int> coord) const;

    int dim_ = 0;
    std::vector<int> lo_, hi_;
    std::int32_t n_interior_ = 0;
    std::int32_t n_boundary_ = 0;
    std::vector<int> interior_coords_;  // flat, dim per site
    std::vector<int> boundary_coords_;
    std::vector<std::int32_t> neighbors_;  // flat, 2*dim codes per site
    std::vector<std::pair<std::int32_t, std::int32_t>> interior_bonds_;
    std::vector<std::pair<std::int32_t, std::int32_t>> boundary_bonds_;
    // dense lookup over the box fattened by one layer:
    // 0 = none, i+1 interior, -(b+1) boundary
    std::vector<int> fat_lo_;
    std::vector<std::int64_t> fat_stride_;
    std::vector<int> fat_ext_;
    std::vector<std::int32_t> lookup_;
};

/// Model parameters of the q-state Potts model: q colors, inverse
/// temperature beta, and the coupled bond probability p = 1 - e^{-beta}.
struct ModelParams {
    int q = 2;
    double beta = 1.0;

    ModelParams() = default;
    ModelParams(int q_, double beta_);

    double bond_probability() const;
    bool operator==(const ModelParams& o) const {
        return q == o.q && beta == o.beta;
    }
};

/// Boundary values on the outer boundary sites: colors 1..q, or 0 for
/// free (no interaction across that bond).
class BoundaryCondition {
public:
    static BoundaryCondition free_boundary(const Box& box);
    static BoundaryCondition pure(const Box& box, int color);
    /// Sites with coordinate >= height along `axis` get `high_color`,
    /// the rest get `low_color`. The classic interface condition is
    /// axis = d-1, height = 0 with (high, low) = (+, -) in Ising terms.
    static BoundaryCondition dobrushin(const Box& box, int axis, int height,
                                       int high_color, int low_color);
    /// d = 3 only: +1 (color 2) iff z >= 0, or z >= -1 and x >= 0;
    /// -1 (color 1) otherwise.
    static BoundaryCondition one_step(const Box& box);
    /// d = 2 only: colors per boundary side in cyclic order
    /// (left, top, right, bottom).
    static BoundaryCondition quadrant(const Box& box,
                                      const std::array<int, 4>& colors);
    static BoundaryCondition from_values(const Box& box,
                                         std::vector<std::uint8_t> values);

    int value(std::int32_t boundary_index) const {
        return values_[boundary_index];
    }
    std::span<const std::uint8_t> values() const { return values_; }
    std::int32_t site_count() const {
        return static_cast<std::int32_t>(values_.size());
    }

    int max_color() const;
    /// Colors actually used (excluding free).
    std::vector<int> used_colors() const;
    /// The boundary sites carrying a given color.
    std::vector<std::int32_t> color_class(int color) const;
    bool is_bicolor() const { return used_colors().size() <= 2; }

    /// Relabel colors by a permutation perm[c] of {1..q}; 0 stays 0.
    BoundaryCondition permuted(const std::vector<int>& perm) const;

    const nlohmann::json& descriptor() const { return descriptor_; }

private:
    BoundaryCondition(std::vector<std::uint8_t> values, nlohmann::json desc)
        : values_(std::move(values)), descriptor_(std::move(desc)) {}

    std::vector<std::uint8_t> values_;
    nlohmann::json descriptor_;
};

/// Interior spin assignment, values in 1..q, flat over the box's
/// deterministic site order.
class SpinConfig {
public:
    SpinConfig() = default;
    SpinConfig(const Box& box, int fill_color = 1)
        : spins_(static_cast<std::size_t>(box.interior_count()),
                 static_cast<std::uint8_t>(fill_color)) {}
    explicit SpinConfig(std::vector<std::uint8_t> spins)
        : spins_(std::move(spins)) {}

    int value(std::int32_t i) const { return spins_[i]; }
    void set(std::int32_t i, int color) {
        spins_[i] = static_cast<std::uint8_t>(color);
    }
    std::int32_t size() const {
        return static_cast<std::int32_t>(spins_.size());
    }
    std::span<const std::uint8_t> raw() const { return spins_; }
    std::span<std::uint8_t> raw() { return spins_; }

    bool operator==(const SpinConfig&) const = default;

private:
    std::vector<std::uint8_t> spins_;
};

/// Number of agreeing nearest-neighbor pairs {i,j} with {i,j} meeting
/// the interior; free boundary values (0) never agree. H = -agreements.
std::int64_t agreement_count(const Box& box, const BoundaryCondition& bc,
                             const SpinConfig& sigma);

/// H^w_L(sigma) = -sum of delta over bonds meeting the interior.
double hamiltonian(const Box& box, const BoundaryCondition& bc,
                   const SpinConfig& sigma);

/// -beta * H; normalization is the exact oracle's job.
double gibbs_log_weight(const Box& box, const BoundaryCondition& bc,
                        const ModelParams& params, const SpinConfig& sigma);

/// q = 2 relabeling 1 -> -1, 2 -> +1. The +-1 coupling runs at
/// beta_ising = beta_potts / 2 (delta_{a,b} = (1 + ab)/2 on +-1 spins).
struct IsingView {
    static int to_pm(int potts_color);           // 1 -> -1, 2 -> +1
    static int from_pm(int pm);                  // -1 -> 1, +1 -> 2
    static double ising_beta(const ModelParams& params);
    /// log weight of the +-1 form: beta_ising * sum sigma_i sigma_j over
    /// non-free bonds. Differs from gibbs_log_weight by a sigma-independent
    /// constant, so both normalize to the same measure.
    static double ising_log_weight(const Box& box, const BoundaryCondition& bc,
                                   const ModelParams& params,
                                   const SpinConfig& sigma);
};

// ---- versioned JSON schema ----

nlohmann::json box_to_json(const Box& box);
Box box_from_json(const nlohmann::json& j);
nlohmann::json bc_to_json(const Box& box, const BoundaryCondition& bc);
BoundaryCondition bc_from_json(const Box& box, const nlohmann::json& j);

}  // namespace gibbslab
