#include "gibbslab/lattice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

namespace gibbslab {

namespace {

std::string coord_str(std::span<const int> c) {
    std::string s = "(";
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(c[k]);
    }
    return s + ")";
}

}  // namespace

Box Box::make(int dimension, const std::vector<std::pair<int, int>>& ranges) {
    if (dimension < 1) throw std::invalid_argument("Box: dimension must be >= 1");
    if (static_cast<int>(ranges.size()) != dimension)
        throw std::invalid_argument("Box: ranges must match dimension");
    Box box;
    box.dim_ = dimension;
    std::int64_t n_sites = 1;
    std::int64_t fat_size = 1;
    for (auto& [lo, hi] : ranges) {
        if (lo > hi) throw std::invalid_argument("Box: empty range");
        box.lo_.push_back(lo);
        box.hi_.push_back(hi);
        n_sites *= (hi - lo + 1);
        fat_size *= (hi - lo + 3);
        if (n_sites > (1 << 28) || fat_size > (1 << 28))
            throw std::invalid_argument("Box: too many sites");
    }
    box.n_interior_ = static_cast<std::int32_t>(n_sites);

    // fat lookup covers the box extended by one layer per axis
    box.fat_lo_.resize(dimension);
    box.fat_ext_.resize(dimension);
    box.fat_stride_.resize(dimension);
    for (int k = 0; k < dimension; ++k) {
        box.fat_lo_[k] = box.lo_[k] - 1;
        box.fat_ext_[k] = box.hi_[k] - box.lo_[k] + 3;
    }
    std::int64_t stride = 1;
    for (int k = dimension - 1; k >= 0; --k) {
        box.fat_stride_[k] = stride;
        stride *= box.fat_ext_[k];
    }
    box.lookup_.assign(static_cast<std::size_t>(fat_size), 0);

    // interior sites in lexicographic order (last axis fastest)
    box.interior_coords_.reserve(static_cast<std::size_t>(n_sites) * dimension);
    std::vector<int> c(box.lo_.begin(), box.lo_.end());
    for (std::int32_t idx = 0;; ++idx) {
        box.interior_coords_.insert(box.interior_coords_.end(), c.begin(),
                                    c.end());
        std::int64_t key = 0;
        for (int k = 0; k < dimension; ++k)
            key += (c[k] - box.fat_lo_[k]) * box.fat_stride_[k];
        box.lookup_[static_cast<std::size_t>(key)] = idx + 1;
        int k = dimension - 1;
        while (k >= 0 && c[k] == box.hi_[k]) {
            c[k] = box.lo_[k];
            --k;
        }
        if (k < 0) break;
        ++c[k];
    }

    // boundary: exterior endpoints of bonds leaving the interior
    std::set<std::vector<int>> boundary_set;
    for (std::int32_t i = 0; i < box.n_interior_; ++i) {
        auto ic = box.interior_coord(i);
        std::vector<int> nb(ic.begin(), ic.end());
        for (int k = 0; k < dimension; ++k) {
            for (int d : {-1, +1}) {
                nb[k] += d;
                if (nb[k] < box.lo_[k] || nb[k] > box.hi_[k])
                    boundary_set.insert(nb);
                nb[k] -= d;
            }
        }
    }
    box.n_boundary_ = static_cast<std::int32_t>(boundary_set.size());
    box.boundary_coords_.reserve(static_cast<std::size_t>(box.n_boundary_) *
                                 dimension);
    std::int32_t bidx = 0;
    for (const auto& bcoord : boundary_set) {  // std::set: lexicographic
        box.boundary_coords_.insert(box.boundary_coords_.end(), bcoord.begin(),
                                    bcoord.end());
        std::int64_t key = 0;
        for (int k = 0; k < dimension; ++k)
            key += (bcoord[k] - box.fat_lo_[k]) * box.fat_stride_[k];
        box.lookup_[static_cast<std::size_t>(key)] = encode_boundary(bidx);
        ++bidx;
    }

    // neighbor tables and bond lists
    box.neighbors_.resize(static_cast<std::size_t>(box.n_interior_) * 2 *
                          dimension);
    for (std::int32_t i = 0; i < box.n_interior_; ++i) {
        auto ic = box.interior_coord(i);
        std::vector<int> nb(ic.begin(), ic.end());
        int slot = 0;
        for (int k = 0; k < dimension; ++k) {
            for (int d : {-1, +1}) {
                nb[k] += d;
                std::int32_t code = box.lookup(nb);
                box.neighbors_[static_cast<std::size_t>(i) * 2 * dimension +
                               slot++] = code;
                if (code >= 0) {
                    if (i < code) box.interior_bonds_.emplace_back(i, code);
                } else {
                    box.boundary_bonds_.emplace_back(i, decode_boundary(code));
                }
                nb[k] -= d;
            }
        }
    }
    return box;
}

// Only called for neighbors of interior sites, which are always interior
// or boundary, so the "none" marker never reaches a caller.
std::int32_t Box::lookup(std::span<const int> coord) const {
    std::int64_t key = 0;
    for (int k = 0; k < dim_; ++k) {
        int off = coord[k] - fat_lo_[k];
        key += off * fat_stride_[k];
    }
    std::int32_t code = lookup_[static_cast<std::size_t>(key)];
    return code > 0 ? code - 1 : code;  // interior codes stored +1
}

std::optional<std::int32_t> Box::interior_index(std::span<const int> coord) const {
    std::int64_t key = 0;
    for (int k = 0; k < dim_; ++k) {
        int off = coord[k] - fat_lo_[k];
        if (off < 0 || off >= fat_ext_[k]) return std::nullopt;
        key += off * fat_stride_[k];
    }
    std::int32_t code = lookup_[static_cast<std::size_t>(key)];
    if (code > 0) return code - 1;
    return std::nullopt;
}

std::optional<std::int32_t> Box::boundary_index(std::span<const int> coord) const {
    std::int64_t key = 0;
    for (int k = 0; k < dim_; ++k) {
        int off = coord[k] - fat_lo_[k];
        if (off < 0 || off >= fat_ext_[k]) return std::nullopt;
        key += off * fat_stride_[k];
    }
    std::int32_t code = lookup_[static_cast<std::size_t>(key)];
    if (code < 0) return decode_boundary(code);
    return std::nullopt;
}

std::int32_t Box::require_interior(std::span<const int> coord) const {
    auto idx = interior_index(coord);
    if (!idx)
        throw std::invalid_argument("site " + coord_str(coord) +
                                    " is not an interior site");
    return *idx;
}

ModelParams::ModelParams(int q_, double beta_) : q(q_), beta(beta_) {
    if (q < 2) throw std::invalid_argument("ModelParams: q must be >= 2");
    if (!(beta >= 0.0)) throw std::invalid_argument("ModelParams: beta must be >= 0");
}

double ModelParams::bond_probability() const { return -std::expm1(-beta); }

// ---- boundary conditions ----

namespace {
void check_color(const Box&, int color, bool allow_free = false) {
    if (color < (allow_free ? 0 : 1) || color > 255)
        throw std::invalid_argument("boundary color out of range");
}
}  // namespace

BoundaryCondition BoundaryCondition::free_boundary(const Box& box) {
    std::vector<std::uint8_t> v(static_cast<std::size_t>(box.boundary_count()), 0);
    return BoundaryCondition(std::move(v), {{"schema_version", 1}, {"kind", "free"}});
}

BoundaryCondition BoundaryCondition::pure(const Box& box, int color) {
    check_color(box, color);
    std::vector<std::uint8_t> v(static_cast<std::size_t>(box.boundary_count()),
                                static_cast<std::uint8_t>(color));
    return BoundaryCondition(
        std::move(v),
        {{"schema_version", 1}, {"kind", "pure"}, {"color", color}});
}

BoundaryCondition BoundaryCondition::dobrushin(const Box& box, int axis,
                                               int height, int high_color,
                                               int low_color) {
    if (axis < 0 || axis >= box.dimension())
        throw std::invalid_argument("dobrushin: axis out of range");
    check_color(box, high_color);
    check_color(box, low_color);
    std::vector<std::uint8_t> v(static_cast<std::size_t>(box.boundary_count()));
    for (std::int32_t b = 0; b < box.boundary_count(); ++b) {
        auto c = box.boundary_coord(b);
        v[b] = static_cast<std::uint8_t>(c[axis] >= height ? high_color
                                                           : low_color);
    }
    return BoundaryCondition(std::move(v), {{"schema_version", 1},
                                            {"kind", "dobrushin"},
                                            {"axis", axis},
                                            {"height", height},
                                            {"high_color", high_color},
                                            {"low_color", low_color}});
}

BoundaryCondition BoundaryCondition::one_step(const Box& box) {
    if (box.dimension() != 3)
        throw std::invalid_argument("one_step: requires d = 3");
    std::vector<std::uint8_t> v(static_cast<std::size_t>(box.boundary_count()));
    for (std::int32_t b = 0; b < box.boundary_count(); ++b) {
        auto c = box.boundary_coord(b);
        int x = c[0], z = c[2];
        bool plus = (z >= 0) || (z >= -1 && x >= 0);
        v[b] = static_cast<std::uint8_t>(plus ? IsingView::from_pm(+1)
                                              : IsingView::from_pm(-1));
    }
    return BoundaryCondition(std::move(v),
                             {{"schema_version", 1}, {"kind", "one_step"}});
}

BoundaryCondition BoundaryCondition::quadrant(const Box& box,
                                              const std::array<int, 4>& colors) {
    if (box.dimension() != 2)
        throw std::invalid_argument("quadrant: requires d = 2");
    for (int c : colors) check_color(box, c);
    std::vector<std::uint8_t> v(static_cast<std::size_t>(box.boundary_count()));
    for (std::int32_t b = 0; b < box.boundary_count(); ++b) {
        auto c = box.boundary_coord(b);
        int side;
        if (c[0] < box.lo(0))
            side = 0;  // left
        else if (c[1] > box.hi(1))
            side = 1;  // top
        else if (c[0] > box.hi(0))
            side = 2;  // right
        else
            side = 3;  // bottom
        v[b] = static_cast<std::uint8_t>(colors[side]);
    }
    return BoundaryCondition(
        std::move(v),
        {{"schema_version", 1},
         {"kind", "quadrant"},
         {"colors", std::vector<int>(colors.begin(), colors.end())}});
}

BoundaryCondition BoundaryCondition::from_values(const Box& box,
                                                 std::vector<std::uint8_t> values) {
    if (static_cast<std::int32_t>(values.size()) != box.boundary_count())
        throw std::invalid_argument(
            "boundary values must cover the boundary exactly");
    return BoundaryCondition(std::move(values),
                             {{"schema_version", 1}, {"kind", "explicit"}});
}

int BoundaryCondition::max_color() const {
    int m = 0;
    for (auto v : values_) m = std::max(m, static_cast<int>(v));
    return m;
}

std::vector<int> BoundaryCondition::used_colors() const {
    std::set<int> s;
    for (auto v : values_)
        if (v != 0) s.insert(v);
    return {s.begin(), s.end()};
}

std::vector<std::int32_t> BoundaryCondition::color_class(int color) const {
    std::vector<std::int32_t> out;
    for (std::int32_t b = 0; b < site_count(); ++b)
        if (values_[b] == color) out.push_back(b);
    return out;
}

BoundaryCondition BoundaryCondition::permuted(const std::vector<int>& perm) const {
    std::vector<std::uint8_t> v(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        int c = values_[i];
        if (c == 0) {
            v[i] = 0;
        } else {
            if (c >= static_cast<int>(perm.size()))
                throw std::invalid_argument("permutation too short");
            v[i] = static_cast<std::uint8_t>(perm[c]);
        }
    }
    nlohmann::json desc = {{"schema_version", 1}, {"kind", "explicit"}};
    return BoundaryCondition(std::move(v), std::move(desc));
}

// ---- Hamiltonian ----

std::int64_t agreement_count(const Box& box, const BoundaryCondition& bc,
                             const SpinConfig& sigma) {
    if (sigma.size() != box.interior_count())
        throw std::invalid_argument("spin config does not match box");
    if (bc.site_count() != box.boundary_count())
        throw std::invalid_argument("boundary condition does not match box");
    std::int64_t agree = 0;
    for (auto& [i, j] : box.interior_bonds())
        agree += sigma.value(i) == sigma.value(j);
    for (auto& [i, b] : box.boundary_bonds()) {
        int w = bc.value(b);
        agree += (w != 0 && w == sigma.value(i));
    }
    return agree;
}

double hamiltonian(const Box& box, const BoundaryCondition& bc,
                   const SpinConfig& sigma) {
    return -static_cast<double>(agreement_count(box, bc, sigma));
}

double gibbs_log_weight(const Box& box, const BoundaryCondition& bc,
                        const ModelParams& params, const SpinConfig& sigma) {
    return params.beta * static_cast<double>(agreement_count(box, bc, sigma));
}

// ---- Ising view ----

int IsingView::to_pm(int potts_color) {
    if (potts_color == 1) return -1;
    if (potts_color == 2) return +1;
    throw std::invalid_argument("IsingView: color must be 1 or 2");
}

int IsingView::from_pm(int pm) {
    if (pm == -1) return 1;
    if (pm == +1) return 2;
    throw std::invalid_argument("IsingView: spin must be -1 or +1");
}

double IsingView::ising_beta(const ModelParams& params) {
    if (params.q != 2) throw std::invalid_argument("IsingView: q must be 2");
    return params.beta / 2.0;
}

double IsingView::ising_log_weight(const Box& box, const BoundaryCondition& bc,
                                   const ModelParams& params,
                                   const SpinConfig& sigma) {
    double bi = ising_beta(params);
    std::int64_t corr = 0;
    for (auto& [i, j] : box.interior_bonds())
        corr += to_pm(sigma.value(i)) * to_pm(sigma.value(j));
    for (auto& [i, b] : box.boundary_bonds()) {
        int w = bc.value(b);
        if (w != 0) corr += to_pm(sigma.value(i)) * to_pm(w);
    }
    return bi * static_cast<double>(corr);
}

// ---- JSON schema ----

nlohmann::json box_to_json(const Box& box) {
    nlohmann::json ranges = nlohmann::json::array();
    for (int k = 0; k < box.dimension(); ++k)
        ranges.push_back({box.lo(k), box.hi(k)});
    return {{"schema_version", 1}, {"ranges", ranges}};
}

Box box_from_json(const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != 1)
        throw std::invalid_argument("box: unsupported schema version");
    std::vector<std::pair<int, int>> ranges;
    for (const auto& r : j.at("ranges"))
        ranges.emplace_back(r.at(0).get<int>(), r.at(1).get<int>());
    return Box::make(static_cast<int>(ranges.size()), ranges);
}

nlohmann::json bc_to_json(const Box& box, const BoundaryCondition& bc) {
    nlohmann::json j = bc.descriptor();
    if (j.at("kind") == "explicit") {
        nlohmann::json sites = nlohmann::json::array();
        for (std::int32_t b = 0; b < box.boundary_count(); ++b) {
            auto c = box.boundary_coord(b);
            sites.push_back({{"site", std::vector<int>(c.begin(), c.end())},
                             {"value", bc.value(b)}});
        }
        j["sites"] = std::move(sites);
    }
    return j;
}

BoundaryCondition bc_from_json(const Box& box, const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != 1)
        throw std::invalid_argument("bc: unsupported schema version");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "free") return BoundaryCondition::free_boundary(box);
    if (kind == "pure")
        return BoundaryCondition::pure(box, j.at("color").get<int>());
    if (kind == "dobrushin")
        return BoundaryCondition::dobrushin(
            box, j.at("axis").get<int>(), j.at("height").get<int>(),
            j.at("high_color").get<int>(), j.at("low_color").get<int>());
    if (kind == "one_step") return BoundaryCondition::one_step(box);
    if (kind == "quadrant") {
        auto cv = j.at("colors").get<std::vector<int>>();
        if (cv.size() != 4)
            throw std::invalid_argument("quadrant bc needs 4 colors");
        return BoundaryCondition::quadrant(box, {cv[0], cv[1], cv[2], cv[3]});
    }
    if (kind == "explicit") {
        std::vector<std::uint8_t> values(
            static_cast<std::size_t>(box.boundary_count()), 0);
        for (const auto& entry : j.at("sites")) {
            auto coord = entry.at("site").get<std::vector<int>>();
            auto b = box.boundary_index(coord);
            if (!b)
                throw std::invalid_argument(
                    "explicit bc lists a non-boundary site");
            values[*b] = static_cast<std::uint8_t>(entry.at("value").get<int>());
        }
        return BoundaryCondition::from_values(box, std::move(values));
    }
    throw std::invalid_argument("unknown bc kind: " + kind);
}

}  // namespace gibbslab
