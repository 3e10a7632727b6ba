#pragma once

// Brute-force reference computations for tests. Deliberately independent
// of the library's enumeration path: direct nested loops, fresh
// Hamiltonian evaluation per configuration, long-double accumulation.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "gibbslab/exact.hpp"
#include "gibbslab/lattice.hpp"

namespace naive {

using gibbslab::BoundaryCondition;
using gibbslab::Box;
using gibbslab::ModelParams;
using gibbslab::SpinConfig;

// Direct Hamiltonian: loop every ordered pair of interior sites and every
// (interior, boundary) pair, test adjacency by coordinates.
inline long long hamiltonian(const Box& box, const BoundaryCondition& bc,
                             const SpinConfig& s) {
    auto adjacent = [&](std::span<const int> a, std::span<const int> b) {
        int diff = 0;
        for (int k = 0; k < box.dimension(); ++k) {
            int d = std::abs(a[k] - b[k]);
            if (d > 1) return false;
            diff += d;
        }
        return diff == 1;
    };
    long long h = 0;
    for (std::int32_t i = 0; i < box.interior_count(); ++i)
        for (std::int32_t j = i + 1; j < box.interior_count(); ++j)
            if (adjacent(box.interior_coord(i), box.interior_coord(j)) &&
                s.value(i) == s.value(j))
                --h;
    for (std::int32_t i = 0; i < box.interior_count(); ++i)
        for (std::int32_t b = 0; b < box.boundary_count(); ++b)
            if (adjacent(box.interior_coord(i), box.boundary_coord(b)) &&
                bc.value(b) != 0 && s.value(i) == bc.value(b))
                --h;
    return h;
}

template <typename Visit>
inline void for_all_configs(const Box& box, int q, Visit&& visit) {
    std::int64_t n = 1;
    for (std::int32_t i = 0; i < box.interior_count(); ++i) n *= q;
    SpinConfig s(box);
    for (std::int64_t idx = 0; idx < n; ++idx) {
        std::int64_t rem = idx;
        for (std::int32_t i = box.interior_count() - 1; i >= 0; --i) {
            s.set(i, static_cast<int>(rem % q) + 1);
            rem /= q;
        }
        visit(s, idx);
    }
}

inline double log_z(const Box& box, const BoundaryCondition& bc,
                    const ModelParams& p) {
    // max-shift in long double; fine for the small systems tests use
    long double best = -1e30L;
    std::vector<long double> lws;
    for_all_configs(box, p.q, [&](const SpinConfig& s, std::int64_t) {
        long double lw = -static_cast<long double>(p.beta) *
                         static_cast<long double>(naive::hamiltonian(box, bc, s));
        lws.push_back(lw);
        if (lw > best) best = lw;
    });
    long double sum = 0;
    for (auto lw : lws) sum += std::exp(lw - best);
    return static_cast<double>(best + std::log(sum));
}

inline double probability(const Box& box, const BoundaryCondition& bc,
                          const ModelParams& p,
                          const std::function<bool(const SpinConfig&)>& ev) {
    double lz = log_z(box, bc, p);
    long double acc = 0;
    for_all_configs(box, p.q, [&](const SpinConfig& s, std::int64_t) {
        if (ev(s))
            acc += std::exp(-static_cast<long double>(p.beta) *
                                static_cast<long double>(
                                    naive::hamiltonian(box, bc, s)) -
                            static_cast<long double>(lz));
    });
    return static_cast<double>(acc);
}

// Full table indexed like ExactMeasure::full_distribution (site 0 most
// significant).
inline std::vector<double> full_distribution(const Box& box,
                                             const BoundaryCondition& bc,
                                             const ModelParams& p) {
    double lz = log_z(box, bc, p);
    std::vector<double> out;
    for_all_configs(box, p.q, [&](const SpinConfig& s, std::int64_t) {
        out.push_back(static_cast<double>(
            std::exp(-static_cast<long double>(p.beta) *
                         static_cast<long double>(naive::hamiltonian(box, bc, s)) -
                     static_cast<long double>(lz))));
    });
    return out;
}

}  // namespace naive
