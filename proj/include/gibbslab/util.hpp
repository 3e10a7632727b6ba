#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gibbslab {

/// q^n with overflow check; nullopt if the result would exceed `cap`.
inline std::optional<std::int64_t> checked_pow(std::int64_t base, int exp,
                                               std::int64_t cap) {
    std::int64_t r = 1;
    for (int k = 0; k < exp; ++k) {
        if (r > cap / base) return std::nullopt;
        r *= base;
    }
    return r;
}

/// Compensated (Kahan) summation.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    void scale(double f) {
        sum *= f;
        comp *= f;
    }
    double value() const { return sum; }
};

/// Streaming log-sum-exp with running max shift. Safe for terms spanning
/// hundreds of orders of magnitude (beta * |H| easily exceeds 700).
class LogSumExp {
public:
    void add(double log_term) {
        if (std::isinf(log_term) && log_term < 0) return;
        if (log_term <= max_) {
            acc_.add(std::exp(log_term - max_));
        } else {
            if (max_ != -std::numeric_limits<double>::infinity())
                acc_.scale(std::exp(max_ - log_term));
            acc_.add(1.0);
            max_ = log_term;
        }
    }
    /// add log of (count * exp(log_term))
    void add_weighted(double log_term, double count) {
        if (count <= 0) return;
        add(log_term + std::log(count));
    }
    void merge(const LogSumExp& o) {
        if (o.empty()) return;
        if (o.max_ <= max_) {
            acc_.add(o.acc_.value() * std::exp(o.max_ - max_));
        } else {
            if (!empty()) acc_.scale(std::exp(max_ - o.max_));
            acc_.add(o.acc_.value());
            max_ = o.max_;
        }
    }
    bool empty() const {
        return max_ == -std::numeric_limits<double>::infinity();
    }
    double value() const {
        if (empty()) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(acc_.value());
    }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    KahanSum acc_;
};

/// Union-find with path halving and union by size. Reusable scratch
/// structure: reset() restores all-singletons without reallocation.
class UnionFind {
public:
    explicit UnionFind(std::int32_t n = 0) { reset(n); }

    void reset(std::int32_t n) {
        parent_.resize(static_cast<std::size_t>(n));
        size_.assign(static_cast<std::size_t>(n), 1);
        for (std::int32_t i = 0; i < n; ++i) parent_[i] = i;
        n_components_ = n;
    }

    std::int32_t find(std::int32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Returns the surviving root (or the common root if already joined).
    std::int32_t unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --n_components_;
        return a;
    }

    bool connected(std::int32_t a, std::int32_t b) { return find(a) == find(b); }
    std::int32_t component_count() const { return n_components_; }
    std::int32_t component_size(std::int32_t x) { return size_[find(x)]; }

private:
    std::vector<std::int32_t> parent_;
    std::vector<std::int32_t> size_;
    std::int32_t n_components_ = 0;
};

/// Error thrown when an exact computation would exceed its configured
/// state cap. Message names the offending size.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gibbslab
