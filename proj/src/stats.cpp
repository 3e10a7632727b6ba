#include "gibbslab/stats.hpp"

#include <algorithm>
#include <cmath>

namespace gibbslab {

double mean_of(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    double m = mean_of(xs);
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

BatchMeans batch_means(std::span<const double> series) {
    BatchMeans out;
    const std::int64_t n = static_cast<std::int64_t>(series.size());
    if (n == 0) return out;
    out.mean = mean_of(series);
    std::int64_t b =
        static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    b = std::max<std::int64_t>(1, b);
    std::int64_t n_batches = n / b;
    if (n_batches < 2) {
        out.n_batches = 1;
        out.batch_means = {out.mean};
        out.stderr_of_mean = 0.0;
        return out;
    }
    out.batch_means.reserve(static_cast<std::size_t>(n_batches));
    for (std::int64_t k = 0; k < n_batches; ++k) {
        double s = 0;
        for (std::int64_t i = k * b; i < (k + 1) * b; ++i) s += series[i];
        out.batch_means.push_back(s / static_cast<double>(b));
    }
    out.n_batches = n_batches;
    double var = variance_of(out.batch_means);
    out.stderr_of_mean = std::sqrt(var / static_cast<double>(n_batches));
    return out;
}

double integrated_autocorrelation_time(std::span<const double> series) {
    const std::int64_t n = static_cast<std::int64_t>(series.size());
    if (n < 4) return 1.0;
    double m = mean_of(series);
    double c0 = 0;
    for (double x : series) c0 += (x - m) * (x - m);
    c0 /= static_cast<double>(n);
    if (c0 <= 0) return 1.0;
    double tau = 1.0;
    std::int64_t kmax = n / 2;
    for (std::int64_t k = 1; k < kmax; ++k) {
        double ck = 0;
        for (std::int64_t i = 0; i + k < n; ++i)
            ck += (series[i] - m) * (series[i + k] - m);
        ck /= static_cast<double>(n - k);
        double rho = ck / c0;
        if (rho <= 0) break;
        tau += 2.0 * rho;
        if (static_cast<double>(k) > 6.0 * tau) break;  // window heuristic
    }
    return std::max(1.0, tau);
}

}  // namespace gibbslab
