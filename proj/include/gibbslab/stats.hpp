#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gibbslab {

double mean_of(std::span<const double> xs);
double variance_of(std::span<const double> xs);  // unbiased, 0 if n < 2

/// Batch-means standard error of the mean of a correlated series:
/// batches of length ~sqrt(n), sd of batch means / sqrt(#batches).
struct BatchMeans {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    std::int64_t n_batches = 0;
    std::vector<double> batch_means;
};
BatchMeans batch_means(std::span<const double> series);

/// Integrated autocorrelation time 1 + 2 sum rho_k with the truncation
/// at the first nonpositive autocorrelation (initial positive sequence).
/// Returns 1 for i.i.d.-looking or degenerate series.
double integrated_autocorrelation_time(std::span<const double> series);

}  // namespace gibbslab
