#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mwl::stats {

double mean(std::span<const double> x);
/// Population variance (divide by n).
double variance_pop(std::span<const double> x);
/// Sample variance (divide by n-1).
double variance_sample(std::span<const double> x);
double stddev_pop(std::span<const double> x);
double stddev_sample(std::span<const double> x);
double median(std::span<const double> x);
/// Linear-interpolation quantile, q in [0,1] (numpy 'linear' convention).
double quantile(std::span<const double> x, double q);
/// Fisher skewness (population moments); 0 for constant input.
double skewness(std::span<const double> x);
/// Non-excess kurtosis m4/m2^2; 0 for constant input.
double kurtosis(std::span<const double> x);
/// Pearson correlation; 0 when either side is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Regularized incomplete beta I_x(a, b) via continued fraction.
double betainc(double a, double b, double x);

/// Two-tailed p-value of Student's t with df degrees of freedom.
double t_two_tailed_p(double t, double df);

/// Survival function P(F >= f) for the F(d1, d2) distribution.
double f_sf(double f, double d1, double d2);

/// Standard normal quantile function (Acklam's rational approximation,
/// refined with one Halley step).
double normal_quantile(double p);

double normal_cdf(double x);

/// Deterministic per-stream seed derivation (splitmix64 over (seed, idx)).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace mwl::stats
