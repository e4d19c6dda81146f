#ifndef ESGRISK_STATS_HPP
#define ESGRISK_STATS_HPP

#include <cstddef>
#include <vector>

namespace esgrisk {

// Quantile function of the standard normal distribution (Wichura's PPND16),
// accurate to full double precision. Returns -inf at p=0 and +inf at p=1.
double inverse_normal_cdf(double p);

// Standard normal CDF.
double normal_cdf(double x);

double mean(const std::vector<double>& xs);

// Sample standard deviation (n-1 denominator); 0 for fewer than 2 points.
double sample_stdev(const std::vector<double>& xs);

// Pearson correlation; returns 0 when either series is degenerate and sets
// *degenerate if provided.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys,
               bool* degenerate = nullptr);

// Sample median, midpoint rule for even counts.
double median(std::vector<double> xs);

// log(sum(exp(z_i))) with max-shift overflow guard.
double log_sum_exp(const std::vector<double>& zs);

} // namespace esgrisk

#endif
