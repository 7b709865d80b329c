#pragma once

#include <vector>

namespace rlncsim {

struct Summary {
  double mean;
  double variance;      // unbiased
  double ci_halfwidth;  // normal approximation at the configured level
  long count;
};

/// Sample mean/variance with a normal-approximation confidence interval.
/// Needs at least 2 samples.
Summary summarize(const std::vector<double>& samples, double level = 0.95);

/// Sup-distance between the empirical CDF of the (already rescaled) samples
/// and the standard Gumbel CDF exp(-e^{-x}).
///
/// Reported as a raw statistic; the asymptotic 95% reference line is
/// 1.36/sqrt(N). Delays are integer valued while the limit is continuous,
/// so discreteness inflates the statistic at small k.
double ks_against_gumbel(const std::vector<double>& rescaled);

struct Histogram {
  double origin;     // left edge of bin 0
  double bin_width;
  std::vector<long> counts;
};

/// Fixed-width histogram anchored at the sample minimum.
Histogram histogram(const std::vector<double>& samples, double bin_width);

/// Standard Gumbel quantile function, -ln(-ln(u)).
double gumbel_quantile(double u);

}  // namespace rlncsim
