#include "rlncsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlncsim {

namespace {

// Inverse standard normal CDF (Acklam's rational approximation), enough
// precision for confidence-interval z values.
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("normal quantile needs p in (0,1)");
  }
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

Summary summarize(const std::vector<double>& samples, double level) {
  if (samples.size() < 2) {
    throw std::invalid_argument("summary needs at least 2 samples");
  }
  if (!(level > 0.0) || !(level < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0,1)");
  }
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double var = ss / (n - 1.0);
  const double z = normal_quantile(0.5 + level / 2.0);
  return {mean, var, z * std::sqrt(var / n),
          static_cast<long>(samples.size())};
}

double ks_against_gumbel(const std::vector<double>& rescaled) {
  if (rescaled.empty()) throw std::invalid_argument("empty sample");
  std::vector<double> s = rescaled;
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double g = std::exp(-std::exp(-s[i]));
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    ks = std::max(ks, std::max(std::abs(hi - g), std::abs(g - lo)));
  }
  return ks;
}

Histogram histogram(const std::vector<double>& samples, double bin_width) {
  if (!(bin_width > 0.0)) {
    throw std::invalid_argument("bin width must be positive");
  }
  Histogram h;
  h.bin_width = bin_width;
  if (samples.empty()) {
    h.origin = 0.0;
    return h;
  }
  h.origin = *std::min_element(samples.begin(), samples.end());
  for (double x : samples) {
    auto idx = static_cast<long>(std::floor((x - h.origin) / bin_width));
    if (idx < 0) idx = 0;
    if (idx >= static_cast<long>(h.counts.size())) {
      h.counts.resize(static_cast<std::size_t>(idx) + 1, 0);
    }
    ++h.counts[static_cast<std::size_t>(idx)];
  }
  return h;
}

double gumbel_quantile(double u) {
  if (!(u > 0.0) || !(u < 1.0)) {
    throw std::invalid_argument("quantile argument must lie in (0,1)");
  }
  return -std::log(-std::log(u));
}

}  // namespace rlncsim
