#include "rlncsim/analytics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rlncsim/coding.hpp"

namespace rlncsim {

namespace {

void check_erasure(double p) {
  if (!(p >= 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("erasure probability must lie in [0,1)");
  }
}

void check_correlated(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || alpha > 1.0 || beta > 1.0 ||
      alpha + beta == 2.0) {
    throw std::domain_error(
        "correlated analytics require alpha, beta in (0,1] with "
        "alpha + beta != 2 (the deterministic alternating chain is excluded)");
  }
}

}  // namespace

double negbin_log_pmf(long t, long k, double p) {
  if (k < 1) throw std::invalid_argument("order k must be >= 1");
  check_erasure(p);
  if (t < k) return -std::numeric_limits<double>::infinity();
  if (p == 0.0) {
    return t == k ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  const double td = static_cast<double>(t);
  const double kd = static_cast<double>(k);
  return std::lgamma(td) - std::lgamma(kd) - std::lgamma(td - kd + 1.0) +
         (td - kd) * std::log(p) + kd * std::log1p(-p);
}

double negbin_pmf(long t, long k, double p) {
  return std::exp(negbin_log_pmf(t, k, p));
}

double negbin_cdf(long t, long k, double p) {
  if (t < k) return 0.0;
  if (p == 0.0) return 1.0;
  // Left-tail sum with a multiplicative pmf recurrence in log domain.
  double lp = negbin_log_pmf(k, k, p);
  double sum = std::exp(lp);
  const double logp = std::log(p);
  for (long s = k; s < t; ++s) {
    lp += logp + std::log(static_cast<double>(s)) -
          std::log(static_cast<double>(s - k + 1));
    sum += std::exp(lp);
  }
  return sum < 1.0 ? sum : 1.0;
}

long negbin_quantile(double level, long k, double p) {
  if (!(level > 0.0) || level > 1.0) {
    throw std::invalid_argument("quantile level must lie in (0,1]");
  }
  if (p == 0.0) return k;
  double lp = negbin_log_pmf(k, k, p);
  double sum = std::exp(lp);
  const double logp = std::log(p);
  long t = k;
  while (sum < level) {
    lp += logp + std::log(static_cast<double>(t)) -
          std::log(static_cast<double>(t - k + 1));
    ++t;
    sum += std::exp(lp);
    if (t > k + 100000000L) {
      throw std::domain_error("negative binomial quantile did not converge");
    }
  }
  return t;
}

double exact_mean_delay_invariant(long n, long k, double p, double tol) {
  if (n < 1) throw std::invalid_argument("user count must be >= 1");
  if (k < 1) throw std::invalid_argument("block size must be >= 1");
  check_erasure(p);
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (p == 0.0) return static_cast<double>(k);

  const double nd = static_cast<double>(n);
  const double logp = std::log(p);
  double sum = 0.0;
  double tail = 1.0;  // 1 - F(t-1), entering the loop at t
  double lp = negbin_log_pmf(k, k, p);
  for (long t = k;; ++t) {
    // term at t: 1 - F(t)^n with F(t) = 1 - tail after subtracting pmf(t)
    tail -= std::exp(lp);
    if (tail < 0.0) tail = 0.0;
    const double term =
        tail >= 1.0 ? 1.0 : -std::expm1(nd * std::log1p(-tail));
    sum += term;

    // pmf(t+1) and the geometric majorant ratio at t+1
    const double lratio = logp + std::log(static_cast<double>(t)) -
                          std::log(static_cast<double>(t - k + 1));
    lp += lratio;
    const double rho = std::exp(logp + std::log(static_cast<double>(t + 1)) -
                                std::log(static_cast<double>(t + 2 - k)));
    if (nd * tail < tol * 1e-2 && rho < 1.0) {
      // residual sum_{s > t} [1 - F(s)^n] <= n * pmf(t+1) * rho / (1-rho)^2
      const double residual =
          nd * std::exp(lp) * rho / ((1.0 - rho) * (1.0 - rho));
      if (residual < 0.5 * tol) break;
    }
    if (t - k > 400000000L) {
      throw std::domain_error("mean delay series did not converge");
    }
  }
  return static_cast<double>(k) + sum;
}

double fraction_decoded(long t, long k, double p) {
  if (k < 1) throw std::invalid_argument("block size must be >= 1");
  check_erasure(p);
  if (t < k) return 0.0;
  if (p == 0.0) return 1.0;
  const double td = static_cast<double>(t);
  const double kd = static_cast<double>(k);
  const double logq = std::log1p(-p);
  const double logp = std::log(p);
  double lt = std::lgamma(td + 1.0) - std::lgamma(kd + 1.0) -
              std::lgamma(td - kd + 1.0) + kd * logq + (td - kd) * logp;
  double sum = std::exp(lt);
  for (long l = k; l < t; ++l) {
    lt += std::log(static_cast<double>(t - l)) -
          std::log(static_cast<double>(l + 1)) + logq - logp;
    sum += std::exp(lt);
  }
  return sum < 1.0 ? sum : 1.0;
}

double fraction_decoded_normalized(double s, long k, double p) {
  if (s < 0.0) return 0.0;
  const long t = static_cast<long>(
      std::llround(static_cast<double>(k) * s + static_cast<double>(k)));
  return fraction_decoded(t, k, p);
}

EvtMoments evt_moments(long n, double k, double alpha, double beta) {
  if (n < 2) throw std::invalid_argument("norming constants need n >= 2");
  if (!(k >= 1.0)) throw std::invalid_argument("block size must be >= 1");
  const double ab = alpha + beta;
  if (!(ab > 0.0) || !(ab < 2.0)) {
    throw std::domain_error(
        "delay approximation requires alpha + beta in (0,2)");
  }
  const double p = alpha / ab;
  const double q = 1.0 - p;
  const double corr = 2.0 / ab - 1.0;  // 1 for the time-invariant case
  const double ln2n = 2.0 * std::log(static_cast<double>(n));
  EvtMoments m;
  m.a_n = 1.0 / std::sqrt(ln2n);
  m.b_n = std::sqrt(ln2n);
  m.mean = k / q + std::sqrt(k * p) / q * std::sqrt(corr) *
                       (m.b_n + kEulerGamma * m.a_n);
  m.variance = k * p * kPi * kPi / (12.0 * q * q * (0.5 * ln2n)) * corr;
  return m;
}

EvtMoments evt_moments_invariant(long n, double k, double p) {
  check_erasure(p);
  if (p == 0.0) {
    throw std::domain_error("approximation is degenerate at p = 0");
  }
  return evt_moments(n, k, p, 1.0 - p);
}

std::pair<double, double> gumbel_norming(long n, NormingMode mode, double p) {
  if (n < 2) throw std::invalid_argument("norming constants need n >= 2");
  const double lnn = std::log(static_cast<double>(n));
  if (mode == NormingMode::ScaledK) {
    return {1.0 / std::sqrt(2.0 * lnn), std::sqrt(2.0 * lnn)};
  }
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("fixed-k norming needs p in (0,1)");
  }
  return {-1.0 / std::log(p), lnn};
}

BoundConstants BoundConstants::defaults(long n, double f,
                                        const ChannelParams& params,
                                        double tau0_frac, double b_frac) {
  if (n < 2) throw std::invalid_argument("bound constants need n >= 2");
  if (!(f > 0.0)) throw std::invalid_argument("f must be positive");
  if (!(tau0_frac > 0.0) || !(tau0_frac < 1.0) || !(b_frac > 0.0) ||
      b_frac > 1.0) {
    throw std::invalid_argument("constant fractions must lie in (0,1]");
  }
  check_correlated(params.alpha, params.beta);
  BoundConstants c;
  c.lambda = params.lambda();
  c.tau0 = tau0_frac * c.lambda;
  c.mu0 = std::max(inter_success_mgf(params, c.tau0, StartState::On),
                   inter_success_mgf(params, c.tau0, StartState::Off));
  const double lnn = std::log(static_cast<double>(n));
  const double k = f * lnn + 1.0;
  const double sigma_hat =
      std::sqrt((k - 1.0) * params.alpha * (2.0 - params.alpha - params.beta)) /
      params.beta;
  c.b = b_frac * sigma_hat * c.lambda / std::sqrt(lnn);
  c.b_hat = f;
  return c;
}

double throughput_upper_bound(long n, double k, double alpha, double beta) {
  check_correlated(alpha, beta);
  if (n < 1) throw std::invalid_argument("user count must be >= 1");
  const double lambda = -std::log1p(-beta);
  const double lnn = std::log(static_cast<double>(n));
  return k * lambda / (lambda + alpha * (lnn + kEulerGamma));
}

LowerBoundResult throughput_lower_bound(long n, double f, double alpha,
                                        double beta,
                                        const BoundConstants& consts) {
  check_correlated(alpha, beta);
  if (n < 2 || !(f > 0.0)) {
    throw std::invalid_argument("lower bound needs n >= 2 and f > 0");
  }
  if (!(consts.tau0 > 0.0) || !(consts.tau0 < consts.lambda) ||
      !(consts.mu0 >= 1.0) || !(consts.b > 0.0)) {
    throw std::domain_error("bound constants outside their domain");
  }
  const double p = alpha / (alpha + beta);
  const double q = 1.0 - p;
  const double lnn = std::log(static_cast<double>(n));
  const double span = 2.0 - alpha - beta;
  const double d1 = -consts.b * std::sqrt(alpha) / std::sqrt(span);
  const double d2 = consts.b * beta / std::sqrt(alpha * span);
  const double sf = std::sqrt(f);
  const double e1 = std::exp(d1 / sf);
  const double e2 = std::exp(d2 / sf);
  const double denom = 1.0 - e2 * (1.0 - beta);
  if (!(denom > 0.0)) {
    throw std::domain_error(
        "b places tau outside the m.g.f. domain; reduce the b fraction");
  }
  LowerBoundResult res;
  res.r_n = e1 * (1.0 - alpha * (1.0 - e2) - e2 * (1.0 - beta)) / denom;
  const double d3 = std::sqrt(alpha * span) / (consts.b * beta);
  res.phi_n = q / consts.tau0 * (lnn + std::log(consts.mu0)) + f * lnn +
              q * sf * std::sqrt(alpha * span) / (consts.b * beta) * lnn *
                  (1.0 + f * std::log(res.r_n));
  res.bound = q * (f * lnn + 1.0) / res.phi_n;
  res.limit_ratio = 1.0 + q / (consts.tau0 * f) +
                    d3 / std::sqrt(f) * (1.0 + f * std::log(res.r_n));
  res.implied_r = 1.0 / res.limit_ratio;
  return res;
}

std::pair<double, double> max_gap_bounds(long n, const BoundConstants& consts,
                                       double alpha, double beta) {
  check_correlated(alpha, beta);
  if (n < 1) throw std::invalid_argument("user count must be >= 1");
  if (!(consts.tau0 > 0.0) || !(consts.tau0 < consts.lambda)) {
    throw std::domain_error("tau0 outside the m.g.f. domain");
  }
  const double lnn = std::log(static_cast<double>(n));
  const double upper = (lnn + std::log(consts.mu0)) / consts.tau0;
  const double lower = 1.0 + alpha / consts.lambda * (lnn + kEulerGamma);
  return {upper, lower};
}

double dependent_bound_default_b(double f, double p) {
  if (!(f > 0.0) || !(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("need f > 0 and p in (0,1)");
  }
  const double sfp = std::sqrt(f * p);
  const double cap1 = sfp * (-std::log1p(-p)) / (1.0 - p);
  const double cap2 = sfp * (-std::log(p)) / (1.0 - p);
  return 0.5 * std::min(cap1, cap2);
}

DependentBounds dependent_bound_functions(long n, double f, double p,
                                          double b) {
  if (n < 2) throw std::invalid_argument("bound functions need n >= 2");
  if (!(f > 0.0) || !(p > 0.0) || !(p < 1.0) || !(b > 0.0)) {
    throw std::invalid_argument("need f > 0, p in (0,1), b > 0");
  }
  const double sfp = std::sqrt(f * p);
  if (b > sfp * (-std::log1p(-p)) / (1.0 - p) * (1.0 + 1e-12)) {
    throw std::domain_error("b exceeds the sigma(k)*ln(1/(1-p)) scaling cap");
  }
  const double x = b * std::sqrt(p) / std::sqrt(f);
  const double y = b * (1.0 - p) / sfp;
  const double denom = 1.0 - p * std::exp(y);
  if (!(denom > 0.0)) {
    throw std::domain_error("b places tau outside the m.g.f. domain");
  }
  const double inner = (1.0 - p) * std::exp(-x) / denom;
  DependentBounds out;
  out.g = f + sfp / b * (1.0 + f * std::log(inner));
  out.h = f / out.g;
  return out;
}

std::pair<double, double> lt_throughput_bounds(long n, long k, double delta,
                                               double c, double alpha,
                                               double beta) {
  check_correlated(alpha, beta);
  const long nu = lt_threshold(k, delta, c);
  const double lnn = std::log(static_cast<double>(n));
  const double f = (static_cast<double>(nu) - 1.0) / lnn;
  ChannelParams params(alpha, beta);
  const auto consts = BoundConstants::defaults(n, f, params);
  const auto base = throughput_lower_bound(n, f, alpha, beta, consts);
  const double lower = (1.0 - delta) * static_cast<double>(k) /
                       static_cast<double>(nu) * base.bound;
  const double upper =
      throughput_upper_bound(n, static_cast<double>(k), alpha, beta);
  return {lower, upper};
}

}  // namespace rlncsim
