#pragma once

#include <utility>

#include "rlncsim/channel.hpp"

namespace rlncsim {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kPi = 3.1415926535897932385;

// --- negative binomial of order k, success probability 1-p ---------------
// Y is the slot index of the k-th success; support {k, k+1, ...}.

double negbin_log_pmf(long t, long k, double p);
double negbin_pmf(long t, long k, double p);
/// P(Y <= t), summed in log/extended precision from the left tail.
double negbin_cdf(long t, long k, double p);
/// Smallest t with cdf(t) >= level.
long negbin_quantile(double level, long k, double p);

/// Exact mean block decoding delay over a time-invariant channel:
/// k + sum_{t>=k} [1 - F(t)^n] with F the negbin(k, 1-p) CDF. The series is
/// truncated once n*(1-F(t)) together with a geometric tail majorant
/// certifies a residual below tol.
double exact_mean_delay_invariant(long n, long k, double p, double tol = 1e-9);

/// Probability that one user holds >= k receptions after t slots
/// (binomial upper tail, log domain); 0 for t < k by convention.
double fraction_decoded(long t, long k, double p);
/// Normalized-time variant r'(s) = r(ks + k) for s >= 0.
double fraction_decoded_normalized(double s, long k, double p);

// --- extreme value approximations -----------------------------------------

struct EvtMoments {
  double mean;      // slots
  double variance;  // slots^2
  double a_n;       // norming scale
  double b_n;       // norming location
};

/// Approximate mean/variance of the block decoding delay for large n,
/// for the two-state Markov channel (alpha + beta = 1 reduces to the
/// time-invariant expressions).
EvtMoments evt_moments(long n, double k, double alpha, double beta);
EvtMoments evt_moments_invariant(long n, double k, double p);

enum class NormingMode { ScaledK, FixedK };
/// Gumbel norming constants: (1/sqrt(2 ln n), sqrt(2 ln n)) when k scales
/// with n, and (-1/ln p, ln n) for fixed k.
std::pair<double, double> gumbel_norming(long n, NormingMode mode,
                                         double p = 0.0);

// --- throughput bounds ------------------------------------------------------

/// Free constants of the throughput bounds. The formulas only constrain them
/// to open intervals; the defaults take midpoints so bound values are finite
/// and reproducible.
struct BoundConstants {
  double tau0;    // m.g.f. abscissa, 0 < tau0 < lambda
  double mu0;     // worst-case inter-success m.g.f. value at tau0
  double b;       // EVT bound constant, 0 < b*sqrt(ln n) <= sigma_hat*lambda
  double b_hat;   // constant f(n) used for the Theta(ln n) regime
  double lambda;  // -ln(1-beta)

  /// Midpoint defaults for a configuration with k = f*ln(n) + 1.
  static BoundConstants defaults(long n, double f, const ChannelParams& params,
                                 double tau0_frac = 0.5, double b_frac = 0.5);
};

/// Upper bound k*lambda / (lambda + alpha*(ln n + gamma)); vanishes for
/// fixed k as n grows.
double throughput_upper_bound(long n, double k, double alpha, double beta);

struct LowerBoundResult {
  double bound;        // throughput lower bound, at k = f*ln(n) + 1
  double r_n;          // per-gap m.g.f. root r(n)
  double phi_n;        // denominator phi(n)
  double limit_ratio;  // lim phi/(f ln n + 1) when f is held constant
  double implied_r;    // capacity fraction 1/limit_ratio
};

LowerBoundResult throughput_lower_bound(long n, double f, double alpha,
                                        double beta,
                                        const BoundConstants& consts);

/// (upper bound on E[max_i gap], lower bound on E[max_i X_2]):
/// (ln n + ln mu0)/tau0 and 1 + (alpha/lambda)(ln n + gamma).
std::pair<double, double> max_gap_bounds(long n, const BoundConstants& consts,
                                       double alpha, double beta);

struct DependentBounds {
  double g;  // delay factor: E[U] <= g(n) ln(n)/(1-p)
  double h;  // throughput factor: eta >= h(n)(1-p), h in (0,1]
};

/// Bounds for symmetric channels that may be dependent across users,
/// k = f*ln(n). b must keep tau = b*sqrt(ln n) inside the m.g.f. domain.
DependentBounds dependent_bound_functions(long n, double f, double p,
                                          double b);
/// Midpoint default for the free constant b above.
double dependent_bound_default_b(double f, double p);

/// Throughput sandwich for the LT model: the RLNC bounds with the reception
/// requirement nu_k(delta) in place of k, and the lower side scaled by
/// (1-delta).
std::pair<double, double> lt_throughput_bounds(long n, long k, double delta,
                                               double c, double alpha,
                                               double beta);

}  // namespace rlncsim
