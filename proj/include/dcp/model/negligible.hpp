#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dcp/dist.hpp"
#include "dcp/error.hpp"
#include "dcp/model/mixture.hpp"
#include "dcp/random.hpp"
#include "dcp/special.hpp"

namespace dcp {

/// g: detection probability of the next contact after a detection (previous
/// contact in ON); p: the same after a miss (previous contact in OFF).
struct GPpair {
  double g = 0.0;
  double p = 0.0;
};

inline constexpr double kProbabilitySlack = 1e-8;

namespace detail {

inline double checked_probability(double v, const char* what) {
  if (!std::isfinite(v) || v < -kProbabilitySlack || v > 1.0 + kProbabilitySlack) {
    throw ModelInconsistency(std::string(what) + " evaluated to " + std::to_string(v) + ", outside [0, 1]");
  }
  return std::clamp(v, 0.0, 1.0);
}

inline void check_window(double tau, double period) {
  if (!(tau > 0.0) || !(tau < period) || !std::isfinite(period)) {
    throw DomainError("duty cycle window needs 0 < tau < T");
  }
}

}  // namespace detail

/// Closed form for exponential intercontacts with rate lambda. Written with
/// expm1 so neither lambda*T -> 0 nor lambda*T -> infinity loses accuracy.
inline GPpair g_p_exponential(double lambda, double tau, double period) {
  if (!(lambda > 0.0)) throw DomainError("g_p_exponential: rate must be positive");
  detail::check_window(tau, period);
  const double w = period - tau;
  const double a = std::expm1(-lambda * tau);     // e^{-l tau} - 1
  const double c = std::expm1(-lambda * w);       // e^{-l (T - tau)} - 1
  const double d = -std::expm1(-lambda * period);  // 1 - e^{-l T}
  const double p = a * c / (lambda * w * d);
  const double lt = lambda * tau;
  // a + lt = e^{-lt} - 1 + lt, cancellation-free through a series for small lt
  double a_plus = a + lt;
  if (lt < 1e-3) a_plus = lt * lt * (0.5 - lt / 6.0 + lt * lt / 24.0);
  const double g = (a_plus + a * a * std::exp(-lambda * w) / d) / lt;
  return {detail::checked_probability(g, "g"), detail::checked_probability(p, "p")};
}

namespace detail {

inline GPpair g_p_pareto_raw(double alpha, double b, double tau, double period) {
  const double s = alpha - 1.0;
  const double w = period - tau;
  const double scale = period * std::exp(alpha * std::log(b / period)) / s;
  // 1 + b ((1 + tau/b)^{-s} - 1) / (s tau)
  const double head = 1.0 + b * std::expm1(-s * std::log1p(tau / b)) / (s * tau);
  const double g = head + scale / tau *
                              hurwitz_zeta_double_difference(s, (b + w) / period, tau / period, tau / period);
  const double p = scale / w * hurwitz_zeta_double_difference(s, b / period, tau / period, w / period);
  return {g, p};
}

}  // namespace detail

/// Closed form for Lomax intercontacts (shape alpha, scale b) through
/// double differences of the Hurwitz zeta function. alpha = 1 is a removable
/// singularity and is evaluated as the mean of alpha = 1 -/+ 1e-6.
inline GPpair g_p_pareto(double alpha, double b, double tau, double period) {
  if (!(alpha > 0.0) || !(b > 0.0)) throw DomainError("g_p_pareto: shape and scale must be positive");
  detail::check_window(tau, period);
  GPpair r;
  if (std::abs(alpha - 1.0) < 1e-6) {
    const auto lo = detail::g_p_pareto_raw(1.0 - 1e-6, b, tau, period);
    const auto hi = detail::g_p_pareto_raw(1.0 + 1e-6, b, tau, period);
    r = {0.5 * (lo.g + hi.g), 0.5 * (lo.p + hi.p)};
  } else {
    r = detail::g_p_pareto_raw(alpha, b, tau, period);
  }
  return {detail::checked_probability(r.g, "g"), detail::checked_probability(r.p, "p")};
}

struct GPNumericOptions {
  double mass_tol = 1e-9;       // stop once the CCDF beyond the current interval is below this
  double tail_tol = 1e-11;      // or once the monotone tail estimate is this tight
  std::size_t max_terms = 1000000;
};

namespace detail {

// sum_{n >= n0} P(Y in [nT + shift, nT + shift + tau)) for Y = Unif(0, w) + S,
// shift in (-T, 0]. Terms are added until the remaining mass is negligible,
// or, for non-increasing densities, until the remainder is pinned to within
// tail_tol by duty * (mass beyond).
inline double on_interval_sum(const DistSpec& d, double w, double tau, double period, double shift, long long n0,
                              const GPNumericOptions& opt) {
  const double duty = tau / period;
  double sum = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double lo = static_cast<double>(n0 + static_cast<long long>(k)) * period + shift;
    const double hi = lo + tau;
    const double m_lo = lo <= 0.0 ? 1.0 : uniform_plus_dist_ccdf(w, d, lo);
    if (m_lo < opt.mass_tol) return sum;
    if (d.has_monotone_density() && lo - period + tau >= w && k > 0) {
      // monotone tail: sum of ON masses lies in [duty * M(lo), duty * M(lo - T + tau)]
      const double m_prev = uniform_plus_dist_ccdf(w, d, lo - period + tau);
      if (duty * (m_prev - m_lo) < opt.tail_tol) return sum + duty * 0.5 * (m_lo + m_prev);
      // Euler-Maclaurin: remainder = duty * M(lo) + f_Y(lo) * tau (1 - duty) / 2 + O(f_Y')
      const double f_lo = (ccdf(d, lo - w) - ccdf(d, lo)) / w;
      const double f_next = (ccdf(d, lo + period - w) - ccdf(d, lo + period)) / w;
      const double half_phi = 0.5 * tau * (1.0 - duty);
      if (2.0 * half_phi * std::abs(f_lo - f_next) < opt.tail_tol) return sum + duty * m_lo + half_phi * f_lo;
    }
    if (k >= opt.max_terms) {
      throw TruncationError("g/p series did not converge within the term cap", sum, m_lo);
    }
    const double m_hi = uniform_plus_dist_ccdf(w, d, hi);
    sum += m_lo - m_hi;
  }
}

}  // namespace detail

/// The general (g, p) sums evaluated term by term for any distribution kind.
inline GPpair g_p_numeric(const DistSpec& d, double tau, double period, const GPNumericOptions& opt = {}) {
  detail::check_window(tau, period);
  const double w = period - tau;
  // previous contact at Z_on in [0, tau): next at Z_on + S, ON windows [nT, nT + tau), n >= 0
  const double g = detail::on_interval_sum(d, tau, tau, period, 0.0, 0, opt);
  // previous contact at tau + Z_off: Z_off + S in [nT - tau, nT), n >= 1
  const double p = detail::on_interval_sum(d, w, tau, period, -tau, 1, opt);
  return {detail::checked_probability(g, "g"), detail::checked_probability(p, "p")};
}

/// Closed form where one exists, the term-by-term sums otherwise.
inline GPpair g_p(const DistSpec& d, double tau, double period, const GPNumericOptions& opt = {}) {
  if (d.is_exponential()) return g_p_exponential(d.as_exponential().rate, tau, period);
  if (d.is_pareto()) return g_p_pareto(d.as_pareto().shape, d.as_pareto().scale, tau, period);
  return g_p_numeric(d, tau, period, opt);
}

inline void check_gp(const GPpair& gp) {
  if (!(gp.g >= 0.0 && gp.g <= 1.0) || !(gp.p > 0.0 && gp.p <= 1.0)) {
    throw DomainError("(g, p) must satisfy 0 <= g <= 1 and 0 < p <= 1");
  }
}

/// P(N = k): g for k = 1, (1 - g)(1 - p)^{k-2} p for k >= 2.
inline double pmf_n(const GPpair& gp, long long k) {
  if (k < 1) throw DomainError("pmf_n: k must be at least 1");
  if (k == 1) return gp.g;
  return (1.0 - gp.g) * std::pow(1.0 - gp.p, static_cast<double>(k - 2)) * gp.p;
}

/// Geometric approximation valid when intercontacts vary slowly over a period.
inline GPpair geometric_gp(double tau, double period) { return {tau / period, tau / period}; }

inline Moments moments_n(const GPpair& gp) {
  check_gp(gp);
  const double g = gp.g, p = gp.p;
  Moments m;
  m.mean = (1.0 - g + p) / p;
  m.second_moment = (p * p + p + 2.0 - g * (p + 2.0)) / (p * p);
  const double den = 1.0 - g + p;
  m.cv2 = (1.0 - g) * (1.0 + g - p) / (den * den);
  return m;
}

enum class Behaviour { Hypo, ExpLike, Hyper, Undefined };

inline const char* to_string(Behaviour b) {
  switch (b) {
    case Behaviour::Hypo:
      return "hypo";
    case Behaviour::ExpLike:
      return "exp-like";
    case Behaviour::Hyper:
      return "hyper";
    case Behaviour::Undefined:
      return "undefined";
  }
  return "?";
}

struct Classification {
  Behaviour behaviour = Behaviour::Undefined;
  std::string rationale;
  double cv2_s = 0.0, g = 0.0, p = 0.0, xi = 0.0, omega = 0.0;
};

inline constexpr double kExpLikeBand = 1e-6;

inline double xi_threshold(const GPpair& gp) {
  const double g = gp.g, p = gp.p;
  return 1.0 + 2.0 * (1.0 - g) * (p - g) / (p * (1.0 - g + p));
}

inline double omega_threshold(double g) { return 1.5 * (g - 1.0) + 0.5 * std::sqrt(9.0 - 10.0 * g + g * g); }

inline double cv2_s_tilde(double cv2_s, const GPpair& gp) {
  const auto n = moments_n(gp);
  return cv2_s / n.mean + *n.cv2;
}

/// Hypo/hyper region of the measured intercontact time, row by row.
inline Classification classify_behaviour(double cv2_s, const GPpair& gp) {
  if (!(cv2_s >= 0.0)) throw DomainError("classify_behaviour: cv2_S must be non-negative");
  check_gp(gp);
  Classification c;
  c.cv2_s = cv2_s;
  c.g = gp.g;
  c.p = gp.p;
  c.xi = xi_threshold(gp);
  c.omega = omega_threshold(gp.g);
  const double g = gp.g, p = gp.p;
  auto set = [&c](Behaviour b, std::string why) {
    c.behaviour = b;
    c.rationale = std::move(why);
  };
  if (std::abs(cv2_s_tilde(cv2_s, gp) - 1.0) <= kExpLikeBand) {
    set(Behaviour::ExpLike, "cv2 of the measured intercontact is within the exponential band");
  } else if (cv2_s > 3.0) {
    set(Behaviour::Hyper, "S hyper-exponential with cv2 > 3");
  } else if (cv2_s >= 1.0) {
    if (g >= p) {
      set(Behaviour::Hyper, "cv2_S in [1, 3] and g >= p");
    } else if (cv2_s > c.xi) {
      set(Behaviour::Hyper, "cv2_S in [1, 3], p > g and cv2_S > xi");
    } else {
      set(Behaviour::Hypo, "cv2_S in [1, 3], p > g and cv2_S < xi");
    }
  } else {
    if (p >= g) {
      set(Behaviour::Hypo, "S hypo-exponential and p >= g");
    } else if (p <= c.omega) {
      set(Behaviour::Hyper, "S hypo-exponential and p < omega(g)");
    } else if (cv2_s > c.xi) {
      set(Behaviour::Hyper, "S hypo-exponential, g > p > omega(g) and cv2_S > xi");
    } else {
      set(Behaviour::Hypo, "S hypo-exponential, g > p > omega(g) and cv2_S < xi");
    }
  }
  return c;
}

struct MomentsReport {
  double mean = 0.0;
  double second_moment = 0.0;
  std::optional<double> cv2;
  Classification classification;
};

/// Moments of the random sum S~ = S_1 + ... + S_N.
inline MomentsReport moments_s_tilde(const Moments& s, const GPpair& gp) {
  const auto n = moments_n(gp);
  MomentsReport r;
  r.mean = n.mean * s.mean;
  if (!s.finite()) {
    r.second_moment = std::numeric_limits<double>::infinity();
    r.classification.behaviour = Behaviour::Undefined;
    r.classification.rationale = "second moment of S is infinite";
    r.classification.g = gp.g;
    r.classification.p = gp.p;
    return r;
  }
  const double var_s = s.second_moment - s.mean * s.mean;
  r.second_moment = n.second_moment * s.mean * s.mean + n.mean * var_s;
  r.cv2 = r.second_moment / (r.mean * r.mean) - 1.0;
  r.classification = classify_behaviour(std::max(0.0, var_s / (s.mean * s.mean)), gp);
  return r;
}

struct TailSpec {
  double exponent = 0.0;
  double prefactor = 0.0;  // P(S~ > x) ~ prefactor * x^{-exponent}

  double ccdf(double x) const { return prefactor * std::pow(x, -exponent); }
  double loglog_slope() const { return -exponent; }
};

inline TailSpec pareto_tail_check(double alpha, double b, const GPpair& gp) {
  if (!(alpha > 0.0)) throw DomainError("pareto_tail_check: shape must be positive");
  return {alpha, std::pow(b, alpha) * moments_n(gp).mean};
}

/// CDF of S~ for exponential S: with prob. g a single Exp(lambda), otherwise
/// Exp(lambda) plus an independent Exp(lambda p).
inline double s_tilde_cdf_exponential(double lambda, const GPpair& gp, double x) {
  if (x <= 0.0) return 0.0;
  const double a = lambda, c = lambda * gp.p;
  const double single = -std::expm1(-a * x);
  double two;
  if (std::abs(a - c) <= 1e-12 * a) {
    two = 1.0 - std::exp(-a * x) * (1.0 + a * x);
  } else {
    two = 1.0 - (a * std::exp(-c * x) - c * std::exp(-a * x)) / (a - c);
  }
  return gp.g * single + (1.0 - gp.g) * two;
}

/// Draw of N from the (g, p) PMF.
inline long long sample_n(const GPpair& gp, RandomStream& rng) {
  if (rng.uniform() < gp.g) return 1;
  if (gp.p >= 1.0) return 2;
  // 2 + Geometric(p) on {0, 1, ...}
  const double u = rng.uniform();
  return 2 + static_cast<long long>(std::floor(std::log(u) / std::log1p(-gp.p)));
}

/// Monte-Carlo sample of S~ = S_1 + ... + S_N (sorted, for CDF evaluation).
inline std::vector<double> sample_s_tilde(const DistSpec& s, const GPpair& gp, std::size_t n, RandomStream rng) {
  std::vector<double> out(n);
  for (auto& v : out) {
    const long long k = sample_n(gp, rng);
    double acc = 0.0;
    for (long long i = 0; i < k; ++i) acc += sample(s, rng);
    v = acc;
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Law of S~ in the negligible-contact model: analytic for exponential S,
/// otherwise estimated from a seeded random-sum sample.
inline MixtureDist dist_s_tilde(const DistSpec& s, const GPpair& gp, std::size_t budget = 1000000,
                                std::uint64_t seed = 0x5eed5eedULL) {
  check_gp(gp);
  if (s.is_exponential()) {
    const double lambda = s.as_exponential().rate;
    AnalyticDensity a;
    a.name = "S~ (exponential S)";
    a.cdf = [lambda, gp](double x) { return s_tilde_cdf_exponential(lambda, gp, x); };
    a.pdf = [lambda, gp](double x) {
      if (x <= 0.0) return 0.0;
      const double c = lambda * gp.p;
      const double two = std::abs(lambda - c) <= 1e-12 * lambda
                             ? lambda * lambda * x * std::exp(-lambda * x)
                             : lambda * c * (std::exp(-c * x) - std::exp(-lambda * x)) / (lambda - c);
      return gp.g * lambda * std::exp(-lambda * x) + (1.0 - gp.g) * two;
    };
    a.sampler = [s, gp](RandomStream& r) {
      const long long n = sample_n(gp, r);
      double acc = 0.0;
      for (long long i = 0; i < n; ++i) acc += sample(s, r);
      return acc;
    };
    return MixtureDist({{1.0, std::move(a)}});
  }
  auto draw = [s, gp](RandomStream& r) {
    const long long n = sample_n(gp, r);
    double acc = 0.0;
    for (long long i = 0; i < n; ++i) acc += sample(s, r);
    return acc;
  };
  return MixtureDist({{1.0, make_sampler_only("sum of N draws of S", draw, budget, RandomStream(seed, 0))}});
}

}  // namespace dcp
