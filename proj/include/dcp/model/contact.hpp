#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "dcp/dist.hpp"
#include "dcp/error.hpp"
#include "dcp/model/mixture.hpp"
#include "dcp/model/negligible.hpp"
#include "dcp/quadrature.hpp"
#include "dcp/random.hpp"
#include "dcp/sim.hpp"

namespace dcp {

namespace detail {

// Integral over [lo, hi] of v(#samples <= u); the count is constant between
// consecutive sample values.
template <class V>
double empirical_piecewise(const Empirical& e, double lo, double hi, V v) {
  const auto& s = e.samples();
  const std::size_t n = s.size();
  std::size_t i = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), lo) - s.begin());
  double a = lo, acc = 0.0;
  while (a < hi) {
    const double b = i < n ? std::min(s[i], hi) : hi;
    if (b > a) acc += (b - a) * v(i);
    a = b;
    while (i < n && s[i] <= a) ++i;
  }
  return acc;
}

/// Smallest point where F_C becomes positive.
inline double cdf_support_start(const DistSpec& d) {
  return d.is_empirical() ? d.as_empirical().samples().front() : 0.0;
}

/// Largest point where the CCDF of C is positive (infinite for parametric kinds).
inline double ccdf_support_end(const DistSpec& d) {
  return d.is_empirical() ? d.as_empirical().samples().back() : std::numeric_limits<double>::infinity();
}

/// integral_lo^hi du / F_C(u), lo > 0.
inline double inv_cdf_integral(const DistSpec& d, double lo, double hi) {
  if (hi <= lo) return 0.0;
  if (d.is_exponential()) {
    const double mu = d.as_exponential().rate;
    auto prim = [mu](double u) { return u + std::log(-std::expm1(-mu * u)) / mu; };
    return prim(hi) - prim(lo);
  }
  if (d.is_pareto()) {
    const auto [a, b] = d.as_pareto();
    // split off the b / (a u) pole at the origin
    auto rest = [a = a, b = b](double u) { return 1.0 / -std::expm1(-a * std::log1p(u / b)) - b / (a * u); };
    return b / a * std::log(hi / lo) + quad(rest, lo, hi, {1e-11, 1e-10, 10000});
  }
  const Empirical& e = d.as_empirical();
  const double n = static_cast<double>(e.size());
  return empirical_piecewise(e, lo, hi, [n](std::size_t k) {
    return k == 0 ? std::numeric_limits<double>::infinity() : n / static_cast<double>(k);
  });
}

/// integral_0^x G_C(x) / G_C(u) du, with 0/0 read as 0.
inline double ccdf_ratio_integral(const DistSpec& d, double x) {
  if (x <= 0.0) return 0.0;
  if (d.is_exponential()) {
    const double mu = d.as_exponential().rate;
    return -std::expm1(-mu * x) / mu;
  }
  if (d.is_pareto()) {
    const auto [a, b] = d.as_pareto();
    return ((b + x) - b * std::exp(-a * std::log1p(x / b))) / (a + 1.0);
  }
  const Empirical& e = d.as_empirical();
  const double gx = e.ccdf(x);
  if (gx == 0.0) return 0.0;
  const double n = static_cast<double>(e.size());
  return gx * empirical_piecewise(e, 0.0, x, [n](std::size_t k) { return n / (n - static_cast<double>(k)); });
}

/// log of integral_0^x du / G_C(u); +inf when G_C vanishes inside [0, x).
inline double log_inv_ccdf_integral(const DistSpec& d, double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  if (d.is_exponential()) {
    const double mu = d.as_exponential().rate;
    return mu * x + std::log(-std::expm1(-mu * x)) - std::log(mu);
  }
  if (d.is_pareto()) {
    const auto [a, b] = d.as_pareto();
    return std::log(b / (a + 1.0)) + std::log(std::expm1((a + 1.0) * std::log1p(x / b)));
  }
  const Empirical& e = d.as_empirical();
  const double n = static_cast<double>(e.size());
  const std::size_t nn = e.size();
  return std::log(empirical_piecewise(e, 0.0, x, [n, nn](std::size_t k) {
    return k == nn ? std::numeric_limits<double>::infinity() : n / (n - static_cast<double>(k));
  }));
}

}  // namespace detail

inline constexpr double kHTailStop = 1e-13;
inline constexpr long long kHTableCap = 200000;
inline constexpr std::uint64_t kPredictionSeed = 0x5eed5eedULL;
inline constexpr std::size_t kPredictionBudget = 1000000;

struct CTildeWeights {
  double c_short = 0.0;
  double c_res = 0.0;
  double z_on = 0.0;
  double point_tau = 0.0;

  double total() const { return c_short + c_res + z_on + point_tau; }
};

/// Contact-side quantities for a deterministic (tau, T) duty cycle with
/// non-negligible contacts C.
class ContactModel {
 public:
  ContactModel(DistSpec c, double tau, double period) : c_(std::move(c)), tau_(tau), period_(period) {
    detail::check_window(tau, period);
    w_ = period - tau;
    if (!std::isfinite(dist_moments(c_).mean)) {
      throw DomainError("contact distribution must have a finite mean for the H distribution");
    }
    w_eff_ = std::min(w_, detail::ccdf_support_end(c_));
    log_k_ = detail::log_inv_ccdf_integral(c_, w_eff_);
    build_h_table();
  }

  const DistSpec& contact() const { return c_; }
  double tau() const { return tau_; }
  double period() const { return period_; }
  double off() const { return w_; }

  // --- C^hit: contact that starts in an OFF interval and reaches the next ON interval

  double hit_ccdf(double x) const {
    if (x <= 0.0) return 1.0;
    if (x < w_) {
      return std::min(1.0, (detail::ccdf_ratio_integral(c_, x) + std::max(0.0, w_eff_ - x)) / w_eff_);
    }
    const double g = ccdf(c_, x);
    if (g == 0.0) return 0.0;
    return std::min(1.0, std::exp(std::log(g) + log_k_) / w_eff_);
  }

  /// Density as printed, f_C(c) * integral_0^min(c, T-tau) du / G_C(u), normalised.
  double hit_pdf(double x) const {
    if (x <= 0.0) return 0.0;
    const double f = pdf(c_, x);
    if (f == 0.0) return 0.0;
    return std::exp(std::log(f) + detail::log_inv_ccdf_integral(c_, std::min(x, w_eff_))) / w_eff_;
  }

  /// P(Z^OFF + C^hit > y).
  double hit_plus_off_ccdf(double y) const {
    if (y <= 0.0) return 1.0;
    if (y >= 2.0 * w_) {
      const double ci = ccdf_integral(c_, y - w_, y);
      if (ci <= 0.0) return 0.0;
      return std::exp(std::log(ci) + log_k_) / (w_ * w_eff_);
    }
    auto f = [this, y](double z) { return hit_ccdf(y - z); };
    std::vector<double> cuts{0.0};
    for (double b : {y - w_, y}) {
      if (b > 0.0 && b < w_) cuts.push_back(b);
    }
    cuts.push_back(w_);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) acc += quad(f, cuts[i], cuts[i + 1], {1e-13, 1e-11, 10000});
    return std::clamp(acc / w_, 0.0, 1.0);
  }

  // --- H: number of ON intervals spanned by a detected contact

  /// P(H >= h) for h >= 1.
  double survival_h(long long h) const {
    if (h <= 1) return 1.0;
    const double y = static_cast<double>(h - 1) * period_;
    return tau_ / period_ * uniform_plus_dist_ccdf(tau_, c_, y) + w_ / period_ * hit_plus_off_ccdf(y + w_);
  }

  double pmf_h(long long h) const {
    if (h < 1) return 0.0;
    if (h < static_cast<long long>(surv_.size()) - 1) return std::max(0.0, surv_[h] - surv_[h + 1]);
    return std::max(0.0, survival_h(h) - survival_h(h + 1));
  }

  double mean_h() const { return mean_h_; }

  /// Number of table entries computed before the tail was summed analytically.
  long long h_table_size() const { return static_cast<long long>(surv_.size()) - 1; }

  // --- Y^ON = Z^ON + C, Y^OFF = Z^OFF + C

  double y_on_cdf(double y) const { return y <= 0.0 ? 0.0 : uniform_plus_dist_cdf(tau_, c_, y); }
  double y_off_cdf(double y) const { return y <= 0.0 ? 0.0 : uniform_plus_dist_cdf(w_, c_, y); }
  double y_off_ccdf(double y) const { return uniform_plus_dist_ccdf(w_, c_, y); }
  double y_off_pdf(double y) const { return y <= 0.0 ? 0.0 : (ccdf(c_, y - w_) - ccdf(c_, y)) / w_; }

  /// P(Z^OFF + C < T - tau): a contact starting in OFF also ends there.
  double miss_factor() const { return y_off_cdf(w_); }

  CTildeWeights c_tilde_weights() const {
    const double p1 = pmf_h(1);
    const double p2plus = surv_.size() > 2 ? surv_[2] : survival_h(2);
    const double s3 = std::max(0.0, mean_h_ - 1.0 - p2plus);  // sum_{h>=3} (h-2) P(H=h)
    const double a = y_on_cdf(tau_) / y_on_cdf(period_);
    const double r_den = y_off_ccdf(w_) - y_off_ccdf(2.0 * period_ - tau_);
    const double r = r_den > 0.0 ? (y_off_ccdf(w_) - y_off_ccdf(period_)) / r_den : 0.0;
    const double on = tau_ / period_, offf = w_ / period_;
    CTildeWeights cw;
    cw.c_short = p1 / mean_h_ * on * a;
    cw.c_res = p1 / mean_h_ * offf * r;
    cw.z_on = (p1 * on * (1.0 - a) + p2plus * 2.0 * on) / mean_h_;
    cw.point_tau = (p1 * offf * (1.0 - r) + p2plus * 2.0 * offf + s3) / mean_h_;
    return cw;
  }

  // --- C^short (window tau) and C^miss (window T - tau)

  double short_cdf(double x) const { return windowed_cdf(x, tau_); }
  double short_pdf(double x) const { return windowed_pdf(x, tau_); }
  double miss_cdf(double x) const { return windowed_cdf(x, w_); }
  double miss_pdf(double x) const { return windowed_pdf(x, w_); }

  // --- C^res and C^res*

  double res_cdf(double c) const {
    if (c <= 0.0) return 0.0;
    if (c >= tau_) return 1.0;
    const double m_w = y_off_ccdf(w_);
    return std::clamp((m_w - y_off_ccdf(c + w_)) / (m_w - y_off_ccdf(period_)), 0.0, 1.0);
  }

  double res_pdf(double c) const {
    if (c <= 0.0 || c >= tau_) return 0.0;
    return y_off_pdf(c + w_) / (y_off_ccdf(w_) - y_off_ccdf(period_));
  }

  /// Stay-awake residual: what remains of a contact after the first ON wake-up.
  double res_star_cdf(double c) const {
    if (c <= 0.0) return 0.0;
    const double m_w = y_off_ccdf(w_);
    return std::clamp((m_w - y_off_ccdf(c + w_)) / m_w, 0.0, 1.0);
  }

  double res_star_pdf(double c) const { return c <= 0.0 ? 0.0 : y_off_pdf(c + w_) / y_off_ccdf(w_); }

 private:
  // (1/v) f_C(c) integral_c^v du / F_C(u) on (0, v), renormalised over the
  // part of (0, v) where F_C > 0.
  double windowed_cdf(double x, double v) const {
    if (x <= 0.0) return 0.0;
    if (x >= v) return 1.0;
    const double m0 = detail::cdf_support_start(c_);
    if (m0 >= v) return 1.0;
    const double fx = cdf(c_, x);
    const double tail = fx > 0.0 ? fx * detail::inv_cdf_integral(c_, std::max(x, m0), v) : 0.0;
    return std::clamp((std::max(0.0, x - m0) + tail) / (v - m0), 0.0, 1.0);
  }

  double windowed_pdf(double x, double v) const {
    if (x <= 0.0 || x >= v) return 0.0;
    const double m0 = detail::cdf_support_start(c_);
    if (x < m0 || m0 >= v) return 0.0;
    return pdf(c_, x) * detail::inv_cdf_integral(c_, x, v) / (v - m0);
  }

  void build_h_table() {
    surv_.assign(2, 1.0);
    double sum = 0.0;  // sum_{h>=2} P(H >= h)
    long long h = 2;
    for (; h <= kHTableCap; ++h) {
      const double s = survival_h(h);
      surv_.push_back(s);
      sum += s;
      if (s < kHTailStop) break;
    }
    if (h > kHTableCap) sum += tail_sum(h);
    surv_.push_back(survival_h(static_cast<long long>(surv_.size())));
    mean_h_ = 1.0 + sum;
  }

  // sum_{h >= h0} P(H >= h) by Euler-Maclaurin: integral plus half the first term.
  double tail_sum(long long h0) const {
    const double y0 = static_cast<double>(h0 - 1) * period_;
    auto avg_tail = [this](double v, double a, double scale) {
      // (1/v) integral_0^v integral_{a-z}^inf G_C
      return scale * quad([&](double z) { return ccdf_integral(c_, a - z, std::numeric_limits<double>::infinity()); },
                          0.0, v) /
             v;
    };
    const double on_part = avg_tail(tau_, y0, 1.0);
    const double off_part = avg_tail(w_, y0 + w_, std::exp(log_k_) / w_eff_);
    const double integral = (tau_ / period_ * on_part + w_ / period_ * off_part) / period_;
    return integral + 0.5 * survival_h(h0);
  }

  DistSpec c_;
  double tau_, period_, w_ = 0.0, w_eff_ = 0.0, log_k_ = 0.0;
  std::vector<double> surv_;  // surv_[h] = P(H >= h)
  double mean_h_ = 1.0;
};

inline double pmf_h(const DistSpec& c, double tau, double period, long long h) {
  return ContactModel(c, tau, period).pmf_h(h);
}

/// Measured contact duration under the sleep-always policy.
inline MixtureDist dist_c_tilde(const DistSpec& c, double tau, double period) {
  auto m = std::make_shared<const ContactModel>(c, tau, period);
  const CTildeWeights cw = m->c_tilde_weights();
  auto short_inv = std::make_shared<TabulatedInverse>([m](double x) { return m->short_cdf(x); }, tau);
  auto res_inv = std::make_shared<TabulatedInverse>([m](double x) { return m->res_cdf(x); }, tau);
  std::vector<MixtureDist::Entry> e;
  e.push_back({cw.c_short, AnalyticDensity{"C_short", [m](double x) { return m->short_cdf(x); },
                                           [m](double x) { return m->short_pdf(x); },
                                           [short_inv](RandomStream& r) { return (*short_inv)(r); }}});
  e.push_back({cw.c_res, AnalyticDensity{"C_res", [m](double x) { return m->res_cdf(x); },
                                         [m](double x) { return m->res_pdf(x); },
                                         [res_inv](RandomStream& r) { return (*res_inv)(r); }}});
  e.push_back({cw.z_on, AnalyticDensity{"Z_on", [tau](double x) { return std::clamp(x / tau, 0.0, 1.0); },
                                        [tau](double x) { return x > 0.0 && x < tau ? 1.0 / tau : 0.0; },
                                        [tau](RandomStream& r) { return r.uniform(0.0, tau); }}});
  e.push_back({cw.point_tau, PointMass{tau}});
  return MixtureDist(std::move(e));
}

/// Measured contact duration when a detected pair stays awake until the contact ends.
inline MixtureDist dist_c_tilde_stay_awake(const DistSpec& c, double tau, double period) {
  detail::check_window(tau, period);
  auto m = std::make_shared<const ContactModel>(c, tau, period);
  const double scale = std::max(dist_moments(c).mean, tau);
  std::vector<MixtureDist::Entry> e;
  e.push_back({tau / period, AnalyticDensity{"C", [c](double x) { return cdf(c, x); },
                                             [c](double x) { return pdf(c, x); },
                                             [c](RandomStream& r) { return sample(c, r); }}});
  e.push_back({(period - tau) / period,
               AnalyticDensity{"C_res_star", [m](double x) { return m->res_star_cdf(x); },
                               [m](double x) { return m->res_star_pdf(x); },
                               [m, scale](RandomStream& r) {
                                 const double u = r.uniform();
                                 return invert_cdf([m](double x) { return m->res_star_cdf(x); }, u, scale);
                               }}});
  return MixtureDist(std::move(e));
}

/// Measured contact duration with uniformly distributed contact start phases,
/// counted per ON interval: contained contacts, cut at either end, or covering
/// the whole interval. Does not depend on T.
inline MixtureDist dist_c_tilde_stationary(const DistSpec& c, double tau) {
  if (!(tau > 0.0)) throw DomainError("dist_c_tilde_stationary: tau must be positive");
  const double mean = dist_moments(c).mean;
  if (!std::isfinite(mean)) throw DomainError("dist_c_tilde_stationary: contact mean must be finite");
  const double total = tau + mean;
  const double atom = ccdf_integral(c, tau, std::numeric_limits<double>::infinity()) / total;
  const double cont = 1.0 - atom;
  auto body = [c, tau, total, cont](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= tau) return 1.0;
    const double ig = ccdf_integral(c, 0.0, x);
    return std::clamp(((x - ig) + (tau - x) * cdf(c, x) + 2.0 * ig) / (total * cont), 0.0, 1.0);
  };
  auto density = [c, tau, total, cont](double x) {
    if (x <= 0.0 || x >= tau) return 0.0;
    return ((tau - x) * pdf(c, x) + 2.0 * ccdf(c, x)) / (total * cont);
  };
  auto inv = std::make_shared<TabulatedInverse>(body, tau);
  std::vector<MixtureDist::Entry> e;
  e.push_back({cont, AnalyticDensity{"contained_or_cut", body, density, [inv](RandomStream& r) { return (*inv)(r); }}});
  e.push_back({atom, PointMass{tau}});
  return MixtureDist(std::move(e));
}

enum class ZChoice { On, Off };

/// (g^, p^) for non-negligible contacts: the negligible (g, p) with every
/// OFF landing thinned by the chance that the contact also ends inside OFF.
inline GPpair g_p_nonneg(const DistSpec& s, const DistSpec& c, double tau, double period, ZChoice z = ZChoice::On,
                         const GPNumericOptions& opt = {}) {
  detail::check_window(tau, period);
  const GPpair gp = g_p(s, tau, period, opt);
  const double m = uniform_plus_dist_cdf(period - tau, c, period - tau);
  GPpair out{1.0 - (1.0 - gp.g) * m, 1.0 - (1.0 - gp.p) * m};
  if (z == ZChoice::Off) out.g = out.p;
  out.g = detail::checked_probability(out.g, "g^");
  out.p = detail::checked_probability(out.p, "p^");
  return out;
}

struct STildeNonnegOptions {
  ZChoice z = ZChoice::On;
  std::size_t budget = kPredictionBudget;
  std::uint64_t seed = kPredictionSeed;
};

/// Measured intercontact time for non-negligible contacts.
inline MixtureDist dist_s_tilde_nonneg(const DistSpec& s, const DistSpec& c, double tau, double period,
                                       SleepPolicy policy, const STildeNonnegOptions& opt = {}) {
  auto m = std::make_shared<const ContactModel>(c, tau, period);
  const GPpair gp = g_p_nonneg(s, c, tau, period, opt.z);
  const double w = period - tau;
  auto miss_inv = std::make_shared<TabulatedInverse>([m](double x) { return m->miss_cdf(x); }, w);
  auto draw = [s, gp, w, period, miss_inv](RandomStream& r) {
    auto residual = [&] { return r.uniform() < w / period ? r.uniform(0.0, w) : 0.0; };
    double acc = residual();
    const long long n = sample_n(gp, r);
    for (long long i = 0; i < n; ++i) acc += sample(s, r);
    for (long long i = 1; i < n; ++i) acc += (*miss_inv)(r);
    return acc + residual();
  };
  SamplerOnly body = make_sampler_only("R+sum S+sum C_miss+R", draw, opt.budget, RandomStream(opt.seed, 0));
  std::vector<MixtureDist::Entry> e;
  if (policy == SleepPolicy::StayAwakeOnContact) {
    e.push_back({1.0, std::move(body)});
  } else {
    const double eh = m->mean_h();
    e.push_back({1.0 / eh, std::move(body)});
    e.push_back({(eh - 1.0) / eh, PointMass{w}});
  }
  return MixtureDist(std::move(e));
}

}  // namespace dcp
