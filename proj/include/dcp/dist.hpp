#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dcp/error.hpp"
#include "dcp/random.hpp"

namespace dcp {

/// Exponential durations, rate in 1/s.
struct Exponential {
  double rate;
};

/// Lomax (shifted Pareto) durations: P(X > x) = (b / (b + x))^shape, x >= 0.
/// Support starts at 0, mean b / (shape - 1), tail ~ (b / x)^shape.
struct Pareto {
  double shape;
  double scale;
};

/// Step-ECDF distribution over observed durations.
class Empirical {
 public:
  explicit Empirical(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw DomainError("empirical distribution needs at least one sample");
    for (double v : sorted_) {
      if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("empirical samples must be positive and finite");
    }
    std::sort(sorted_.begin(), sorted_.end());
    prefix_.resize(sorted_.size() + 1, 0.0);
    std::partial_sum(sorted_.begin(), sorted_.end(), prefix_.begin() + 1);
    bin_width_ = freedman_diaconis_width();
  }

  const std::vector<double>& samples() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }
  double bin_width() const { return bin_width_; }

  double cdf(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
  }

  double ccdf(double x) const { return 1.0 - cdf(x); }

  double pdf(double x) const {
    if (x < 0.0) return 0.0;
    const double lo = std::floor(x / bin_width_) * bin_width_;
    const double hi = lo + bin_width_;
    const auto a = std::lower_bound(sorted_.begin(), sorted_.end(), lo);
    const auto b = std::lower_bound(sorted_.begin(), sorted_.end(), hi);
    return static_cast<double>(b - a) / (static_cast<double>(sorted_.size()) * bin_width_);
  }

  /// Integral of the CCDF over [lo, hi], 0 <= lo <= hi.
  double ccdf_integral(double lo, double hi) const {
    hi = std::min(hi, sorted_.back());
    if (hi <= lo) return 0.0;
    const std::size_t n = sorted_.size();
    const std::size_t i_lo = std::upper_bound(sorted_.begin(), sorted_.end(), lo) - sorted_.begin();
    const std::size_t i_hi = std::lower_bound(sorted_.begin(), sorted_.end(), hi) - sorted_.begin();
    double acc = 0.0;
    if (i_hi > i_lo) acc += (prefix_[i_hi] - prefix_[i_lo]) - static_cast<double>(i_hi - i_lo) * lo;
    acc += static_cast<double>(n - std::max(i_hi, i_lo)) * (hi - lo);
    return acc / static_cast<double>(n);
  }

  double mean() const { return prefix_.back() / static_cast<double>(sorted_.size()); }

  double second_moment() const {
    double acc = 0.0;
    for (double v : sorted_) acc += v * v;
    return acc / static_cast<double>(sorted_.size());
  }

  double sample(RandomStream& rng) const { return sorted_[rng.below(sorted_.size())]; }

 private:
  double quantile(double q) const {
    const double pos = q * static_cast<double>(sorted_.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= sorted_.size()) return sorted_.back();
    return sorted_[i] + frac * (sorted_[i + 1] - sorted_[i]);
  }

  double freedman_diaconis_width() const {
    const double iqr = quantile(0.75) - quantile(0.25);
    const double n = static_cast<double>(sorted_.size());
    double h = 2.0 * iqr / std::cbrt(n);
    if (!(h > 0.0)) {
      const double range = sorted_.back() - sorted_.front();
      h = range > 0.0 ? range / std::sqrt(n) : std::max(sorted_.back() * 1e-3, 1e-9);
    }
    return h;
  }

  std::vector<double> sorted_;
  std::vector<double> prefix_;
  double bin_width_ = 1.0;
};

/// Distribution of a contact or intercontact duration.
class DistSpec {
 public:
  using Variant = std::variant<Exponential, Pareto, Empirical>;

  static DistSpec exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("exponential rate must be positive");
    return DistSpec(Exponential{rate});
  }
  static DistSpec pareto(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
      throw DomainError("pareto shape and scale must be positive");
    }
    return DistSpec(Pareto{shape, scale});
  }
  static DistSpec empirical(std::vector<double> samples) { return DistSpec(Empirical(std::move(samples))); }

  const Variant& variant() const { return v_; }
  bool is_exponential() const { return std::holds_alternative<Exponential>(v_); }
  bool is_pareto() const { return std::holds_alternative<Pareto>(v_); }
  bool is_empirical() const { return std::holds_alternative<Empirical>(v_); }
  const Exponential& as_exponential() const { return std::get<Exponential>(v_); }
  const Pareto& as_pareto() const { return std::get<Pareto>(v_); }
  const Empirical& as_empirical() const { return std::get<Empirical>(v_); }

  /// Parametric kinds have a non-increasing density on [0, inf).
  bool has_monotone_density() const { return !is_empirical(); }

  std::string describe() const;

 private:
  explicit DistSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

enum class Which { Pdf, Cdf, Ccdf };

inline double ccdf(const DistSpec& d, double x) {
  if (x < 0.0) return 1.0;
  return std::visit(
      [x](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return std::exp(-k.rate * x);
        } else if constexpr (std::is_same_v<K, Pareto>) {
          return std::exp(-k.shape * std::log1p(x / k.scale));
        } else {
          return k.ccdf(x);
        }
      },
      d.variant());
}

inline double cdf(const DistSpec& d, double x) {
  if (x < 0.0) return 0.0;
  return std::visit(
      [x](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return -std::expm1(-k.rate * x);
        } else if constexpr (std::is_same_v<K, Pareto>) {
          return -std::expm1(-k.shape * std::log1p(x / k.scale));
        } else {
          return k.cdf(x);
        }
      },
      d.variant());
}

inline double pdf(const DistSpec& d, double x) {
  if (x < 0.0) return 0.0;
  return std::visit(
      [x](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return k.rate * std::exp(-k.rate * x);
        } else if constexpr (std::is_same_v<K, Pareto>) {
          return k.shape / k.scale * std::exp(-(k.shape + 1.0) * std::log1p(x / k.scale));
        } else {
          return k.pdf(x);
        }
      },
      d.variant());
}

inline double dist_eval(const DistSpec& d, Which which, double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("dist_eval: x must be non-negative");
  switch (which) {
    case Which::Pdf:
      return pdf(d, x);
    case Which::Cdf:
      return cdf(d, x);
    case Which::Ccdf:
      return ccdf(d, x);
  }
  return 0.0;
}

struct Moments {
  double mean = 0.0;
  double second_moment = 0.0;
  std::optional<double> cv2;  // empty when the second moment is infinite

  bool finite() const { return std::isfinite(mean) && std::isfinite(second_moment); }
};

inline Moments moments_from_raw(double mean, double second) {
  Moments m{mean, second, std::nullopt};
  if (std::isfinite(mean) && std::isfinite(second) && mean > 0.0) m.cv2 = second / (mean * mean) - 1.0;
  return m;
}

inline Moments dist_moments(const DistSpec& d) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      [](const auto& k) -> Moments {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return moments_from_raw(1.0 / k.rate, 2.0 / (k.rate * k.rate));
        } else if constexpr (std::is_same_v<K, Pareto>) {
          const double a = k.shape, b = k.scale;
          const double m1 = a > 1.0 ? b / (a - 1.0) : inf;
          const double m2 = a > 2.0 ? 2.0 * b * b / ((a - 1.0) * (a - 2.0)) : inf;
          return moments_from_raw(m1, m2);
        } else {
          return moments_from_raw(k.mean(), k.second_moment());
        }
      },
      d.variant());
}

inline double sample(const DistSpec& d, RandomStream& rng) {
  return std::visit(
      [&rng](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return rng.exponential(k.rate);
        } else if constexpr (std::is_same_v<K, Pareto>) {
          return k.scale * std::expm1(-std::log(rng.uniform()) / k.shape);
        } else {
          return k.sample(rng);
        }
      },
      d.variant());
}

/// Integral of the CCDF over [lo, hi] (CCDF is 1 on negative arguments).
inline double ccdf_integral(const DistSpec& d, double lo, double hi) {
  if (hi <= lo) return 0.0;
  double acc = 0.0;
  if (lo < 0.0) {
    acc += std::min(hi, 0.0) - lo;
    lo = 0.0;
    if (hi <= 0.0) return acc;
  }
  acc += std::visit(
      [lo, hi](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return std::exp(-k.rate * lo) * -std::expm1(-k.rate * (hi - lo)) / k.rate;
        } else if constexpr (std::is_same_v<K, Pareto>) {
          const double b = k.scale;
          const double log_ratio = std::log1p((hi - lo) / (b + lo));
          const double one_minus = 1.0 - k.shape;
          if (one_minus == 0.0) return b * log_ratio;
          // b/(a-1) * (1+lo/b)^(1-a) * (1 - ((b+hi)/(b+lo))^(1-a))
          return b * std::exp(one_minus * std::log1p(lo / b)) * std::expm1(one_minus * log_ratio) / one_minus;
        } else {
          return k.ccdf_integral(lo, hi);
        }
      },
      d.variant());
  return acc;
}

/// P(Z + S > x) with Z ~ Unif(0, w) independent of S ~ d.
inline double uniform_plus_dist_ccdf(double w, const DistSpec& d, double x) {
  if (!(w > 0.0)) throw DomainError("uniform_plus_dist: width must be positive");
  if (x <= 0.0) return 1.0;
  return std::min(1.0, ccdf_integral(d, x - w, x) / w);
}

/// P(Z + S <= x) with Z ~ Unif(0, w): (1/w) * integral_0^w F_S(x - z) dz.
inline double uniform_plus_dist_cdf(double w, const DistSpec& d, double x) {
  if (!(w > 0.0)) throw DomainError("uniform_plus_dist: width must be positive");
  if (x < 0.0) throw DomainError("uniform_plus_dist: x must be non-negative");
  if (x == 0.0) return 0.0;
  // For x < w part of the window sits below zero where F_S = 0.
  if (x < w) return std::max(0.0, (x - ccdf_integral(d, 0.0, x)) / w);
  return std::max(0.0, 1.0 - ccdf_integral(d, x - w, x) / w);
}

inline std::string DistSpec::describe() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return "exp:" + std::to_string(k.rate);
        } else if constexpr (std::is_same_v<K, Pareto>) {
          return "pareto:" + std::to_string(k.shape) + ":" + std::to_string(k.scale);
        } else {
          return "empirical(n=" + std::to_string(k.size()) + ")";
        }
      },
      v_);
}

}  // namespace dcp
