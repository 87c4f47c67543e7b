#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dcp/error.hpp"
#include "dcp/random.hpp"

namespace dcp {

/// Component with an analytic CDF (and density, where one exists).
struct AnalyticDensity {
  std::string name;
  std::function<double(double)> cdf;
  std::function<double(double)> pdf;
  std::function<double(RandomStream&)> sampler;
};

struct PointMass {
  double value = 0.0;
};

/// Component known only through a sampler; its CDF is estimated once from a
/// fixed, seeded sample.
struct SamplerOnly {
  std::string name;
  std::function<double(RandomStream&)> sampler;
  std::shared_ptr<const std::vector<double>> sorted_sample;

  double cdf(double x) const {
    const auto& s = *sorted_sample;
    return static_cast<double>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) / static_cast<double>(s.size());
  }
};

inline SamplerOnly make_sampler_only(std::string name, std::function<double(RandomStream&)> sampler,
                                     std::size_t budget, RandomStream rng) {
  if (budget == 0) throw DomainError("sampler-only component needs a positive sample budget");
  auto v = std::make_shared<std::vector<double>>(budget);
  for (auto& x : *v) x = sampler(rng);
  std::sort(v->begin(), v->end());
  return {std::move(name), std::move(sampler), std::move(v)};
}

class MixtureDist {
 public:
  using Component = std::variant<AnalyticDensity, PointMass, SamplerOnly>;

  struct Entry {
    double weight;
    Component component;
  };

  /// Weights must sum to 1 within 1e-9; drift up to 1e-6 is renormalised,
  /// larger drift is a model inconsistency.
  explicit MixtureDist(std::vector<Entry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ModelInconsistency("mixture has no components");
    double total = 0.0;
    for (const auto& e : entries_) {
      if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
        throw ModelInconsistency("mixture weight " + std::to_string(e.weight) + " is not a probability");
      }
      total += e.weight;
    }
    if (std::abs(total - 1.0) > 1e-6) {
      throw ModelInconsistency("mixture weights sum to " + std::to_string(total));
    }
    if (std::abs(total - 1.0) > 1e-9) {
      for (auto& e : entries_) e.weight /= total;
    }
  }

  const std::vector<Entry>& entries() const { return entries_; }

  double cdf(double x) const {
    double acc = 0.0;
    for (const auto& e : entries_) {
      if (e.weight == 0.0) continue;
      acc += e.weight * std::visit(
                            [x](const auto& c) -> double {
                              using C = std::decay_t<decltype(c)>;
                              if constexpr (std::is_same_v<C, PointMass>) {
                                return x >= c.value ? 1.0 : 0.0;
                              } else {
                                return c.cdf(x);
                              }
                            },
                            e.component);
    }
    return std::clamp(acc, 0.0, 1.0);
  }

  /// Total weight of point masses located exactly at v.
  double atom_at(double v) const {
    double acc = 0.0;
    for (const auto& e : entries_) {
      if (const auto* pm = std::get_if<PointMass>(&e.component); pm && pm->value == v) acc += e.weight;
    }
    return acc;
  }

  double sample(RandomStream& rng) const {
    double u = rng.uniform();
    const Entry* chosen = &entries_.back();
    for (const auto& e : entries_) {
      if (u < e.weight) {
        chosen = &e;
        break;
      }
      u -= e.weight;
    }
    return std::visit(
        [&rng](const auto& c) -> double {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, PointMass>) {
            return c.value;
          } else {
            return c.sampler(rng);
          }
        },
        chosen->component);
  }

  /// CDF evaluated on a grid, for plotting and comparisons.
  std::vector<std::pair<double, double>> cdf_grid(double lo, double hi, std::size_t points) const {
    std::vector<std::pair<double, double>> g;
    g.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
      const double x = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
      g.emplace_back(x, cdf(x));
    }
    return g;
  }

 private:
  std::vector<Entry> entries_;
};

/// Inverse-CDF sampler for a continuous CDF on [0, upper] built from a
/// tabulated grid with linear interpolation.
class TabulatedInverse {
 public:
  TabulatedInverse(const std::function<double(double)>& cdf, double upper, std::size_t points = 4097)
      : x_(points), f_(points) {
    for (std::size_t i = 0; i < points; ++i) {
      x_[i] = upper * static_cast<double>(i) / static_cast<double>(points - 1);
      f_[i] = i == 0 ? 0.0 : std::max(f_[i - 1], cdf(x_[i]));
    }
    f_.back() = 1.0;
  }

  double operator()(RandomStream& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(f_.begin(), f_.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - f_.begin());
    if (i == 0) return x_.front();
    if (i >= f_.size()) return x_.back();
    const double span = f_[i] - f_[i - 1];
    const double t = span > 0.0 ? (u - f_[i - 1]) / span : 0.0;
    return x_[i - 1] + t * (x_[i] - x_[i - 1]);
  }

 private:
  std::vector<double> x_, f_;
};

/// Inverse of a continuous CDF on [0, inf) by bracketing and bisection.
inline double invert_cdf(const std::function<double(double)>& cdf, double u, double scale) {
  double lo = 0.0, hi = std::max(scale, 1e-12);
  for (int i = 0; i < 2000 && cdf(hi) < u; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dcp
