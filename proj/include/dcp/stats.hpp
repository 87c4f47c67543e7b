#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "dcp/error.hpp"

namespace dcp {

struct SampleMoments {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
  double cv2 = 0.0;
  std::size_t n = 0;
};

inline SampleMoments sample_moments(const std::vector<double>& x) {
  if (x.empty()) throw DomainError("sample_moments: empty sample");
  // Welford for the variance; the raw second moment is derived from it.
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double v : x) {
    ++k;
    const double d = v - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (v - mean);
  }
  SampleMoments m;
  m.n = x.size();
  m.mean = mean;
  m.variance = m2 / static_cast<double>(x.size());
  m.second_moment = m.variance + mean * mean;
  m.cv2 = mean != 0.0 ? m.variance / (mean * mean) : 0.0;
  return m;
}

template <class Int>
SampleMoments sample_moments_counts(const std::vector<Int>& x) {
  std::vector<double> d(x.begin(), x.end());
  return sample_moments(d);
}

/// sup_x |ECDF(x) - F(x)| for a sample against a model CDF (sample is copied and sorted).
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sample.size()) {
    std::size_t j = i;
    while (j < sample.size() && sample[j] == sample[i]) ++j;
    const double f = cdf(sample[i]);
    // left limits compared separately so that model atoms are handled
    const double f_left = cdf(std::nextafter(sample[i], -std::numeric_limits<double>::infinity()));
    d = std::max(d, std::abs(f - static_cast<double>(j) / n));
    d = std::max(d, std::abs(static_cast<double>(i) / n - f_left));
    i = j;
  }
  return d;
}

/// Two-sample Kolmogorov distance.
inline double ks_distance_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_distance_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// Empirical PMF of positive integer counts: index k holds P(X = k), k >= 0.
template <class Int>
std::vector<double> empirical_pmf(const std::vector<Int>& counts) {
  if (counts.empty()) throw DomainError("empirical_pmf: empty sample");
  const auto mx = static_cast<std::size_t>(*std::max_element(counts.begin(), counts.end()));
  std::vector<double> pmf(mx + 1, 0.0);
  for (auto c : counts) pmf[static_cast<std::size_t>(c)] += 1.0;
  for (auto& v : pmf) v /= static_cast<double>(counts.size());
  return pmf;
}

/// Total-variation distance between an empirical PMF and a model PMF on
/// k >= 1; model mass beyond the empirical support is included via
/// 1 - sum of the model terms visited.
inline double tv_distance(const std::vector<double>& empirical, const std::function<double(std::size_t)>& model) {
  double acc = 0.0, model_mass = 0.0;
  for (std::size_t k = 1; k < empirical.size(); ++k) {
    const double m = model(k);
    model_mass += m;
    acc += std::abs(empirical[k] - m);
  }
  acc += std::max(0.0, 1.0 - model_mass);
  return 0.5 * acc;
}

/// Fraction of samples exactly equal to v.
inline double fraction_equal(const std::vector<double>& x, double v) {
  if (x.empty()) return 0.0;
  return static_cast<double>(std::count(x.begin(), x.end(), v)) / static_cast<double>(x.size());
}

/// Least-squares slope of log10 CCDF against log10 x using the empirical
/// CCDF evaluated at `points` log-spaced abscissae in [x_lo, x_hi].
inline double loglog_ccdf_slope(std::vector<double> sample, double x_lo, double x_hi, int points = 20) {
  if (sample.empty() || !(x_lo > 0.0) || !(x_hi > x_lo)) throw DomainError("loglog_ccdf_slope: bad range");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int i = 0; i < points; ++i) {
    const double lx = std::log10(x_lo) + (std::log10(x_hi) - std::log10(x_lo)) * i / (points - 1);
    const double x = std::pow(10.0, lx);
    const auto above = sample.end() - std::upper_bound(sample.begin(), sample.end(), x);
    if (above == 0) continue;
    const double ly = std::log10(static_cast<double>(above) / n);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) throw DomainError("loglog_ccdf_slope: not enough tail points");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Empirical quantile with linear interpolation on a sorted copy.
inline double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw DomainError("quantile: empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= x.size()) return x.back();
  return x[i] + (pos - static_cast<double>(i)) * (x[i + 1] - x[i]);
}

/// Log-log CCDF slope over the top `decades` decades of probability that
/// the sample resolves: CCDF from 10^-1 (or 10^-(decades) above the floor)
/// down to max(10^-(1+decades), 20/n).
inline double tail_slope_top_decades(const std::vector<double>& sample, double decades = 2.0) {
  const double n = static_cast<double>(sample.size());
  const double p_lo = std::max(std::pow(10.0, -1.0 - decades), 20.0 / n);
  const double p_hi = std::min(0.1, p_lo * std::pow(10.0, decades));
  if (!(p_hi > p_lo)) throw DomainError("tail_slope_top_decades: sample too small");
  return loglog_ccdf_slope(sample, quantile(sample, 1.0 - p_hi), quantile(sample, 1.0 - p_lo));
}

}  // namespace dcp
