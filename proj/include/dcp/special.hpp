#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "dcp/error.hpp"

namespace dcp {

namespace detail {

// B_2, B_4, ..., B_26 divided by (2k)!.
inline constexpr std::array<double, 13> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
    854513.0 / 138.0 / 1.1240007277776077e21,
    -236364091.0 / 2730.0 / 6.204484017332394e23,
    8553103.0 / 6.0 / 4.0329146112660565e26,
};

// Start of the Euler-Maclaurin tail; below it terms are summed directly.
inline constexpr double kZetaTailStart = 20.0;

// (u1 + u2)^k - u1^k - u2^k for u1, u2 >= 0 without cancellation.
inline double cross_power(double u1, double u2, int k) {
  if (u1 < u2) std::swap(u1, u2);
  if (u2 == 0.0) return 0.0;
  return std::pow(u1, k) * std::expm1(k * std::log1p(u2 / u1)) - std::pow(u2, k);
}

// Series part of y^q [1 - (1+u1)^q - (1+u2)^q + (1+u1+u2)^q] / y^q, i.e.
// sum_{k>=2} c_k * cross_power(u1, u2, k) where c_k = binom(q, k) / q_div.
// `over_q` drops the leading factor q from the binomial coefficient.
inline double dd_series(double q, double u1, double u2, bool over_q) {
  double coeff = over_q ? (q - 1.0) / 2.0 : q * (q - 1.0) / 2.0;  // k = 2
  double sum = 0.0;
  for (int k = 2; k < 400; ++k) {
    if (k > 2) coeff *= (q - k + 1) / k;
    const double term = coeff * cross_power(u1, u2, k);
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum) || term == 0.0) {
      if (k > 3) break;
    }
  }
  return sum;
}

}  // namespace detail

/// y^q - (y+h1)^q - (y+h2)^q + (y+h1+h2)^q for y > 0, h1, h2 >= 0.
inline double power_double_difference(double q, double y, double h1, double h2) {
  const double u1 = h1 / y, u2 = h2 / y;
  if (u1 + u2 <= 0.5) return std::pow(y, q) * detail::dd_series(q, u1, u2, false);
  return std::pow(y, q) - std::pow(y + h1, q) - std::pow(y + h2, q) + std::pow(y + h1 + h2, q);
}

/// The same double difference divided by q; continuous through q = 0 where
/// it becomes the double difference of log(y).
inline double power_double_difference_over_q(double q, double y, double h1, double h2) {
  const double u1 = h1 / y, u2 = h2 / y;
  if (u1 + u2 <= 0.5) return std::pow(y, q) * detail::dd_series(q, u1, u2, true);
  auto e = [q](double x) {
    const double l = std::log(x);
    return q == 0.0 ? l : std::expm1(q * l) / q;
  };
  return e(y) - e(y + h1) - e(y + h2) + e(y + h1 + h2);
}

/// Hurwitz zeta function zeta(s, a) = sum_{n>=0} (n + a)^-s, analytically
/// continued to all real s != 1. Euler-Maclaurin summation: direct terms
/// until n + a >= 20, then twelve Bernoulli corrections.
inline double hurwitz_zeta(double s, double a) {
  if (s == 1.0) throw DomainError("hurwitz_zeta: pole at s = 1");
  if (!(a > 0.0)) throw DomainError("hurwitz_zeta: a must be positive");
  if (!std::isfinite(s) || !std::isfinite(a)) throw DomainError("hurwitz_zeta: non-finite argument");
  double sum = 0.0;
  double y = a;
  while (y < detail::kZetaTailStart) {
    sum += std::pow(y, -s);
    y += 1.0;
  }
  sum += std::pow(y, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(y, -s);
  double poch = s;  // s (s+1) ... (s+2k-2)
  for (std::size_t k = 1; k <= detail::kBernoulliOverFactorial.size(); ++k) {
    if (k > 1) poch *= (s + 2.0 * k - 3.0) * (s + 2.0 * k - 2.0);
    const double term = detail::kBernoulliOverFactorial[k - 1] * poch * std::pow(y, -s - 2.0 * k + 1.0);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

/// zeta(s, a) - zeta(s, a+h1) - zeta(s, a+h2) + zeta(s, a+h1+h2), evaluated
/// term by term so that no large zeta values are subtracted. Finite at s = 1.
inline double hurwitz_zeta_double_difference(double s, double a, double h1, double h2) {
  if (!(a > 0.0)) throw DomainError("hurwitz_zeta_double_difference: a must be positive");
  if (h1 < 0.0 || h2 < 0.0) throw DomainError("hurwitz_zeta_double_difference: negative step");
  double sum = 0.0;
  double y = a;
  while (y < detail::kZetaTailStart) {
    sum += power_double_difference(-s, y, h1, h2);
    y += 1.0;
  }
  // integral term: y^(1-s)/(s-1) = -(y^q)/q with q = 1 - s
  sum -= power_double_difference_over_q(1.0 - s, y, h1, h2);
  sum += 0.5 * power_double_difference(-s, y, h1, h2);
  double poch = s;
  for (std::size_t k = 1; k <= detail::kBernoulliOverFactorial.size(); ++k) {
    if (k > 1) poch *= (s + 2.0 * k - 3.0) * (s + 2.0 * k - 2.0);
    const double term = detail::kBernoulliOverFactorial[k - 1] * poch *
                        power_double_difference(-s - 2.0 * k + 1.0, y, h1, h2);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace dcp
