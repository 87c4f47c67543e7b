#pragma once

#include <cmath>
#include <string>

#include "dcp/error.hpp"
#include "dcp/quadrature.hpp"
#include "dcp/random.hpp"

namespace dcp {

/// Two-moment phase-type representation of a positive random variable.
///  - Exponential: rate1.
///  - HyperExponential: prob1 * Exp(rate1) + (1 - prob1) * Exp(rate2), balanced means.
///  - HypoExponential: Erlang(stages - 1, rate1) followed by one Exp(rate2) stage.
struct PhaseTypeSpec {
  enum class Kind { Exponential, HyperExponential, HypoExponential };
  Kind kind = Kind::Exponential;
  double prob1 = 1.0;
  double rate1 = 1.0;
  double rate2 = 1.0;
  int stages = 1;

  double mean() const {
    switch (kind) {
      case Kind::Exponential:
        return 1.0 / rate1;
      case Kind::HyperExponential:
        return prob1 / rate1 + (1.0 - prob1) / rate2;
      case Kind::HypoExponential:
        return (stages - 1) / rate1 + 1.0 / rate2;
    }
    return 0.0;
  }

  double second_moment() const {
    switch (kind) {
      case Kind::Exponential:
        return 2.0 / (rate1 * rate1);
      case Kind::HyperExponential:
        return 2.0 * prob1 / (rate1 * rate1) + 2.0 * (1.0 - prob1) / (rate2 * rate2);
      case Kind::HypoExponential: {
        const double m = mean();
        const double var = (stages - 1) / (rate1 * rate1) + 1.0 / (rate2 * rate2);
        return var + m * m;
      }
    }
    return 0.0;
  }

  double cv2() const {
    const double m = mean();
    return second_moment() / (m * m) - 1.0;
  }

  double cdf(double x) const {
    if (x <= 0.0) return 0.0;
    switch (kind) {
      case Kind::Exponential:
        return -std::expm1(-rate1 * x);
      case Kind::HyperExponential:
        return 1.0 - prob1 * std::exp(-rate1 * x) - (1.0 - prob1) * std::exp(-rate2 * x);
      case Kind::HypoExponential: {
        const int k = stages - 1;
        if (k == 0) return -std::expm1(-rate2 * x);
        // P(E + X > x) = P(E > x) + integral_0^x f_E(s) e^{-rate2 (x - s)} ds
        auto erlang_pdf = [this, k](double s) {
          return std::exp(k * std::log(rate1) + (k - 1) * std::log(s) - rate1 * s - std::lgamma(k));
        };
        const double tail = erlang_ccdf(k, rate1, x) +
                            quad([&](double s) { return erlang_pdf(s) * std::exp(-rate2 * (x - s)); }, 0.0, x);
        return std::clamp(1.0 - tail, 0.0, 1.0);
      }
    }
    return 0.0;
  }

  double sample(RandomStream& rng) const {
    switch (kind) {
      case Kind::Exponential:
        return rng.exponential(rate1);
      case Kind::HyperExponential:
        return rng.uniform() < prob1 ? rng.exponential(rate1) : rng.exponential(rate2);
      case Kind::HypoExponential: {
        double acc = rng.exponential(rate2);
        for (int i = 0; i < stages - 1; ++i) acc += rng.exponential(rate1);
        return acc;
      }
    }
    return 0.0;
  }

  std::string describe() const {
    switch (kind) {
      case Kind::Exponential:
        return "exponential(rate=" + std::to_string(rate1) + ")";
      case Kind::HyperExponential:
        return "hyperexponential(p1=" + std::to_string(prob1) + ", rate1=" + std::to_string(rate1) +
               ", rate2=" + std::to_string(rate2) + ")";
      case Kind::HypoExponential:
        return "hypoexponential(erlang " + std::to_string(stages - 1) + "x" + std::to_string(rate1) +
               " + exp " + std::to_string(rate2) + ")";
    }
    return "";
  }

  static double erlang_ccdf(int k, double rate, double x) {
    // sum_{i<k} e^{-rate x} (rate x)^i / i!
    double term = std::exp(-rate * x), acc = 0.0;
    for (int i = 0; i < k; ++i) {
      acc += term;
      term *= rate * x / (i + 1);
    }
    return acc;
  }
};

inline constexpr int kMaxPhaseStages = 100;

inline PhaseTypeSpec phase_type_fit(double mean, double cv2) {
  if (!(mean > 0.0) || !(cv2 > 0.0) || !std::isfinite(mean) || !std::isfinite(cv2)) {
    throw DomainError("phase_type_fit: mean and cv2 must be positive and finite");
  }
  PhaseTypeSpec ph;
  if (cv2 == 1.0) {
    ph.kind = PhaseTypeSpec::Kind::Exponential;
    ph.rate1 = ph.rate2 = 1.0 / mean;
    return ph;
  }
  if (cv2 > 1.0) {
    ph.kind = PhaseTypeSpec::Kind::HyperExponential;
    ph.prob1 = 0.5 * (1.0 + std::sqrt((cv2 - 1.0) / (cv2 + 1.0)));
    ph.rate1 = 2.0 * ph.prob1 / mean;
    ph.rate2 = 2.0 * (1.0 - ph.prob1) / mean;
    ph.stages = 2;
    return ph;
  }
  const int k = static_cast<int>(std::ceil(1.0 / cv2 - 1e-12));
  if (k > kMaxPhaseStages) {
    throw DomainError("phase_type_fit: cv2 = " + std::to_string(cv2) + " needs more than " +
                      std::to_string(kMaxPhaseStages) + " stages");
  }
  // (k-1) stages of mean a plus one of mean c; a solves
  // k (k-1) a^2 - 2 (k-1) m a + m^2 (1 - cv2) = 0, smaller root.
  const double km1 = k - 1.0;
  const double disc = std::max(0.0, km1 * km1 - k * km1 * (1.0 - cv2));
  const double a = k == 1 ? 0.0 : mean * (km1 - std::sqrt(disc)) / (k * km1);
  const double c = mean - km1 * a;
  ph.kind = PhaseTypeSpec::Kind::HypoExponential;
  ph.stages = k;
  ph.rate1 = k == 1 ? 1.0 : 1.0 / a;
  ph.rate2 = 1.0 / c;
  return ph;
}

}  // namespace dcp
