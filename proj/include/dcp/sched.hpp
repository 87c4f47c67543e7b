#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "dcp/error.hpp"
#include "dcp/random.hpp"

namespace dcp {

enum class Phase { On, Off };

inline const char* to_string(Phase p) { return p == Phase::On ? "ON" : "OFF"; }

/// Deterministic (tau, T) schedule or a pair of independent exponential
/// ON/OFF chains (beta: ON->OFF rate, alpha: OFF->ON rate).
struct DutyCycleSpec {
  enum class Kind { Deterministic, Stochastic };

  Kind kind = Kind::Deterministic;
  double tau = 0.0;
  double period = 0.0;
  double on_rate_beta = 0.0;
  double off_rate_alpha = 0.0;
  bool stay_awake_on_contact = false;

  static DutyCycleSpec deterministic(double tau, double period, bool stay_awake = false) {
    DutyCycleSpec dc;
    dc.kind = Kind::Deterministic;
    dc.tau = tau;
    dc.period = period;
    dc.stay_awake_on_contact = stay_awake;
    dc.validate();
    return dc;
  }

  static DutyCycleSpec stochastic(double beta, double alpha, bool stay_awake = false) {
    DutyCycleSpec dc;
    dc.kind = Kind::Stochastic;
    dc.on_rate_beta = beta;
    dc.off_rate_alpha = alpha;
    dc.stay_awake_on_contact = stay_awake;
    dc.validate();
    return dc;
  }

  bool is_deterministic() const { return kind == Kind::Deterministic; }
  bool always_on() const { return is_deterministic() && tau == period; }
  double off_length() const { return period - tau; }
  double duty() const { return tau / period; }

  void validate() const {
    if (is_deterministic()) {
      if (!std::isfinite(tau) || !std::isfinite(period) || !(period > 0.0)) {
        throw DomainError("duty cycle: period must be positive and finite");
      }
      if (!(tau > 0.0)) throw DomainError("duty cycle: tau must be positive");
      if (tau > period) throw DomainError("duty cycle: tau must not exceed the period");
    } else {
      if (!(on_rate_beta > 0.0) || !(off_rate_alpha > 0.0) || !std::isfinite(on_rate_beta) ||
          !std::isfinite(off_rate_alpha)) {
        throw DomainError("duty cycle: stochastic rates must be positive and finite");
      }
    }
  }

  std::string describe() const {
    if (is_deterministic()) return "det:" + std::to_string(tau) + ":" + std::to_string(period);
    return "stoch:" + std::to_string(on_rate_beta) + ":" + std::to_string(off_rate_alpha);
  }
};

struct IntervalId {
  long long index = 0;
  Phase phase = Phase::On;
  bool operator==(const IntervalId&) const = default;
};

inline void require_deterministic(const DutyCycleSpec& dc) {
  if (!dc.is_deterministic()) throw DomainError("operation needs a deterministic duty cycle");
}

inline IntervalId interval_of(const DutyCycleSpec& dc, double t) {
  require_deterministic(dc);
  if (!(t >= 0.0)) throw DomainError("interval_of: t must be non-negative");
  const double n = std::floor(t / dc.period);
  double r = t - n * dc.period;
  long long idx = static_cast<long long>(n);
  // floor/multiply rounding can leave r a hair outside [0, T)
  if (r >= dc.period) {
    r -= dc.period;
    ++idx;
  } else if (r < 0.0) {
    r += dc.period;
    --idx;
  }
  return {idx, r < dc.tau ? Phase::On : Phase::Off};
}

inline Phase phase_at(const DutyCycleSpec& dc, double t) { return interval_of(dc, t).phase; }

struct Segment {
  double start = 0.0;
  double end = 0.0;
  Phase phase = Phase::On;
  double length() const { return end - start; }
};

struct JointSchedule {
  std::vector<Segment> segments;
  double horizon = 0.0;

  void write_csv(std::ostream& os) const {
    os << "start,end,phase\n";
    os.precision(17);
    for (const auto& s : segments) os << s.start << ',' << s.end << ',' << to_string(s.phase) << '\n';
  }
};

/// Joint ON/OFF process of two nodes with independent exponential chains.
/// Produces maximal joint segments one at a time; `jump_to` moves the
/// process to an arbitrary later time using the exact two-state transition
/// law, so long idle stretches cost O(1).
class JointChain {
 public:
  JointChain(const DutyCycleSpec& dc, RandomStream rng) : dc_(dc), rng_(rng) {
    if (dc.is_deterministic()) throw DomainError("JointChain needs a stochastic duty cycle");
    on_[0] = on_[1] = true;
    for (int i = 0; i < 2; ++i) next_[i] = rng_.exponential(dc_.on_rate_beta);
    seg_.start = 0.0;
    seg_.phase = Phase::On;
    seg_.end = std::min(next_[0], next_[1]);
  }

  const Segment& current() const { return seg_; }

  /// Advance to the following joint segment.
  void next() {
    const bool was_on = seg_.phase == Phase::On;
    const double boundary = seg_.end;
    double t = boundary;
    // Flip the node(s) whose switch caused the segment boundary, then keep
    // flipping until the joint state differs from the previous one.
    for (;;) {
      const int i = next_[0] <= next_[1] ? 0 : 1;
      t = next_[i];
      flip(i, t);
      const bool joint_on = on_[0] && on_[1];
      if (joint_on != was_on) break;
    }
    seg_.phase = was_on ? Phase::Off : Phase::On;
    // t equals boundary up to rounding once the chain has been shifted
    seg_.start = boundary;
    seg_.end = std::max(segment_end(), boundary);
  }

  /// Reposition the chain at time t >= current().start. If t lies in the
  /// current segment nothing changes; otherwise node states at t are drawn
  /// from their transition law and the current segment starts at t.
  void jump_to(double t) {
    if (t < seg_.end) return;
    const double a = dc_.off_rate_alpha, b = dc_.on_rate_beta;
    const double pi_on = a / (a + b);
    for (int i = 0; i < 2; ++i) {
      if (next_[i] > t) continue;  // node i has not switched since; memoryless
      const double dt = t - next_[i];
      // state just after the switch at next_[i] is !on_[i]
      const bool after = !on_[i];
      const double decay = std::exp(-(a + b) * dt);
      const double p_on = after ? pi_on + (1.0 - pi_on) * decay : pi_on * (1.0 - decay);
      on_[i] = rng_.uniform() < p_on;
      next_[i] = t + rng_.exponential(on_[i] ? b : a);
    }
    seg_.start = t;
    seg_.phase = on_[0] && on_[1] ? Phase::On : Phase::Off;
    seg_.end = segment_end();
  }

  /// Subtract `offset` from all stored times (keeps magnitudes small).
  void shift(double offset) {
    seg_.start -= offset;
    seg_.end -= offset;
    next_[0] -= offset;
    next_[1] -= offset;
  }

 private:
  void flip(int i, double t) {
    on_[i] = !on_[i];
    next_[i] = t + rng_.exponential(on_[i] ? dc_.on_rate_beta : dc_.off_rate_alpha);
  }

  // End of the joint segment that starts now given the node states.
  double segment_end() {
    if (on_[0] && on_[1]) return std::min(next_[0], next_[1]);
    // Joint OFF lasts until both nodes are ON at the same time. Simulate on
    // copies so the real state is only advanced by next().
    bool on[2] = {on_[0], on_[1]};
    double nx[2] = {next_[0], next_[1]};
    RandomStream probe = rng_;
    for (;;) {
      const int i = nx[0] <= nx[1] ? 0 : 1;
      const double t = nx[i];
      on[i] = !on[i];
      nx[i] = t + probe.exponential(on[i] ? dc_.on_rate_beta : dc_.off_rate_alpha);
      if (on[0] && on[1]) return t;
    }
  }

  DutyCycleSpec dc_;
  RandomStream rng_;
  bool on_[2];
  double next_[2];
  Segment seg_;
};

struct OffMoments {
  double mean;
  double second_moment;
  double cv2;
};

/// Moments of a joint OFF period for two independent exponential chains.
inline OffMoments joint_off_moments(const DutyCycleSpec& dc) {
  if (dc.is_deterministic()) throw DomainError("joint_off_moments needs a stochastic duty cycle");
  const double a = dc.off_rate_alpha, b = dc.on_rate_beta;
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("joint_off_moments: rates must be positive");
  const double mean = (2.0 * a + b) / (2.0 * a * a);
  const double poly = 10.0 * a * a * a + 11.0 * a * a * b + 6.0 * a * b * b + b * b * b;
  const double second = poly / (2.0 * a * a * a * a * (a + b));
  // ratio E[T^2]/E[T]^2 in a form that survives a or b -> 0
  const double ratio = 2.0 * poly / ((a + b) * (2.0 * a + b) * (2.0 * a + b));
  return {mean, second, ratio - 1.0};
}

/// Moments of the joint OFF period computed directly from the two-node
/// chain (states: one node OFF, both OFF). The mean agrees with
/// joint_off_moments; the second moment does not.
inline OffMoments joint_off_moments_ctmc(const DutyCycleSpec& dc) {
  if (dc.is_deterministic()) throw DomainError("joint_off_moments_ctmc needs a stochastic duty cycle");
  const double a = dc.off_rate_alpha, b = dc.on_rate_beta;
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("joint_off_moments_ctmc: rates must be positive");
  const double mean = (2.0 * a + b) / (2.0 * a * a);
  const double second = (a + b) * (4.0 * a + b) / (2.0 * a * a * a * a);
  const double ratio = 2.0 * (a + b) * (4.0 * a + b) / ((2.0 * a + b) * (2.0 * a + b));
  return {mean, second, ratio - 1.0};
}

/// Deterministic schedule with the same mean joint ON and OFF lengths.
inline DutyCycleSpec deterministic_equivalent(const DutyCycleSpec& dc) {
  const auto off = joint_off_moments(dc);
  const double tau = 1.0 / (2.0 * dc.on_rate_beta);
  return DutyCycleSpec::deterministic(tau, tau + off.mean, dc.stay_awake_on_contact);
}

/// Number of expected joint cycles simulated and discarded before t = 0.
inline constexpr double kJointWarmupCycles = 100.0;

inline JointChain warmed_joint_chain(const DutyCycleSpec& dc, RandomStream rng) {
  JointChain chain(dc, rng);
  const double cycle = 1.0 / (2.0 * dc.on_rate_beta) + joint_off_moments(dc).mean;
  const double warm = kJointWarmupCycles * cycle;
  while (chain.current().end <= warm) chain.next();
  chain.shift(warm);
  return chain;
}

/// Joint schedule over [0, horizon), both nodes started ON before a
/// discarded warm-up.
inline JointSchedule sample_joint_schedule(const DutyCycleSpec& dc, double horizon, RandomStream rng) {
  if (dc.is_deterministic()) throw DomainError("sample_joint_schedule needs a stochastic duty cycle");
  if (!(horizon > 0.0)) throw DomainError("sample_joint_schedule: horizon must be positive");
  JointSchedule js;
  js.horizon = horizon;
  JointChain chain = warmed_joint_chain(dc, rng);
  for (;;) {
    Segment s = chain.current();
    s.start = std::max(s.start, 0.0);
    s.end = std::min(s.end, horizon);
    if (s.end > s.start) js.segments.push_back(s);
    if (chain.current().end >= horizon) break;
    chain.next();
  }
  return js;
}

}  // namespace dcp
