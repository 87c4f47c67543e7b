#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "dcp/dist.hpp"
#include "dcp/error.hpp"
#include "dcp/random.hpp"
#include "dcp/sched.hpp"
#include "dcp/stats.hpp"

namespace dcp {

enum class SimMode { NegligibleContacts, FullContacts };
enum class SleepPolicy { SleepAlways, StayAwakeOnContact };

inline const char* to_string(SimMode m) { return m == SimMode::NegligibleContacts ? "negligible" : "full"; }
inline const char* to_string(SleepPolicy p) {
  return p == SleepPolicy::SleepAlways ? "sleep-always" : "stay-awake";
}

struct SimConfig {
  SimMode mode = SimMode::NegligibleContacts;
  std::size_t n_detected_target = 100000;
  std::size_t warmup_detections = 10;
  SleepPolicy policy = SleepPolicy::SleepAlways;
  std::size_t max_contacts = 1000000000;  // starvation cap per chunk
  std::size_t chunks = 1;                 // independent replications, fixed for reproducibility
  std::size_t threads = 1;                // worker cap; does not affect results
};

struct MeasuredProcess {
  std::vector<double> s_tilde;
  std::vector<double> c_tilde;
  std::vector<long long> n_counts;
  std::vector<long long> h_counts;
  std::size_t skipped_first = 0;
  std::size_t contacts_generated = 0;
  std::size_t c_full = 0;  // measured contacts equal to the whole real contact

  struct Meta {
    std::string dc;
    std::string s_dist;
    std::string c_dist;
    std::uint64_t seed = 0;
    SimMode mode = SimMode::NegligibleContacts;
    SleepPolicy policy = SleepPolicy::SleepAlways;
  } meta;

  void append(const MeasuredProcess& o) {
    s_tilde.insert(s_tilde.end(), o.s_tilde.begin(), o.s_tilde.end());
    c_tilde.insert(c_tilde.end(), o.c_tilde.begin(), o.c_tilde.end());
    n_counts.insert(n_counts.end(), o.n_counts.begin(), o.n_counts.end());
    h_counts.insert(h_counts.end(), o.h_counts.begin(), o.h_counts.end());
    skipped_first += o.skipped_first;
    c_full += o.c_full;
    contacts_generated += o.contacts_generated;
  }

  /// Long-format CSV `quantity,value`.
  void write_csv(std::ostream& os) const {
    os << "quantity,value\n";
    os.precision(17);
    for (double v : s_tilde) os << "s_tilde," << v << '\n';
    for (double v : c_tilde) os << "c_tilde," << v << '\n';
    for (long long v : n_counts) os << "n," << v << '\n';
    for (long long v : h_counts) os << "h," << v << '\n';
  }
};

/// Fraction of detections preceded by at least one missed contact.
inline double skip_fraction(const MeasuredProcess& mp) {
  if (mp.n_counts.empty()) throw DomainError("skip_fraction: no N samples");
  const auto k = std::count_if(mp.n_counts.begin(), mp.n_counts.end(), [](long long n) { return n >= 2; });
  return static_cast<double>(k) / static_cast<double>(mp.n_counts.size());
}

namespace detail {

// Schedule views used by the filter. Times are local: the filter subtracts
// the value returned by rebase() from everything it stores.
class PeriodicView {
 public:
  explicit PeriodicView(const DutyCycleSpec& dc) : tau_(dc.tau), period_(dc.period) {}

  Segment locate(double t) const {
    double n = std::floor(t / period_);
    double r = t - n * period_;
    if (r >= period_) n += 1.0;
    if (r < 0.0) n -= 1.0;
    const double base = n * period_;
    if (t - base < tau_) return {base, base + tau_, Phase::On};
    return {base + tau_, base + period_, Phase::Off};
  }

  Segment next(const Segment& s) const {
    if (s.phase == Phase::On) return {s.end, s.start + period_, Phase::Off};
    return {s.end, s.end + tau_, Phase::On};
  }

  double rebase(double now) const { return std::floor(now / period_) * period_; }

  std::optional<double> pseudo_gap() const { return period_ - tau_; }

 private:
  double tau_, period_;
};

class ChainView {
 public:
  ChainView(const DutyCycleSpec& dc, RandomStream rng) : chain_(warmed_joint_chain(dc, rng)) {}

  Segment locate(double t) {
    chain_.jump_to(t);
    return chain_.current();
  }

  Segment next(const Segment&) {
    chain_.next();
    return chain_.current();
  }

  double rebase(double now) {
    chain_.shift(now);
    return now;
  }

  std::optional<double> pseudo_gap() const { return std::nullopt; }

 private:
  JointChain chain_;
};

struct Piece {
  double start, end;
};

template <class View>
MeasuredProcess run_filter(View& view, const DistSpec& s_dist, const std::optional<DistSpec>& c_dist,
                           const SimConfig& cfg, std::size_t target, RandomStream contact_rng) {
  MeasuredProcess mp;
  const bool negligible = cfg.mode == SimMode::NegligibleContacts;
  const bool stay_awake = cfg.policy == SleepPolicy::StayAwakeOnContact;
  std::vector<Piece> pieces;
  double now = 0.0;
  double prev_end = 0.0;
  std::size_t detections = 0;
  long long since = 0;
  std::size_t generated = 0;

  auto done = [&] { return (negligible ? mp.n_counts.size() : mp.h_counts.size()) >= target; };

  while (!done()) {
    if (generated >= cfg.max_contacts) {
      throw StarvedError("simulation starved: detection target not reached within the contact cap",
                         negligible ? mp.n_counts.size() : mp.h_counts.size(), generated);
    }
    const double x = now + sample(s_dist, contact_rng);
    const double y = negligible ? x : x + sample(*c_dist, contact_rng);
    ++generated;
    ++since;

    pieces.clear();
    Segment seg = view.locate(x);
    if (negligible) {
      if (seg.phase == Phase::On) pieces.push_back({x, x});
    } else if (stay_awake) {
      while (seg.phase != Phase::On && seg.end < y) seg = view.next(seg);
      if (seg.phase == Phase::On) {
        const double lo = std::max(x, seg.start);
        if (y > lo) pieces.push_back({lo, y});
      }
    } else {
      for (;;) {
        if (seg.phase == Phase::On) {
          const double lo = std::max(x, seg.start), hi = std::min(y, seg.end);
          if (hi > lo) {
            // an always-ON schedule has empty OFF segments; keep one piece
            if (!pieces.empty() && pieces.back().end == lo) {
              pieces.back().end = hi;
            } else {
              pieces.push_back({lo, hi});
            }
          }
        }
        if (seg.end >= y) break;
        seg = view.next(seg);
      }
    }

    if (!pieces.empty()) {
      const bool record = detections >= cfg.warmup_detections;
      if (record && detections > 0) {
        mp.s_tilde.push_back(pieces.front().start - prev_end);
        mp.n_counts.push_back(since);
        if (since >= 2) ++mp.skipped_first;
      }
      if (record && !negligible) {
        for (std::size_t i = 0; i < pieces.size(); ++i) {
          mp.c_tilde.push_back(pieces[i].end - pieces[i].start);
          if (pieces[i].start == x && pieces[i].end == y) ++mp.c_full;
          if (i + 1 < pieces.size()) {
            const auto fixed = view.pseudo_gap();
            mp.s_tilde.push_back(fixed ? *fixed : pieces[i + 1].start - pieces[i].end);
          }
        }
        mp.h_counts.push_back(static_cast<long long>(pieces.size()));
      }
      ++detections;
      since = 0;
      prev_end = pieces.back().end;
    }

    now = y;
    const double off = view.rebase(now);
    now -= off;
    prev_end -= off;
  }
  mp.contacts_generated = generated;
  return mp;
}

template <class Job>
MeasuredProcess run_chunks(const SimConfig& cfg, Job&& job) {
  const std::size_t chunks = std::max<std::size_t>(1, cfg.chunks);
  std::vector<MeasuredProcess> parts(chunks);
  std::vector<std::size_t> targets(chunks, cfg.n_detected_target / chunks);
  for (std::size_t i = 0; i < cfg.n_detected_target % chunks; ++i) ++targets[i];
  const std::size_t workers = std::clamp<std::size_t>(cfg.threads, 1, chunks);
  if (workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) parts[c] = job(c, targets[c]);
  } else {
    std::vector<std::exception_ptr> errors(chunks);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < chunks; c += workers) {
          try {
            parts[c] = job(c, targets[c]);
          } catch (...) {
            errors[c] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  MeasuredProcess out;
  for (const auto& p : parts) out.append(p);
  return out;
}

inline MeasuredProcess simulate(const DistSpec& s_dist, const std::optional<DistSpec>& c_dist,
                                const DutyCycleSpec& dc, const SimConfig& cfg, const RandomStream& rng) {
  dc.validate();
  if (cfg.mode == SimMode::FullContacts && !c_dist) throw DomainError("full-contact simulation needs a contact distribution");
  MeasuredProcess mp = run_chunks(cfg, [&](std::size_t chunk, std::size_t target) {
    const RandomStream base = rng.split(chunk);
    if (dc.is_deterministic()) {
      PeriodicView view(dc);
      return run_filter(view, s_dist, c_dist, cfg, target, base.split(0));
    }
    ChainView view(dc, base.split(1));
    return run_filter(view, s_dist, c_dist, cfg, target, base.split(0));
  });
  mp.meta.dc = dc.describe();
  mp.meta.s_dist = s_dist.describe();
  mp.meta.c_dist = c_dist ? c_dist->describe() : "none";
  mp.meta.seed = rng.seed();
  mp.meta.mode = cfg.mode;
  mp.meta.policy = cfg.policy;
  return mp;
}

}  // namespace detail

/// Point contacts filtered by the duty cycle; records N and S~.
inline MeasuredProcess filter_negligible(const DistSpec& s_dist, const DutyCycleSpec& dc, const SimConfig& cfg,
                                         const RandomStream& rng) {
  if (cfg.mode != SimMode::NegligibleContacts) throw DomainError("filter_negligible: config mode must be negligible");
  return detail::simulate(s_dist, std::nullopt, dc, cfg, rng);
}

/// Contacts of positive length intersected with the ON intervals.
inline MeasuredProcess filter_full(const DistSpec& s_dist, const DistSpec& c_dist, const DutyCycleSpec& dc,
                                   const SimConfig& cfg, const RandomStream& rng) {
  if (cfg.mode != SimMode::FullContacts) throw DomainError("filter_full: config mode must be full");
  return detail::simulate(s_dist, c_dist, dc, cfg, rng);
}

/// Either mode against a sampled joint schedule of two stochastic nodes.
inline MeasuredProcess filter_with_stochastic_dc(const DistSpec& s_dist, const std::optional<DistSpec>& c_dist,
                                                 const DutyCycleSpec& dc, const SimConfig& cfg,
                                                 const RandomStream& rng) {
  if (dc.is_deterministic()) throw DomainError("filter_with_stochastic_dc needs a stochastic duty cycle");
  return detail::simulate(s_dist, c_dist, dc, cfg, rng);
}

}  // namespace dcp
