#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "dcp/dist.hpp"
#include "dcp/error.hpp"
#include "dcp/random.hpp"
#include "dcp/stats.hpp"
#include "dcp/trace.hpp"

namespace dcp {

enum class FitModel { Exponential, Pareto };

inline const char* to_string(FitModel m) { return m == FitModel::Exponential ? "exponential" : "pareto"; }

/// Pairs need more than this many samples to be fitted.
inline constexpr std::size_t kMinPairSamples = 10;
inline constexpr double kDefaultSignificance = 0.01;

inline void require_positive_samples(const std::vector<double>& x, std::size_t min_n, const char* who) {
  if (x.size() < min_n) {
    throw DomainError(std::string(who) + ": need at least " + std::to_string(min_n) + " samples, got " +
                      std::to_string(x.size()));
  }
  for (double v : x) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(who) + ": samples must be positive and finite");
  }
}

inline double mle_exponential(const std::vector<double>& x) {
  require_positive_samples(x, 2, "mle_exponential");
  double sum = 0.0;
  for (double v : x) sum += v;
  return static_cast<double>(x.size()) / sum;
}

struct ParetoFit {
  double alpha = 0.0;
  double b = 0.0;
  double ks = 1.0;  // KS distance of the selected fit
};

namespace detail {

// Shape MLE for Lomax data at fixed scale.
inline double lomax_shape(const std::vector<double>& sorted, double b) {
  double acc = 0.0;
  for (double v : sorted) acc += std::log1p(v / b);
  return static_cast<double>(sorted.size()) / acc;
}

inline double lomax_ks(const std::vector<double>& sorted, double alpha, double b) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = -std::expm1(-alpha * std::log1p(sorted[i] / b));
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace detail

/// Number of rank-spaced scale candidates per search stage.
inline constexpr std::size_t kParetoScaleCandidates = 64;

/// Lomax fit: scale chosen among observed sample values to minimise the KS
/// distance, shape by MLE at that scale. The search runs on a rank-spaced
/// grid of observed values, then again on all ranks between the neighbours
/// of the best candidate (thinned to the same grid size).
inline ParetoFit mle_pareto(std::vector<double> x) {
  require_positive_samples(x, kMinPairSamples, "mle_pareto");
  std::sort(x.begin(), x.end());
  if (x.front() == x.back()) throw DomainError("mle_pareto: all samples are equal");

  ParetoFit best;
  auto try_rank = [&](std::size_t r) {
    const double b = x[r];
    const double a = detail::lomax_shape(x, b);
    const double ks = detail::lomax_ks(x, a, b);
    if (ks < best.ks) best = {a, b, ks};
    return ks;
  };
  auto search = [&](std::size_t lo, std::size_t hi) {
    // ranks lo..hi inclusive
    const std::size_t span = hi - lo;
    std::size_t best_rank = lo;
    double best_ks = 2.0;
    const std::size_t steps = std::min(span, kParetoScaleCandidates - 1);
    std::size_t prev = static_cast<std::size_t>(-1);
    for (std::size_t k = 0; k <= steps; ++k) {
      const std::size_t r = steps == 0 ? lo : lo + span * k / steps;
      if (r == prev || (r > lo && x[r] == x[r - 1])) continue;
      prev = r;
      const double ks = try_rank(r);
      if (ks < best_ks) {
        best_ks = ks;
        best_rank = r;
      }
    }
    return std::pair{best_rank, steps == 0 ? std::size_t{0} : std::max<std::size_t>(1, span / steps)};
  };
  const auto [r0, step] = search(0, x.size() - 1);
  if (step > 1) search(r0 > step ? r0 - step : 0, std::min(x.size() - 1, r0 + step));
  return best;
}

/// Cramer-von Mises statistic W^2 of the sample against a continuous CDF.
template <class Cdf>
double cvm_statistic(std::vector<double> x, const Cdf& cdf) {
  if (x.empty()) throw DomainError("cvm_statistic: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double w = 1.0 / (12.0 * n);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = cdf(x[i]) - (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n);
    w += d * d;
  }
  return w;
}

inline double cvm_statistic(const std::vector<double>& x, const DistSpec& d) {
  return cvm_statistic(x, [&](double v) { return cdf(d, v); });
}

/// Whether the parameters of the tested distribution were estimated from
/// the same sample. Estimated parameters need the refitting bootstrap.
enum class CvmReference { Specified, EstimatedExponential, EstimatedPareto };

struct CvmOptions {
  double significance = kDefaultSignificance;
  std::size_t bootstrap = 2000;
  std::uint64_t seed = 0xc0ffee;
  std::size_t threads = 1;
};

struct CvmResult {
  double statistic = 0.0;
  double critical = 0.0;
  double p_value = 1.0;
  bool rejected = false;
  std::size_t bootstrap = 0;
};

namespace detail {

// Upper significance quantile of W^2 from `reps` replicates. Replicate r
// uses rng.split(r), so results do not depend on the thread count.
template <class Rep>
std::vector<double> bootstrap_statistics(std::size_t reps, const RandomStream& rng, std::size_t threads, Rep&& rep) {
  std::vector<double> out(reps);
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(reps, 1));
  auto run = [&](std::size_t w) {
    for (std::size_t r = w; r < reps; r += workers) {
      RandomStream s = rng.split(r);
      out[r] = rep(s);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  std::sort(out.begin(), out.end());
  return out;
}

// W^2 against a fully specified continuous law is distribution free, so its
// null law depends only on n; cached per (n, reps, seed).
inline const std::vector<double>& uniform_null_statistics(std::size_t n, std::size_t reps, std::uint64_t seed,
                                                          std::size_t threads) {
  static std::mutex mu;
  static std::map<std::tuple<std::size_t, std::size_t, std::uint64_t>, std::vector<double>> cache;
  const auto key = std::make_tuple(n, reps, seed);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto stats = bootstrap_statistics(reps, RandomStream(seed, n), threads, [n](RandomStream& s) {
    std::vector<double> u(n);
    for (auto& v : u) v = s.uniform();
    return cvm_statistic(std::move(u), [](double v) { return v; });
  });
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(stats)).first->second;
}

}  // namespace detail

/// CvM goodness-of-fit test of `x` against `d` at the given significance.
/// The critical value is the (1 - significance) quantile of a seeded
/// bootstrap of the statistic under `d`, refitting the parameters on each
/// replicate when they were estimated.
inline CvmResult cvm_test(const std::vector<double>& x, const DistSpec& d, CvmReference ref = CvmReference::Specified,
                          const CvmOptions& opt = {}) {
  if (x.size() < kMinPairSamples) {
    throw DomainError("cvm_test: need at least " + std::to_string(kMinPairSamples) + " samples, got " +
                      std::to_string(x.size()));
  }
  if (!(opt.significance > 0.0 && opt.significance < 1.0)) throw DomainError("cvm_test: significance must be in (0,1)");
  if (opt.bootstrap < 10) throw DomainError("cvm_test: bootstrap needs at least 10 replicates");
  const std::size_t n = x.size();
  CvmResult res;
  res.statistic = cvm_statistic(x, d);
  res.bootstrap = opt.bootstrap;

  std::vector<double> null;
  if (ref == CvmReference::Specified) {
    null = detail::uniform_null_statistics(n, opt.bootstrap, opt.seed, opt.threads);
  } else if (ref == CvmReference::EstimatedExponential) {
    if (!d.is_exponential()) throw DomainError("cvm_test: estimated-exponential reference needs an exponential law");
    null = detail::bootstrap_statistics(opt.bootstrap, RandomStream(opt.seed, n), opt.threads, [&](RandomStream& s) {
      std::vector<double> y(n);
      for (auto& v : y) v = sample(d, s);
      return cvm_statistic(y, DistSpec::exponential(mle_exponential(y)));
    });
  } else {
    if (!d.is_pareto()) throw DomainError("cvm_test: estimated-pareto reference needs a pareto law");
    null = detail::bootstrap_statistics(opt.bootstrap, RandomStream(opt.seed, n), opt.threads, [&](RandomStream& s) {
      std::vector<double> y(n);
      for (auto& v : y) v = sample(d, s);
      const auto f = mle_pareto(y);
      return cvm_statistic(y, DistSpec::pareto(f.alpha, f.b));
    });
  }
  const auto above = null.end() - std::lower_bound(null.begin(), null.end(), res.statistic);
  res.p_value = (static_cast<double>(above) + 1.0) / (static_cast<double>(null.size()) + 1.0);
  const std::size_t k = std::min(null.size() - 1,
                                 static_cast<std::size_t>(std::ceil((1.0 - opt.significance) * null.size())) - 1);
  res.critical = null[k];
  res.rejected = res.statistic > res.critical;
  return res;
}

struct FitResult {
  std::pair<NodeId, NodeId> pair;
  Quantity quantity = Quantity::Intercontact;
  FitModel model = FitModel::Exponential;
  DistSpec params = DistSpec::exponential(1.0);
  std::size_t n_samples = 0;
  double cvm_statistic = 0.0;
  double p_value = 1.0;
  bool rejected = false;
  std::size_t bootstrap = 0;

  double param1() const { return params.is_exponential() ? params.as_exponential().rate : params.as_pareto().shape; }
  double param2() const { return params.is_pareto() ? params.as_pareto().scale : 0.0; }
};

struct SkippedPair {
  std::pair<NodeId, NodeId> pair;
  std::string reason;
};

struct ParamSummary {
  double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0;
  std::size_t n = 0;
};

inline ParamSummary summarize(const std::vector<double>& v) {
  ParamSummary s;
  s.n = v.size();
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  s.q1 = quantile(v, 0.25);
  s.median = quantile(v, 0.5);
  s.q3 = quantile(v, 0.75);
  s.mean = sample_moments(v).mean;
  return s;
}

struct FitOptions {
  std::vector<FitModel> models{FitModel::Exponential, FitModel::Pareto};
  CvmOptions cvm;
  /// Recorder sampling period; when positive and a pair's sample has ties,
  /// its samples are jittered by Unif(0, granularity) before fitting and
  /// testing.
  double granularity = 0.0;
};

struct FitReport {
  std::vector<FitResult> results;
  std::vector<SkippedPair> skipped;

  /// Parameter summaries over non-rejected fits of one model:
  /// first entry for param1 (rate or shape), second for param2 (scale).
  std::pair<ParamSummary, ParamSummary> summary(FitModel m) const {
    std::vector<double> p1, p2;
    for (const auto& r : results) {
      if (r.model != m || r.rejected) continue;
      p1.push_back(r.param1());
      p2.push_back(r.param2());
    }
    return {summarize(p1), summarize(p2)};
  }

  void write_csv(std::ostream& os) const {
    os << "node_a,node_b,quantity,model,param1,param2,n,cvm,rejected\n";
    os.precision(17);
    for (const auto& r : results) {
      os << r.pair.first << ',' << r.pair.second << ',' << to_string(r.quantity) << ',' << to_string(r.model) << ','
         << r.param1() << ',' << r.param2() << ',' << r.n_samples << ',' << r.cvm_statistic << ','
         << (r.rejected ? 1 : 0) << '\n';
    }
  }
};

inline bool has_ties(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  return std::adjacent_find(x.begin(), x.end()) != x.end();
}

/// Fit every candidate model to every pair with more than nine samples.
/// Pair i uses the stream RandomStream(seed, i) for jitter and bootstrap.
inline FitReport fit_all_pairs(const std::vector<ContactSeries>& pairs, Quantity q, const FitOptions& opt = {}) {
  FitReport rep;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& cs = pairs[i];
    std::vector<double> x = extract_samples(cs, q);
    if (x.size() < kMinPairSamples) {
      rep.skipped.push_back({cs.pair, "only " + std::to_string(x.size()) + " samples"});
      continue;
    }
    RandomStream rng(opt.cvm.seed, 1000003u + i);
    if (opt.granularity > 0.0 && has_ties(x)) {
      RandomStream jit = rng.split(0);
      for (auto& v : x) v += jit.uniform(0.0, opt.granularity);
    }
    for (FitModel m : opt.models) {
      FitResult r;
      r.pair = cs.pair;
      r.quantity = q;
      r.model = m;
      r.n_samples = x.size();
      CvmOptions co = opt.cvm;
      co.seed = rng.split(1 + static_cast<std::uint64_t>(m)).next_u64();
      try {
        if (m == FitModel::Exponential) {
          r.params = DistSpec::exponential(mle_exponential(x));
        } else {
          const auto f = mle_pareto(x);
          r.params = DistSpec::pareto(f.alpha, f.b);
        }
        const auto t = cvm_test(x, r.params,
                                m == FitModel::Exponential ? CvmReference::EstimatedExponential
                                                           : CvmReference::EstimatedPareto,
                                co);
        r.cvm_statistic = t.statistic;
        r.p_value = t.p_value;
        r.rejected = t.rejected;
        r.bootstrap = t.bootstrap;
      } catch (const DomainError& e) {
        rep.skipped.push_back({cs.pair, std::string(to_string(m)) + ": " + e.what()});
        continue;
      }
      rep.results.push_back(r);
    }
  }
  return rep;
}

}  // namespace dcp
