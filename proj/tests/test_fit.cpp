#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dcp/fit.hpp"

using namespace dcp;

namespace {

std::vector<double> draw(const DistSpec& d, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 77);
  std::vector<double> x(n);
  for (auto& v : x) v = sample(d, rng);
  return x;
}

CvmOptions quick(std::size_t reps = 200) {
  CvmOptions o;
  o.bootstrap = reps;
  return o;
}

}  // namespace

TEST(MleExponential, Examples) {
  EXPECT_DOUBLE_EQ(mle_exponential(std::vector<double>(20, 100.0)), 0.01);
  EXPECT_THROW(mle_exponential({50.0}), DomainError);
  EXPECT_THROW(mle_exponential({}), DomainError);
  EXPECT_THROW(mle_exponential({1.0, -2.0}), DomainError);
}

TEST(MleExponential, ScalingIsExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto x = draw(DistSpec::exponential(0.3), 100, seed);
    const double base = mle_exponential(x);
    for (auto& v : x) v *= 8.0;  // powers of two keep the sums exact
    EXPECT_EQ(mle_exponential(x), base / 8.0);
  }
}

TEST(MleExponential, SamplingAccuracy) {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    ok += std::abs(mle_exponential(draw(DistSpec::exponential(0.02), 10000, seed)) / 0.02 - 1.0) < 0.05;
  }
  EXPECT_GE(ok, 38);
}

TEST(MlePareto, SamplingAccuracy) {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto f = mle_pareto(draw(DistSpec::pareto(1.898, 245.4), 10000, seed));
    ok += std::abs(f.alpha / 1.898 - 1.0) < 0.10 && std::abs(f.b / 245.4 - 1.0) < 0.25;
  }
  EXPECT_GE(ok, 38);
}

TEST(MlePareto, ScaleEquivariant) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto x = draw(DistSpec::pareto(1.3, 20.0), 500, seed);
    const auto f = mle_pareto(x);
    for (auto& v : x) v *= 4.0;
    const auto g = mle_pareto(x);
    EXPECT_EQ(g.b, 4.0 * f.b);
    EXPECT_EQ(g.alpha, f.alpha);
  }
}

TEST(MlePareto, Preconditions) {
  EXPECT_THROW(mle_pareto(std::vector<double>(9, 1.0)), DomainError);
  EXPECT_THROW(mle_pareto(std::vector<double>(50, 3.0)), DomainError);
}

TEST(MlePareto, ContaminationIsRejected) {
  auto x = draw(DistSpec::pareto(1.5, 50.0), 1000, 3);
  for (std::size_t i = 0; i < x.size(); i += 2) x[i] = 42.0;
  const auto f = mle_pareto(x);
  const auto t = cvm_test(x, DistSpec::pareto(f.alpha, f.b), CvmReference::EstimatedPareto, quick());
  EXPECT_TRUE(t.rejected);
}

TEST(Cvm, StatisticByHand) {
  // 1/36 + (0.1 - 1/6)^2 + 0 + (0.9 - 5/6)^2
  const double w = cvm_statistic(std::vector<double>{0.9, 0.1, 0.5}, [](double v) { return v; });
  EXPECT_NEAR(w, 1.0 / 36.0 + 2.0 * (1.0 / 15.0) * (1.0 / 15.0), 1e-15);
}

TEST(Cvm, InvariantUnderMonotoneTransform) {
  const auto x = draw(DistSpec::exponential(0.5), 300, 1);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::sqrt(x[i]);
  const double a = cvm_statistic(x, DistSpec::exponential(0.5));
  const double b = cvm_statistic(y, [](double v) { return -std::expm1(-0.5 * v * v); });
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(Cvm, NeedsTenSamples) {
  EXPECT_THROW(cvm_test(std::vector<double>(9, 1.0), DistSpec::exponential(1.0)), DomainError);
}

TEST(Cvm, SpecifiedNullCriticalValueMatchesAsymptotics) {
  // asymptotic 1% point of W^2 is 0.7435
  const auto t = cvm_test(draw(DistSpec::exponential(0.01), 1000, 1), DistSpec::exponential(0.01));
  EXPECT_NEAR(t.critical, 0.7435, 0.1);
}

TEST(Cvm, CalibrationUnderTrueModel) {
  int rejected = 0;
  const int seeds = 300;
  for (int s = 0; s < seeds; ++s) {
    rejected += cvm_test(draw(DistSpec::exponential(0.01), 1000, 1000 + s), DistSpec::exponential(0.01)).rejected;
  }
  EXPECT_LE(rejected, 10);  // mean 3, sd 1.7
}

TEST(Cvm, EstimatedExponentialCalibration) {
  int rejected = 0;
  for (int s = 0; s < 100; ++s) {
    const auto x = draw(DistSpec::exponential(0.01), 200, 5000 + s);
    CvmOptions o = quick(300);
    o.seed = 17 + s;
    rejected += cvm_test(x, DistSpec::exponential(mle_exponential(x)), CvmReference::EstimatedExponential, o).rejected;
  }
  EXPECT_LE(rejected, 5);
}

TEST(Cvm, PowerAgainstHeavyTail) {
  int rejected = 0;
  for (int s = 0; s < 20; ++s) {
    const auto x = draw(DistSpec::pareto(1.01, 10.0), 1000, 300 + s);
    rejected += cvm_test(x, DistSpec::exponential(mle_exponential(x)), CvmReference::EstimatedExponential, quick())
                    .rejected;
  }
  EXPECT_GE(rejected, 19);
}

TEST(Cvm, ThreadCountDoesNotChangeResult) {
  const auto x = draw(DistSpec::pareto(2.0, 10.0), 200, 8);
  const auto f = mle_pareto(x);
  CvmOptions a = quick(100), b = quick(100);
  b.threads = 4;
  const auto ra = cvm_test(x, DistSpec::pareto(f.alpha, f.b), CvmReference::EstimatedPareto, a);
  const auto rb = cvm_test(x, DistSpec::pareto(f.alpha, f.b), CvmReference::EstimatedPareto, b);
  EXPECT_EQ(ra.critical, rb.critical);
  EXPECT_EQ(ra.p_value, rb.p_value);
}

TEST(FitAllPairs, SyntheticExponentialPairs) {
  std::vector<double> truth;
  RandomStream pr(11, 0);
  for (int i = 0; i < 40; ++i) truth.push_back(std::exp(pr.uniform(std::log(1e-4), std::log(1e-2))));
  const auto tr = synth_trace(
      truth.size(), [&](std::size_t i) { return SynthPairSpec{DistSpec::exponential(truth[i]), DistSpec::exponential(0.05)}; },
      1e6, RandomStream(12, 0));
  FitOptions opt;
  opt.models = {FitModel::Exponential};
  opt.cvm.bootstrap = 300;
  const auto rep = fit_all_pairs(tr.pairs, Quantity::Intercontact, opt);
  std::size_t passing = 0;
  for (const auto& cs : tr.pairs) passing += extract_samples(cs, Quantity::Intercontact).size() >= 10;
  EXPECT_LE(rep.results.size(), passing);
  std::size_t kept = 0;
  for (const auto& r : rep.results) kept += !r.rejected;
  EXPECT_GE(static_cast<double>(kept), 0.95 * static_cast<double>(rep.results.size()));
  const auto [rate, scale] = rep.summary(FitModel::Exponential);
  EXPECT_LE(rate.min, *std::min_element(truth.begin(), truth.end()) * 1.2);
  EXPECT_GE(rate.max, *std::max_element(truth.begin(), truth.end()) * 0.8);
  EXPECT_LE(rate.q1, rate.median);
  EXPECT_LE(rate.median, rate.q3);
  EXPECT_EQ(scale.max, 0.0);
}

TEST(FitAllPairs, FilterAndEmpty) {
  EXPECT_TRUE(fit_all_pairs({}, Quantity::Intercontact).results.empty());
  ContactSeries small;
  small.pair = {1, 2};
  for (int i = 0; i < 5; ++i) {
    small.starts.push_back(10.0 * i);
    small.ends.push_back(10.0 * i + 1);
  }
  // 11 contacts: 10 intercontact samples, the smallest accepted size
  ContactSeries enough;
  enough.pair = {3, 4};
  RandomStream rng(2, 0);
  double t = 0;
  for (int i = 0; i < 11; ++i) {
    t += rng.exponential(0.1);
    enough.starts.push_back(t);
    t += 1.0;
    enough.ends.push_back(t);
  }
  FitOptions opt;
  opt.cvm.bootstrap = 100;
  const auto rep = fit_all_pairs({small, enough}, Quantity::Intercontact, opt);
  ASSERT_EQ(rep.skipped.size(), 1u);
  EXPECT_EQ(rep.skipped[0].pair, small.pair);
  ASSERT_EQ(rep.results.size(), 2u);
  for (const auto& r : rep.results) EXPECT_EQ(r.pair, enough.pair);
  std::ostringstream os;
  rep.write_csv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "node_a,node_b,quantity,model,param1,param2,n,cvm,rejected");
}

TEST(FitAllPairs, ParetoContactsAndJitter) {
  const auto tr = synth_trace(
      4, [](std::size_t) { return SynthPairSpec{DistSpec::exponential(0.005), DistSpec::pareto(2.0, 60.0)}; }, 2e5,
      RandomStream(13, 0));
  FitOptions opt;
  opt.models = {FitModel::Pareto};
  opt.cvm.bootstrap = 100;
  opt.granularity = 1e-3;  // continuous samples: no ties, no jitter
  const auto rep = fit_all_pairs(tr.pairs, Quantity::Contact, opt);
  ASSERT_EQ(rep.results.size(), 4u);
  for (const auto& r : rep.results) {
    EXPECT_TRUE(r.params.is_pareto());
    EXPECT_GT(r.param1(), 0.0);
    EXPECT_GT(r.param2(), 0.0);
  }
}

TEST(FitAllPairs, JitterOnlyWhenTied) {
  const auto tr = synth_trace(
      3, [](std::size_t) { return SynthPairSpec{DistSpec::exponential(0.01), DistSpec::exponential(0.5)}; }, 5e4,
      RandomStream(14, 0));
  FitOptions opt;
  opt.models = {FitModel::Exponential};
  opt.cvm.bootstrap = 100;
  opt.granularity = 5.0;
  const auto rep = fit_all_pairs(tr.pairs, Quantity::Intercontact, opt);
  ASSERT_EQ(rep.results.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rep.results[i].param1(), mle_exponential(extract_samples(tr.pairs[i], Quantity::Intercontact)));
  }
}

TEST(FitAllPairs, TiedSamplesStayCalibrated) {
  // a recorder polling every 0.5 s: contact times floored to the grid
  const double grid = 0.5;
  auto tr = synth_trace(
      30, [](std::size_t) { return SynthPairSpec{DistSpec::exponential(0.01), std::nullopt}; }, 3e4,
      RandomStream(15, 0));
  std::vector<ContactSeries> floored;
  for (auto cs : tr.pairs) {
    ContactSeries f;
    f.pair = cs.pair;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const double t = std::floor(cs.starts[i] / grid) * grid;
      if (!f.starts.empty() && t <= f.ends.back()) continue;
      f.starts.push_back(t);
      f.ends.push_back(t);
    }
    floored.push_back(f);
  }
  FitOptions opt;
  opt.models = {FitModel::Exponential};
  opt.cvm.bootstrap = 200;
  opt.granularity = grid;
  const auto rep = fit_all_pairs(floored, Quantity::Intercontact, opt);
  ASSERT_EQ(rep.results.size(), 30u);
  int rejected = 0, differs = 0;
  for (std::size_t i = 0; i < rep.results.size(); ++i) {
    rejected += rep.results[i].rejected;
    differs += rep.results[i].param1() != mle_exponential(extract_samples(floored[i], Quantity::Intercontact));
    EXPECT_NEAR(rep.results[i].param1(), 0.01, 0.003);
  }
  EXPECT_EQ(differs, 30);
  EXPECT_LE(rejected, 3);
}
