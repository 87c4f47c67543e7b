#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "dcp/model/contact.hpp"
#include "dcp/model/mixture.hpp"
#include "dcp/model/negligible.hpp"
#include "dcp/model/phase_type.hpp"
#include "dcp/sim.hpp"
#include "dcp/stats.hpp"

using namespace dcp;

// Reference (g, p) from direct summation of the interval probabilities at 30
// significant digits (mpmath quad), tau = 20, T = 100.
struct GPRef {
  double g, p;
};

TEST(GP, ExponentialAgainstDirectSums) {
  const auto a = g_p_exponential(0.1, 20, 100);
  EXPECT_NEAR(a.g, 0.5677930508022399, 1e-12);
  EXPECT_NEAR(a.p, 0.10805173729944, 1e-12);
  const auto b = g_p_exponential(0.01, 20, 100);
  EXPECT_NEAR(b.g, 0.2104376089173224, 1e-12);
  EXPECT_NEAR(b.p, 0.1973905977706694, 1e-12);
  const auto c = g_p_exponential(10, 20, 100);
  EXPECT_NEAR(c.g, 0.995, 1e-12);
  EXPECT_NEAR(c.p, 0.00125, 1e-12);
}

TEST(GP, ExponentialRegimes) {
  const auto slow = g_p_exponential(0.001, 20, 100);
  EXPECT_NEAR(slow.g, 0.2, 0.01);
  EXPECT_NEAR(slow.p, 0.2, 0.01);
  const auto limit = g_p_exponential(1e-9, 20, 100);
  EXPECT_NEAR(limit.g, 0.2, 1e-6);
  EXPECT_NEAR(limit.p, 0.2, 1e-6);
  // fast contacts: g close to 1 - 1/(lambda tau)
  EXPECT_NEAR(g_p_exponential(10, 20, 100).g, 1.0 - 1.0 / 200.0, 1e-9);
  // no overflow far beyond exp(709)
  const auto huge = g_p_exponential(50, 20, 100);
  EXPECT_TRUE(std::isfinite(huge.g) && std::isfinite(huge.p));
  EXPECT_GT(huge.p, 0.0);
}

TEST(GP, ParetoAgainstDirectSums) {
  const auto a = g_p_pareto(3.0, 10.0, 20, 100);
  EXPECT_NEAR(a.g, 0.7782532655099911, 1e-9);
  EXPECT_NEAR(a.p, 0.05543668362249295, 1e-9);
  const auto b = g_p_pareto(2.5, 50.0, 20, 100);
  EXPECT_NEAR(b.g, 0.3671597293268338, 1e-9);
  EXPECT_NEAR(b.p, 0.1582100675786093, 1e-9);
}

TEST(GP, ParetoRegimes) {
  const auto a = g_p_pareto(1.01, 1000, 20, 100);
  EXPECT_NEAR(a.g, 0.2, 0.01);
  EXPECT_NEAR(a.p, 0.2, 0.01);
  const auto big = g_p_pareto(1.01, 1e8, 20, 100);
  EXPECT_NEAR(big.g, 0.2, 1e-4);
  EXPECT_NEAR(big.p, 0.2, 1e-4);
  const auto small = g_p_pareto(1.01, 1, 20, 100);
  const auto num = g_p_numeric(DistSpec::pareto(1.01, 1), 20, 100);
  EXPECT_NEAR(small.g, num.g, 1e-6);
  EXPECT_NEAR(small.p, num.p, 1e-6);
}

TEST(GP, ParetoShapeOneIsContinuous) {
  const auto at = g_p_pareto(1.0, 100, 20, 100);
  const auto below = g_p_pareto(1.0 - 1e-4, 100, 20, 100);
  const auto above = g_p_pareto(1.0 + 1e-4, 100, 20, 100);
  EXPECT_NEAR(at.g, 0.5 * (below.g + above.g), 1e-6);
  EXPECT_NEAR(at.p, 0.5 * (below.p + above.p), 1e-6);
}

TEST(GP, NumericMatchesClosedFormsOverSweep) {
  RandomStream rng(2024, 3);
  for (int i = 0; i < 100; ++i) {
    const double period = 100.0;
    const double tau = rng.uniform(5.0, 95.0);
    if (i % 2 == 0) {
      const double lambda = std::exp(rng.uniform(std::log(1e-4), std::log(1.0)));
      const auto c = g_p_exponential(lambda, tau, period);
      const auto n = g_p_numeric(DistSpec::exponential(lambda), tau, period);
      EXPECT_NEAR(c.g, n.g, 1e-8) << "lambda " << lambda << " tau " << tau;
      EXPECT_NEAR(c.p, n.p, 1e-8) << "lambda " << lambda << " tau " << tau;
    } else {
      const double alpha = rng.uniform(1.2, 3.5);
      const double b = std::exp(rng.uniform(std::log(1.0), std::log(1e4)));
      const auto c = g_p_pareto(alpha, b, tau, period);
      const auto n = g_p_numeric(DistSpec::pareto(alpha, b), tau, period);
      EXPECT_NEAR(c.g, n.g, 1e-6) << "alpha " << alpha << " b " << b << " tau " << tau;
      EXPECT_NEAR(c.p, n.p, 1e-6) << "alpha " << alpha << " b " << b << " tau " << tau;
    }
  }
}

TEST(GP, NumericOnEmpiricalSamples) {
  RandomStream rng(11, 0);
  std::vector<double> s(10000);
  for (auto& v : s) v = rng.exponential(0.001);
  const auto n = g_p_numeric(DistSpec::empirical(s), 20, 100);
  const auto c = g_p_exponential(0.001, 20, 100);
  EXPECT_NEAR(n.g, c.g, 0.02);
  EXPECT_NEAR(n.p, c.p, 0.02);
}

TEST(GP, InvalidWindowRejected) {
  EXPECT_THROW(g_p_exponential(0.1, 0.0, 100), DomainError);
  EXPECT_THROW(g_p_exponential(0.1, 100.0, 100), DomainError);
  EXPECT_THROW(g_p_pareto(1.5, 10, 120, 100), DomainError);
}

TEST(PmfN, Examples) {
  const GPpair gp{0.2, 0.2};
  EXPECT_DOUBLE_EQ(pmf_n(gp, 1), 0.2);
  EXPECT_NEAR(pmf_n(gp, 3), 0.128, 1e-15);
  EXPECT_EQ(pmf_n({1.0, 0.3}, 2), 0.0);
  EXPECT_EQ(pmf_n({1.0, 0.3}, 7), 0.0);
  EXPECT_THROW(pmf_n(gp, 0), DomainError);
}

TEST(PmfN, SumsToOneAndMomentsMatchBruteForce) {
  RandomStream rng(5, 5);
  for (int i = 0; i < 50; ++i) {
    const GPpair gp{rng.uniform(), rng.uniform(0.05, 1.0)};
    double mass = 0, m1 = 0, m2 = 0;
    for (long long k = 1;; ++k) {
      const double pk = pmf_n(gp, k);
      mass += pk;
      m1 += k * pk;
      m2 += static_cast<double>(k) * k * pk;
      if (k > 2 && 1.0 - mass < 1e-12 && pk < 1e-15) break;
    }
    EXPECT_NEAR(mass, 1.0, 1e-11);
    const auto m = moments_n(gp);
    EXPECT_NEAR(m1 / m.mean, 1.0, 1e-9);
    EXPECT_NEAR(m2 / m.second_moment, 1.0, 1e-9);
  }
}

TEST(MomentsN, Examples) {
  const auto a = moments_n({0.2, 0.2});
  EXPECT_NEAR(a.mean, 5.0, 1e-12);
  EXPECT_NEAR(a.second_moment, 45.0, 1e-12);
  EXPECT_NEAR(*a.cv2, 0.8, 1e-12);
  const auto b = moments_n({1.0, 0.4});
  EXPECT_NEAR(b.mean, 1.0, 1e-15);
  EXPECT_NEAR(*b.cv2, 0.0, 1e-15);
  EXPECT_NEAR(moments_n({0.5, 0.25}).mean, 3.0, 1e-15);
  EXPECT_THROW(moments_n({0.5, 0.0}), DomainError);
}

TEST(MomentsSTilde, Examples) {
  const auto exp = moments_s_tilde(dist_moments(DistSpec::exponential(0.001)), {0.2, 0.2});
  EXPECT_NEAR(exp.mean, 5000.0, 1e-9);
  EXPECT_NEAR(*exp.cv2, 1.0, 1e-12);
  EXPECT_EQ(exp.classification.behaviour, Behaviour::ExpLike);

  const auto det = moments_s_tilde(moments_from_raw(50.0, 2500.0), {0.2, 0.2});
  EXPECT_NEAR(*det.cv2, 0.8, 1e-12);
  EXPECT_EQ(det.classification.behaviour, Behaviour::Hypo);

  const auto par = moments_s_tilde(dist_moments(DistSpec::pareto(1.01, 1000)), {0.2, 0.2});
  EXPECT_FALSE(par.cv2.has_value());
  EXPECT_TRUE(std::isinf(par.second_moment));
  EXPECT_EQ(par.classification.behaviour, Behaviour::Undefined);
}

TEST(MomentsSTilde, MatchesMonteCarloRandomSums) {
  struct Case {
    DistSpec s;
    GPpair gp;
  };
  const std::vector<Case> cases{{DistSpec::exponential(0.01), g_p_exponential(0.01, 20, 100)},
                                {DistSpec::pareto(3.5, 200), g_p_pareto(3.5, 200, 20, 100)},
                                {DistSpec::exponential(0.1), g_p_exponential(0.1, 80, 100)}};
  for (const auto& c : cases) {
    const auto sample = sample_s_tilde(c.s, c.gp, 1000000, RandomStream(77, 1));
    const auto sm = sample_moments(sample);
    const auto r = moments_s_tilde(dist_moments(c.s), c.gp);
    const double se = std::sqrt(sm.variance / static_cast<double>(sm.n));
    EXPECT_NEAR(sm.mean, r.mean, 3.0 * se) << c.s.describe();
  }
}

TEST(Classify, TableRows) {
  EXPECT_EQ(classify_behaviour(3.5, {0.3, 0.6}).behaviour, Behaviour::Hyper);
  EXPECT_EQ(classify_behaviour(3.5, {0.9, 0.1}).behaviour, Behaviour::Hyper);
  EXPECT_EQ(classify_behaviour(2.0, {0.3, 0.3}).behaviour, Behaviour::Hyper);
  EXPECT_EQ(classify_behaviour(0.5, {0.3, 0.3}).behaviour, Behaviour::Hypo);
  // g = 0 edge: omega(0) = 0 so the omega row can never fire
  EXPECT_NEAR(omega_threshold(0.0), 0.0, 1e-15);
  EXPECT_EQ(classify_behaviour(0.5, {0.0, 0.4}).behaviour, Behaviour::Hypo);
  // cv2_S exactly 1 with g = p is exponential-like
  EXPECT_EQ(classify_behaviour(1.0, {0.4, 0.4}).behaviour, Behaviour::ExpLike);
  // lambda = 0.1 exponential case of the reference duty cycle
  EXPECT_EQ(classify_behaviour(1.0, g_p_exponential(0.1, 20, 100)).behaviour, Behaviour::Hyper);
}

TEST(Classify, AgreesWithSignOfCv2Property) {
  RandomStream rng(9, 9);
  int checked = 0;
  for (int i = 0; i < 20000; ++i) {
    const GPpair gp{rng.uniform(), rng.uniform(0.01, 1.0)};
    const double cv2 = rng.uniform(0.0, 4.0);
    const double target = cv2_s_tilde(cv2, gp);
    if (std::abs(target - 1.0) < 1e-6) continue;
    const auto c = classify_behaviour(cv2, gp);
    EXPECT_EQ(c.behaviour, target > 1.0 ? Behaviour::Hyper : Behaviour::Hypo)
        << "cv2 " << cv2 << " g " << gp.g << " p " << gp.p << " cv2~ " << target;
    ++checked;
  }
  EXPECT_GT(checked, 19000);
}

TEST(Classify, EqualGPInheritsBehaviourOfS) {
  RandomStream rng(4, 4);
  for (int i = 0; i < 2000; ++i) {
    const double g = rng.uniform(0.01, 1.0);
    const double cv2 = rng.uniform(0.0, 5.0);
    if (std::abs(cv2 - 1.0) < 1e-3) continue;
    const auto c = classify_behaviour(cv2, {g, g});
    EXPECT_EQ(c.behaviour, cv2 > 1.0 ? Behaviour::Hyper : Behaviour::Hypo);
  }
}

TEST(Tail, ParetoDescriptor) {
  EXPECT_DOUBLE_EQ(pareto_tail_check(1.01, 1000, {0.2, 0.2}).loglog_slope(), -1.01);
  EXPECT_DOUBLE_EQ(pareto_tail_check(2.5, 10, {0.2, 0.2}).loglog_slope(), -2.5);
  const auto t = pareto_tail_check(1.01, 1000, {0.2, 0.2});
  EXPECT_NEAR(t.ccdf(1e7) / (5.0 * std::pow(1e3 / 1e7, 1.01)), 1.0, 1e-12);
}

TEST(STildeExponential, CdfMatchesRandomSum) {
  const auto gp = g_p_exponential(0.1, 20, 100);
  const auto sample = sample_s_tilde(DistSpec::exponential(0.1), gp, 200000, RandomStream(3, 3));
  const double d = ks_distance(sample, [&](double x) { return s_tilde_cdf_exponential(0.1, gp, x); });
  EXPECT_LT(d, 0.005);
}

// --- phase-type fits

TEST(PhaseType, Examples) {
  const auto e = phase_type_fit(5000, 1.0);
  EXPECT_EQ(e.kind, PhaseTypeSpec::Kind::Exponential);
  EXPECT_DOUBLE_EQ(e.rate1, 1.0 / 5000);

  const auto h = phase_type_fit(1.0, 4.0);
  EXPECT_EQ(h.kind, PhaseTypeSpec::Kind::HyperExponential);
  EXPECT_NEAR(h.mean(), 1.0, 1e-10);
  EXPECT_NEAR(h.cv2(), 4.0, 1e-10);
  // balanced means
  EXPECT_NEAR(h.prob1 / h.rate1, (1.0 - h.prob1) / h.rate2, 1e-12);

  const auto k2 = phase_type_fit(1.0, 0.5);
  EXPECT_EQ(k2.kind, PhaseTypeSpec::Kind::HypoExponential);
  EXPECT_EQ(k2.stages, 2);
  EXPECT_NEAR(k2.rate1, k2.rate2, 1e-12);  // Erlang-2
  EXPECT_NEAR(k2.cv2(), 0.5, 1e-12);
}

TEST(PhaseType, MomentsReproducedAcrossRange) {
  for (double cv2 : {0.011, 0.05, 0.13, 0.3, 0.45, 0.77, 0.99, 1.2, 2.0, 10.0, 142.0}) {
    const auto ph = phase_type_fit(3.0, cv2);
    EXPECT_NEAR(ph.mean(), 3.0, 1e-10) << cv2;
    EXPECT_NEAR(ph.cv2(), cv2, 1e-10) << cv2;
  }
  EXPECT_THROW(phase_type_fit(1.0, 0.005), DomainError);
  EXPECT_THROW(phase_type_fit(-1.0, 1.0), DomainError);
}

TEST(PhaseType, SamplerMatchesCdf) {
  for (double cv2 : {0.3, 1.0, 3.0}) {
    const auto ph = phase_type_fit(2.0, cv2);
    RandomStream rng(8, 1);
    std::vector<double> x(50000);
    for (auto& v : x) v = ph.sample(rng);
    EXPECT_LT(ks_distance(x, [&](double t) { return ph.cdf(t); }), 0.01) << cv2;
  }
}

// --- mixtures

TEST(Mixture, WeightChecks) {
  using E = MixtureDist::Entry;
  EXPECT_THROW(MixtureDist({E{0.5, PointMass{1}}, E{0.4, PointMass{2}}}), ModelInconsistency);
  EXPECT_THROW(MixtureDist({E{-0.1, PointMass{1}}, E{1.1, PointMass{2}}}), ModelInconsistency);
  const MixtureDist m({E{0.5, PointMass{1}}, E{0.5 + 5e-7, PointMass{2}}});
  double total = 0;
  for (const auto& e : m.entries()) total += e.weight;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(m.cdf(0.5), 0.0);
  EXPECT_NEAR(m.cdf(1.5), 0.5, 1e-6);
  EXPECT_DOUBLE_EQ(m.cdf(2.0), 1.0);
}

TEST(Mixture, SamplerOnlyCdfIsReproducible) {
  auto draw = [](RandomStream& r) { return r.exponential(1.0); };
  const auto a = make_sampler_only("exp", draw, 10000, RandomStream(1, 2));
  const auto b = make_sampler_only("exp", draw, 10000, RandomStream(1, 2));
  EXPECT_EQ(*a.sorted_sample, *b.sorted_sample);
  EXPECT_NEAR(a.cdf(1.0), 1.0 - std::exp(-1.0), 0.02);
}

// --- non-negligible contacts

namespace {

// Brute-force P(Z^OFF + C^hit > y) straight from the printed density:
// integrate the density over c, then average over the uniform offset.
double hit_plus_off_ccdf_reference(const ContactModel& m, double y) {
  const double w = m.off();
  auto hit_ccdf = [&](double x) {
    if (x <= 0.0) return 1.0;
    return quad([&](double c) { return m.hit_pdf(c); }, x, x + 4000.0, {1e-12, 1e-10, 20000});
  };
  return quad([&](double z) { return hit_ccdf(y - z); }, 0.0, w, {1e-10, 1e-8, 20000}) / w;
}

}  // namespace

TEST(Contact, HitDensityNormalisesAndMatchesCcdf) {
  const ContactModel m(DistSpec::exponential(0.02), 20, 100);
  const double mass = quad([&](double c) { return m.hit_pdf(c); }, 0.0, 80.0) +
                      quad([&](double c) { return m.hit_pdf(c); }, 80.0, 3000.0);
  EXPECT_NEAR(mass, 1.0, 1e-7);
  for (double x : {5.0, 40.0, 79.0, 120.0, 300.0}) {
    const double tail = x < 80.0 ? quad([&](double c) { return m.hit_pdf(c); }, x, 80.0) +
                                       quad([&](double c) { return m.hit_pdf(c); }, 80.0, 3000.0)
                                 : quad([&](double c) { return m.hit_pdf(c); }, x, 3000.0);
    EXPECT_NEAR(m.hit_ccdf(x), tail, 1e-7) << x;
  }
  EXPECT_NEAR(m.hit_plus_off_ccdf(250.0), hit_plus_off_ccdf_reference(m, 250.0), 1e-6);
}

TEST(Contact, ParetoHitClosedFormsAgreeWithQuadrature) {
  const ContactModel m(DistSpec::pareto(1.898, 245.4), 20, 100);
  const double mass = quad([&](double c) { return m.hit_pdf(c); }, 0.0, 80.0) +
                      quad([&](double c) { return m.hit_pdf(c); }, 80.0, 1e4) +
                      quad([&](double c) { return m.hit_pdf(c); }, 1e4, 1e8);
  EXPECT_NEAR(mass, 1.0, 1e-5);
  EXPECT_NEAR(m.hit_ccdf(30.0),
              1.0 - quad([&](double c) { return m.hit_pdf(c); }, 0.0, 30.0), 1e-8);
}

TEST(Contact, ShortAndMissDensitiesNormalise) {
  for (const auto& c : {DistSpec::exponential(0.02), DistSpec::pareto(1.898, 245.4)}) {
    const ContactModel m(c, 20, 100);
    EXPECT_NEAR(quad([&](double x) { return m.short_pdf(x); }, 0.0, 20.0), 1.0, 1e-6) << c.describe();
    EXPECT_NEAR(quad([&](double x) { return m.miss_pdf(x); }, 0.0, 80.0), 1.0, 1e-6) << c.describe();
    EXPECT_NEAR(m.short_cdf(10.0), quad([&](double x) { return m.short_pdf(x); }, 0.0, 10.0), 1e-6);
    EXPECT_NEAR(m.miss_cdf(50.0), quad([&](double x) { return m.miss_pdf(x); }, 0.0, 50.0), 1e-6);
    EXPECT_NEAR(m.res_cdf(7.0), quad([&](double x) { return m.res_pdf(x); }, 0.0, 7.0), 1e-7);
  }
}

TEST(Contact, EmpiricalContactsUseExactPiecewiseIntegrals) {
  RandomStream rng(21, 0);
  std::vector<double> s(4000);
  for (auto& v : s) v = rng.exponential(0.02);
  const ContactModel emp(DistSpec::empirical(s), 20, 100);
  const ContactModel ref(DistSpec::exponential(0.02), 20, 100);
  EXPECT_NEAR(emp.mean_h(), ref.mean_h(), 0.05);
  EXPECT_NEAR(emp.short_cdf(10.0), ref.short_cdf(10.0), 0.05);
  EXPECT_NEAR(emp.hit_ccdf(40.0), ref.hit_ccdf(40.0), 0.05);
}

TEST(PmfH, SumsToOne) {
  for (double mu : {1e-3, 0.02, 0.1, 10.0}) {
    const ContactModel m(DistSpec::exponential(mu), 20, 100);
    double mass = 0.0;
    for (long long h = 1; h <= m.h_table_size() + 5; ++h) mass += m.pmf_h(h);
    EXPECT_NEAR(mass, 1.0, 1e-6) << mu;
  }
  const ContactModel heavy(DistSpec::pareto(1.898, 245.4), 20, 100);
  double mass = 0.0;
  for (long long h = 1; h <= heavy.h_table_size(); ++h) mass += heavy.pmf_h(h);
  EXPECT_NEAR(mass, 1.0, 1e-6);
  EXPECT_TRUE(std::isfinite(heavy.mean_h()));
}

TEST(PmfH, Limits) {
  EXPECT_GT(pmf_h(DistSpec::exponential(0.1), 20, 100, 1), 0.99);
  EXPECT_GT(pmf_h(DistSpec::exponential(1e3), 20, 100, 1), 1.0 - 1e-9);
  EXPECT_THROW(ContactModel(DistSpec::pareto(0.9, 10), 20, 100), DomainError);
  EXPECT_EQ(pmf_h(DistSpec::exponential(0.1), 20, 100, 0), 0.0);
}

TEST(PmfH, MeanMatchesSimulationForLongContacts) {
  const DistSpec s = DistSpec::exponential(0.001), c = DistSpec::exponential(0.001);
  SimConfig cfg;
  cfg.mode = SimMode::FullContacts;
  cfg.n_detected_target = 30000;
  const auto mp = filter_full(s, c, DutyCycleSpec::deterministic(20, 100), cfg, RandomStream(7, 0));
  const auto sm = sample_moments_counts(mp.h_counts);
  const ContactModel m(c, 20, 100);
  EXPECT_NEAR(m.mean_h(), sm.mean, 3.0 * std::sqrt(sm.variance / static_cast<double>(sm.n)));
}

TEST(CTilde, WeightsSumToOneAndSupportIsCapped) {
  for (double mu : {1e-4, 0.02, 0.5}) {
    const ContactModel m(DistSpec::exponential(mu), 20, 100);
    EXPECT_NEAR(m.c_tilde_weights().total(), 1.0, 1e-12);
    const auto d = dist_c_tilde(DistSpec::exponential(mu), 20, 100);
    EXPECT_DOUBLE_EQ(d.cdf(20.0), 1.0);
    double prev = 0.0;
    for (double x = 0.0; x <= 21.0; x += 0.25) {
      const double f = d.cdf(x);
      EXPECT_GE(f, prev - 1e-12);
      prev = f;
    }
  }
}

TEST(CTilde, StationaryLawMatchesSimulation) {
  const DistSpec s = DistSpec::exponential(0.001), c = DistSpec::exponential(0.05);
  SimConfig cfg;
  cfg.mode = SimMode::FullContacts;
  cfg.n_detected_target = 20000;
  const auto mp = filter_full(s, c, DutyCycleSpec::deterministic(20, 100), cfg, RandomStream(13, 0));
  const auto d = dist_c_tilde_stationary(c, 20);
  EXPECT_LT(ks_distance(mp.c_tilde, [&](double x) { return d.cdf(x); }), 0.02);
}

TEST(CTilde, StayAwakeMixture) {
  const auto d = dist_c_tilde_stay_awake(DistSpec::exponential(0.02), 20, 100);
  ASSERT_EQ(d.entries().size(), 2u);
  EXPECT_DOUBLE_EQ(d.entries()[0].weight, 0.2);
  const ContactModel m(DistSpec::exponential(0.02), 20, 100);
  EXPECT_NEAR(m.res_star_cdf(1e5), 1.0, 1e-12);
  // memoryless contacts: the residual after the wake-up is again Exp(mu)
  EXPECT_NEAR(m.res_star_cdf(30.0), 1.0 - std::exp(-0.6), 1e-9);
}

TEST(GPNonneg, Limits) {
  const auto s = DistSpec::exponential(0.001);
  const auto neg = g_p_exponential(0.001, 20, 100);
  const auto tiny = g_p_nonneg(s, DistSpec::exponential(1e3), 20, 100);
  EXPECT_NEAR(tiny.g, neg.g, 1e-3);
  EXPECT_NEAR(tiny.p, neg.p, 1e-3);
  EXPECT_NEAR(uniform_plus_dist_cdf(80.0, DistSpec::exponential(1e9), 80.0), 1.0, 1e-6);
  const auto off = g_p_nonneg(s, DistSpec::exponential(0.02), 20, 100, ZChoice::Off);
  EXPECT_DOUBLE_EQ(off.g, off.p);
}

TEST(STildeNonneg, Structure) {
  const auto s = DistSpec::exponential(0.001);
  STildeNonnegOptions opt;
  opt.budget = 20000;
  const auto shortc = dist_s_tilde_nonneg(s, DistSpec::exponential(1e3), 20, 100, SleepPolicy::SleepAlways, opt);
  EXPECT_LT(shortc.atom_at(80.0), 1e-9);
  const auto longc = dist_s_tilde_nonneg(s, DistSpec::exponential(0.02), 20, 100, SleepPolicy::SleepAlways, opt);
  EXPECT_GT(longc.atom_at(80.0), 0.1);
  const auto stay = dist_s_tilde_nonneg(s, DistSpec::exponential(0.02), 20, 100, SleepPolicy::StayAwakeOnContact, opt);
  EXPECT_EQ(stay.entries().size(), 1u);
  EXPECT_EQ(stay.atom_at(80.0), 0.0);
  // reproducible self-estimated CDF
  const auto again = dist_s_tilde_nonneg(s, DistSpec::exponential(0.02), 20, 100, SleepPolicy::SleepAlways, opt);
  EXPECT_EQ(longc.cdf(3000.0), again.cdf(3000.0));
}
