// Contacts of positive length: measured contact CDF and span counts for a
// few contact rates.

#include <cstdio>

#include "dcp/model/contact.hpp"
#include "dcp/sim.hpp"
#include "dcp/stats.hpp"

int main() {
  using namespace dcp;
  const double tau = 20, period = 100;
  const auto s = DistSpec::exponential(0.001);
  const auto dc = DutyCycleSpec::deterministic(tau, period);

  SimConfig cfg;
  cfg.mode = SimMode::FullContacts;
  cfg.n_detected_target = 30000;
  cfg.chunks = 8;

  std::printf("    mu    KS(C~)  KS(stationary)  P(H=1) sim/model   atom at T-tau sim/model\n");
  for (double mu : {1e-4, 1e-3, 2e-2, 1e-1}) {
    const auto c = DistSpec::exponential(mu);
    const auto mp = filter_full(s, c, dc, cfg, RandomStream(7, 0));
    const auto mix = dist_c_tilde(c, tau, period);
    const auto st = dist_c_tilde_stationary(c, tau);
    STildeNonnegOptions opt;
    opt.budget = 20000;
    const double atom = dist_s_tilde_nonneg(s, c, tau, period, SleepPolicy::SleepAlways, opt).atom_at(period - tau);
    std::printf("%7g   %.4f   %.4f          %.4f / %.4f      %.4f / %.4f\n", mu,
                ks_distance(mp.c_tilde, [&](double x) { return mix.cdf(x); }),
                ks_distance(mp.c_tilde, [&](double x) { return st.cdf(x); }), empirical_pmf(mp.h_counts)[1],
                pmf_h(c, tau, period, 1), fraction_equal(mp.s_tilde, period - tau), atom);
  }
}
