// Exponential intercontacts seen through a 20/100 s duty cycle: simulated
// N and S~ against the analytic PMF and moments.

#include <cstdio>

#include "dcp/model/negligible.hpp"
#include "dcp/sim.hpp"
#include "dcp/stats.hpp"

int main() {
  using namespace dcp;
  const double lambda = 0.001, tau = 20, period = 100;
  const auto s = DistSpec::exponential(lambda);

  SimConfig cfg;
  cfg.n_detected_target = 100000;
  cfg.chunks = 8;
  const auto mp = filter_negligible(s, DutyCycleSpec::deterministic(tau, period), cfg, RandomStream(42, 0));

  const GPpair gp = g_p_exponential(lambda, tau, period);
  std::printf("g = %.5f  p = %.5f  skipped fraction %.5f (1 - g = %.5f)\n", gp.g, gp.p, skip_fraction(mp), 1 - gp.g);

  const auto pmf = empirical_pmf(mp.n_counts);
  std::printf("  k   simulated   P(N=k)\n");
  for (int k = 1; k <= 8 && k < static_cast<int>(pmf.size()); ++k) {
    std::printf("%3d   %.5f     %.5f\n", k, pmf[k], pmf_n(gp, k));
  }

  const auto r = moments_s_tilde(dist_moments(s), gp);
  const auto sm = sample_moments(mp.s_tilde);
  std::printf("E[S~]  %.1f simulated, %.1f predicted\n", sm.mean, r.mean);
  std::printf("cv2    %.4f simulated, %.4f predicted (%s)\n", sm.cv2, *r.cv2, to_string(r.classification.behaviour));
}
