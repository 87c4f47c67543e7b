// Build a synthetic trace, write it, read it back and fit every pair.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "dcp/fit.hpp"
#include "dcp/trace.hpp"

int main() {
  using namespace dcp;
  const auto path = std::filesystem::temp_directory_path() / "dcp_demo_trace.csv";
  const auto tr = synth_trace(
      25,
      [](std::size_t i) {
        // half exponential, half heavy tailed
        return i % 2 ? SynthPairSpec{DistSpec::pareto(1.8, 400.0), DistSpec::exponential(0.05)}
                     : SynthPairSpec{DistSpec::exponential(0.002), DistSpec::exponential(0.05)};
      },
      3e5, RandomStream(5, 0));
  write_trace(tr, path);

  const Trace back = parse_trace(path, TraceFormat::ContactIntervals);
  FitOptions opt;
  opt.cvm.bootstrap = 200;
  opt.cvm.threads = std::max(1u, std::thread::hardware_concurrency());
  const FitReport rep = fit_all_pairs(back.pairs, Quantity::Intercontact, opt);

  std::printf("pair      model        param1     param2     n    rejected\n");
  for (const auto& r : rep.results) {
    std::printf("%3lld-%-3lld  %-11s  %-9.4g  %-9.4g  %4zu  %s\n", static_cast<long long>(r.pair.first),
                static_cast<long long>(r.pair.second), to_string(r.model), r.param1(), r.param2(), r.n_samples,
                r.rejected ? "yes" : "no");
  }
  const auto [rate, unused] = rep.summary(FitModel::Exponential);
  std::printf("exponential rate over non-rejected pairs: median %.4g, mean %.4g (n = %zu)\n", rate.median, rate.mean,
              rate.n);
  std::filesystem::remove(path);
  std::filesystem::remove(meta_sidecar_path(path));
}
