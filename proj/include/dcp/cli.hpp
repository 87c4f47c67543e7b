#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcp/fit.hpp"
#include "dcp/io.hpp"
#include "dcp/report.hpp"
#include "dcp/sched.hpp"
#include "dcp/sim.hpp"
#include "dcp/trace.hpp"

namespace dcp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitStarved = 2;

/// Simulation replications are fixed so results do not depend on --threads.
inline constexpr std::size_t kSimChunks = 8;

namespace detail {

namespace fs = std::filesystem;

// A flag that may also come from the --config JSON file. The file may not
// silently override a flag given on the command line: a differing value is
// an error.
class Bindings {
 public:
  template <class T>
  void add(const std::string& key, CLI::Option* opt, T* target) {
    entries_[key] = {opt, [target, opt, key](const json& v) {
                       T value;
                       try {
                         value = v.get<T>();
                       } catch (const json::exception&) {
                         throw ConfigError("config key '" + key + "' has the wrong type");
                       }
                       if (opt->count() > 0 && !(value == *target)) {
                         throw ConfigError("config key '" + key + "' conflicts with " + opt->get_name());
                       }
                       *target = value;
                     }};
  }

  /// Spec-valued flags accept either the compact string or the JSON object.
  void add_spec(const std::string& key, CLI::Option* opt, std::string* target, bool is_dc) {
    entries_[key] = {opt, [target, opt, key, is_dc](const json& v) {
                       std::string value;
                       if (v.is_null()) return;
                       value = is_dc ? compact(dc_from_json(v)) : compact(dist_from_json(v));
                       if (opt->count() > 0) {
                         const std::string mine = is_dc ? compact(parse_dc(*target)) : compact(parse_dist(*target));
                         if (mine != value) throw ConfigError("config key '" + key + "' conflicts with " + opt->get_name());
                       }
                       *target = value;
                     }};
  }

  void apply(const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file " + path + ": expected a JSON object");
    for (const auto& [k, v] : j.items()) {
      auto it = entries_.find(k);
      if (it == entries_.end()) throw ConfigError("config file " + path + ": unknown key '" + k + "'");
      it->second.second(v);
    }
  }

 private:
  std::map<std::string, std::pair<CLI::Option*, std::function<void(const json&)>>> entries_;
};

inline fs::path ensure_dir(const std::string& out) {
  fs::path p(out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory " + out + ": " + ec.message());
  return p;
}

inline void write_json(const fs::path& p, const json& j) {
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write " + p.string());
  os << j.dump(2) << '\n';
}

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write " + p.string());
  return os;
}

inline json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

struct Common {
  std::string out = "out";
  std::string config;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

void add_common(CLI::App* sub, Common& c, Bindings& b, bool with_seed = true) {
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--config", c.config, "JSON file with the same keys as the flags (underscored)");
  b.add("threads", sub->add_option("--threads", c.threads, "worker threads (results do not depend on it)"),
        &c.threads);
  if (with_seed) b.add("seed", sub->add_option("--seed", c.seed, "random seed")->capture_default_str(), &c.seed);
}

// ---- simulate -----------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::string mode = "negligible";
  std::string s_dist;
  std::string c_dist;
  std::string dc = "det:20:100";
  std::size_t samples = 100000;
  std::size_t warmup = 10;
  std::size_t max_contacts = 1000000000;
};

inline json simulate_config(const SimulateArgs& a) {
  return {{"command", "simulate"},
          {"mode", a.mode},
          {"s_dist", to_json(parse_dist(a.s_dist))},
          {"c_dist", a.c_dist.empty() ? json(nullptr) : to_json(parse_dist(a.c_dist))},
          {"dc", to_json(parse_dc(a.dc))},
          {"samples", a.samples},
          {"warmup", a.warmup},
          {"max_contacts", a.max_contacts},
          {"chunks", kSimChunks},
          {"seed", a.common.seed}};
}

inline int run_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.s_dist.empty()) throw ConfigError("simulate: --s-dist is required");
  if (a.mode != "negligible" && a.mode != "full") throw ConfigError("simulate: --mode must be negligible or full");
  const bool full = a.mode == "full";
  if (full && a.c_dist.empty()) throw ConfigError("simulate: --mode full needs --c-dist");
  if (a.samples == 0) throw ConfigError("simulate: --samples must be positive");
  const DistSpec s = parse_dist(a.s_dist);
  const std::optional<DistSpec> c = a.c_dist.empty() ? std::nullopt : std::optional<DistSpec>(parse_dist(a.c_dist));
  const DutyCycleSpec dc = parse_dc(a.dc);
  const json config = simulate_config(a);

  SimConfig cfg;
  cfg.mode = full ? SimMode::FullContacts : SimMode::NegligibleContacts;
  cfg.policy = dc.stay_awake_on_contact ? SleepPolicy::StayAwakeOnContact : SleepPolicy::SleepAlways;
  cfg.n_detected_target = a.samples;
  cfg.warmup_detections = a.warmup;
  cfg.max_contacts = a.max_contacts;
  cfg.chunks = kSimChunks;
  cfg.threads = a.common.threads;
  const RandomStream rng(a.common.seed, 0);
  MeasuredProcess mp;
  if (!dc.is_deterministic()) {
    mp = filter_with_stochastic_dc(s, full ? c : std::nullopt, dc, cfg, rng);
  } else if (full) {
    mp = filter_full(s, *c, dc, cfg, rng);
  } else {
    mp = filter_negligible(s, dc, cfg, rng);
  }
  const auto dir = ensure_dir(a.common.out);
  {
    auto os = open_out(dir / "samples.csv");
    os << "# " << config.dump() << '\n';
    mp.write_csv(os);
  }
  write_json(dir / "summary.json", {{"config", config}, {"summary", summary_json(mp)}});
  out << "simulate: wrote " << (dir / "samples.csv").string() << " and summary.json\n";
  return kExitOk;
}

// ---- predict ------------------------------------------------------------

struct PredictArgs {
  Common common;
  std::string s_dist;
  std::string c_dist;
  std::string dc = "det:20:100";
  bool full = false;
  int k_max = 50;
  std::size_t grid_points = 201;
  std::string z = "on";
  std::size_t budget = kPredictionBudget;
  std::string n_law = "general";
};

inline PredictionConfig prediction_config(const PredictArgs& a) {
  if (a.s_dist.empty()) throw ConfigError("predict: --s-dist is required");
  if (a.z != "on" && a.z != "off") throw ConfigError("predict: --z must be on or off");
  if (a.n_law != "general" && a.n_law != "geometric") throw ConfigError("predict: --n-law must be general or geometric");
  PredictionConfig p;
  p.s = parse_dist(a.s_dist);
  if (!a.c_dist.empty()) p.c = parse_dist(a.c_dist);
  p.dc = parse_dc(a.dc);
  p.full = a.full;
  p.k_max = a.k_max;
  p.grid_points = a.grid_points;
  p.z = a.z == "on" ? ZChoice::On : ZChoice::Off;
  p.budget = a.budget;
  p.seed = kPredictionSeed ^ a.common.seed;
  p.n_law = a.n_law == "geometric" ? NLaw::Geometric : NLaw::General;
  p.validate();
  return p;
}

// Without an intercontact law a stochastic duty cycle still has something
// to report: its joint ON/OFF moments.
inline int run_predict_dc_only(const PredictArgs& a, std::ostream& out) {
  const DutyCycleSpec dc = parse_dc(a.dc);
  const json config = {{"command", "predict"}, {"dc", to_json(dc)}, {"s_dist", nullptr}};
  const json jd = joint_duty_cycle_json(dc);
  const auto dir = ensure_dir(a.common.out);
  write_json(dir / "prediction.json", {{"config", config}, {"prediction", {{"joint_duty_cycle", jd}}}});
  out << "predict: joint ON mean " << jd["on_mean"].get<double>() << " s, OFF mean "
      << jd["off_closed_form"]["mean"].get<double>() << " s, OFF cv2 " << jd["off_closed_form"]["cv2"].get<double>()
      << "; wrote " << (dir / "prediction.json").string() << '\n';
  return kExitOk;
}

inline int run_predict(const PredictArgs& a, std::ostream& out) {
  if (a.s_dist.empty() && a.c_dist.empty() && !parse_dc(a.dc).is_deterministic()) return run_predict_dc_only(a, out);
  const PredictionConfig p = prediction_config(a);
  json config = to_json(p);
  config["command"] = "predict";
  const PredictionReport r = predict(p);
  const auto dir = ensure_dir(a.common.out);
  write_json(dir / "prediction.json", {{"config", config}, {"prediction", r.data}});
  for (const auto& g : r.grids) {
    auto os = open_out(dir / (g.name + ".csv"));
    g.write_csv(os, config.dump());
  }
  write_json(dir / "manifest.json", {{"config", config}, {"plots", plot_manifest(r.grids)}});
  out << "predict: S " << p.s.describe() << " -> g=" << r.data["gp"]["g"].get<double>()
      << " p=" << r.data["gp"]["p"].get<double>() << "; wrote " << (dir / "prediction.json").string() << '\n';
  return kExitOk;
}

// ---- compare ------------------------------------------------------------

struct CompareArgs {
  Common common;
  std::string sim_dir;
  std::string pred_dir;
  Tolerances tol;
};

inline int run_compare(const CompareArgs& a, std::ostream& out) {
  if (a.sim_dir.empty() || a.pred_dir.empty()) throw ConfigError("compare: --sim and --pred are required");
  const json sim = read_json(fs::path(a.sim_dir) / "summary.json");
  const json pred = read_json(fs::path(a.pred_dir) / "prediction.json");
  const json& sc = sim.at("config");
  const json& pc = pred.at("config");
  for (const char* key : {"s_dist", "c_dist", "dc", "mode"}) {
    if (sc.at(key) != pc.at(key)) {
      throw ConfigError(std::string("compare: simulate and predict disagree on '") + key + "': " + sc.at(key).dump() +
                        " vs " + pc.at(key).dump());
    }
  }
  std::ifstream in(fs::path(a.sim_dir) / "samples.csv");
  if (!in) throw ConfigError("compare: cannot open samples.csv in " + a.sim_dir);
  const MeasuredProcess mp = read_measured_csv(in);

  PredictionConfig p;
  p.s = dist_from_json(pc.at("s_dist"));
  if (!pc.at("c_dist").is_null()) p.c = dist_from_json(pc.at("c_dist"));
  p.dc = dc_from_json(pc.at("dc"));
  p.full = pc.at("mode") == "full";
  p.k_max = pc.at("k_max").get<int>();
  p.grid_points = pc.at("grid_points").get<std::size_t>();
  p.z = pc.at("z") == "on" ? ZChoice::On : ZChoice::Off;
  p.budget = pc.at("budget").get<std::size_t>();
  p.seed = pc.at("seed").get<std::uint64_t>();
  p.n_law = pc.value("n_law", "general") == "geometric" ? NLaw::Geometric : NLaw::General;

  json result = compare(mp, p, a.tol);
  const json config = {{"command", "compare"}, {"simulate", sc}, {"predict", pc}, {"tolerances", to_json(a.tol)}};
  const auto dir = ensure_dir(a.common.out);
  write_json(dir / "comparison.json", {{"config", config}, {"comparison", result}});
  for (const auto& m : result["metrics"]) {
    const char* verdict = m["gated"].get<bool>() ? (m["pass"].get<bool>() ? "PASS " : "FAIL ") : "INFO ";
    out << verdict << m["name"].get<std::string>() << " = " << m["value"].dump()
        << " (tolerance " << m["tolerance"].dump() << ")\n";
  }
  out << "compare: " << (result["pass"].get<bool>() ? "PASS" : "FAIL") << '\n';
  return kExitOk;
}

// ---- fit ----------------------------------------------------------------

struct FitArgs {
  Common common;
  std::string trace;
  std::string format = "intervals";
  std::string quantity = "intercontact";
  std::string model = "both";
  double significance = kDefaultSignificance;
  std::size_t bootstrap = 2000;
  double granularity = -1.0;  // < 0: take it from the trace metadata
};

inline json summary_block(const ParamSummary& s) {
  return {{"n", s.n}, {"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"mean", s.mean}, {"q3", s.q3}, {"max", s.max}};
}

inline int run_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  if (a.trace.empty()) throw ConfigError("fit: --trace is required");
  TraceFormat format;
  if (a.format == "intervals") {
    format = TraceFormat::ContactIntervals;
  } else if (a.format == "events") {
    format = TraceFormat::ContactEvents;
  } else {
    throw ConfigError("fit: --format must be intervals or events");
  }
  if (a.quantity != "intercontact" && a.quantity != "contact") throw ConfigError("fit: --quantity must be intercontact or contact");
  FitOptions opt;
  if (a.model == "exponential") {
    opt.models = {FitModel::Exponential};
  } else if (a.model == "pareto") {
    opt.models = {FitModel::Pareto};
  } else if (a.model != "both") {
    throw ConfigError("fit: --model must be exponential, pareto or both");
  }
  opt.cvm.significance = a.significance;
  opt.cvm.bootstrap = a.bootstrap;
  opt.cvm.seed = a.common.seed;
  opt.cvm.threads = a.common.threads;
  const Trace tr = parse_trace(fs::path(a.trace), format);
  opt.granularity = a.granularity >= 0.0 ? a.granularity : tr.meta.granularity;
  const Quantity q = a.quantity == "contact" ? Quantity::Contact : Quantity::Intercontact;
  const FitReport rep = fit_all_pairs(tr.pairs, q, opt);

  const json config = {{"command", "fit"},
                       {"trace", fs::path(a.trace).filename().string()},
                       {"trace_meta", tr.meta},
                       {"format", a.format},
                       {"quantity", a.quantity},
                       {"model", a.model},
                       {"significance", a.significance},
                       {"bootstrap", a.bootstrap},
                       {"granularity", opt.granularity},
                       {"seed", a.common.seed}};
  const auto dir = ensure_dir(a.common.out);
  {
    auto os = open_out(dir / "fits.csv");
    os << "# " << config.dump() << '\n';
    rep.write_csv(os);
  }
  json summary = json::object();
  for (FitModel m : opt.models) {
    const auto [p1, p2] = rep.summary(m);
    std::size_t fitted = 0, rejected = 0;
    for (const auto& r : rep.results) {
      if (r.model != m) continue;
      ++fitted;
      rejected += r.rejected;
    }
    json block = {{"fitted", fitted}, {"rejected", rejected}};
    if (m == FitModel::Exponential) {
      block["rate"] = summary_block(p1);
    } else {
      block["alpha"] = summary_block(p1);
      block["b"] = summary_block(p2);
    }
    summary[to_string(m)] = block;
  }
  json skipped = json::array();
  for (const auto& s : rep.skipped) skipped.push_back({{"pair", {s.pair.first, s.pair.second}}, {"reason", s.reason}});
  write_json(dir / "fit_summary.json",
             {{"config", config}, {"n_pairs", tr.pairs.size()}, {"summary", summary}, {"skipped", skipped}});
  if (rep.results.empty()) err << "warning: no pair has more than " << kMinPairSamples - 1 << " samples; fits.csv is empty\n";
  out << "fit: " << rep.results.size() << " fits over " << tr.pairs.size() << " pairs; wrote " << (dir / "fits.csv").string()
      << '\n';
  return kExitOk;
}

// ---- dc-joint -----------------------------------------------------------

struct DcJointArgs {
  Common common;
  std::string dc = "stoch:0.025:0.02";
  double horizon = 1e7;
  std::vector<double> lambdas;
  std::size_t samples = 100000;
  bool write_schedule = false;
};

inline int run_dc_joint(const DcJointArgs& a, std::ostream& out) {
  const DutyCycleSpec dc = parse_dc(a.dc);
  if (dc.is_deterministic()) throw ConfigError("dc-joint: --dc must be stochastic (stoch:BETA:ALPHA)");
  if (!(a.horizon > 0.0)) throw ConfigError("dc-joint: --horizon must be positive");
  for (double l : a.lambdas) {
    if (!(l > 0.0)) throw ConfigError("dc-joint: --lambdas must be positive");
  }
  const json config = {{"command", "dc-joint"},
                       {"dc", to_json(dc)},
                       {"horizon", a.horizon},
                       {"lambdas", a.lambdas},
                       {"samples", a.samples},
                       {"chunks", kSimChunks},
                       {"seed", a.common.seed}};
  const RandomStream rng(a.common.seed, 0);
  const JointSchedule js = sample_joint_schedule(dc, a.horizon, rng.split(0));
  std::vector<double> on, off;
  // the first and last segments are clipped by the window
  for (std::size_t i = 1; i + 1 < js.segments.size(); ++i) {
    (js.segments[i].phase == Phase::On ? on : off).push_back(js.segments[i].length());
  }
  if (on.size() < 2 || off.size() < 2) throw ConfigError("dc-joint: horizon too short for segment statistics");
  const auto mon = sample_moments(on), moff = sample_moments(off);
  json j;
  j["simulated"] = {{"on", moments_json(mon)}, {"off", moments_json(moff)}};
  j["closed_form"] = {{"on_mean", 1.0 / (2.0 * dc.on_rate_beta)}, {"off", off_moments_json(joint_off_moments(dc))}};
  j["chain"] = {{"off", off_moments_json(joint_off_moments_ctmc(dc))}};
  const DutyCycleSpec eq = deterministic_equivalent(dc);
  j["deterministic_equivalent"] = to_json(eq);

  json sweep = json::array();
  for (std::size_t i = 0; i < a.lambdas.size(); ++i) {
    const double l = a.lambdas[i];
    SimConfig cfg;
    cfg.n_detected_target = a.samples;
    cfg.chunks = kSimChunks;
    cfg.threads = a.common.threads;
    const auto mp = filter_with_stochastic_dc(DistSpec::exponential(l), std::nullopt, dc, cfg, rng.split(1 + i));
    const GPpair gp = g_p_exponential(l, eq.tau, eq.period);
    const double ks = ks_distance(mp.s_tilde, [&](double x) { return s_tilde_cdf_exponential(l, gp, x); });
    sweep.push_back({{"lambda", l}, {"ks_s_tilde_vs_deterministic_equivalent", ks}, {"n", mp.s_tilde.size()}});
  }
  j["s_tilde_sweep"] = sweep;
  const auto dir = ensure_dir(a.common.out);
  write_json(dir / "dc_joint.json", {{"config", config}, {"dc_joint", j}});
  if (a.write_schedule) {
    auto os = open_out(dir / "schedule.csv");
    os << "# " << config.dump() << '\n';
    js.write_csv(os);
  }
  out << "dc-joint: ON mean " << mon.mean << " s, OFF mean " << moff.mean << " s, OFF cv2 " << moff.cv2
      << " (closed form: " << joint_off_moments(dc).cv2 << ", chain: " << joint_off_moments_ctmc(dc).cv2 << ")\n";
  return kExitOk;
}

}  // namespace detail

/// Entry point of the `dcp` tool. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"Duty-cycled contact measurement: simulation, prediction and fitting"};
  app.require_subcommand(1);

  SimulateArgs sa;
  Bindings sb;
  auto* sim = app.add_subcommand("simulate", "filter a synthetic contact process through a duty cycle");
  add_common(sim, sa.common, sb);
  sb.add("mode", sim->add_option("--mode", sa.mode, "negligible or full")->capture_default_str(), &sa.mode);
  sb.add_spec("s_dist", sim->add_option("--s-dist", sa.s_dist, "intercontact law, exp:RATE or pareto:SHAPE:SCALE"),
              &sa.s_dist, false);
  sb.add_spec("c_dist", sim->add_option("--c-dist", sa.c_dist, "contact law (full mode)"), &sa.c_dist, false);
  sb.add_spec("dc", sim->add_option("--dc", sa.dc, "det:TAU:T or stoch:BETA:ALPHA, append :stay to stay awake")
                        ->capture_default_str(),
              &sa.dc, true);
  sb.add("samples", sim->add_option("--samples", sa.samples, "detections to record")->capture_default_str(), &sa.samples);
  sb.add("warmup", sim->add_option("--warmup", sa.warmup, "detections discarded per replication")->capture_default_str(),
         &sa.warmup);
  sb.add("max_contacts", sim->add_option("--max-contacts", sa.max_contacts, "contact cap per replication"),
         &sa.max_contacts);

  PredictArgs pa;
  Bindings pb;
  auto* pre = app.add_subcommand("predict", "analytic predictions for a configuration");
  add_common(pre, pa.common, pb);
  pb.add_spec("s_dist", pre->add_option("--s-dist", pa.s_dist, "intercontact law"), &pa.s_dist, false);
  pb.add_spec("c_dist", pre->add_option("--c-dist", pa.c_dist, "contact law"), &pa.c_dist, false);
  pb.add_spec("dc", pre->add_option("--dc", pa.dc, "duty cycle")->capture_default_str(), &pa.dc, true);
  pb.add("full", pre->add_flag("--full", pa.full, "non-negligible contacts"), &pa.full);
  pb.add("k_max", pre->add_option("--k-max", pa.k_max, "length of PMF tables")->capture_default_str(), &pa.k_max);
  pb.add("grid_points", pre->add_option("--grid-points", pa.grid_points, "CDF grid size")->capture_default_str(),
         &pa.grid_points);
  pb.add("z", pre->add_option("--z", pa.z, "phase of the previous detection in g^: on or off")->capture_default_str(),
         &pa.z);
  pb.add("n_law", pre->add_option("--n-law", pa.n_law, "general or geometric (g = p = tau/T)")->capture_default_str(),
         &pa.n_law);
  pb.add("budget", pre->add_option("--budget", pa.budget, "sample budget of sampler-only components"), &pa.budget);

  CompareArgs ca;
  Bindings cb;
  auto* cmp = app.add_subcommand("compare", "distances between a simulate run and a predict run");
  add_common(cmp, ca.common, cb, false);
  cb.add("sim", cmp->add_option("--sim", ca.sim_dir, "simulate output directory"), &ca.sim_dir);
  cb.add("pred", cmp->add_option("--pred", ca.pred_dir, "predict output directory"), &ca.pred_dir);
  cb.add("tv_tol", cmp->add_option("--tv-tol", ca.tol.tv)->capture_default_str(), &ca.tol.tv);
  cb.add("ks_tol", cmp->add_option("--ks-tol", ca.tol.ks)->capture_default_str(), &ca.tol.ks);
  cb.add("moment_tol", cmp->add_option("--moment-tol", ca.tol.moment)->capture_default_str(), &ca.tol.moment);
  cb.add("slope_tol", cmp->add_option("--slope-tol", ca.tol.slope)->capture_default_str(), &ca.tol.slope);
  cb.add("jump_tol", cmp->add_option("--jump-tol", ca.tol.jump)->capture_default_str(), &ca.tol.jump);

  FitArgs fa;
  Bindings fb;
  auto* fit = app.add_subcommand("fit", "per-pair exponential / Pareto fits with CvM tests");
  add_common(fit, fa.common, fb);
  fb.add("trace", fit->add_option("--trace", fa.trace, "trace CSV"), &fa.trace);
  fb.add("format", fit->add_option("--format", fa.format, "intervals or events")->capture_default_str(), &fa.format);
  fb.add("quantity", fit->add_option("--quantity", fa.quantity, "intercontact or contact")->capture_default_str(),
         &fa.quantity);
  fb.add("model", fit->add_option("--model", fa.model, "exponential, pareto or both")->capture_default_str(), &fa.model);
  fb.add("significance", fit->add_option("--significance", fa.significance)->capture_default_str(), &fa.significance);
  fb.add("bootstrap", fit->add_option("--bootstrap", fa.bootstrap, "CvM bootstrap replicates")->capture_default_str(),
         &fa.bootstrap);
  fb.add("granularity", fit->add_option("--granularity", fa.granularity, "tie-breaking jitter width (default: trace metadata)"),
         &fa.granularity);

  DcJointArgs da;
  Bindings db;
  auto* dcj = app.add_subcommand("dc-joint", "joint schedule statistics of two stochastic duty cycles");
  add_common(dcj, da.common, db);
  db.add_spec("dc", dcj->add_option("--dc", da.dc, "stoch:BETA:ALPHA")->capture_default_str(), &da.dc, true);
  db.add("horizon", dcj->add_option("--horizon", da.horizon, "schedule length, s")->capture_default_str(), &da.horizon);
  db.add("lambdas", dcj->add_option("--lambdas", da.lambdas, "exponential intercontact rates for the S~ comparison")->delimiter(','),
         &da.lambdas);
  db.add("samples", dcj->add_option("--samples", da.samples, "detections per rate")->capture_default_str(), &da.samples);
  db.add("write_schedule", dcj->add_flag("--write-schedule", da.write_schedule, "also write schedule.csv"),
         &da.write_schedule);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*sim) {
      sb.apply(sa.common.config);
      return run_simulate(sa, out);
    }
    if (*pre) {
      pb.apply(pa.common.config);
      return run_predict(pa, out);
    }
    if (*cmp) {
      cb.apply(ca.common.config);
      return run_compare(ca, out);
    }
    if (*fit) {
      fb.apply(fa.common.config);
      return run_fit(fa, out, err);
    }
    db.apply(da.common.config);
    return run_dc_joint(da, out);
  } catch (const StarvedError& e) {
    err << "error: " << e.what() << " (" << e.detections_collected << " detections from " << e.contacts_generated
        << " contacts)\n";
    return kExitStarved;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace dcp::cli
