#pragma once

#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dcp/io.hpp"
#include "dcp/model/contact.hpp"
#include "dcp/model/mixture.hpp"
#include "dcp/model/negligible.hpp"
#include "dcp/sched.hpp"
#include "dcp/sim.hpp"
#include "dcp/stats.hpp"

namespace dcp {

/// Law of N used by a prediction: the general PMF or the geometric
/// approximation with g = p = tau / T (negligible contacts only).
enum class NLaw { General, Geometric };

inline const char* to_string(NLaw l) { return l == NLaw::General ? "general" : "geometric"; }

struct PredictionConfig {
  DistSpec s = DistSpec::exponential(0.001);
  std::optional<DistSpec> c;
  DutyCycleSpec dc = DutyCycleSpec::deterministic(20, 100);
  bool full = false;
  int k_max = 50;
  std::size_t grid_points = 201;
  ZChoice z = ZChoice::On;
  std::size_t budget = kPredictionBudget;
  std::uint64_t seed = kPredictionSeed;
  NLaw n_law = NLaw::General;

  SleepPolicy policy() const {
    return dc.stay_awake_on_contact ? SleepPolicy::StayAwakeOnContact : SleepPolicy::SleepAlways;
  }

  void validate() const {
    dc.validate();
    if (full && !c) throw ConfigError("full-contact prediction needs a contact distribution");
    if (k_max < 1) throw ConfigError("k_max must be at least 1");
    if (grid_points < 2) throw ConfigError("grid needs at least two points");
    if (full && n_law == NLaw::Geometric) throw ConfigError("the geometric N law applies to negligible contacts only");
  }
};

inline json to_json(const PredictionConfig& c) {
  json j = {{"s_dist", to_json(c.s)},
            {"dc", to_json(c.dc)},
            {"mode", c.full ? "full" : "negligible"},
            {"k_max", c.k_max},
            {"grid_points", c.grid_points},
            {"z", c.z == ZChoice::On ? "on" : "off"},
            {"budget", c.budget},
            {"seed", c.seed},
            {"n_law", to_string(c.n_law)}};
  j["c_dist"] = c.c ? to_json(*c.c) : json(nullptr);
  return j;
}

/// Analytic objects a comparison needs, built once per configuration.
/// Stochastic duty cycles are replaced by their deterministic equivalent.
struct ModelView {
  DutyCycleSpec periodic = DutyCycleSpec::deterministic(20, 100);
  GPpair gp;                                 // negligible (g, p)
  std::optional<GPpair> gp_hat;              // full mode
  std::shared_ptr<const MixtureDist> s_tilde;
  std::shared_ptr<const MixtureDist> c_tilde;  // full mode
  std::shared_ptr<const ContactModel> contact;  // full mode
  double pseudo_weight = 0.0;                // atom of S~ at T - tau

  double n_pmf(long long k) const { return pmf_n(gp, k); }
  double h_pmf(long long h) const {
    if (!contact) throw DomainError("h_pmf: negligible-contact model");
    if (periodic.stay_awake_on_contact) return h == 1 ? 1.0 : 0.0;
    return contact->pmf_h(h);
  }
};

inline ModelView build_model(const PredictionConfig& cfg) {
  cfg.validate();
  ModelView m;
  m.periodic = cfg.dc.is_deterministic() ? cfg.dc : deterministic_equivalent(cfg.dc);
  const double tau = m.periodic.tau, period = m.periodic.period;
  if (m.periodic.always_on()) throw ConfigError("duty cycle is always ON; nothing to predict");
  m.gp = cfg.n_law == NLaw::Geometric ? GPpair{m.periodic.duty(), m.periodic.duty()} : g_p(cfg.s, tau, period);
  if (!cfg.full) {
    m.s_tilde = std::make_shared<const MixtureDist>(dist_s_tilde(cfg.s, m.gp, cfg.budget, cfg.seed));
    return m;
  }
  const DistSpec& c = *cfg.c;
  m.contact = std::make_shared<const ContactModel>(c, tau, period);
  m.gp_hat = g_p_nonneg(cfg.s, c, tau, period, cfg.z);
  const bool stay = cfg.dc.stay_awake_on_contact;
  m.c_tilde = std::make_shared<const MixtureDist>(stay ? dist_c_tilde_stay_awake(c, tau, period)
                                                       : dist_c_tilde(c, tau, period));
  STildeNonnegOptions so;
  so.z = cfg.z;
  so.budget = cfg.budget;
  so.seed = cfg.seed;
  m.s_tilde = std::make_shared<const MixtureDist>(dist_s_tilde_nonneg(cfg.s, c, tau, period, cfg.policy(), so));
  m.pseudo_weight = m.s_tilde->atom_at(period - tau);
  return m;
}

/// One plotted series: a CSV grid plus the axis metadata for a manifest.
struct Grid {
  std::string name;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<std::pair<double, double>> points;

  void write_csv(std::ostream& os, const std::string& header_comment = "") const {
    if (!header_comment.empty()) os << "# " << header_comment << '\n';
    os << x_label << ',' << y_label << '\n';
    os.precision(17);
    for (const auto& [x, y] : points) os << x << ',' << y << '\n';
  }
};

struct PredictionReport {
  json data;
  std::vector<Grid> grids;
};

inline json classification_json(const Classification& c) {
  return {{"behaviour", to_string(c.behaviour)}, {"rationale", c.rationale}, {"cv2_s", number(c.cv2_s)},
          {"g", c.g},
          {"p", c.p},
          {"xi", number(c.xi)},
          {"omega", number(c.omega)}};
}

inline json off_moments_json(const OffMoments& m) {
  return {{"mean", m.mean}, {"second_moment", m.second_moment}, {"cv2", m.cv2}};
}

namespace detail {

inline Grid cdf_grid(const std::string& name, const MixtureDist& d, double hi, std::size_t points) {
  Grid g{name, "x", "cdf", false, d.cdf_grid(0.0, hi, points)};
  return g;
}

// Upper plotting bound: the 0.999 quantile of the law.
inline double plot_upper(const MixtureDist& d, double scale) {
  return invert_cdf([&](double x) { return d.cdf(x); }, 0.999, scale);
}

}  // namespace detail

/// ON/OFF moments of the joint schedule of two stochastic duty cycles.
inline json joint_duty_cycle_json(const DutyCycleSpec& dc) {
  return {{"on_mean", 1.0 / (2.0 * dc.on_rate_beta)},
          {"off_closed_form", off_moments_json(joint_off_moments(dc))},
          {"off_chain", off_moments_json(joint_off_moments_ctmc(dc))},
          {"deterministic_equivalent", to_json(deterministic_equivalent(dc))}};
}

inline PredictionReport predict(const PredictionConfig& cfg) {
  PredictionReport r;
  json& j = r.data;
  j["config"] = to_json(cfg);
  if (!cfg.dc.is_deterministic()) j["joint_duty_cycle"] = joint_duty_cycle_json(cfg.dc);
  const ModelView m = build_model(cfg);
  j["periodic_dc"] = to_json(m.periodic);
  j["gp"] = {{"g", m.gp.g}, {"p", m.gp.p}};
  j["gp_geometric"] = {{"g", m.periodic.duty()}, {"p", m.periodic.duty()}};

  Grid n_grid{"n_pmf", "k", "pmf", false, {}};
  json n_pmf = json::array();
  for (int k = 1; k <= cfg.k_max; ++k) {
    n_pmf.push_back(m.n_pmf(k));
    n_grid.points.emplace_back(k, m.n_pmf(k));
  }
  const Moments nm = moments_n(m.gp);
  j["n"] = {{"pmf", n_pmf}, {"mean", nm.mean}, {"second_moment", nm.second_moment}, {"cv2", nm.cv2 ? number(*nm.cv2) : json("undefined")}};
  r.grids.push_back(std::move(n_grid));

  const Moments sm = dist_moments(cfg.s);
  const MomentsReport mr = moments_s_tilde(sm, m.gp);
  j["s_tilde_moments"] = {{"mean", number(mr.mean)},
                          {"second_moment", number(mr.second_moment)},
                          {"cv2", mr.cv2 ? number(*mr.cv2) : json("undefined")},
                          {"classification", classification_json(mr.classification)}};
  if (cfg.s.is_pareto()) {
    const auto t = pareto_tail_check(cfg.s.as_pareto().shape, cfg.s.as_pareto().scale, m.gp);
    j["tail"] = {{"exponent", t.exponent}, {"prefactor", t.prefactor}, {"loglog_slope", t.loglog_slope()}};
  }
  const double scale = std::isfinite(sm.mean) ? sm.mean : cfg.s.as_pareto().scale;
  r.grids.push_back(detail::cdf_grid("s_tilde_cdf", *m.s_tilde, detail::plot_upper(*m.s_tilde, scale), cfg.grid_points));

  if (cfg.full) {
    const double tau = m.periodic.tau, period = m.periodic.period;
    j["gp_hat"] = {{"g", m.gp_hat->g}, {"p", m.gp_hat->p}};
    j["pseudo_intercontact_weight"] = m.pseudo_weight;
    json h_pmf = json::array();
    Grid h_grid{"h_pmf", "h", "pmf", false, {}};
    for (long long h = 1; h <= cfg.k_max; ++h) {
      h_pmf.push_back(m.h_pmf(h));
      h_grid.points.emplace_back(static_cast<double>(h), m.h_pmf(h));
    }
    j["h"] = {{"pmf", h_pmf}, {"mean", cfg.dc.stay_awake_on_contact ? 1.0 : m.contact->mean_h()}};
    r.grids.push_back(std::move(h_grid));
    if (!cfg.dc.stay_awake_on_contact) {
      const auto w = m.contact->c_tilde_weights();
      j["c_tilde"] = {{"weights", {{"c_short", w.c_short}, {"c_res", w.c_res}, {"z_on", w.z_on}, {"point_tau", w.point_tau}}},
                      {"atom_at_tau", m.c_tilde->atom_at(tau)}};
      r.grids.push_back(detail::cdf_grid("c_tilde_cdf", *m.c_tilde, tau, cfg.grid_points));
      const auto st = dist_c_tilde_stationary(*cfg.c, tau);
      r.grids.push_back(detail::cdf_grid("c_tilde_stationary_cdf", st, tau, cfg.grid_points));
    } else {
      j["c_tilde"] = {{"weights", {{"full_c", tau / period}, {"res_star", (period - tau) / period}}}};
      const double hi = detail::plot_upper(*m.c_tilde, std::max(tau, dist_moments(*cfg.c).mean));
      r.grids.push_back(detail::cdf_grid("c_tilde_cdf", *m.c_tilde, hi, cfg.grid_points));
    }
  }
  return r;
}

/// Plot manifest describing the grids written next to it.
inline json plot_manifest(const std::vector<Grid>& grids) {
  json series = json::array();
  for (const auto& g : grids) {
    series.push_back({{"file", g.name + ".csv"},
                      {"label", g.name},
                      {"x", g.x_label},
                      {"y", g.y_label},
                      {"x_scale", g.log_x ? "log" : "linear"},
                      {"y_scale", "linear"},
                      {"style", g.x_label == "x" ? "line" : "points"}});
  }
  return {{"series", series}};
}

// ---- comparison ---------------------------------------------------------

struct Tolerances {
  double tv = 0.02;      // N and H PMFs
  double ks = 0.03;      // S~ and C~ CDFs
  double moment = 0.05;  // relative error of mean and cv2 of S~
  double slope = 0.15;   // tail log-log slope
  double jump = 0.02;    // S~ atom at T - tau
};

inline json to_json(const Tolerances& t) {
  return {{"tv", t.tv}, {"ks", t.ks}, {"moment", t.moment}, {"slope", t.slope}, {"jump", t.jump}};
}

/// Distances between a simulated process and the model of the same
/// configuration. Each metric carries its tolerance and verdict.
inline json compare(const MeasuredProcess& mp, const PredictionConfig& cfg, const Tolerances& tol = {}) {
  const ModelView m = build_model(cfg);
  json metrics = json::array();
  bool all = true;
  // gated == false: reported only, does not affect the overall verdict
  auto add = [&](const std::string& name, double value, double limit, bool gated = true) {
    const bool pass = std::isfinite(value) && value <= limit;
    if (gated) all = all && pass;
    metrics.push_back({{"name", name}, {"value", number(value)}, {"tolerance", limit}, {"pass", pass}, {"gated", gated}});
  };
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  if (!cfg.full) {
    if (mp.n_counts.empty() || mp.s_tilde.empty()) throw ConfigError("compare: simulation has no N / S~ samples");
    add("tv_n", tv_distance(empirical_pmf(mp.n_counts), [&](std::size_t k) { return m.n_pmf(static_cast<long long>(k)); }),
        tol.tv);
    add("ks_s_tilde", ks_distance(mp.s_tilde, [&](double x) { return m.s_tilde->cdf(x); }), tol.ks);
    const Moments sm = dist_moments(cfg.s);
    const MomentsReport mr = moments_s_tilde(sm, m.gp);
    const SampleMoments est = sample_moments(mp.s_tilde);
    // with infinite variance the sample mean does not settle at any usable rate
    if (std::isfinite(mr.mean)) add("rel_err_mean_s_tilde", rel(est.mean, mr.mean), tol.moment, mr.cv2.has_value());
    if (mr.cv2) add("rel_err_cv2_s_tilde", rel(est.cv2, *mr.cv2), tol.moment);
    if (cfg.s.is_pareto() && mp.s_tilde.size() >= 2000) {
      add("tail_slope_abs_err",
          std::abs(tail_slope_top_decades(mp.s_tilde) + cfg.s.as_pareto().shape), tol.slope);
    }
  } else {
    if (mp.h_counts.empty() || mp.c_tilde.empty()) throw ConfigError("compare: simulation has no H / C~ samples");
    add("tv_h", tv_distance(empirical_pmf(mp.h_counts), [&](std::size_t h) { return m.h_pmf(static_cast<long long>(h)); }),
        tol.tv);
    add("ks_c_tilde", ks_distance(mp.c_tilde, [&](double x) { return m.c_tilde->cdf(x); }), tol.ks);
    if (cfg.policy() == SleepPolicy::SleepAlways) {
      const auto st = dist_c_tilde_stationary(*cfg.c, m.periodic.tau);
      add("ks_c_tilde_stationary", ks_distance(mp.c_tilde, [&](double x) { return st.cdf(x); }), tol.ks, false);
    }
    add("ks_s_tilde", ks_distance(mp.s_tilde, [&](double x) { return m.s_tilde->cdf(x); }), tol.ks);
    const double w = m.periodic.period - m.periodic.tau;
    add("jump_at_off_length_abs_err", std::abs(fraction_equal(mp.s_tilde, w) - m.pseudo_weight), tol.jump);
  }
  return {{"metrics", metrics}, {"pass", all}, {"tolerances", to_json(tol)}};
}

/// Reads the long-format CSV written by MeasuredProcess::write_csv; lines
/// starting with '#' are skipped.
inline MeasuredProcess read_measured_csv(std::istream& is) {
  MeasuredProcess mp;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "quantity,value") throw ParseError("samples: expected header 'quantity,value'", line_no);
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("samples: line " + std::to_string(line_no) + " has no comma", line_no);
    const std::string q = line.substr(0, comma), v = line.substr(comma + 1);
    try {
      if (q == "s_tilde") {
        mp.s_tilde.push_back(std::stod(v));
      } else if (q == "c_tilde") {
        mp.c_tilde.push_back(std::stod(v));
      } else if (q == "n") {
        mp.n_counts.push_back(std::stoll(v));
      } else if (q == "h") {
        mp.h_counts.push_back(std::stoll(v));
      } else {
        throw ParseError("samples: unknown quantity '" + q + "' on line " + std::to_string(line_no), line_no);
      }
    } catch (const std::logic_error&) {
      throw ParseError("samples: bad value on line " + std::to_string(line_no), line_no);
    }
  }
  if (!header) throw ParseError("samples: empty file", line_no);
  return mp;
}

}  // namespace dcp
