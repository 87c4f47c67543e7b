#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcp/dist.hpp"
#include "dcp/error.hpp"
#include "dcp/sched.hpp"
#include "dcp/sim.hpp"
#include "dcp/stats.hpp"

namespace dcp {

using json = nlohmann::json;

namespace detail {

inline std::vector<std::string> split_colon(const std::string& s) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream is(s);
  while (std::getline(is, part, ':')) out.push_back(part);
  if (!s.empty() && s.back() == ':') out.emplace_back();
  return out;
}

inline double to_number(const std::string& s, const std::string& whole) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw ConfigError("bad number '" + s + "' in '" + whole + "'");
  return v;
}

}  // namespace detail

/// `exp:rate` or `pareto:shape:scale`.
inline DistSpec parse_dist(const std::string& text) {
  const auto f = detail::split_colon(text);
  try {
    if (f.size() == 2 && (f[0] == "exp" || f[0] == "exponential")) {
      return DistSpec::exponential(detail::to_number(f[1], text));
    }
    if (f.size() == 3 && f[0] == "pareto") {
      return DistSpec::pareto(detail::to_number(f[1], text), detail::to_number(f[2], text));
    }
  } catch (const DomainError& e) {
    throw ConfigError("distribution '" + text + "': " + e.what());
  }
  throw ConfigError("distribution '" + text + "': expected exp:RATE or pareto:SHAPE:SCALE");
}

/// `det:tau:T` or `stoch:beta:alpha`, optionally followed by `:stay`.
inline DutyCycleSpec parse_dc(const std::string& text) {
  auto f = detail::split_colon(text);
  bool stay = false;
  if (!f.empty() && f.back() == "stay") {
    stay = true;
    f.pop_back();
  }
  try {
    if (f.size() == 3 && (f[0] == "det" || f[0] == "stoch")) {
      const double a = detail::to_number(f[1], text), b = detail::to_number(f[2], text);
      return f[0] == "det" ? DutyCycleSpec::deterministic(a, b, stay) : DutyCycleSpec::stochastic(a, b, stay);
    }
  } catch (const DomainError& e) {
    throw ConfigError("duty cycle '" + text + "': " + e.what());
  }
  throw ConfigError("duty cycle '" + text + "': expected det:TAU:T or stoch:BETA:ALPHA");
}

inline std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Compact form accepted by parse_dist (round-trips exactly).
inline std::string compact(const DistSpec& d) {
  if (d.is_exponential()) return "exp:" + format_number(d.as_exponential().rate);
  if (d.is_pareto()) return "pareto:" + format_number(d.as_pareto().shape) + ":" + format_number(d.as_pareto().scale);
  return d.describe();
}

inline std::string compact(const DutyCycleSpec& dc) {
  std::string s = dc.is_deterministic() ? "det:" + format_number(dc.tau) + ":" + format_number(dc.period)
                                        : "stoch:" + format_number(dc.on_rate_beta) + ":" + format_number(dc.off_rate_alpha);
  return dc.stay_awake_on_contact ? s + ":stay" : s;
}

inline json to_json(const DistSpec& d) {
  if (d.is_exponential()) return {{"kind", "exponential"}, {"rate", d.as_exponential().rate}};
  if (d.is_pareto()) return {{"kind", "pareto"}, {"alpha", d.as_pareto().shape}, {"b", d.as_pareto().scale}};
  return {{"kind", "empirical"}, {"samples", d.as_empirical().samples()}};
}

/// Accepts the object form or a compact string.
inline DistSpec dist_from_json(const json& j) {
  if (j.is_string()) return parse_dist(j.get<std::string>());
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "exponential") return DistSpec::exponential(j.at("rate").get<double>());
    if (kind == "pareto") return DistSpec::pareto(j.at("alpha").get<double>(), j.at("b").get<double>());
    if (kind == "empirical") return DistSpec::empirical(j.at("samples").get<std::vector<double>>());
    throw ConfigError("unknown distribution kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("distribution: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("distribution: ") + e.what());
  }
}

inline json to_json(const DutyCycleSpec& dc) {
  if (dc.is_deterministic()) {
    return {{"kind", "deterministic"}, {"tau", dc.tau}, {"period", dc.period}, {"stay_awake", dc.stay_awake_on_contact}};
  }
  return {{"kind", "stochastic"},
          {"beta", dc.on_rate_beta},
          {"alpha", dc.off_rate_alpha},
          {"stay_awake", dc.stay_awake_on_contact}};
}

inline DutyCycleSpec dc_from_json(const json& j) {
  if (j.is_string()) return parse_dc(j.get<std::string>());
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const bool stay = j.value("stay_awake", false);
    if (kind == "deterministic") {
      return DutyCycleSpec::deterministic(j.at("tau").get<double>(), j.at("period").get<double>(), stay);
    }
    if (kind == "stochastic") {
      return DutyCycleSpec::stochastic(j.at("beta").get<double>(), j.at("alpha").get<double>(), stay);
    }
    throw ConfigError("unknown duty-cycle kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("duty cycle: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("duty cycle: ") + e.what());
  }
}

inline json moments_json(const SampleMoments& m) {
  return {{"n", m.n}, {"mean", m.mean}, {"second_moment", m.second_moment}, {"variance", m.variance}, {"cv2", m.cv2}};
}

/// Finite doubles as numbers, the rest as strings ("inf", "nan") so the
/// JSON stays valid.
inline json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return NAN;
}

/// Summary of a simulation run: sample moments and counts.
inline json summary_json(const MeasuredProcess& mp) {
  json j;
  auto as_double = [](const std::vector<long long>& v) { return std::vector<double>(v.begin(), v.end()); };
  if (!mp.s_tilde.empty()) j["s_tilde"] = moments_json(sample_moments(mp.s_tilde));
  if (!mp.c_tilde.empty()) j["c_tilde"] = moments_json(sample_moments(mp.c_tilde));
  if (!mp.n_counts.empty()) {
    j["n"] = moments_json(sample_moments(as_double(mp.n_counts)));
    j["skip_fraction"] = skip_fraction(mp);
  }
  if (!mp.h_counts.empty()) j["h"] = moments_json(sample_moments(as_double(mp.h_counts)));
  j["counts"] = {{"s_tilde", mp.s_tilde.size()},
                 {"c_tilde", mp.c_tilde.size()},
                 {"n", mp.n_counts.size()},
                 {"h", mp.h_counts.size()},
                 {"contacts_generated", mp.contacts_generated},
                 {"c_full", mp.c_full}};
  return j;
}

}  // namespace dcp
