#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcp/contact_process.hpp"
#include "dcp/dist.hpp"
#include "dcp/error.hpp"
#include "dcp/random.hpp"

namespace dcp {

enum class Quantity { Intercontact, Contact };

inline const char* to_string(Quantity q) { return q == Quantity::Intercontact ? "intercontact" : "contact"; }

struct TraceMeta {
  std::string name = "trace";
  double granularity = 1.0;  // recorder sampling period, s
  std::size_t n_nodes = 0;
  double time_origin = 0.0;

  void validate() const {
    if (!(granularity > 0.0) || !std::isfinite(granularity)) throw DataError("trace meta: granularity must be positive");
  }
};

inline void to_json(nlohmann::json& j, const TraceMeta& m) {
  j = {{"name", m.name}, {"granularity", m.granularity}, {"n_nodes", m.n_nodes}, {"time_origin", m.time_origin}};
}

inline void from_json(const nlohmann::json& j, TraceMeta& m) {
  m.name = j.value("name", m.name);
  m.granularity = j.value("granularity", m.granularity);
  m.n_nodes = j.value("n_nodes", m.n_nodes);
  m.time_origin = j.value("time_origin", m.time_origin);
  m.validate();
}

/// Pairs sorted by (node_a, node_b), node_a < node_b, contacts ordered and
/// separated.
struct Trace {
  TraceMeta meta;
  std::vector<ContactSeries> pairs;
};

enum class TraceFormat {
  ContactIntervals,  // node_a,node_b,t_start,t_end
  ContactEvents,     // node_a,node_b,t,event with event in {up, down}
};

inline std::vector<double> extract_samples(const ContactSeries& cs, Quantity q) {
  return q == Quantity::Intercontact ? cs.intercontact_durations() : cs.contact_durations();
}

namespace detail {

struct RawContact {
  double start, end;
  std::size_t line;
};

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

inline double parse_number(const std::string& cell, std::size_t line, const char* what) {
  const std::string t = trim(cell);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size() || !std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line) + ": bad " + what + " '" + t + "'", line);
  }
  return v;
}

inline NodeId parse_node(const std::string& cell, std::size_t line) {
  const std::string t = trim(cell);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) throw ParseError("line " + std::to_string(line) + ": bad node id '" + t + "'", line);
  return v;
}

// Sort and merge overlapping or abutting records of one pair.
inline ContactSeries merge_contacts(std::pair<NodeId, NodeId> key, std::vector<RawContact> raw) {
  std::sort(raw.begin(), raw.end(), [](const RawContact& a, const RawContact& b) {
    return a.start < b.start || (a.start == b.start && a.end < b.end);
  });
  ContactSeries cs;
  cs.pair = key;
  for (const auto& r : raw) {
    if (!cs.starts.empty() && r.start <= cs.ends.back()) {
      cs.ends.back() = std::max(cs.ends.back(), r.end);
    } else {
      cs.starts.push_back(r.start);
      cs.ends.push_back(r.end);
    }
  }
  return cs;
}

}  // namespace detail

/// Parse a trace from a stream. Header line required. Time values are
/// seconds from meta.time_origin.
inline Trace parse_trace(std::istream& is, TraceFormat format, TraceMeta meta = {}) {
  meta.validate();
  const std::vector<std::string> header =
      format == TraceFormat::ContactIntervals ? std::vector<std::string>{"node_a", "node_b", "t_start", "t_end"}
                                              : std::vector<std::string>{"node_a", "node_b", "t", "event"};
  std::map<std::pair<NodeId, NodeId>, std::vector<detail::RawContact>> by_pair;
  std::map<std::pair<NodeId, NodeId>, std::pair<double, std::size_t>> open;  // events format
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::trim(line).empty() || line[0] == '#') continue;
    auto cells = detail::split_csv(line);
    if (!seen_header) {
      for (auto& c : cells) c = detail::trim(c);
      if (cells != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw ParseError("line " + std::to_string(line_no) + ": expected header '" + want + "'", line_no);
      }
      seen_header = true;
      continue;
    }
    if (cells.size() != 4) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields, got " + std::to_string(cells.size()),
                       line_no);
    }
    NodeId a = detail::parse_node(cells[0], line_no), b = detail::parse_node(cells[1], line_no);
    if (a == b) throw DataError("line " + std::to_string(line_no) + ": contact of a node with itself", line_no);
    const auto key = std::minmax(a, b);
    if (format == TraceFormat::ContactIntervals) {
      const double x = detail::parse_number(cells[2], line_no, "t_start");
      const double y = detail::parse_number(cells[3], line_no, "t_end");
      if (!(x < y)) {
        throw DataError("line " + std::to_string(line_no) + ": contact does not end after it starts", line_no);
      }
      by_pair[key].push_back({x, y, line_no});
    } else {
      const double t = detail::parse_number(cells[2], line_no, "t");
      const std::string ev = detail::trim(cells[3]);
      if (ev == "up") {
        if (open.count(key)) throw DataError("line " + std::to_string(line_no) + ": 'up' while already up", line_no);
        open[key] = {t, line_no};
      } else if (ev == "down") {
        auto it = open.find(key);
        if (it == open.end()) throw DataError("line " + std::to_string(line_no) + ": 'down' without 'up'", line_no);
        if (!(it->second.first < t)) {
          throw DataError("line " + std::to_string(line_no) + ": contact does not end after it starts", line_no);
        }
        by_pair[key].push_back({it->second.first, t, it->second.second});
        open.erase(it);
      } else {
        throw ParseError("line " + std::to_string(line_no) + ": event must be 'up' or 'down', got '" + ev + "'",
                         line_no);
      }
    }
  }
  if (!seen_header) throw ParseError("empty trace: missing header", line_no);
  if (!open.empty()) {
    const auto& [key, v] = *open.begin();
    throw DataError("line " + std::to_string(v.second) + ": contact " + std::to_string(key.first) + "-" +
                        std::to_string(key.second) + " never goes down",
                    v.second);
  }
  Trace tr;
  tr.meta = meta;
  std::size_t max_node = 0;
  for (auto& [key, raw] : by_pair) {
    tr.pairs.push_back(detail::merge_contacts(key, std::move(raw)));
    max_node = std::max<std::size_t>(max_node, static_cast<std::size_t>(std::max<NodeId>(key.second, 0)) + 1);
  }
  if (tr.meta.n_nodes == 0) tr.meta.n_nodes = max_node;
  return tr;
}

inline std::filesystem::path meta_sidecar_path(const std::filesystem::path& trace_path) {
  return trace_path.string() + ".meta.json";
}

/// Parse a trace file. Metadata comes from the JSON sidecar
/// `<path>.meta.json` when present.
inline Trace parse_trace(const std::filesystem::path& path, TraceFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trace file " + path.string());
  TraceMeta meta;
  meta.name = path.stem().string();
  const auto side = meta_sidecar_path(path);
  if (std::filesystem::exists(side)) {
    std::ifstream ms(side);
    try {
      meta = nlohmann::json::parse(ms).get<TraceMeta>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(side.string() + ": " + e.what(), 0);
    }
  }
  try {
    return parse_trace(in, format, meta);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what(), e.line);
  }
}

/// Contact-intervals CSV, pairs in order, full double precision.
inline void serialize_trace(const Trace& tr, std::ostream& os) {
  os << "node_a,node_b,t_start,t_end\n";
  os.precision(17);
  for (const auto& cs : tr.pairs) {
    for (std::size_t i = 0; i < cs.size(); ++i) {
      os << cs.pair.first << ',' << cs.pair.second << ',' << cs.starts[i] << ',' << cs.ends[i] << '\n';
    }
  }
}

inline void write_trace(const Trace& tr, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write trace file " + path.string());
  serialize_trace(tr, os);
  std::ofstream ms(meta_sidecar_path(path));
  ms << nlohmann::json(tr.meta).dump(2) << '\n';
}

struct SynthPairSpec {
  DistSpec s = DistSpec::exponential(1.0);
  std::optional<DistSpec> c;
};

/// Independent renewal processes, one per pair, over [0, horizon]. Pair i
/// is (2i, 2i + 1) and uses rng.split(i); draws alternate S, C as in
/// sample_contact_process. A contact that would end after the horizon is
/// dropped. Without a contact law contacts are points.
inline Trace synth_trace(std::size_t n_pairs, const std::function<SynthPairSpec(std::size_t)>& spec, double horizon,
                         const RandomStream& rng) {
  if (n_pairs < 1) throw DomainError("synth_trace: need at least one pair");
  if (!(horizon > 0.0)) throw DomainError("synth_trace: horizon must be positive");
  Trace tr;
  tr.meta.name = "synthetic";
  tr.meta.n_nodes = 2 * n_pairs;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const SynthPairSpec ps = spec(i);
    RandomStream r = rng.split(i);
    ContactSeries cs;
    cs.pair = {static_cast<NodeId>(2 * i), static_cast<NodeId>(2 * i + 1)};
    double t = 0.0;
    for (;;) {
      t += sample(ps.s, r);
      const double x = t;
      if (ps.c) t += sample(*ps.c, r);
      if (t > horizon) break;
      cs.starts.push_back(x);
      cs.ends.push_back(t);
    }
    tr.pairs.push_back(std::move(cs));
  }
  return tr;
}

}  // namespace dcp
