#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dcp/dist.hpp"
#include "dcp/error.hpp"
#include "dcp/random.hpp"

namespace dcp {

using NodeId = std::int64_t;

/// Ordered contacts of one node pair: contact i covers [starts[i], ends[i]].
struct ContactSeries {
  std::pair<NodeId, NodeId> pair{0, 1};
  std::vector<double> starts;
  std::vector<double> ends;

  std::size_t size() const { return starts.size(); }

  /// Throws DomainError unless X_i < Y_i < X_{i+1}. With `allow_point`
  /// contacts of zero length (negligible mode) are accepted.
  void validate(bool allow_point = false) const {
    if (starts.size() != ends.size()) throw DomainError("contact series: start/end count mismatch");
    for (std::size_t i = 0; i < starts.size(); ++i) {
      const bool ok = allow_point ? starts[i] <= ends[i] : starts[i] < ends[i];
      if (!ok) throw DomainError("contact series: contact " + std::to_string(i) + " has non-positive length");
      if (i + 1 < starts.size() && !(ends[i] < starts[i + 1])) {
        throw DomainError("contact series: contacts " + std::to_string(i) + " and " + std::to_string(i + 1) +
                          " are not separated");
      }
    }
  }

  std::vector<double> contact_durations() const {
    std::vector<double> c(starts.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = ends[i] - starts[i];
    return c;
  }

  std::vector<double> intercontact_durations() const {
    std::vector<double> s;
    if (starts.size() < 2) return s;
    s.reserve(starts.size() - 1);
    for (std::size_t i = 0; i + 1 < starts.size(); ++i) s.push_back(starts[i + 1] - ends[i]);
    return s;
  }
};

/// Alternating renewal process started at time 0 with C_0 = 0: draws
/// S_1, C_1, S_2, C_2, ... in that order from `rng`. Without a contact
/// distribution contacts are points (Y_i = X_i).
inline ContactSeries sample_contact_process(const DistSpec& s_dist, const std::optional<DistSpec>& c_dist,
                                            std::size_t n_contacts, RandomStream& rng) {
  if (n_contacts < 1) throw DomainError("sample_contact_process: need at least one contact");
  ContactSeries cs;
  cs.starts.reserve(n_contacts);
  cs.ends.reserve(n_contacts);
  double t = 0.0;
  for (std::size_t i = 0; i < n_contacts; ++i) {
    t += sample(s_dist, rng);
    cs.starts.push_back(t);
    if (c_dist) t += sample(*c_dist, rng);
    cs.ends.push_back(t);
  }
  return cs;
}

}  // namespace dcp
