#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dcp {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An analytic expression produced a value that cannot be a probability
/// (or a mixture whose weights do not add up).
class ModelInconsistency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An infinite sum could not be truncated within its term cap.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double partial, double bound)
      : std::runtime_error(what), partial_value(partial), remaining_bound(bound) {}
  double partial_value;
  double remaining_bound;
};

/// Adaptive quadrature hit its panel cap.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simulation could not collect the requested number of detections.
class StarvedError : public std::runtime_error {
 public:
  StarvedError(const std::string& what, std::size_t detections, std::size_t contacts)
      : std::runtime_error(what), detections_collected(detections), contacts_generated(contacts) {}
  std::size_t detections_collected;
  std::size_t contacts_generated;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line_no)
      : std::runtime_error(what), line(line_no) {}
  std::size_t line;
};

/// Well-formed input that violates a data invariant (e.g. a contact that
/// ends before it starts).
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t line_no = 0) : std::runtime_error(what), line(line_no) {}
  std::size_t line;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dcp
