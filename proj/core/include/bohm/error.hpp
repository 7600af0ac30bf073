#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bohm {

/// Configuration dimension does not match the particle registry.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The guidance field is undefined: total density at Q fell below the floor.
class VacuumError : public std::runtime_error {
 public:
  VacuumError(std::vector<double> q, double t, double relative_density);

  const std::vector<double>& configuration() const noexcept { return q_; }
  double time() const noexcept { return t_; }
  double relative_density() const noexcept { return rho_; }

 private:
  std::vector<double> q_;
  double t_;
  double rho_;
};

/// A unitary event could not be applied (ill-posed schedule).
class EventError : public std::runtime_error {
 public:
  EventError(const std::string& what, std::size_t event_index = npos)
      : std::runtime_error(what), index_(event_index) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t event_index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Wave function fails the unit-norm requirement of an operation.
class NormalizationError : public std::runtime_error {
 public:
  NormalizationError(const std::string& what, double norm)
      : std::runtime_error(what), norm_(norm) {}
  double norm() const noexcept { return norm_; }

 private:
  double norm_;
};

/// Too few samples for a binned goodness-of-fit test.
class InsufficientSamplesError : public std::invalid_argument {
 public:
  InsufficientSamplesError(const std::string& what, std::size_t required_n)
      : std::invalid_argument(what), required_(required_n) {}
  std::size_t required_n() const noexcept { return required_; }

 private:
  std::size_t required_;
};

/// Scenario definition problems. Syntax errors carry a 1-based line/column.
class ScenarioError : public std::runtime_error {
 public:
  enum class Kind {
    syntax,
    unknown_key,
    out_of_range,
    symmetry_violation,
    schedule_order,
    inconsistent,
  };

  ScenarioError(Kind kind, const std::string& what, std::string field = {},
                std::size_t line = 0, std::size_t column = 0);

  Kind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  Kind kind_;
  std::string field_;
  std::size_t line_;
  std::size_t column_;
};

const char* to_string(ScenarioError::Kind kind);

}  // namespace bohm
