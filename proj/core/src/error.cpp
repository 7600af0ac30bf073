#include "bohm/error.hpp"

#include <cstdio>

namespace bohm {

namespace {

std::string vacuum_message(const std::vector<double>& q, double t, double rho) {
  std::string msg = "vacuum region: relative density ";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g at t=%.6g, Q=(", rho, t);
  msg += buf;
  for (std::size_t i = 0; i < q.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", q[i]);
    msg += buf;
  }
  msg += ")";
  return msg;
}

}  // namespace

VacuumError::VacuumError(std::vector<double> q, double t, double relative_density)
    : std::runtime_error(vacuum_message(q, t, relative_density)),
      q_(std::move(q)),
      t_(t),
      rho_(relative_density) {}

ScenarioError::ScenarioError(Kind kind, const std::string& what, std::string field,
                             std::size_t line, std::size_t column)
    : std::runtime_error(line ? "line " + std::to_string(line) + ":" +
                                    std::to_string(column) + ": " + what
                              : what),
      kind_(kind),
      field_(std::move(field)),
      line_(line),
      column_(column) {}

const char* to_string(ScenarioError::Kind kind) {
  switch (kind) {
    case ScenarioError::Kind::syntax: return "syntax";
    case ScenarioError::Kind::unknown_key: return "unknown_key";
    case ScenarioError::Kind::out_of_range: return "out_of_range";
    case ScenarioError::Kind::symmetry_violation: return "symmetry_violation";
    case ScenarioError::Kind::schedule_order: return "schedule_order";
    case ScenarioError::Kind::inconsistent: return "inconsistent";
  }
  return "unknown";
}

}  // namespace bohm
