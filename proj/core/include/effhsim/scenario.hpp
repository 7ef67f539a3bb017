#ifndef EFFHSIM_SCENARIO_HPP
#define EFFHSIM_SCENARIO_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "effhsim/baths.hpp"
#include "effhsim/quadrature.hpp"

namespace effhsim {

/// Raised for malformed or inconsistent scenario files (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a computation produces non-finite output (CLI exit code 3).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Engine { UW, RC, EFFH };
enum class Task {
  Dynamics,
  Equilibrium,
  KappaScan,
  XiScan,
  RatesTable,
  ChainBuild,
  NonuniquenessDemo,
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
};

/// A parsed and validated scenario file.
struct Scenario {
  ModelSpec::Kind model_kind = ModelSpec::Kind::Impurity;
  Task task = Task::Dynamics;
  std::vector<Engine> engines;

  double delta = 1.0;
  std::vector<double> deltas;          // chain
  double lambda_z = 0.0;
  double lambda_x = 0.0;
  double lambda = 0.0;                 // chain coupling
  double omega = 8.0;
  double gamma = 0.05 / M_PI;
  double cutoff = 1000.0;
  double temperature = 1.0;
  int n_spins = 0;

  std::optional<double> t_max;         // dynamics window; deduced from the
  int n_points = 800;                  // generator's slow mode when absent
  int rc_levels = 4;
  QuadratureConfig quad;
  double eps1 = 0.5;                   // nonuniqueness demo
  double eps2 = 0.5;

  std::optional<SweepSpec> sweep;

  BathSpec bath(const std::string& label) const;
  ModelSpec model() const;
};

Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<string>");

struct RunResult {
  std::vector<std::string> files_written;
};

/// Executes the scenario's task, writing CSV data files plus a .meta sidecar
/// per file into out_dir. Outputs are byte-deterministic for fixed inputs.
RunResult run(const Scenario& scenario, const std::string& out_dir, int jobs = 1);

/// Full invariant suite: operator identities, kappa limits and symmetries,
/// ladder-identity residuals, thermalization checks, quadrature-convergence
/// deltas. Prints one line per check with its residual; returns the number of
/// failed checks.
int report_validation(std::ostream& os);

}  // namespace effhsim

#endif
