#pragma once

// Named verification suites that drive the invariants of every module and
// collect the results into one JSON-serializable report.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "duffing/coeff_flow.hpp"
#include "duffing/meanfield.hpp"
#include "duffing/operator_forge.hpp"

namespace duffing::report {

struct VerifyConfig {
  meanfield::PhysParams params;
  flow::FlowMode mode = flow::FlowMode::engine_derived;
  int dim = forge::kDefaultDim;
  /// Omega0 for the density operator; <= 0 selects Omega.
  double omega0 = 0.0;
  /// Scaling tests hold the mean-field frequency fixed and co-vary omega.
  bool alpha_fixed = false;
  /// Evaluation phase Omega t.
  double phase = forge::kDefaultPhase;
};

struct Check {
  std::string name;
  double value = 0.0;
  std::string bound;
  bool pass = false;
};

struct VerifyReport {
  std::string suite;
  flow::FlowMode mode = flow::FlowMode::engine_derived;
  meanfield::Convention convention = meanfield::Convention::m_normalized;
  std::optional<double> h2_offdiag_max;
  std::optional<double> h2_number_coeff;
  std::optional<double> liouville_residual;
  std::optional<double> commutator_defect;
  std::optional<double> kurtosis_excess;
  std::optional<double> purity;
  std::map<std::string, double> extras;
  std::vector<Check> checks;

  bool passed() const;
  std::vector<std::string> failures() const;
  nlohmann::ordered_json to_json() const;
};

const std::vector<std::string>& suite_names();

/// Runs one suite ("all" runs every one).  Throws std::invalid_argument for an
/// unknown suite name or invalid parameters.
VerifyReport run_suite(const std::string& suite, const VerifyConfig& cfg);

struct AlgebraCheck {
  int identities = 0;
  double max_product_error = 0.0;
  double max_adjoint_error = 0.0;
};

/// Randomized normal-ordered products and adjoints compared with products and
/// adjoints of their matrix realizations on the interior band.  Errors are
/// relative to the largest entry of the dense result.
AlgebraCheck random_algebra_identities(std::uint64_t seed, int count, int dim, int band = 8);

/// ||M(H2) + m lambda M(H4) + E0 - M(H)||_inf on the interior band, with M(H)
/// formed from dense products of the quadrature matrices.
double sector_completeness(const meanfield::MeanFieldSolution& sol, double t, int dim,
                           int band = forge::kDefaultBand);

/// Quantity evaluated at lambda, lambda/2, lambda/4 under the chosen scaling
/// protocol, with successive ratios.
struct ScalingSeries {
  std::vector<double> lambdas;
  std::vector<double> values;
  std::vector<double> ratios;
};

enum class Quantity { liouville, liouville_bare, commutator, density };

/// Plain halving keeps m and omega; alpha_fixed holds Omega at its value for
/// cfg.params and co-varies omega.  Requires lambda > 0.
ScalingSeries scaling_series(const VerifyConfig& cfg, Quantity quantity);

}  // namespace duffing::report
