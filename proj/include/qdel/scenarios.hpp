#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdel/machines.hpp"
#include "qdel/metrics.hpp"

namespace qdel {

/// Ancilla bookkeeping for concatenated machines. `strict` composes the two
/// Gram matrices as a tensor product, so isometries stay isometries. `paper`
/// declares all composite labels mutually orthogonal with the cloner labels
/// renormed (Q -> 1, Y -> xi) and renormalizes the output before metrics.
enum class GramConvention { strict, paper };

std::string to_string(GramConvention conv);

// ---------------------------------------------------------------------------
// Clone-only

struct CloneResult {
  DensityOperator rho_a, rho_b, rho_ab;
  double d_a = 0.0;   // Tr[(rho_a - rho_id)^2]
  double d_ab = 0.0;  // Tr[(rho_ab - rho_id x rho_id)^2]
};

CloneResult clone_scenario(const MachineSpec& cloner, double alpha2);

// ---------------------------------------------------------------------------
// Delete-only (input |psi>|psi>)

struct DeleteResult {
  DensityOperator rho_1, rho_2;  // retained mode, deleted mode (normalized)
  double d = 0.0;                // Tr[(rho_1 - rho_id)^2]
  std::optional<double> f;       // <Sigma|rho_2|Sigma>, when the machine has Sigma
  double f_retained = 0.0;       // <psi|rho_1|psi>
  double d_deleted_vs_input = 0.0;  // Tr[(rho_2 - rho_id)^2]
};

DeleteResult delete_scenario(const MachineSpec& deleter, double alpha2);

// ---------------------------------------------------------------------------
// Clone-then-delete pipelines

struct PipelineResult {
  DensityOperator rho_x, rho_y;  // retained mode, deleted mode (normalized)
  double d = 0.0;                // Tr[(rho_x - rho_id)^2]
  std::optional<double> f;       // <Sigma|rho_y|Sigma>
  double prenorm_squared = 0.0;  // squared norm before renormalization
};

/// Precomposed cloner+deleter pipeline over the composite ancilla space;
/// build once, evaluate at many alpha^2 values.
class PipelineScenario {
 public:
  PipelineScenario(const MachineSpec& cloner, const MachineSpec& deleter, GramConvention conv);

  PipelineResult eval(double alpha2) const;
  const std::optional<PureQubitState>& sigma() const { return sigma_; }

 private:
  AncillaSpacePtr space_;
  std::vector<LabeledKet> composed_;  // per cloner input basis
  std::optional<PureQubitState> sigma_;
};

PipelineResult clone_delete_scenario(const MachineSpec& cloner, const MachineSpec& deleter,
                                     double alpha2, GramConvention conv);

// ---------------------------------------------------------------------------
// Perturbation analysis around the balanced deleter

/// Exact averaged distortion for gg* = 1 + eps + eps1, hh* = 1 + eps1:
/// 1/3 + (eps1^2 + (eps + eps1)^2)/30. Formula object only; arbitrary
/// (eps, eps1) pairs need not correspond to a realizable machine.
double two_param_average_distortion(double eps, double eps1);

/// Exact averaged deletion fidelity for the same parameterization:
/// 5/6 + (eps*m2 + eps1)/6.
double two_param_average_fidelity(double eps, double eps1, double m2);

struct PerturbationRow {
  double delta = 0.0;
  double d_closed = 0.0, d_sim = 0.0;
  double f_closed = 0.0, f_sim = 0.0;
};

/// For each delta builds the rotation-chart machine (gg* = 1+delta,
/// hh* = 1-delta) with <Sigma|1>^2 = m2 and compares simulated averages
/// against the closed forms.
std::vector<PerturbationRow> perturbation_table(std::span<const double> deltas, double m2,
                                                AveragingRule rule = {});

// ---------------------------------------------------------------------------
// Reference-table reproduction

struct PaperRow {
  std::string quantity;
  double paper_value = 0.0;
  double simulated = 0.0;
  double abs_error = 0.0;
  std::string convention;
};

struct PaperTable {
  std::vector<PaperRow> rows;
  std::vector<std::string> notes;

  double max_error() const;
  bool all_passed(double tol = 1e-10) const;
};

/// Re-simulates every closed-form target value and reports the deviations.
PaperTable reproduce_paper();

// ---------------------------------------------------------------------------
// Curve reports (CLI backing)

struct ScenarioReport {
  std::string scenario;    // clone | delete | pipeline
  std::string machine;     // description, e.g. "bh(xi=0.166666666667)"
  std::string convention;  // strict | paper
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> averages;
  std::vector<std::pair<std::string, double>> meta;
};

std::vector<double> uniform_grid(int points);

ScenarioReport clone_report(const MachineSpec& cloner, const std::string& desc,
                            const std::vector<double>& grid, AveragingRule rule = {});
ScenarioReport delete_report(const MachineSpec& deleter, const std::string& desc,
                             const std::vector<double>& grid, AveragingRule rule = {});
ScenarioReport pipeline_report(const MachineSpec& cloner, const MachineSpec& deleter,
                               const std::string& desc, GramConvention conv,
                               const std::vector<double>& grid, AveragingRule rule = {});

}  // namespace qdel
