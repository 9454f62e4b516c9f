#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdel/qlin.hpp"

namespace qdel {

/// A named constraint together with its numeric residual (0 when satisfied).
struct NamedResidual {
  std::string name;
  double residual = 0.0;
};

/// A machine as a basis-transformation table: every input basis string of
/// length in_arity maps to a LabeledKet of arity out_arity over one shared
/// ancilla space. Catalog builders guarantee the table is an isometry.
struct MachineSpec {
  std::string name;
  int in_arity = 0;
  int out_arity = 0;
  std::vector<LabeledKet> table;  // indexed by packed input basis string
  AncillaSpacePtr space;
  std::optional<PureQubitState> sigma;  // standard state, when the machine has one

  /// Residuals of the machine's declared parameter constraints, recorded at
  /// build time (all below tolerance for catalog-built machines).
  std::vector<NamedResidual> constraints;

  /// Derived quantities worth reporting (gg*, hh*, k, k1, M2, xi, ...),
  /// in deterministic print order.
  std::vector<std::pair<std::string, double>> meta;

  /// Squared label norms under the concatenation bookkeeping where every
  /// composite ancilla label is orthogonal to the others; defaults to the
  /// strict Gram diagonal.
  std::vector<double> paper_label_norms;

  double meta_value(const std::string& key) const;
};

// ---------------------------------------------------------------------------
// Parameter sets

/// Parameters of the one-qubit-retaining deleter with superposed middle rows.
/// Constraints: |a_i|^2 + |b_i|^2 = 1 and a_i*conj(a_{1-i}) + b_i*conj(b_{1-i}) = 0.
struct ImperfectDeleterParams {
  cplx a0, a1, b0, b1;
  double sigma_theta = 0.0;
};

/// One-parameter family a0 = cos t, b0 = sin t, a1 = -sin t, b1 = cos t with
/// t chosen so that gg* = 1 + delta and hh* = 1 - delta. Domain |delta| <= 1.
ImperfectDeleterParams rotation_chart(double delta, double sigma_theta = 0.0);

/// Parameters of the general deleter. Norms for the A labels may be left
/// unset, in which case the builder solves the norm-balance constraint for
/// them; when set they are validated against it.
struct GeneralDeleterParams {
  cplx a0, a1, b0, b1;
  cplx p0, p1;
  std::optional<double> norm_a0, norm_a1;  // <A_i|A_i>
  double norm_b0 = 1.0, norm_b1 = 1.0;     // <B_i|B_i>
  double norm_c0 = 1.0, norm_c1 = 1.0;     // <C_i|C_i>
  cplx overlap_c1_b0{0.0, 0.0};            // <C1|B0>
  cplx overlap_b1_c0{0.0, 0.0};            // <B1|C0>
};

// ---------------------------------------------------------------------------
// Constraint evaluation (pure; usable on raw parameters before building)

std::vector<NamedResidual> imperfect_constraints(const ImperfectDeleterParams& p);
std::vector<NamedResidual> general_constraints(const GeneralDeleterParams& p);
std::vector<NamedResidual> qiu_constraints(cplx a0, cplx b0, cplx a1, cplx b1);

// ---------------------------------------------------------------------------
// Machine catalog

/// Basis-copying cloner: |0> -> |00>|Q0>, |1> -> |11>|Q1>, Q0 _|_ Q1.
MachineSpec wz_machine();

/// Symmetric cloner with blank-spill terms: |0> -> |00>|Q0> + (|01>+|10>)|Y0>
/// and the 0<->1 mirror. Gram: <Q_i|Q_i> = 1-2xi, <Y_i|Y_i> = xi, and the
/// cross overlaps <Q0|Y1> = <Q1|Y0> = (1-2xi)/2. PSD requires 1/6 <= xi <= 1/2.
MachineSpec bh_machine(double xi = 1.0 / 6.0);

/// Two-copy deleter sending |bb> -> |b>|Sigma>|A_b> and leaving |01>, |10>
/// untouched; ancilla {A, A0, A1} orthonormal.
MachineSpec pb_delete_machine(const PureQubitState& sigma);

/// Deleter with superposed middle rows (a_i, b_i) and standard state Sigma.
MachineSpec imperfect_delete_machine(const ImperfectDeleterParams& params);

/// General deleter whose diagonal rows carry extra spill terms p0, p1 into
/// the B/C ancilla labels; reduces to imperfect_delete_machine at p = 0.
MachineSpec general_delete_machine(const GeneralDeleterParams& params,
                                   const PureQubitState& sigma);

/// One-qubit-collapsing deleter rows a_i, b_i with passive middle rows.
/// Bookkeeping convention: the middle rows retain the unchanged ancilla |Q>,
/// and the deleted slot of the diagonal rows carries the input's repeated
/// bit, so every row is a two-qubit ket and the table is an isometry.
MachineSpec qiu_machine(cplx a0, cplx b0, cplx a1, cplx b1);

// ---------------------------------------------------------------------------
// Validation and application

struct ValidationReport {
  /// |<out_i|out_j> - delta_ij| for every input pair, row-major.
  std::vector<std::vector<double>> pair_residuals;
  double max_isometry_residual = 0.0;
  double gram_min_eigenvalue = 0.0;
  std::vector<NamedResidual> constraints;  // copied from the machine
  bool passed = false;                     // everything within kIsometryTol
};

ValidationReport validate_machine(const MachineSpec& m);

/// Applies the table by linearity to an arbitrary coefficient vector over
/// the 2^in_arity input basis strings.
LabeledKet apply_machine(const MachineSpec& m, std::span<const cplx> coeffs);

/// in_arity-1 machines applied to alpha|0> + beta|1>.
LabeledKet apply_machine(const MachineSpec& m, const PureQubitState& psi);

/// in_arity-2 machines applied to the product input |psi>|psi>.
LabeledKet apply_machine_to_pair(const MachineSpec& m, const PureQubitState& psi);

}  // namespace qdel
