#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qdel {

using cplx = std::complex<double>;

// Tolerances shared across the library.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kIsometryTol = 1e-10;
inline constexpr double kConstraintTol = 1e-12;
inline constexpr double kAmpPruneTol = 1e-15;

/// Raised when a declared machine constraint or Gram property is violated.
/// The message names the violated relation.
class constraint_error : public std::runtime_error {
 public:
  explicit constraint_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an operation meets a state it cannot sensibly act on
/// (e.g. normalizing a near-zero-trace operator).
class degenerate_error : public std::domain_error {
 public:
  explicit degenerate_error(const std::string& what) : std::domain_error(what) {}
};

// ---------------------------------------------------------------------------
// PureQubitState

/// A single-qubit pure state alpha|0> + beta|1>, normalized at construction.
struct PureQubitState {
  cplx alpha;
  cplx beta;

  PureQubitState(cplx a, cplx b);
};

/// Builds the state sqrt(alpha2)|0> + sign*sqrt(1-alpha2)|1> with real
/// nonnegative components (beta_sign = -1 flips the |1> component).
PureQubitState make_pure_state(double alpha2, int beta_sign = +1);

/// Standard-state family cos(theta)|0> + sin(theta)|1>; <sigma|1> = sin(theta).
PureQubitState sigma_state(double theta);

// ---------------------------------------------------------------------------
// AncillaSpace

/// Abstract machine-state space: named labels plus the Hermitian PSD Gram
/// matrix of their pairwise inner products. Labels never get explicit vector
/// realizations; all contractions go through the Gram matrix.
class AncillaSpace {
 public:
  AncillaSpace(std::vector<std::string> labels, Eigen::MatrixXcd gram);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int i) const { return labels_.at(static_cast<std::size_t>(i)); }
  int index(const std::string& label) const;  // throws std::invalid_argument if absent

  /// <label_i | label_j>
  cplx overlap(int i, int j) const { return gram_(i, j); }
  const Eigen::MatrixXcd& gram() const { return gram_; }
  double min_eigenvalue() const { return min_eig_; }

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXcd gram_;
  double min_eig_ = 0.0;
};

using AncillaSpacePtr = std::shared_ptr<const AncillaSpace>;

// ---------------------------------------------------------------------------
// LabeledKet

/// One term of a labeled ket: computational basis string (packed MSB-first,
/// mode 0 = leftmost bit), ancilla label index, complex amplitude.
struct KetTerm {
  std::uint32_t basis = 0;
  std::int32_t ancilla = 0;
  cplx amp;
};

/// A superposition over (qubit basis string x ancilla label) with amplitudes.
/// Terms are kept canonical: sorted by (basis, ancilla), merged, and pruned
/// of amplitudes below kAmpPruneTol.
class LabeledKet {
 public:
  LabeledKet(int qubit_arity, AncillaSpacePtr space, std::vector<KetTerm> terms);

  /// Convenience constructor from (basis string, label name, amplitude).
  LabeledKet(int qubit_arity, AncillaSpacePtr space,
             const std::vector<std::tuple<std::string, std::string, cplx>>& terms);

  int arity() const { return arity_; }
  const std::vector<KetTerm>& terms() const { return terms_; }
  const AncillaSpacePtr& space() const { return space_; }
  bool empty() const { return terms_.empty(); }

  double squared_norm() const;

  friend LabeledKet operator*(cplx scale, const LabeledKet& k);
  friend LabeledKet operator+(const LabeledKet& x, const LabeledKet& y);

  /// Bit of `basis` for qubit mode `m` under MSB-first packing.
  static int mode_bit(std::uint32_t basis, int arity, int m) {
    return static_cast<int>((basis >> (arity - 1 - m)) & 1u);
  }

  /// Parses a basis string like "01" into the packed representation.
  static std::uint32_t parse_basis(const std::string& bits);

 private:
  int arity_ = 0;
  AncillaSpacePtr space_;
  std::vector<KetTerm> terms_;

  void canonicalize();
};

/// <x|y> resolved through the shared Gram matrix. Usage error if the kets
/// live in different spaces or have different arity.
cplx inner_product(const LabeledKet& x, const LabeledKet& y);

// ---------------------------------------------------------------------------
// DensityOperator

/// Hermitian operator over retained qubit modes (2^arity x 2^arity).
class DensityOperator {
 public:
  DensityOperator(int qubit_arity, Eigen::MatrixXcd matrix);

  static DensityOperator zero(int qubit_arity);

  int arity() const { return arity_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  cplx operator()(int r, int c) const { return matrix_(r, c); }

  double trace() const;
  double min_eigenvalue() const;
  bool is_unit_trace(double tol = kHermitianTol) const;

 private:
  int arity_ = 0;
  Eigen::MatrixXcd matrix_;
};

/// |phi><phi| for a single qubit.
DensityOperator pure_density(const PureQubitState& phi);

/// Kronecker product a (x) b, mode order: a's modes then b's modes.
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// Partial trace of |psi><psi| onto the ordered mode subset `keep`; the
/// ancilla is traced out through the Gram matrix. The result trace equals
/// <psi|psi>. Empty kets give the zero operator.
DensityOperator reduce_density(const LabeledKet& psi, std::span<const int> keep);

/// Scales to unit trace; degenerate_error if trace(rho) <= 1e-14.
DensityOperator normalize_density(const DensityOperator& rho);

}  // namespace qdel
