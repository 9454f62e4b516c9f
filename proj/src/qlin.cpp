#include "qdel/qlin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdel {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

// ---------------------------------------------------------------------------
// PureQubitState

PureQubitState::PureQubitState(cplx a, cplx b) : alpha(a), beta(b) {
  if (!finite(a) || !finite(b)) {
    throw std::invalid_argument("pure state amplitudes must be finite");
  }
  const double n2 = std::norm(a) + std::norm(b);
  if (std::abs(n2 - 1.0) > kHermitianTol) {
    std::ostringstream msg;
    msg << "pure state not normalized: |alpha|^2+|beta|^2 = " << n2;
    throw std::invalid_argument(msg.str());
  }
}

PureQubitState make_pure_state(double alpha2, int beta_sign) {
  if (!(alpha2 >= 0.0 && alpha2 <= 1.0)) {
    std::ostringstream msg;
    msg << "alpha2 must lie in [0,1], got " << alpha2;
    throw std::domain_error(msg.str());
  }
  if (beta_sign != 1 && beta_sign != -1) {
    throw std::invalid_argument("beta_sign must be +1 or -1");
  }
  return PureQubitState(std::sqrt(alpha2), beta_sign * std::sqrt(1.0 - alpha2));
}

PureQubitState sigma_state(double theta) {
  return PureQubitState(std::cos(theta), std::sin(theta));
}

// ---------------------------------------------------------------------------
// AncillaSpace

AncillaSpace::AncillaSpace(std::vector<std::string> labels, Eigen::MatrixXcd gram)
    : labels_(std::move(labels)), gram_(std::move(gram)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (gram_.rows() != n || gram_.cols() != n) {
    throw std::invalid_argument("Gram matrix shape does not match label count");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    for (std::size_t j = i + 1; j < labels_.size(); ++j) {
      if (labels_[i] == labels_[j]) {
        throw std::invalid_argument("duplicate ancilla label: " + labels_[i]);
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!finite(gram_(i, j))) {
        throw constraint_error("Gram entry not finite at (" + labels_[static_cast<std::size_t>(i)] +
                               ", " + labels_[static_cast<std::size_t>(j)] + ")");
      }
      if (std::abs(gram_(i, j) - std::conj(gram_(j, i))) > kHermitianTol) {
        throw constraint_error("Gram not Hermitian at (" + labels_[static_cast<std::size_t>(i)] +
                               ", " + labels_[static_cast<std::size_t>(j)] + ")");
      }
    }
    if (std::abs(gram_(i, i).imag()) > kHermitianTol || gram_(i, i).real() < -kPsdTol) {
      throw constraint_error("Gram diagonal <" + labels_[static_cast<std::size_t>(i)] + "|" +
                             labels_[static_cast<std::size_t>(i)] + "> must be real nonnegative");
    }
  }
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram_, Eigen::EigenvaluesOnly);
    min_eig_ = solver.eigenvalues().minCoeff();
    if (min_eig_ < -kPsdTol) {
      std::ostringstream msg;
      msg << "Gram not positive semidefinite: min eigenvalue " << min_eig_ << " < -" << kPsdTol;
      throw constraint_error(msg.str());
    }
  }
}

int AncillaSpace::index(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<int>(i);
  }
  throw std::invalid_argument("unknown ancilla label: " + label);
}

// ---------------------------------------------------------------------------
// LabeledKet

LabeledKet::LabeledKet(int qubit_arity, AncillaSpacePtr space, std::vector<KetTerm> terms)
    : arity_(qubit_arity), space_(std::move(space)), terms_(std::move(terms)) {
  if (arity_ < 0 || arity_ > 30) throw std::invalid_argument("unsupported qubit arity");
  if (!space_) throw std::invalid_argument("LabeledKet requires an ancilla space");
  const auto dim = std::uint32_t{1} << arity_;
  for (const auto& t : terms_) {
    if (t.basis >= dim) throw std::invalid_argument("basis string out of range for arity");
    if (t.ancilla < 0 || t.ancilla >= space_->size()) {
      throw std::invalid_argument("ancilla label index out of range");
    }
    if (!finite(t.amp)) throw std::invalid_argument("amplitude must be finite");
  }
  canonicalize();
}

namespace {

std::vector<KetTerm> named_terms(int qubit_arity, const AncillaSpacePtr& space,
                                 const std::vector<std::tuple<std::string, std::string, cplx>>& terms) {
  if (!space) throw std::invalid_argument("LabeledKet requires an ancilla space");
  std::vector<KetTerm> out;
  out.reserve(terms.size());
  for (const auto& [basis, label, amp] : terms) {
    if (static_cast<int>(basis.size()) != qubit_arity) {
      throw std::invalid_argument("basis string '" + basis + "' does not match arity");
    }
    out.push_back(KetTerm{LabeledKet::parse_basis(basis), space->index(label), amp});
  }
  return out;
}

}  // namespace

LabeledKet::LabeledKet(int qubit_arity, AncillaSpacePtr space,
                       const std::vector<std::tuple<std::string, std::string, cplx>>& terms)
    : LabeledKet(qubit_arity, space, named_terms(qubit_arity, space, terms)) {}

std::uint32_t LabeledKet::parse_basis(const std::string& bits) {
  std::uint32_t b = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("basis string must be binary: " + bits);
    b = (b << 1) | static_cast<std::uint32_t>(c - '0');
  }
  return b;
}

void LabeledKet::canonicalize() {
  std::sort(terms_.begin(), terms_.end(), [](const KetTerm& a, const KetTerm& b) {
    return a.basis != b.basis ? a.basis < b.basis : a.ancilla < b.ancilla;
  });
  std::vector<KetTerm> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().basis == t.basis && merged.back().ancilla == t.ancilla) {
      merged.back().amp += t.amp;
    } else {
      merged.push_back(t);
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const KetTerm& t) { return std::abs(t.amp) < kAmpPruneTol; }),
               merged.end());
  terms_ = std::move(merged);
}

double LabeledKet::squared_norm() const {
  const cplx n = inner_product(*this, *this);
  return n.real();
}

LabeledKet operator*(cplx scale, const LabeledKet& k) {
  std::vector<KetTerm> terms = k.terms_;
  for (auto& t : terms) t.amp *= scale;
  return LabeledKet(k.arity_, k.space_, std::move(terms));
}

LabeledKet operator+(const LabeledKet& x, const LabeledKet& y) {
  if (x.space_ != y.space_) throw std::invalid_argument("kets live in different ancilla spaces");
  if (x.arity_ != y.arity_) throw std::invalid_argument("kets have different qubit arity");
  std::vector<KetTerm> terms = x.terms_;
  terms.insert(terms.end(), y.terms_.begin(), y.terms_.end());
  return LabeledKet(x.arity_, x.space_, std::move(terms));
}

cplx inner_product(const LabeledKet& x, const LabeledKet& y) {
  if (x.space() != y.space()) {
    throw std::invalid_argument("inner product requires a shared ancilla space");
  }
  if (x.arity() != y.arity()) {
    throw std::invalid_argument("inner product requires equal qubit arity");
  }
  const AncillaSpace& g = *x.space();
  cplx acc{0.0, 0.0};
  // Terms are sorted by basis; walk matching basis blocks.
  const auto& xt = x.terms();
  const auto& yt = y.terms();
  std::size_t i = 0, j = 0;
  while (i < xt.size() && j < yt.size()) {
    if (xt[i].basis < yt[j].basis) {
      ++i;
    } else if (yt[j].basis < xt[i].basis) {
      ++j;
    } else {
      const std::uint32_t b = xt[i].basis;
      std::size_t ie = i, je = j;
      while (ie < xt.size() && xt[ie].basis == b) ++ie;
      while (je < yt.size() && yt[je].basis == b) ++je;
      for (std::size_t p = i; p < ie; ++p) {
        for (std::size_t q = j; q < je; ++q) {
          acc += std::conj(xt[p].amp) * yt[q].amp * g.overlap(xt[p].ancilla, yt[q].ancilla);
        }
      }
      i = ie;
      j = je;
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// DensityOperator

DensityOperator::DensityOperator(int qubit_arity, Eigen::MatrixXcd matrix)
    : arity_(qubit_arity), matrix_(std::move(matrix)) {
  if (arity_ < 0 || arity_ > 15) throw std::invalid_argument("unsupported qubit arity");
  const auto dim = Eigen::Index{1} << arity_;
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw std::invalid_argument("density matrix shape does not match arity");
  }
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = r; c < dim; ++c) {
      if (!finite(matrix_(r, c)) || !finite(matrix_(c, r))) {
        throw std::invalid_argument("density matrix entries must be finite");
      }
      if (std::abs(matrix_(r, c) - std::conj(matrix_(c, r))) > kHermitianTol) {
        throw std::invalid_argument("density matrix not Hermitian within tolerance");
      }
    }
  }
}

DensityOperator DensityOperator::zero(int qubit_arity) {
  const auto dim = Eigen::Index{1} << qubit_arity;
  return DensityOperator(qubit_arity, Eigen::MatrixXcd::Zero(dim, dim));
}

double DensityOperator::trace() const { return matrix_.trace().real(); }

double DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool DensityOperator::is_unit_trace(double tol) const { return std::abs(trace() - 1.0) <= tol; }

DensityOperator pure_density(const PureQubitState& phi) {
  Eigen::MatrixXcd m(2, 2);
  m(0, 0) = phi.alpha * std::conj(phi.alpha);
  m(0, 1) = phi.alpha * std::conj(phi.beta);
  m(1, 0) = phi.beta * std::conj(phi.alpha);
  m(1, 1) = phi.beta * std::conj(phi.beta);
  return DensityOperator(1, std::move(m));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  const int da = a.dim(), db = b.dim();
  Eigen::MatrixXcd m(da * db, da * db);
  for (int r1 = 0; r1 < da; ++r1)
    for (int c1 = 0; c1 < da; ++c1)
      for (int r2 = 0; r2 < db; ++r2)
        for (int c2 = 0; c2 < db; ++c2) m(r1 * db + r2, c1 * db + c2) = a(r1, c1) * b(r2, c2);
  return DensityOperator(a.arity() + b.arity(), std::move(m));
}

DensityOperator reduce_density(const LabeledKet& psi, std::span<const int> keep) {
  const int arity = psi.arity();
  std::uint32_t keep_mask = 0;
  for (std::size_t m = 0; m < keep.size(); ++m) {
    const int mode = keep[m];
    if (mode < 0 || mode >= arity) throw std::invalid_argument("keep index out of range");
    const std::uint32_t bit = std::uint32_t{1} << (arity - 1 - mode);
    if (keep_mask & bit) throw std::invalid_argument("keep indices must be distinct");
    keep_mask |= bit;
  }
  const int k = static_cast<int>(keep.size());
  const auto dim = Eigen::Index{1} << k;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);

  const auto kept_index = [&](std::uint32_t basis) {
    std::uint32_t idx = 0;
    for (int pos = 0; pos < k; ++pos) {
      idx = (idx << 1) | static_cast<std::uint32_t>(LabeledKet::mode_bit(basis, arity, keep[static_cast<std::size_t>(pos)]));
    }
    return static_cast<Eigen::Index>(idx);
  };

  const AncillaSpace& g = *psi.space();
  const std::uint32_t drop_mask = ~keep_mask;
  const auto& terms = psi.terms();
  for (const auto& ti : terms) {
    const auto row = kept_index(ti.basis);
    for (const auto& tj : terms) {
      if (((ti.basis ^ tj.basis) & drop_mask) != 0) continue;
      m(row, kept_index(tj.basis)) += ti.amp * std::conj(tj.amp) * g.overlap(tj.ancilla, ti.ancilla);
    }
  }
  // Hermitize away representation round-off before the constructor check.
  Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint().eval());
  return DensityOperator(k, std::move(sym));
}

DensityOperator normalize_density(const DensityOperator& rho) {
  const double tr = rho.trace();
  if (tr <= 1e-14) {
    std::ostringstream msg;
    msg << "cannot normalize near-zero-trace operator (trace = " << tr << ")";
    throw degenerate_error(msg.str());
  }
  return DensityOperator(rho.arity(), rho.matrix() / tr);
}

}  // namespace qdel
