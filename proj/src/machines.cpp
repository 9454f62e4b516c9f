#include "qdel/machines.hpp"

#include <cmath>
#include <sstream>

namespace qdel {

namespace {

constexpr cplx kOne{1.0, 0.0};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void enforce(const std::vector<NamedResidual>& constraints) {
  for (const auto& c : constraints) {
    if (c.residual > kConstraintTol) {
      throw constraint_error("violated constraint " + c.name + " (residual " + fmt(c.residual) +
                             ")");
    }
  }
}

AncillaSpacePtr orthonormal_space(std::vector<std::string> labels) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  return std::make_shared<AncillaSpace>(std::move(labels),
                                        Eigen::MatrixXcd::Identity(n, n));
}

/// |bit>|Sigma> expanded in the computational basis with the given label.
std::vector<std::tuple<std::string, std::string, cplx>> bit_sigma_terms(
    int bit, const PureQubitState& sigma, const std::string& label) {
  const std::string b = std::to_string(bit);
  return {{b + "0", label, sigma.alpha}, {b + "1", label, sigma.beta}};
}

void default_paper_norms(MachineSpec& m) {
  m.paper_label_norms.resize(static_cast<std::size_t>(m.space->size()));
  for (int i = 0; i < m.space->size(); ++i) {
    m.paper_label_norms[static_cast<std::size_t>(i)] = m.space->overlap(i, i).real();
  }
}

void finish_machine(MachineSpec& m) {
  if (m.paper_label_norms.empty()) default_paper_norms(m);
  const ValidationReport report = validate_machine(m);
  if (!report.passed) {
    throw constraint_error("output isometry violated for machine " + m.name +
                           ": max residual " + fmt(report.max_isometry_residual));
  }
}

}  // namespace

double MachineSpec::meta_value(const std::string& key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  throw std::invalid_argument("machine " + name + " has no meta entry " + key);
}

// ---------------------------------------------------------------------------
// Parameter helpers

ImperfectDeleterParams rotation_chart(double delta, double sigma_theta) {
  if (!(delta >= -1.0 && delta <= 1.0)) {
    throw std::domain_error("rotation chart requires delta in [-1,1], got " + fmt(delta));
  }
  const double t = -0.5 * std::asin(delta);
  return ImperfectDeleterParams{std::cos(t), -std::sin(t), std::sin(t), std::cos(t), sigma_theta};
}

std::vector<NamedResidual> imperfect_constraints(const ImperfectDeleterParams& p) {
  std::vector<NamedResidual> out;
  out.push_back({"|a0|^2 + |b0|^2 = 1", std::abs(std::norm(p.a0) + std::norm(p.b0) - 1.0)});
  out.push_back({"|a1|^2 + |b1|^2 = 1", std::abs(std::norm(p.a1) + std::norm(p.b1) - 1.0)});
  out.push_back(
      {"a0*conj(a1) + b0*conj(b1) = 0", std::abs(p.a0 * std::conj(p.a1) + p.b0 * std::conj(p.b1))});
  out.push_back(
      {"a1*conj(a0) + b1*conj(b0) = 0", std::abs(p.a1 * std::conj(p.a0) + p.b1 * std::conj(p.b0))});
  // Ancilla relations hold by construction of the orthonormal {Q, A0, A1}.
  out.push_back({"<A0|A0> = <A1|A1> = 1", 0.0});
  out.push_back({"<A0|Q> = <A1|Q> = 0", 0.0});
  out.push_back({"<A0|A1> = 0", 0.0});
  return out;
}

std::vector<NamedResidual> general_constraints(const GeneralDeleterParams& p) {
  std::vector<NamedResidual> out;
  const double na0 = p.norm_a0.value_or(1.0 - std::norm(p.p0) * p.norm_b0 - std::norm(p.p1) * p.norm_c0);
  const double na1 = p.norm_a1.value_or(1.0 - std::norm(p.p1) * p.norm_b1 - std::norm(p.p0) * p.norm_c1);
  out.push_back({"|p0|^2<B0|B0> + |p1|^2<C0|C0> = 1 - <A0|A0>",
                 std::abs(std::norm(p.p0) * p.norm_b0 + std::norm(p.p1) * p.norm_c0 - (1.0 - na0))});
  out.push_back({"|p1|^2<B1|B1> + |p0|^2<C1|C1> = 1 - <A1|A1>",
                 std::abs(std::norm(p.p1) * p.norm_b1 + std::norm(p.p0) * p.norm_c1 - (1.0 - na1))});
  out.push_back({"|a0|^2 + |b0|^2 = 1", std::abs(std::norm(p.a0) + std::norm(p.b0) - 1.0)});
  out.push_back({"|a1|^2 + |b1|^2 = 1", std::abs(std::norm(p.a1) + std::norm(p.b1) - 1.0)});
  out.push_back(
      {"a0*conj(a1) + b0*conj(b1) = 0", std::abs(p.a0 * std::conj(p.a1) + p.b0 * std::conj(p.b1))});
  out.push_back(
      {"a1*conj(a0) + b1*conj(b0) = 0", std::abs(p.a1 * std::conj(p.a0) + p.b1 * std::conj(p.b0))});
  out.push_back({"p0*conj(p1)*<C1|B0> + conj(p0)*p1*<B1|C0> = 0",
                 std::abs(p.p0 * std::conj(p.p1) * p.overlap_c1_b0 +
                          std::conj(p.p0) * p.p1 * p.overlap_b1_c0)});
  out.push_back({"p1*conj(p0)*<C1|B0> + conj(p1)*p0*<B1|C0> = 0",
                 std::abs(p.p1 * std::conj(p.p0) * p.overlap_c1_b0 +
                          std::conj(p.p1) * p.p0 * p.overlap_b1_c0)});
  return out;
}

std::vector<NamedResidual> qiu_constraints(cplx a0, cplx b0, cplx a1, cplx b1) {
  return {{"|a0|^2 + |b0|^2 = 1", std::abs(std::norm(a0) + std::norm(b0) - 1.0)},
          {"|a1|^2 + |b1|^2 = 1", std::abs(std::norm(a1) + std::norm(b1) - 1.0)}};
}

// ---------------------------------------------------------------------------
// Catalog builders

MachineSpec wz_machine() {
  MachineSpec m;
  m.name = "wz";
  m.in_arity = 1;
  m.out_arity = 2;
  m.space = orthonormal_space({"Q0", "Q1"});
  m.table = {LabeledKet(2, m.space, {{"00", "Q0", kOne}}),
             LabeledKet(2, m.space, {{"11", "Q1", kOne}})};
  m.constraints = {{"<Q0|Q0> = <Q1|Q1> = 1", 0.0}, {"<Q0|Q1> = 0", 0.0}};
  finish_machine(m);
  return m;
}

MachineSpec bh_machine(double xi) {
  MachineSpec m;
  m.name = "bh";
  m.in_arity = 1;
  m.out_arity = 2;
  const double eta = 1.0 - 2.0 * xi;
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(4, 4);
  gram(0, 0) = gram(1, 1) = 1.0 - 2.0 * xi;  // <Q_i|Q_i>
  gram(2, 2) = gram(3, 3) = xi;              // <Y_i|Y_i>
  gram(0, 3) = gram(3, 0) = eta / 2.0;       // <Q0|Y1>
  gram(1, 2) = gram(2, 1) = eta / 2.0;       // <Q1|Y0>
  m.space = std::make_shared<AncillaSpace>(std::vector<std::string>{"Q0", "Q1", "Y0", "Y1"},
                                           std::move(gram));
  m.table = {LabeledKet(2, m.space, {{"00", "Q0", kOne}, {"01", "Y0", kOne}, {"10", "Y0", kOne}}),
             LabeledKet(2, m.space, {{"11", "Q1", kOne}, {"01", "Y1", kOne}, {"10", "Y1", kOne}})};
  m.constraints = {{"<Q0|Q0> + 2<Y0|Y0> = 1", std::abs((1.0 - 2.0 * xi) + 2.0 * xi - 1.0)},
                   {"<Q1|Q1> + 2<Y1|Y1> = 1", std::abs((1.0 - 2.0 * xi) + 2.0 * xi - 1.0)},
                   {"eta = 1 - 2*xi", 0.0}};
  m.meta = {{"xi", xi}, {"eta", eta}};
  // Concatenation bookkeeping treats the Q labels as unit-norm.
  m.paper_label_norms = {1.0, 1.0, xi, xi};
  finish_machine(m);
  return m;
}

MachineSpec pb_delete_machine(const PureQubitState& sigma) {
  MachineSpec m;
  m.name = "pb";
  m.in_arity = 2;
  m.out_arity = 2;
  m.space = orthonormal_space({"A", "A0", "A1"});
  m.sigma = sigma;
  m.table = {LabeledKet(2, m.space, bit_sigma_terms(0, sigma, "A0")),
             LabeledKet(2, m.space, {{"01", "A", kOne}}),
             LabeledKet(2, m.space, {{"10", "A", kOne}}),
             LabeledKet(2, m.space, bit_sigma_terms(1, sigma, "A1"))};
  m.constraints = {{"{A, A0, A1} orthonormal", 0.0}};
  m.meta = {{"M2", std::norm(sigma.beta)}};
  finish_machine(m);
  return m;
}

MachineSpec imperfect_delete_machine(const ImperfectDeleterParams& params) {
  auto constraints = imperfect_constraints(params);
  enforce(constraints);

  MachineSpec m;
  m.name = "imperfect";
  m.in_arity = 2;
  m.out_arity = 2;
  m.space = orthonormal_space({"Q", "A0", "A1"});
  m.sigma = sigma_state(params.sigma_theta);
  m.table = {LabeledKet(2, m.space, bit_sigma_terms(0, *m.sigma, "A0")),
             LabeledKet(2, m.space, {{"01", "Q", params.a0}, {"10", "Q", params.b0}}),
             LabeledKet(2, m.space, {{"01", "Q", params.a1}, {"10", "Q", params.b1}}),
             LabeledKet(2, m.space, bit_sigma_terms(1, *m.sigma, "A1"))};
  m.constraints = std::move(constraints);

  const cplx g = params.a0 + params.a1;
  const cplx h = params.b0 + params.b1;
  const double gg = std::norm(g);
  const double hh = std::norm(h);
  const double m2 = std::norm(m.sigma->beta);
  const double k = (gg - 1.0) * (gg - 1.0) + (hh - 1.0) * (hh - 1.0);
  const double k1 = 2.0 - gg * m2 - hh * (1.0 - m2);
  m.meta = {{"gg*", gg}, {"hh*", hh}, {"k", k}, {"k1", k1}, {"M2", m2}};
  finish_machine(m);
  return m;
}

MachineSpec general_delete_machine(const GeneralDeleterParams& params,
                                   const PureQubitState& sigma) {
  GeneralDeleterParams p = params;
  // Solve the norm-balance rows for any unset A norms before validating.
  if (!p.norm_a0) p.norm_a0 = 1.0 - std::norm(p.p0) * p.norm_b0 - std::norm(p.p1) * p.norm_c0;
  if (!p.norm_a1) p.norm_a1 = 1.0 - std::norm(p.p1) * p.norm_b1 - std::norm(p.p0) * p.norm_c1;
  auto constraints = general_constraints(p);
  enforce(constraints);

  MachineSpec m;
  m.name = "general";
  m.in_arity = 2;
  m.out_arity = 2;
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(7, 7);
  // Label order: Q, A0, A1, B0, B1, C0, C1.
  gram(0, 0) = 1.0;
  gram(1, 1) = *p.norm_a0;
  gram(2, 2) = *p.norm_a1;
  gram(3, 3) = p.norm_b0;
  gram(4, 4) = p.norm_b1;
  gram(5, 5) = p.norm_c0;
  gram(6, 6) = p.norm_c1;
  gram(6, 3) = p.overlap_c1_b0;  // <C1|B0>
  gram(3, 6) = std::conj(p.overlap_c1_b0);
  gram(4, 5) = p.overlap_b1_c0;
  gram(5, 4) = std::conj(p.overlap_b1_c0);
  m.space = std::make_shared<AncillaSpace>(
      std::vector<std::string>{"Q", "A0", "A1", "B0", "B1", "C0", "C1"}, std::move(gram));
  m.sigma = sigma;

  auto row00 = bit_sigma_terms(0, sigma, "A0");
  row00.push_back({"10", "B0", p.p0});
  row00.push_back({"01", "C0", p.p1});
  auto row11 = bit_sigma_terms(1, sigma, "A1");
  row11.push_back({"01", "B1", p.p0});
  row11.push_back({"10", "C1", p.p1});
  m.table = {LabeledKet(2, m.space, row00),
             LabeledKet(2, m.space, {{"01", "Q", p.a0}, {"10", "Q", p.b0}}),
             LabeledKet(2, m.space, {{"01", "Q", p.a1}, {"10", "Q", p.b1}}),
             LabeledKet(2, m.space, row11)};
  m.constraints = std::move(constraints);

  const double gg = std::norm(p.a0 + p.a1);
  const double hh = std::norm(p.b0 + p.b1);
  m.meta = {{"gg*", gg},
            {"hh*", hh},
            {"M2", std::norm(sigma.beta)},
            {"<A0|A0>", *p.norm_a0},
            {"<A1|A1>", *p.norm_a1}};
  finish_machine(m);
  return m;
}

MachineSpec qiu_machine(cplx a0, cplx b0, cplx a1, cplx b1) {
  auto constraints = qiu_constraints(a0, b0, a1, b1);
  enforce(constraints);

  MachineSpec m;
  m.name = "qiu";
  m.in_arity = 2;
  m.out_arity = 2;
  m.space = orthonormal_space({"Q", "A0", "A1", "B0", "B1"});
  m.table = {LabeledKet(2, m.space, {{"00", "A0", a0}, {"10", "B0", b0}}),
             LabeledKet(2, m.space, {{"01", "Q", kOne}}),
             LabeledKet(2, m.space, {{"10", "Q", kOne}}),
             LabeledKet(2, m.space, {{"11", "A1", a1}, {"01", "B1", b1}})};
  m.constraints = std::move(constraints);
  finish_machine(m);
  return m;
}

// ---------------------------------------------------------------------------
// Validation and application

ValidationReport validate_machine(const MachineSpec& m) {
  ValidationReport report;
  const std::size_t n = m.table.size();
  report.pair_residuals.assign(n, std::vector<double>(n, 0.0));
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const cplx ip = inner_product(m.table[i], m.table[j]);
      const double expected = (i == j) ? 1.0 : 0.0;
      const double r = std::abs(ip - expected);
      report.pair_residuals[i][j] = r;
      worst = std::max(worst, r);
    }
  }
  report.max_isometry_residual = worst;
  report.gram_min_eigenvalue = m.space ? m.space->min_eigenvalue() : 0.0;
  report.constraints = m.constraints;
  bool ok = worst <= kIsometryTol && report.gram_min_eigenvalue >= -kPsdTol;
  for (const auto& c : report.constraints) ok = ok && c.residual <= kIsometryTol;
  report.passed = ok;
  return report;
}

LabeledKet apply_machine(const MachineSpec& m, std::span<const cplx> coeffs) {
  const std::size_t expected = std::size_t{1} << m.in_arity;
  if (coeffs.size() != expected) {
    throw std::invalid_argument("coefficient vector size does not match machine input arity");
  }
  std::vector<KetTerm> terms;
  for (std::size_t i = 0; i < expected; ++i) {
    if (coeffs[i] == cplx{0.0, 0.0}) continue;
    for (const auto& t : m.table[i].terms()) {
      terms.push_back(KetTerm{t.basis, t.ancilla, coeffs[i] * t.amp});
    }
  }
  return LabeledKet(m.out_arity, m.space, std::move(terms));
}

LabeledKet apply_machine(const MachineSpec& m, const PureQubitState& psi) {
  if (m.in_arity != 1) {
    throw std::invalid_argument("machine " + m.name + " does not take single-qubit input");
  }
  const cplx coeffs[2] = {psi.alpha, psi.beta};
  return apply_machine(m, coeffs);
}

LabeledKet apply_machine_to_pair(const MachineSpec& m, const PureQubitState& psi) {
  if (m.in_arity != 2) {
    throw std::invalid_argument("machine " + m.name + " does not take two-qubit input");
  }
  const cplx coeffs[4] = {psi.alpha * psi.alpha, psi.alpha * psi.beta, psi.beta * psi.alpha,
                          psi.beta * psi.beta};
  return apply_machine(m, coeffs);
}

}  // namespace qdel
