#include "qdel/scenarios.hpp"

#include <cmath>
#include <sstream>

namespace qdel {

namespace {

const int kKeepA[1] = {0};
const int kKeepB[1] = {1};
const int kKeepAB[2] = {0, 1};

DensityOperator ideal_density(double alpha2) { return pure_density(make_pure_state(alpha2)); }

std::string brief(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(GramConvention conv) {
  return conv == GramConvention::strict ? "strict" : "paper";
}

// ---------------------------------------------------------------------------
// Clone-only

CloneResult clone_scenario(const MachineSpec& cloner, double alpha2) {
  if (cloner.in_arity != 1 || cloner.out_arity != 2) {
    throw std::invalid_argument("clone scenario requires a 1->2 machine, got " + cloner.name);
  }
  const PureQubitState psi = make_pure_state(alpha2);
  const LabeledKet out = apply_machine(cloner, psi);
  const DensityOperator rho_id = pure_density(psi);
  CloneResult r{reduce_density(out, kKeepA), reduce_density(out, kKeepB),
                reduce_density(out, kKeepAB), 0.0, 0.0};
  r.d_a = hs_distance(r.rho_a, rho_id);
  r.d_ab = hs_distance(r.rho_ab, tensor(rho_id, rho_id));
  return r;
}

// ---------------------------------------------------------------------------
// Delete-only

DeleteResult delete_scenario(const MachineSpec& deleter, double alpha2) {
  if (deleter.in_arity != 2) {
    throw std::invalid_argument("delete scenario requires a two-qubit deleter, got " +
                                deleter.name);
  }
  const PureQubitState psi = make_pure_state(alpha2);
  const LabeledKet out = apply_machine_to_pair(deleter, psi);
  const DensityOperator rho_id = pure_density(psi);
  DeleteResult r{normalize_density(reduce_density(out, kKeepA)),
                 normalize_density(reduce_density(out, kKeepB)),
                 0.0,
                 std::nullopt,
                 0.0,
                 0.0};
  r.d = hs_distance(r.rho_1, rho_id);
  if (deleter.sigma) r.f = fidelity_against_pure(r.rho_2, *deleter.sigma);
  r.f_retained = fidelity_against_pure(r.rho_1, psi);
  r.d_deleted_vs_input = hs_distance(r.rho_2, rho_id);
  return r;
}

// ---------------------------------------------------------------------------
// Pipelines

PipelineScenario::PipelineScenario(const MachineSpec& cloner, const MachineSpec& deleter,
                                   GramConvention conv) {
  if (cloner.in_arity != 1 || cloner.out_arity != 2 || deleter.in_arity != 2) {
    throw std::invalid_argument("pipeline requires a 1->2 cloner followed by a 2-qubit deleter");
  }
  const AncillaSpace& cs = *cloner.space;
  const AncillaSpace& ds = *deleter.space;
  const int nc = cs.size(), nd = ds.size();

  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(nc * nd));
  for (int c = 0; c < nc; ++c) {
    for (int d = 0; d < nd; ++d) labels.push_back("(" + cs.label(c) + "," + ds.label(d) + ")");
  }
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(nc * nd, nc * nd);
  if (conv == GramConvention::strict) {
    for (int c = 0; c < nc; ++c)
      for (int d = 0; d < nd; ++d)
        for (int c2 = 0; c2 < nc; ++c2)
          for (int d2 = 0; d2 < nd; ++d2)
            gram(c * nd + d, c2 * nd + d2) = cs.overlap(c, c2) * ds.overlap(d, d2);
  } else {
    for (int c = 0; c < nc; ++c)
      for (int d = 0; d < nd; ++d)
        gram(c * nd + d, c * nd + d) = cloner.paper_label_norms[static_cast<std::size_t>(c)] *
                                       deleter.paper_label_norms[static_cast<std::size_t>(d)];
  }
  space_ = std::make_shared<AncillaSpace>(std::move(labels), std::move(gram));
  sigma_ = deleter.sigma;

  composed_.reserve(cloner.table.size());
  for (const LabeledKet& cloned : cloner.table) {
    std::vector<KetTerm> terms;
    for (const KetTerm& ct : cloned.terms()) {
      for (const KetTerm& dt : deleter.table[ct.basis].terms()) {
        terms.push_back(KetTerm{dt.basis, ct.ancilla * nd + dt.ancilla, ct.amp * dt.amp});
      }
    }
    composed_.emplace_back(deleter.out_arity, space_, std::move(terms));
  }
}

PipelineResult PipelineScenario::eval(double alpha2) const {
  const PureQubitState psi = make_pure_state(alpha2);
  const LabeledKet out = psi.alpha * composed_[0] + psi.beta * composed_[1];
  const double prenorm = out.squared_norm();
  PipelineResult r{normalize_density(reduce_density(out, kKeepA)),
                   normalize_density(reduce_density(out, kKeepB)), 0.0, std::nullopt, prenorm};
  r.d = hs_distance(r.rho_x, ideal_density(alpha2));
  if (sigma_) r.f = fidelity_against_pure(r.rho_y, *sigma_);
  return r;
}

PipelineResult clone_delete_scenario(const MachineSpec& cloner, const MachineSpec& deleter,
                                     double alpha2, GramConvention conv) {
  return PipelineScenario(cloner, deleter, conv).eval(alpha2);
}

// ---------------------------------------------------------------------------
// Perturbation analysis

double two_param_average_distortion(double eps, double eps1) {
  return 1.0 / 3.0 + (eps1 * eps1 + (eps + eps1) * (eps + eps1)) / 30.0;
}

double two_param_average_fidelity(double eps, double eps1, double m2) {
  return 5.0 / 6.0 + (eps * m2 + eps1) / 6.0;
}

std::vector<PerturbationRow> perturbation_table(std::span<const double> deltas, double m2,
                                                AveragingRule rule) {
  if (!(m2 >= 0.0 && m2 <= 1.0)) {
    throw std::domain_error("perturbation table requires M^2 in [0,1]");
  }
  const double sigma_theta = std::asin(std::sqrt(m2));
  std::vector<PerturbationRow> rows;
  rows.reserve(deltas.size());
  for (const double delta : deltas) {
    const MachineSpec machine = imperfect_delete_machine(rotation_chart(delta, sigma_theta));
    PerturbationRow row;
    row.delta = delta;
    // The unitarity constraints force gg* + hh* = 2, i.e. eps = -2*eps1.
    row.d_closed = two_param_average_distortion(2.0 * delta, -delta);
    row.f_closed = two_param_average_fidelity(2.0 * delta, -delta, m2);
    row.d_sim =
        average_over_alpha2([&](double x) { return delete_scenario(machine, x).d; }, rule);
    row.f_sim =
        average_over_alpha2([&](double x) { return *delete_scenario(machine, x).f; }, rule);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reference table

double PaperTable::max_error() const {
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.abs_error);
  return worst;
}

bool PaperTable::all_passed(double tol) const { return max_error() <= tol; }

PaperTable reproduce_paper() {
  PaperTable table;
  const auto add = [&table](const std::string& quantity, double paper_value, double simulated,
                            const std::string& convention) {
    table.rows.push_back(
        {quantity, paper_value, simulated, std::abs(simulated - paper_value), convention});
  };
  const AveragingRule rule{};

  // Basis-copying cloner distortion curve.
  const MachineSpec wz = wz_machine();
  for (const double x : {0.0, 0.25, 0.5, 1.0}) {
    add("D1(wz) at alpha2=" + brief(x), 2.0 * x * (1.0 - x), clone_scenario(wz, x).d_a, "strict");
  }

  // Symmetric cloner: constant distortion at xi = 1/6.
  const MachineSpec bh = bh_machine();
  add("D2(bh xi=1/6)", 1.0 / 18.0, clone_scenario(bh, 0.5).d_a, "strict");
  add("D2 universality deviation(bh xi=1/6)", 0.0,
      universality_deviation([&](double x) { return clone_scenario(bh, x).d_a; }, 101), "strict");
  add("Dab2 universality deviation(bh xi=1/6)", 0.0,
      universality_deviation([&](double x) { return clone_scenario(bh, x).d_ab; }, 101), "strict");

  // Two-copy deleter fidelities.
  const MachineSpec pb = pb_delete_machine(sigma_state(0.0));
  add("Fb(pb) at alpha2=0.5", 0.75, *delete_scenario(pb, 0.5).f, "strict");
  add("Fa(pb) at alpha2=0.5", 0.5, delete_scenario(pb, 0.5).f_retained, "strict");
  add("Fbar_b(pb)", 5.0 / 6.0,
      average_over_alpha2([&](double x) { return *delete_scenario(pb, x).f; }, rule), "strict");
  add("Fbar_a(pb)", 2.0 / 3.0,
      average_over_alpha2([&](double x) { return delete_scenario(pb, x).f_retained; }, rule),
      "strict");

  // Balanced imperfect deleter (gg* = hh* = 1).
  const double r3 = std::sqrt(3.0) / 2.0;
  const ImperfectDeleterParams balanced{r3, cplx{0.0, 0.5}, cplx{0.0, 0.5}, r3, 0.0};
  const MachineSpec imp = imperfect_delete_machine(balanced);
  add("D(imperfect gg*=hh*=1) at alpha2=0.5", 0.5, delete_scenario(imp, 0.5).d, "strict");
  add("F(imperfect gg*=hh*=1) at alpha2=0.5", 0.75, *delete_scenario(imp, 0.5).f, "strict");
  add("Dbar1(imperfect gg*=hh*=1)", 1.0 / 3.0,
      average_over_alpha2([&](double x) { return delete_scenario(imp, x).d; }, rule), "strict");
  add("Fbar1(imperfect gg*=hh*=1)", 5.0 / 6.0,
      average_over_alpha2([&](double x) { return *delete_scenario(imp, x).f; }, rule), "strict");

  // Pipelines under the concatenation bookkeeping.
  const PipelineScenario wz_pb(wz, pb, GramConvention::paper);
  add("Dbar3(wz+pb)", 1.0 / 3.0,
      average_over_alpha2([&](double x) { return wz_pb.eval(x).d; }, rule), "paper");
  add("F3(wz+pb)", 1.0, average_over_alpha2([&](double x) { return *wz_pb.eval(x).f; }, rule),
      "paper");

  const PipelineScenario bh_pb(bh, pb, GramConvention::paper);
  add("D4(bh+pb) at alpha2=0", 1.0 / 32.0, bh_pb.eval(0.0).d, "paper");
  add("Dbar4(bh+pb)", 11.0 / 32.0,
      average_over_alpha2([&](double x) { return bh_pb.eval(x).d; }, rule), "paper");
  add("F4(bh+pb)", 7.0 / 8.0, average_over_alpha2([&](double x) { return *bh_pb.eval(x).f; }, rule),
      "paper");

  const PipelineScenario wz_imp(wz, imp, GramConvention::paper);
  add("Dbar5(wz+imperfect)", 1.0 / 3.0,
      average_over_alpha2([&](double x) { return wz_imp.eval(x).d; }, rule), "paper");
  add("F5(wz+imperfect)", 1.0,
      average_over_alpha2([&](double x) { return *wz_imp.eval(x).f; }, rule), "paper");

  const PipelineScenario bh_imp(bh, imp, GramConvention::paper);
  add("Dbar6(bh+imperfect gg*=hh*=1)", 11.0 / 32.0,
      average_over_alpha2([&](double x) { return bh_imp.eval(x).d; }, rule), "paper");
  add("F6(bh+imperfect gg*=hh*=1)", 7.0 / 8.0,
      average_over_alpha2([&](double x) { return *bh_imp.eval(x).f; }, rule), "paper");

  double dev_d = 0.0, dev_f = 0.0;
  for (int i = 0; i < 101; ++i) {
    const double x = static_cast<double>(i) / 100.0;
    const PipelineResult a = bh_imp.eval(x);
    const PipelineResult b = bh_pb.eval(x);
    dev_d = std::max(dev_d, std::abs(a.d - b.d));
    dev_f = std::max(dev_f, std::abs(*a.f - *b.f));
  }
  add("max|D6-D4| over alpha2 grid (gg*=hh*=1)", 0.0, dev_d, "paper");
  add("max|F6-F4| over alpha2 grid (gg*=hh*=1)", 0.0, dev_f, "paper");

  table.notes = {
      "Dbar3 and Dbar5 are exact thirds; the quoted figures round them to 0.33.",
      "At gg*=hh*=1 the deleter averages (1/3, 5/6) coincide with the plain two-copy "
      "deleter baseline; no parameter choice satisfying the unitarity constraints "
      "improves both at once.",
  };
  return table;
}

// ---------------------------------------------------------------------------
// Curve reports

std::vector<double> uniform_grid(int points) {
  if (points < 1) throw std::invalid_argument("grid needs at least one point");
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(points));
  if (points == 1) {
    xs.push_back(0.0);
    return xs;
  }
  for (int i = 0; i < points; ++i) xs.push_back(static_cast<double>(i) / (points - 1));
  return xs;
}

ScenarioReport clone_report(const MachineSpec& cloner, const std::string& desc,
                            const std::vector<double>& grid, AveragingRule rule) {
  ScenarioReport rep;
  rep.scenario = "clone";
  rep.machine = desc;
  rep.convention = "strict";
  rep.columns = {"alpha2", "D_a", "D_ab"};
  for (const double x : grid) {
    const CloneResult r = clone_scenario(cloner, x);
    rep.rows.push_back({x, r.d_a, r.d_ab});
  }
  rep.averages = {
      {"D_a", average_over_alpha2([&](double x) { return clone_scenario(cloner, x).d_a; }, rule)},
      {"D_ab",
       average_over_alpha2([&](double x) { return clone_scenario(cloner, x).d_ab; }, rule)}};
  rep.meta = cloner.meta;
  return rep;
}

ScenarioReport delete_report(const MachineSpec& deleter, const std::string& desc,
                             const std::vector<double>& grid, AveragingRule rule) {
  if (!deleter.sigma) {
    throw std::invalid_argument("delete report requires a machine with a standard state");
  }
  ScenarioReport rep;
  rep.scenario = "delete";
  rep.machine = desc;
  rep.convention = "strict";
  rep.columns = {"alpha2", "D", "F", "F_retained"};
  for (const double x : grid) {
    const DeleteResult r = delete_scenario(deleter, x);
    rep.rows.push_back({x, r.d, *r.f, r.f_retained});
  }
  rep.averages = {
      {"D", average_over_alpha2([&](double x) { return delete_scenario(deleter, x).d; }, rule)},
      {"F", average_over_alpha2([&](double x) { return *delete_scenario(deleter, x).f; }, rule)},
      {"F_retained", average_over_alpha2(
                         [&](double x) { return delete_scenario(deleter, x).f_retained; }, rule)}};
  rep.meta = deleter.meta;
  return rep;
}

ScenarioReport pipeline_report(const MachineSpec& cloner, const MachineSpec& deleter,
                               const std::string& desc, GramConvention conv,
                               const std::vector<double>& grid, AveragingRule rule) {
  if (!deleter.sigma) {
    throw std::invalid_argument("pipeline report requires a deleter with a standard state");
  }
  const PipelineScenario pipeline(cloner, deleter, conv);
  ScenarioReport rep;
  rep.scenario = "pipeline";
  rep.machine = desc;
  rep.convention = to_string(conv);
  rep.columns = {"alpha2", "D", "F"};
  for (const double x : grid) {
    const PipelineResult r = pipeline.eval(x);
    rep.rows.push_back({x, r.d, *r.f});
  }
  rep.averages = {
      {"D", average_over_alpha2([&](double x) { return pipeline.eval(x).d; }, rule)},
      {"F", average_over_alpha2([&](double x) { return *pipeline.eval(x).f; }, rule)}};
  for (const auto& kv : cloner.meta) rep.meta.emplace_back("cloner." + kv.first, kv.second);
  for (const auto& kv : deleter.meta) rep.meta.emplace_back("deleter." + kv.first, kv.second);
  return rep;
}

}  // namespace qdel
