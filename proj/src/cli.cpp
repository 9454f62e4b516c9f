#include "qdel/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdel/report.hpp"

namespace qdel {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitTableMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConstraint = 3;

struct MachineConfig {
  std::string kind;
  std::optional<double> xi;
  std::optional<double> sigma_theta;
  std::optional<cplx> a0, a1, b0, b1, p0, p1;
  std::optional<double> norm_a0, norm_a1, norm_b0, norm_b1, norm_c0, norm_c1;
  std::optional<cplx> c1_b0, b1_c0;
};

cplx parse_complex(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::invalid_argument("field " + field + " must be a two-element [re, im] array");
  }
  return cplx{j[0].get<double>(), j[1].get<double>()};
}

double parse_real(const json& j, const std::string& field) {
  if (!j.is_number()) throw std::invalid_argument("field " + field + " must be a number");
  return j.get<double>();
}

const std::set<std::string>& allowed_fields(const std::string& kind) {
  static const std::map<std::string, std::set<std::string>> table = {
      {"wz", {"kind"}},
      {"bh", {"kind", "xi"}},
      {"pb", {"kind", "sigma_theta"}},
      {"imperfect", {"kind", "a0", "a1", "b0", "b1", "sigma_theta"}},
      {"general",
       {"kind", "a0", "a1", "b0", "b1", "p0", "p1", "sigma_theta", "ancilla_norms",
        "cross_overlaps"}},
      {"qiu", {"kind", "a0", "a1", "b0", "b1"}},
  };
  auto it = table.find(kind);
  if (it == table.end()) throw std::invalid_argument("unknown machine kind: " + kind);
  return it->second;
}

MachineConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("machine config must be a JSON object");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw std::invalid_argument("machine config requires a string field 'kind'");
  }
  MachineConfig c;
  c.kind = j.at("kind").get<std::string>();
  const auto& allowed = allowed_fields(c.kind);
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw std::invalid_argument("unknown field '" + key + "' for machine kind " + c.kind);
    }
    if (key == "kind") continue;
    if (key == "xi") c.xi = parse_real(value, key);
    else if (key == "sigma_theta") c.sigma_theta = parse_real(value, key);
    else if (key == "a0") c.a0 = parse_complex(value, key);
    else if (key == "a1") c.a1 = parse_complex(value, key);
    else if (key == "b0") c.b0 = parse_complex(value, key);
    else if (key == "b1") c.b1 = parse_complex(value, key);
    else if (key == "p0") c.p0 = parse_complex(value, key);
    else if (key == "p1") c.p1 = parse_complex(value, key);
    else if (key == "ancilla_norms") {
      if (!value.is_object()) throw std::invalid_argument("ancilla_norms must be an object");
      static const std::set<std::string> norm_keys = {"A0", "A1", "B0", "B1", "C0", "C1"};
      for (const auto& [nk, nv] : value.items()) {
        if (!norm_keys.count(nk)) {
          throw std::invalid_argument("unknown ancilla_norms key '" + nk + "'");
        }
        const double norm = parse_real(nv, "ancilla_norms." + nk);
        if (nk == "A0") c.norm_a0 = norm;
        else if (nk == "A1") c.norm_a1 = norm;
        else if (nk == "B0") c.norm_b0 = norm;
        else if (nk == "B1") c.norm_b1 = norm;
        else if (nk == "C0") c.norm_c0 = norm;
        else c.norm_c1 = norm;
      }
    } else if (key == "cross_overlaps") {
      if (!value.is_object()) throw std::invalid_argument("cross_overlaps must be an object");
      for (const auto& [ok, ov] : value.items()) {
        if (ok == "C1B0") c.c1_b0 = parse_complex(ov, "cross_overlaps.C1B0");
        else if (ok == "B1C0") c.b1_c0 = parse_complex(ov, "cross_overlaps.B1C0");
        else throw std::invalid_argument("unknown cross_overlaps key '" + ok + "'");
      }
    }
  }
  return c;
}

std::string complex_str(cplx z) {
  return "[" + format_number(z.real()) + "," + format_number(z.imag()) + "]";
}

void require_all_or_none(const MachineConfig& c) {
  const int given = int(c.a0.has_value()) + int(c.a1.has_value()) + int(c.b0.has_value()) +
                    int(c.b1.has_value());
  if (given != 0 && given != 4) {
    throw std::invalid_argument("machine kind " + c.kind +
                                " requires either all of a0, a1, b0, b1 or none");
  }
}

// The balanced parameter set with gg* = hh* = 1, used as the default for
// parameterized deleters.
void fill_default_ab(MachineConfig& c) {
  const double r3 = std::sqrt(3.0) / 2.0;
  c.a0 = cplx{r3, 0.0};
  c.a1 = cplx{0.0, 0.5};
  c.b0 = cplx{0.0, 0.5};
  c.b1 = cplx{r3, 0.0};
}

struct BuiltMachine {
  MachineSpec spec;
  std::string desc;
};

BuiltMachine build_machine(MachineConfig c) {
  if (c.kind == "wz") {
    return {wz_machine(), "wz"};
  }
  if (c.kind == "bh") {
    const double xi = c.xi.value_or(1.0 / 6.0);
    return {bh_machine(xi), "bh(xi=" + format_number(xi) + ")"};
  }
  if (c.kind == "pb") {
    const double theta = c.sigma_theta.value_or(0.0);
    return {pb_delete_machine(sigma_state(theta)),
            "pb(sigma_theta=" + format_number(theta) + ")"};
  }
  if (c.kind == "imperfect") {
    require_all_or_none(c);
    if (!c.a0) fill_default_ab(c);
    const double theta = c.sigma_theta.value_or(0.0);
    ImperfectDeleterParams p{*c.a0, *c.a1, *c.b0, *c.b1, theta};
    std::string desc = "imperfect(a0=" + complex_str(p.a0) + ",a1=" + complex_str(p.a1) +
                       ",b0=" + complex_str(p.b0) + ",b1=" + complex_str(p.b1) +
                       ",sigma_theta=" + format_number(theta) + ")";
    return {imperfect_delete_machine(p), std::move(desc)};
  }
  if (c.kind == "general") {
    require_all_or_none(c);
    if (!c.a0) fill_default_ab(c);
    const double theta = c.sigma_theta.value_or(0.0);
    GeneralDeleterParams p;
    p.a0 = *c.a0;
    p.a1 = *c.a1;
    p.b0 = *c.b0;
    p.b1 = *c.b1;
    p.p0 = c.p0.value_or(cplx{0.0, 0.0});
    p.p1 = c.p1.value_or(cplx{0.0, 0.0});
    p.norm_a0 = c.norm_a0;
    p.norm_a1 = c.norm_a1;
    p.norm_b0 = c.norm_b0.value_or(1.0);
    p.norm_b1 = c.norm_b1.value_or(1.0);
    p.norm_c0 = c.norm_c0.value_or(1.0);
    p.norm_c1 = c.norm_c1.value_or(1.0);
    p.overlap_c1_b0 = c.c1_b0.value_or(cplx{0.0, 0.0});
    p.overlap_b1_c0 = c.b1_c0.value_or(cplx{0.0, 0.0});
    std::string desc = "general(a0=" + complex_str(p.a0) + ",a1=" + complex_str(p.a1) +
                       ",b0=" + complex_str(p.b0) + ",b1=" + complex_str(p.b1) +
                       ",p0=" + complex_str(p.p0) + ",p1=" + complex_str(p.p1) +
                       ",sigma_theta=" + format_number(theta) + ")";
    return {general_delete_machine(p, sigma_state(theta)), std::move(desc)};
  }
  if (c.kind == "qiu") {
    require_all_or_none(c);
    if (!c.a0) {
      c.a0 = cplx{1.0, 0.0};
      c.b0 = cplx{0.0, 0.0};
      c.a1 = cplx{1.0, 0.0};
      c.b1 = cplx{0.0, 0.0};
    }
    std::string desc = "qiu(a0=" + complex_str(*c.a0) + ",b0=" + complex_str(*c.b0) +
                       ",a1=" + complex_str(*c.a1) + ",b1=" + complex_str(*c.b1) + ")";
    return {qiu_machine(*c.a0, *c.b0, *c.a1, *c.b1), std::move(desc)};
  }
  throw std::invalid_argument("unknown machine kind: " + c.kind);
}

MachineConfig load_config(const std::string& kind_flag, const std::string& params_path) {
  MachineConfig c;
  if (!params_path.empty()) {
    std::ifstream in(params_path);
    if (!in) throw std::invalid_argument("cannot read params file: " + params_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw std::invalid_argument("params file " + params_path + ": " + e.what());
    }
    c = config_from_json(j);
    if (!kind_flag.empty() && kind_flag != c.kind) {
      throw std::invalid_argument("machine kind flag '" + kind_flag +
                                  "' conflicts with params file kind '" + c.kind + "'");
    }
  } else {
    if (kind_flag.empty()) throw std::invalid_argument("no machine kind given");
    c.kind = kind_flag;
    allowed_fields(c.kind);  // reject unknown kinds early
  }
  return c;
}

void write_output(const std::string& payload, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << payload;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output path: " + out_path);
  f << payload;
  if (!f.good()) throw std::invalid_argument("failed writing output path: " + out_path);
}

int cmd_reproduce(const std::string& format, const std::string& out_path, std::ostream& out) {
  const PaperTable table = reproduce_paper();
  std::string payload;
  if (format == "csv") {
    payload = to_csv(table);
  } else {
    payload = to_json(table).dump(2) + "\n";
  }
  write_output(payload, out_path, out);
  return table.all_passed(1e-10) ? kExitOk : kExitTableMismatch;
}

struct RunOptions {
  std::string scenario;
  std::string machine_kind, cloner_kind, deleter_kind;
  std::string params_path;
  std::optional<double> xi, sigma_theta, alpha2;
  int grid_points = 101;
  std::string convention = "paper";
  bool convention_given = false;
  std::string format = "json";
  std::string out_path;
};

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<double> grid =
      opt.alpha2 ? std::vector<double>{*opt.alpha2} : uniform_grid(opt.grid_points);

  ScenarioReport report;
  if (opt.scenario == "clone") {
    if (opt.convention_given) {
      err << "warning: --convention is ignored for clone runs\n";
    }
    MachineConfig c = load_config(opt.machine_kind, opt.params_path);
    if (opt.xi) c.xi = opt.xi;
    BuiltMachine m = build_machine(std::move(c));
    report = clone_report(m.spec, m.desc, grid);
  } else if (opt.scenario == "delete") {
    if (opt.convention_given) {
      err << "warning: --convention is ignored for delete runs\n";
    }
    MachineConfig c = load_config(opt.machine_kind, opt.params_path);
    if (opt.sigma_theta) c.sigma_theta = opt.sigma_theta;
    BuiltMachine m = build_machine(std::move(c));
    report = delete_report(m.spec, m.desc, grid);
  } else {
    if (opt.cloner_kind.empty()) throw std::invalid_argument("pipeline requires --cloner");
    MachineConfig cc;
    cc.kind = opt.cloner_kind;
    if (opt.xi) cc.xi = opt.xi;
    MachineConfig dc = load_config(opt.deleter_kind, opt.params_path);
    if (opt.sigma_theta) dc.sigma_theta = opt.sigma_theta;
    BuiltMachine cloner = build_machine(std::move(cc));
    BuiltMachine deleter = build_machine(std::move(dc));
    const GramConvention conv =
        opt.convention == "strict" ? GramConvention::strict : GramConvention::paper;
    report = pipeline_report(cloner.spec, deleter.spec, cloner.desc + " -> " + deleter.desc, conv,
                             grid);
  }

  std::string payload;
  if (opt.format == "csv") {
    payload = to_csv(report);
  } else {
    payload = to_json(report).dump(2) + "\n";
  }
  write_output(payload, opt.out_path, out);
  return kExitOk;
}

int cmd_validate(const std::string& kind_flag, const std::string& params_path,
                 std::optional<double> xi, std::optional<double> sigma_theta, std::ostream& out) {
  MachineConfig c = load_config(kind_flag, params_path);
  if (xi) c.xi = xi;
  if (sigma_theta) c.sigma_theta = sigma_theta;

  // Parameter constraints are reportable even when the build would fail.
  std::vector<NamedResidual> pre;
  MachineConfig filled = c;
  if (filled.kind == "imperfect" || filled.kind == "general" || filled.kind == "qiu") {
    require_all_or_none(filled);
    if (!filled.a0) {
      if (filled.kind == "qiu") {
        filled.a0 = cplx{1.0, 0.0};
        filled.b0 = cplx{0.0, 0.0};
        filled.a1 = cplx{1.0, 0.0};
        filled.b1 = cplx{0.0, 0.0};
      } else {
        fill_default_ab(filled);
      }
    }
  }
  if (filled.kind == "imperfect") {
    pre = imperfect_constraints(
        {*filled.a0, *filled.a1, *filled.b0, *filled.b1, filled.sigma_theta.value_or(0.0)});
  } else if (filled.kind == "general") {
    GeneralDeleterParams p;
    p.a0 = *filled.a0;
    p.a1 = *filled.a1;
    p.b0 = *filled.b0;
    p.b1 = *filled.b1;
    p.p0 = filled.p0.value_or(cplx{0.0, 0.0});
    p.p1 = filled.p1.value_or(cplx{0.0, 0.0});
    p.norm_a0 = filled.norm_a0;
    p.norm_a1 = filled.norm_a1;
    p.norm_b0 = filled.norm_b0.value_or(1.0);
    p.norm_b1 = filled.norm_b1.value_or(1.0);
    p.norm_c0 = filled.norm_c0.value_or(1.0);
    p.norm_c1 = filled.norm_c1.value_or(1.0);
    p.overlap_c1_b0 = filled.c1_b0.value_or(cplx{0.0, 0.0});
    p.overlap_b1_c0 = filled.b1_c0.value_or(cplx{0.0, 0.0});
    pre = general_constraints(p);
  } else if (filled.kind == "qiu") {
    pre = qiu_constraints(*filled.a0, *filled.b0, *filled.a1, *filled.b1);
  }

  BuiltMachine m = [&] {
    try {
      return build_machine(std::move(filled));
    } catch (const constraint_error&) {
      for (const auto& r : pre) {
        out << "constraint " << r.name << ": residual " << format_number(r.residual) << "\n";
      }
      out << "validation: FAIL\n";
      throw;
    }
  }();

  out << "machine: " << m.desc << "\n";
  const ValidationReport report = validate_machine(m.spec);
  for (const auto& r : report.constraints) {
    out << "constraint " << r.name << ": residual " << format_number(r.residual) << "\n";
  }
  out << "gram min eigenvalue: " << format_number(report.gram_min_eigenvalue) << "\n";
  out << "max isometry residual: " << format_number(report.max_isometry_residual) << "\n";
  for (const auto& [key, value] : m.spec.meta) {
    out << key << " = " << format_number(value) << "\n";
  }
  out << "validation: " << (report.passed ? "PASS" : "FAIL") << "\n";
  return report.passed ? kExitOk : kExitConstraint;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic simulator for qubit cloning and deleting machines"};
  app.require_subcommand(1);

  auto* rep = app.add_subcommand("reproduce",
                                 "Re-simulate the reference table and report deviations");
  std::string rep_format = "json", rep_out;
  rep->add_option("--format", rep_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  rep->add_option("--out", rep_out, "Write output to this path instead of stdout");

  auto* run = app.add_subcommand("run", "Evaluate a scenario over an alpha^2 grid");
  RunOptions opt;
  run->add_option("scenario", opt.scenario, "clone, delete, or pipeline")
      ->required()
      ->check(CLI::IsMember({"clone", "delete", "pipeline"}));
  run->add_option("--machine", opt.machine_kind, "Machine kind for clone/delete runs");
  run->add_option("--cloner", opt.cloner_kind, "Cloner kind for pipeline runs (wz or bh)");
  run->add_option("--deleter", opt.deleter_kind, "Deleter kind for pipeline runs");
  run->add_option("--params", opt.params_path,
                  "JSON machine config (configures the deleter in pipeline runs)");
  double xi_val = 0.0, st_val = 0.0, a2_val = 0.0;
  auto* xi_opt = run->add_option("--xi", xi_val, "Blank-spill norm for the bh cloner");
  auto* st_opt = run->add_option("--sigma-theta", st_val, "Standard-state angle");
  auto* a2_opt = run->add_option("--alpha2", a2_val, "Evaluate a single alpha^2 value");
  auto* grid_opt =
      run->add_option("--alpha2-grid", opt.grid_points, "Uniform grid size including endpoints")
          ->check(CLI::Range(1, 1000001));
  a2_opt->excludes(grid_opt);
  auto* conv_opt =
      run->add_option("--convention", opt.convention, "Ancilla bookkeeping for pipelines")
          ->check(CLI::IsMember({"strict", "paper"}));
  run->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--out", opt.out_path, "Write output to this path instead of stdout");

  auto* val = app.add_subcommand("validate", "Check machine constraints and output isometry");
  std::string val_kind, val_params;
  val->add_option("--machine", val_kind, "Machine kind");
  val->add_option("--params", val_params, "JSON machine config");
  double val_xi = 0.0, val_st = 0.0;
  auto* val_xi_opt = val->add_option("--xi", val_xi, "Blank-spill norm for the bh cloner");
  auto* val_st_opt = val->add_option("--sigma-theta", val_st, "Standard-state angle");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("qdel");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (rep->parsed()) return cmd_reproduce(rep_format, rep_out, out);
    if (run->parsed()) {
      if (xi_opt->count()) opt.xi = xi_val;
      if (st_opt->count()) opt.sigma_theta = st_val;
      if (a2_opt->count()) opt.alpha2 = a2_val;
      opt.convention_given = conv_opt->count() > 0;
      return cmd_run(opt, out, err);
    }
    return cmd_validate(val_kind, val_params, val_xi_opt->count() ? std::optional(val_xi) : std::nullopt,
                        val_st_opt->count() ? std::optional(val_st) : std::nullopt, out);
  } catch (const constraint_error& e) {
    err << "constraint violation: " << e.what() << "\n";
    return kExitConstraint;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace qdel
