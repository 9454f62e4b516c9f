#include <doctest.h>

#include <map>
#include <random>

#include "qdel/machines.hpp"
#include "test_support.hpp"

using namespace qdel;

namespace {

// Compares two machine tables term by term, mapping ancilla label names of
// the left machine through `rename` first.
bool tables_match(const MachineSpec& lhs, const MachineSpec& rhs,
                  const std::map<std::string, std::string>& rename, double tol = 1e-14) {
  if (lhs.table.size() != rhs.table.size()) return false;
  for (std::size_t i = 0; i < lhs.table.size(); ++i) {
    const auto& lt = lhs.table[i].terms();
    const auto& rt = rhs.table[i].terms();
    if (lt.size() != rt.size()) return false;
    for (std::size_t t = 0; t < lt.size(); ++t) {
      std::string lname = lhs.space->label(lt[t].ancilla);
      if (auto it = rename.find(lname); it != rename.end()) lname = it->second;
      if (lt[t].basis != rt[t].basis) return false;
      if (lname != rhs.space->label(rt[t].ancilla)) return false;
      if (std::abs(lt[t].amp - rt[t].amp) > tol) return false;
    }
  }
  return true;
}

const double kRoot3Half = std::sqrt(3.0) / 2.0;
const ImperfectDeleterParams kBalancedParams{kRoot3Half, cplx{0.0, 0.5}, cplx{0.0, 0.5},
                                             kRoot3Half, 0.0};

}  // namespace

TEST_CASE("wz machine table and validation") {
  const MachineSpec wz = wz_machine();
  CHECK(wz.in_arity == 1);
  CHECK(wz.out_arity == 2);

  const LabeledKet on_zero = apply_machine(wz, make_pure_state(1.0));
  REQUIRE(on_zero.terms().size() == 1);
  CHECK(on_zero.terms()[0].basis == 0);  // "00"
  CHECK(wz.space->label(on_zero.terms()[0].ancilla) == "Q0");
  CHECK(on_zero.terms()[0].amp == cplx{1.0, 0.0});

  const LabeledKet on_one = apply_machine(wz, make_pure_state(0.0));
  REQUIRE(on_one.terms().size() == 1);
  CHECK(on_one.terms()[0].basis == 3);  // "11"
  CHECK(wz.space->label(on_one.terms()[0].ancilla) == "Q1");

  const LabeledKet on_plus = apply_machine(wz, make_pure_state(0.5));
  REQUIRE(on_plus.terms().size() == 2);
  CHECK(on_plus.terms()[0].amp.real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(on_plus.terms()[1].amp.real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

  const ValidationReport report = validate_machine(wz);
  CHECK(report.passed);
  CHECK(report.max_isometry_residual == 0.0);
}

TEST_CASE("bh machine Gram, marginal, and PSD range") {
  SUBCASE("declared Gram at xi = 1/6") {
    const MachineSpec bh = bh_machine();
    const AncillaSpace& s = *bh.space;
    CHECK(s.overlap(s.index("Q0"), s.index("Q0")).real() == doctest::Approx(2.0 / 3.0));
    CHECK(s.overlap(s.index("Y0"), s.index("Y0")).real() == doctest::Approx(1.0 / 6.0));
    CHECK(s.overlap(s.index("Q0"), s.index("Y1")).real() == doctest::Approx(1.0 / 3.0));
    CHECK(s.overlap(s.index("Q1"), s.index("Y0")).real() == doctest::Approx(1.0 / 3.0));
    CHECK(std::abs(s.overlap(s.index("Q0"), s.index("Y0"))) == 0.0);
    CHECK(std::abs(s.overlap(s.index("Y0"), s.index("Y1"))) == 0.0);

    const ValidationReport report = validate_machine(bh);
    CHECK(report.passed);
    CHECK(report.max_isometry_residual < 1e-12);
  }
  SUBCASE("balanced-input marginal carries the eta off-diagonal") {
    const MachineSpec bh = bh_machine();
    const LabeledKet out = apply_machine(bh, make_pure_state(0.5));
    const int keep[] = {0};
    const DensityOperator rho = reduce_density(out, keep);
    CHECK(rho(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(rho(0, 1).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(rho(1, 0).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(rho(1, 1).real() == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("xi below the PSD floor is rejected naming the eigenvalue") {
    CHECK_THROWS_WITH_AS(bh_machine(0.1), doctest::Contains("eigenvalue"), constraint_error);
    CHECK_THROWS_AS(bh_machine(0.16), constraint_error);
    CHECK_THROWS_AS(bh_machine(-0.1), constraint_error);
  }
  SUBCASE("xi above 1/2 is rejected") {
    CHECK_THROWS_AS(bh_machine(0.51), constraint_error);
  }
  SUBCASE("PSD range endpoints and interior build") {
    CHECK_NOTHROW(bh_machine(1.0 / 6.0));
    CHECK_NOTHROW(bh_machine(0.25));
    CHECK_NOTHROW(bh_machine(0.5));
  }
}

TEST_CASE("pb machine leaves mixed basis states unchanged") {
  const MachineSpec pb = pb_delete_machine(sigma_state(0.0));
  const LabeledKet& row01 = pb.table[1];
  REQUIRE(row01.terms().size() == 1);
  CHECK(row01.terms()[0].basis == 1);
  CHECK(pb.space->label(row01.terms()[0].ancilla) == "A");
  CHECK(validate_machine(pb).passed);

  // Validation holds across the whole standard-state family.
  CHECK(validate_machine(pb_delete_machine(sigma_state(1.1))).passed);
  CHECK(validate_machine(pb_delete_machine(sigma_state(-0.3))).passed);
}

TEST_CASE("imperfect machine with identity choice coincides with the pb table") {
  const MachineSpec imp =
      imperfect_delete_machine(ImperfectDeleterParams{1.0, 0.0, 0.0, 1.0, 0.35});
  const MachineSpec pb = pb_delete_machine(sigma_state(0.35));
  CHECK(tables_match(imp, pb, {{"Q", "A"}}));
}

TEST_CASE("imperfect machine meta for the balanced parameter set") {
  const MachineSpec imp = imperfect_delete_machine(kBalancedParams);
  CHECK(imp.meta_value("gg*") == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(imp.meta_value("hh*") == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(imp.meta_value("k") == doctest::Approx(0.0));
  CHECK(imp.meta_value("k1") == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(validate_machine(imp).passed);
}

TEST_CASE("rotation chart hits the requested gg* and hh*") {
  SUBCASE("quarter-turn extreme") {
    const double t = M_PI / 4.0;
    const MachineSpec imp = imperfect_delete_machine(
        ImperfectDeleterParams{std::cos(t), -std::sin(t), std::sin(t), std::cos(t), 0.0});
    CHECK(imp.meta_value("gg*") == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(imp.meta_value("hh*") == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("delta parameterization") {
    for (const double delta : {-1.0, -0.4, 0.0, 0.7, 1.0}) {
      const MachineSpec imp = imperfect_delete_machine(rotation_chart(delta, 0.2));
      CHECK(imp.meta_value("gg*") == doctest::Approx(1.0 + delta).epsilon(1e-13));
      CHECK(imp.meta_value("hh*") == doctest::Approx(1.0 - delta).epsilon(1e-13));
      CHECK(validate_machine(imp).passed);
    }
    CHECK_THROWS_AS(rotation_chart(1.2, 0.0), std::domain_error);
    CHECK_THROWS_AS(rotation_chart(-1.01, 0.0), std::domain_error);
  }
}

TEST_CASE("imperfect machine rejects the symmetric constraint violation") {
  const double r = 1.0 / std::sqrt(2.0);
  const ImperfectDeleterParams bad{r, r, r, r, 0.0};
  CHECK_THROWS_WITH_AS(imperfect_delete_machine(bad),
                       doctest::Contains("a0*conj(a1) + b0*conj(b1) = 0"), constraint_error);

  const auto residuals = imperfect_constraints(bad);
  bool found = false;
  for (const auto& c : residuals) {
    if (c.name == "a0*conj(a1) + b0*conj(b1) = 0") {
      found = true;
      CHECK(c.residual == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  CHECK(found);

  CHECK_THROWS_WITH_AS(
      imperfect_delete_machine(ImperfectDeleterParams{0.9, 0.0, 0.0, 1.0, 0.0}),
      doctest::Contains("|a0|^2 + |b0|^2 = 1"), constraint_error);
}

TEST_CASE("gg* + hh* = 2 for random admissible parameters") {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const ImperfectDeleterParams p = test::random_imperfect_params(rng);
    const double gg = std::norm(p.a0 + p.a1);
    const double hh = std::norm(p.b0 + p.b1);
    CHECK(std::abs(gg + hh - 2.0) < 1e-12);
    CHECK(validate_machine(imperfect_delete_machine(p)).passed);
  }
}

TEST_CASE("machine application is linear") {
  std::mt19937 rng(101);
  std::normal_distribution<double> g;
  const MachineSpec machines[] = {bh_machine(0.3), imperfect_delete_machine(kBalancedParams)};
  for (const MachineSpec& m : machines) {
    const std::size_t n = std::size_t{1} << m.in_arity;
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<cplx> u(n), v(n), combo(n);
      const cplx a{g(rng), g(rng)}, b{g(rng), g(rng)};
      for (std::size_t i = 0; i < n; ++i) {
        u[i] = cplx(g(rng), g(rng));
        v[i] = cplx(g(rng), g(rng));
        combo[i] = a * u[i] + b * v[i];
      }
      const LabeledKet lhs = apply_machine(m, combo);
      const LabeledKet rhs = a * apply_machine(m, u) + b * apply_machine(m, v);
      const LabeledKet diff = lhs + cplx{-1.0, 0.0} * rhs;
      CHECK(std::sqrt(std::abs(diff.squared_norm())) < 1e-12);
    }
  }
}

TEST_CASE("general machine reduces to the imperfect and pb tables") {
  SUBCASE("p = 0 with the balanced parameters reproduces the imperfect table") {
    GeneralDeleterParams p;
    p.a0 = kBalancedParams.a0;
    p.a1 = kBalancedParams.a1;
    p.b0 = kBalancedParams.b0;
    p.b1 = kBalancedParams.b1;
    p.p0 = p.p1 = 0.0;
    const MachineSpec gen = general_delete_machine(p, sigma_state(0.0));
    const MachineSpec imp = imperfect_delete_machine(kBalancedParams);
    CHECK(tables_match(gen, imp, {}));
    CHECK(gen.meta_value("<A0|A0>") == doctest::Approx(1.0));
    CHECK(gen.meta_value("<A1|A1>") == doctest::Approx(1.0));
  }
  SUBCASE("double reduction to the pb table") {
    GeneralDeleterParams p;
    p.a0 = 1.0;
    p.a1 = 0.0;
    p.b0 = 0.0;
    p.b1 = 1.0;
    p.p0 = p.p1 = 0.0;
    const MachineSpec gen = general_delete_machine(p, sigma_state(0.4));
    const MachineSpec pb = pb_delete_machine(sigma_state(0.4));
    CHECK(tables_match(gen, pb, {{"Q", "A"}}));
  }
}

TEST_CASE("general machine solves the norm balance for the A labels") {
  GeneralDeleterParams p;
  p.a0 = 1.0;
  p.a1 = 0.0;
  p.b0 = 0.0;
  p.b1 = 1.0;
  p.p0 = 0.5;
  p.p1 = 0.5;
  const MachineSpec gen = general_delete_machine(p, sigma_state(0.0));
  CHECK(gen.meta_value("<A0|A0>") == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(gen.meta_value("<A1|A1>") == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(validate_machine(gen).passed);

  // A declared norm that breaks the balance is rejected by name.
  GeneralDeleterParams bad = p;
  bad.norm_a0 = 1.0;
  CHECK_THROWS_WITH_AS(general_delete_machine(bad, sigma_state(0.0)),
                       doctest::Contains("|p0|^2<B0|B0> + |p1|^2<C0|C0> = 1 - <A0|A0>"),
                       constraint_error);
}

TEST_CASE("general machine accepts balanced cross overlaps") {
  GeneralDeleterParams p;
  p.a0 = 1.0;
  p.a1 = 0.0;
  p.b0 = 0.0;
  p.b1 = 1.0;
  p.p0 = 0.5;
  p.p1 = 0.5;
  p.overlap_c1_b0 = cplx{0.07, 0.02};
  p.overlap_b1_c0 = cplx{-0.07, -0.02};
  const MachineSpec gen = general_delete_machine(p, sigma_state(0.9));
  CHECK(validate_machine(gen).passed);

  GeneralDeleterParams bad = p;
  bad.overlap_b1_c0 = cplx{0.07, 0.02};  // now the balance fails
  CHECK_THROWS_WITH_AS(general_delete_machine(bad, sigma_state(0.9)),
                       doctest::Contains("p0*conj(p1)*<C1|B0> + conj(p0)*p1*<B1|C0> = 0"),
                       constraint_error);
}

TEST_CASE("general machine rejects a forced-negative ancilla norm") {
  GeneralDeleterParams p;
  p.a0 = 1.0;
  p.a1 = 0.0;
  p.b0 = 0.0;
  p.b1 = 1.0;
  p.p0 = 0.9;
  p.p1 = 0.8;
  CHECK_THROWS_AS(general_delete_machine(p, sigma_state(0.0)), constraint_error);
}

TEST_CASE("qiu machine structure under the retention convention") {
  SUBCASE("degenerate parameters give the collapse table") {
    const MachineSpec q = qiu_machine(1.0, 0.0, 1.0, 0.0);
    REQUIRE(q.table[0].terms().size() == 1);
    CHECK(q.table[0].terms()[0].basis == 0);  // |00>
    CHECK(q.space->label(q.table[0].terms()[0].ancilla) == "A0");
    REQUIRE(q.table[3].terms().size() == 1);
    CHECK(q.table[3].terms()[0].basis == 3);  // |11>
    CHECK(q.space->label(q.table[3].terms()[0].ancilla) == "A1");
    CHECK(validate_machine(q).passed);
  }
  SUBCASE("mixed basis rows retain the unchanged ancilla") {
    const MachineSpec q = qiu_machine(0.6, 0.8, 0.8, -0.6);
    REQUIRE(q.table[1].terms().size() == 1);
    CHECK(q.table[1].terms()[0].basis == 1);  // |01>
    CHECK(q.space->label(q.table[1].terms()[0].ancilla) == "Q");
    CHECK(q.table[1].terms()[0].amp == cplx{1.0, 0.0});
  }
  SUBCASE("random unit parameters stay isometric") {
    std::mt19937 rng(55);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
      cplx a(g(rng), g(rng)), b(g(rng), g(rng));
      const double n = std::sqrt(std::norm(a) + std::norm(b));
      a /= n;
      b /= n;
      cplx a2(g(rng), g(rng)), b2(g(rng), g(rng));
      const double n2 = std::sqrt(std::norm(a2) + std::norm(b2));
      a2 /= n2;
      b2 /= n2;
      CHECK(validate_machine(qiu_machine(a, b, a2, b2)).passed);
    }
  }
  SUBCASE("norm violation is rejected") {
    CHECK_THROWS_WITH_AS(qiu_machine(1.0, 1.0, 1.0, 0.0), doctest::Contains("|a0|^2 + |b0|^2 = 1"),
                         constraint_error);
  }
}

TEST_CASE("validate_machine reports a broken hand-assembled table") {
  // Both middle rows map to the same superposition, so <out_01|out_10> = 1.
  const double r = 1.0 / std::sqrt(2.0);
  MachineSpec m;
  m.name = "broken";
  m.in_arity = 2;
  m.out_arity = 2;
  m.space = std::make_shared<AncillaSpace>(std::vector<std::string>{"Q", "A0", "A1"},
                                           Eigen::MatrixXcd::Identity(3, 3));
  m.sigma = sigma_state(0.0);
  m.table = {LabeledKet(2, m.space, {{"00", "A0", cplx{1.0, 0.0}}}),
             LabeledKet(2, m.space, {{"01", "Q", r}, {"10", "Q", r}}),
             LabeledKet(2, m.space, {{"01", "Q", r}, {"10", "Q", r}}),
             LabeledKet(2, m.space, {{"11", "A1", cplx{1.0, 0.0}}})};
  m.paper_label_norms = {1.0, 1.0, 1.0};
  const ValidationReport report = validate_machine(m);
  CHECK_FALSE(report.passed);
  CHECK(report.pair_residuals[1][2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(report.max_isometry_residual == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("apply_machine guards input shapes") {
  const MachineSpec wz = wz_machine();
  const std::vector<cplx> wrong(4, cplx{0.5, 0.0});
  CHECK_THROWS_AS(apply_machine(wz, std::span<const cplx>(wrong)), std::invalid_argument);
  CHECK_THROWS_AS(apply_machine_to_pair(wz, make_pure_state(0.5)), std::invalid_argument);
  const MachineSpec pb = pb_delete_machine(sigma_state(0.0));
  CHECK_THROWS_AS(apply_machine(pb, make_pure_state(0.5)), std::invalid_argument);
}
