#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "nsda/errors.hpp"
#include "nsda/filter.hpp"

using namespace nsda;
using namespace testing;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

FilterSpec modal_filter(double lam, double lam_obs) { return {lam, {ModalProjection{lam_obs}, 1.0}}; }

FilterSpec voronoi_filter(const Grid& g, double lam, int m, std::optional<double> c1 = std::nullopt) {
  return {lam, {NodalVoronoi{regular_lattice(g, m)}, c1}};
}

double top_lambda(const Grid& g) { return std::pow(g.k0() * g.n() / 3.0, 2); }

double vdiff(const SpectralVelocity& a, const SpectralVelocity& b) {
  return std::max(max_abs_diff(a.u1(), b.u1()), max_abs_diff(a.u2(), b.u2()));
}

AssimilationConfig small_run(const Grid& g, FilterSpec f) {
  AssimilationConfig c{SolverParams{0.05, g, 0.01, Dealias::TwoThirds, ForcingSpec::low_mode(0.3)}, std::move(f)};
  c.delta = 0.1;
  c.horizon = 2.0;
  c.spinup = 1.0;
  c.seed = 5;
  c.audit_ensemble = 16;
  c.c1_ensemble = 32;
  return c;
}

}  // namespace

TEST_SUITE("filter") {

TEST_CASE("epsilon formulas") {
  CHECK(epsilon_type1(1.0, 100.0, 0.01) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(epsilon_type2(1.0, 100.0, 0.01, 1.0) == doctest::Approx(1.0001).epsilon(1e-15));
  double prev1 = 0.0, prev2 = 0.0;
  for (double h = 0.5; h > 1e-4; h *= 0.5) {
    const double e1 = epsilon_type1(0.7, 30.0, h), e2 = epsilon_type2(0.7, 30.0, h, 1.0);
    if (prev1 > 0.0) {
      CHECK(e1 < prev1);
      CHECK(e2 < prev2);
    }
    prev1 = e1;
    prev2 = e2;
  }
  CHECK(prev1 < 1e-5);
  CHECK(prev2 < 1e-4);
}

TEST_CASE("filter spec validation") {
  const Grid g(32, kTwoPi);
  CHECK_THROWS_AS(modal_filter(0.5, 4.0).validate(g), ConfigError);
  CHECK_THROWS_AS(modal_filter(top_lambda(g) * 1.01, 4.0).validate(g), ConfigError);
  CHECK_NOTHROW(modal_filter(top_lambda(g), 4.0).validate(g));
}

TEST_CASE("orthogonal case: J = P_lambda") {
  const Grid g(32, kTwoPi);
  const Filter F(modal_filter(20.0, 20.0), g);
  const SpectralVelocity u = random_velocity(g, 1);
  const SpectralVelocity ju = F.J(u);
  CHECK(vdiff(ju, project_low(u, 20.0)) < 1e-15);
  CHECK(vdiff(F.J(ju), ju) < 1e-15);
  const SpectralVelocity eu = F.E(u);
  CHECK(vdiff(eu, project_high(u, 20.0)) < 1e-15);
  CHECK(vdiff(F.E(eu), eu) < 1e-15);
  SUBCASE("self-adjoint") {
    for (unsigned s = 0; s < 10; ++s) {
      const SpectralVelocity a = random_velocity(g, 20 + s), b = random_velocity(g, 40 + s);
      CHECK(std::abs(inner(F.J(a), b) - inner(a, F.J(b))) < 1e-12 * norm_alpha(a, 0.0) * norm_alpha(b, 0.0));
    }
  }
}

TEST_CASE("full information gives E = 0") {
  const Grid g(32, kTwoPi);
  const double top = top_lambda(g);
  const Filter F(modal_filter(top, g.max_k2()), g);
  const SpectralVelocity u = project_low(random_velocity(g, 2), top);
  CHECK(max_abs(F.E(u).u1()) < 1e-15);
  CHECK(max_abs(F.E(u).u2()) < 1e-15);
}

TEST_CASE("J output is band-limited, divergence-free and mean-zero") {
  const Grid g(32, kTwoPi);
  const double lam = 10.0;
  const Filter F(voronoi_filter(g, lam, 8), g);
  const SpectralVelocity u = project_high(random_velocity(g, 3), lam);
  const SpectralVelocity ju = F.J(u);
  CHECK(norm_alpha(ju, 0.0) > 0.0);  // aliasing spills the high modes down
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g.k2(idx) > lam) {
      CHECK(ju.u1()[idx] == cplx(0.0, 0.0));
      CHECK(ju.u2()[idx] == cplx(0.0, 0.0));
    }
  }
  const auto d = invariant_defects(ju);
  CHECK(d.divergence < 1e-15);
  CHECK(d.mean == 0.0);
}

TEST_CASE("J + E = I and linearity") {
  const Grid g(32, kTwoPi);
  for (const auto& spec : {modal_filter(9.0, 16.0), voronoi_filter(g, 16.0, 8), FilterSpec{16.0, {VolumeElements{8}, 1.0}}}) {
    const Filter F(spec, g);
    for (unsigned s = 0; s < 5; ++s) {
      const SpectralVelocity u = random_velocity(g, 60 + s), v = random_velocity(g, 70 + s);
      const double scale = max_abs(u.u1()) + max_abs(u.u2());
      CHECK(vdiff(F.J(u) + F.E(u), u) < 1e-15 * scale);
      const SpectralVelocity lhs = F.J(2.5 * u - v);
      const SpectralVelocity rhs = 2.5 * F.J(u) - F.J(v);
      CHECK(vdiff(lhs, rhs) < 1e-12 * (scale + max_abs(v.u1()) + max_abs(v.u2())));
      CHECK(vdiff(F.E(2.5 * u - v), 2.5 * F.E(u) - F.E(v)) < 1e-12 * (scale + max_abs(v.u1()) + max_abs(v.u2())));
    }
  }
  CHECK(apply_J(modal_filter(9.0, 9.0), random_velocity(g, 1)) == Filter(modal_filter(9.0, 9.0), g).J(random_velocity(g, 1)));
}

TEST_CASE("audit of the E-bounds") {
  const Grid g(32, kTwoPi);
  CHECK_THROWS_AS(audit_E(voronoi_filter(g, 9.0, 8), 16, 1, g), ConfigError);

  SUBCASE("orthogonal case has ratio at most one") {
    const AuditReport r = audit_E(modal_filter(16.0, 16.0), 64, 1, g);
    CHECK(r.passed);
    REQUIRE(r.checks.size() == 5);
    for (const auto& c : r.checks) CHECK(c.worst_ratio <= 1.0 + 1e-14);
    CHECK(r.epsilon_I == doctest::Approx(1.0));
  }
  SUBCASE("voronoi with the certified c1 passes the type-II bounds") {
    FilterSpec f = voronoi_filter(g, 9.0, 16);
    f.interpolant.c1 = estimate_c1(f.interpolant, 64, 2, g).c1;
    const AuditReport r = audit_E(f, 64, 2, g);
    CHECK(r.type == InterpolantType::II);
    CHECK(r.checks.size() == 3);
    CHECK(r.passed);
  }
  SUBCASE("an understated c1 fails and blocks assimilation") {
    FilterSpec f = voronoi_filter(g, 9.0, 4, 1e-9);
    const AuditReport r = audit_E(f, 32, 3, g);
    CHECK_FALSE(r.passed);
    for (const auto& c : r.checks) CHECK(std::isfinite(c.worst_ratio));
    AssimilationConfig c = small_run(g, f);
    CHECK_THROWS_AS(run_assimilation(c), AuditError);
    c.override_audit = true;
    c.horizon = 0.2;
    CHECK_NOTHROW(run_assimilation(c));
  }
}

TEST_CASE("assimilation step") {
  const Grid g(32, kTwoPi);
  const SolverParams p{0.05, g, 0.01, Dealias::TwoThirds, ForcingSpec::low_mode(0.3)};
  const SpectralVelocity U0 = random_velocity(g, 8);
  const SpectralVelocity U1 = semi_process(U0, 0.0, 0.1, p);
  const double scale = max_abs(U1.u1()) + max_abs(U1.u2());
  SUBCASE("exact data is a fixed point") {
    const Filter F(voronoi_filter(g, 9.0, 8, 0.5), g);
    const SpectralVelocity u1 = assimilation_step(F, U0, U1, p, 0.0, 0.1);
    CHECK(vdiff(u1, U1) == 0.0);
  }
  SUBCASE("full information replaces the whole observed band") {
    // The square dealiasing band reaches past the largest admissible
    // lambda, so only the disc |k|^2 <= lambda is taken from the data.
    const double top = top_lambda(g);
    const Filter F(modal_filter(top, g.max_k2()), g);
    const SpectralVelocity u0 = random_velocity(g, 99);
    const SpectralVelocity u1 = assimilation_step(F, u0, U1, p, 0.0, 0.1);
    CHECK(vdiff(project_low(u1, top), project_low(U1, top)) < 1e-15 * scale);
    CHECK(vdiff(project_high(u1, top), project_high(semi_process(u0, 0.0, 0.1, p), top)) == 0.0);
  }
}

TEST_CASE("run_assimilation") {
  const Grid g(32, kTwoPi);
  SUBCASE("exact start stays synchronized") {
    AssimilationConfig c = small_run(g, voronoi_filter(g, 9.0, 8));
    c.exact_start = true;
    const AssimilationResult r = run_assimilation(c);
    REQUIRE(r.c1_estimate.has_value());
    for (const auto& row : r.series.rows) {
      CHECK(row.err_L2 == 0.0);
      CHECK(row.err_H1 == 0.0);
      CHECK(row.err_H2 == 0.0);
    }
    CHECK(r.approx.omega == r.truth.omega);
  }
  SUBCASE("series layout") {
    AssimilationConfig c = small_run(g, modal_filter(9.0, 9.0));
    const AssimilationResult r = run_assimilation(c);
    CHECK(r.series.rows.size() == 201);
    CHECK(r.series.insertions.size() == 20);
    CHECK(r.series.rows.front().t == 0.0);
    CHECK(r.series.rows.back().t == doctest::Approx(2.0).epsilon(1e-14));
    for (std::size_t i = 1; i < r.series.rows.size(); ++i) CHECK(r.series.rows[i].t > r.series.rows[i - 1].t);
    for (const auto& row : r.series.rows) CHECK(poincare_chain_holds(row, g.lambda1()));
    // Orthogonal insertion only removes low-mode error.
    for (const auto& ins : r.series.insertions) CHECK(ins.post_L2 <= ins.pre_L2);
    CHECK(r.truth.t == doctest::Approx(2.0));
    CHECK(r.approx.t == doctest::Approx(2.0));
    CHECK(r.series.rows.front().err_L2 > 0.0);
    CHECK(r.series.rows.back().err_L2 < r.series.rows.front().err_L2);
  }
  SUBCASE("cold start is u0 = J U(t0)") {
    AssimilationConfig c = small_run(g, modal_filter(9.0, 9.0));
    c.horizon = 0.1;
    const AssimilationResult r = run_assimilation(c);
    // Error at t0 is exactly the unobserved part Q_9 U(t0).
    State truth{-1.0, initial_vorticity(g, c.init, c.seed)};
    advance(truth, c.solver, 100);
    const double expect = norm_alpha(project_high(curl_inv(truth.omega), 9.0), 0.0);
    CHECK(rel_diff(r.series.rows.front().err_L2, expect) < 1e-12);
  }
  SUBCASE("configuration checks") {
    AssimilationConfig c = small_run(g, modal_filter(9.0, 9.0));
    c.delta = 0.015;
    CHECK_THROWS_AS(run_assimilation(c), ConfigError);
    c.delta = 0.1;
    c.horizon = 0.25;
    CHECK_THROWS_AS(run_assimilation(c), ConfigError);
  }
}

TEST_CASE("contraction factor and sweep summary") {
  ErrorSeries s;
  for (int i = 0; i <= 40; ++i) s.rows.push_back({0.1 * i, std::exp(-0.5 * 0.1 * i), 1, 1, 1, 1});
  for (int n = 1; n <= 4; ++n) s.insertions.push_back({n, 1.0 * n, 0, std::pow(0.5, n), 0, 0, 0, 0});
  CHECK(contraction_factor(s) == doctest::Approx(0.5).epsilon(1e-14));
  const SweepEntry e = summarize_sweep_run(1.0, s);
  CHECK(e.contracting);
  CHECK(e.fit.alpha == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(e.terminal_ratio == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));

  ErrorSeries flat = s;
  for (auto& r : flat.rows) r.err_L2 = 1.0 + 0.3 * std::sin(7.0 * r.t);
  CHECK_FALSE(summarize_sweep_run(1.0, flat).contracting);
}

}  // TEST_SUITE
