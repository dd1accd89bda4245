#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <doctest.h>

#include "stackcap/core.hpp"
#include "stackcap/errors.hpp"
#include "stackcap/pnp.hpp"

using namespace stackcap;
using namespace stackcap::pnp;

namespace {
const ElectrolyteSpec kSym(1, -1);

GridSpec uniform_spec(std::size_t cells) {
  GridSpec s;
  s.kind = GridSpec::Kind::Uniform;
  s.uniform_cells = cells;
  return s;
}
}  // namespace

TEST_CASE("refined grid is symmetric with every stack a node") {
  const StackGeometry geom(5, 0.5);
  const double eps = 0.02;
  const auto grid = build_grid(geom, eps);

  const std::size_t N = grid.size();
  CHECK(grid.x[grid.center_index] == 0.0);
  for (std::size_t i = 0; i < N; ++i) CHECK(grid.x[i] == -grid.x[N - 1 - i]);

  REQUIRE(grid.stack_index.size() == 10);
  for (int k = 1; k <= 5; ++k) {
    CHECK(grid.x[grid.stack_index[static_cast<std::size_t>(4 + k)]] == geom.position(k));
    CHECK(grid.x[grid.stack_index[static_cast<std::size_t>(5 - k)]] == -geom.position(k));
  }

  double wsum = 0.0;
  for (double w : grid.w) {
    CHECK(w > 0.0);
    wsum += w;
  }
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-12));

  // Boundary-layer resolution: several nodes within one Debye length of each
  // stack, and a first spacing comparable to layer_dx * epsilon.
  for (std::size_t s : grid.stack_index) {
    int close = 0;
    for (double x : grid.x)
      if (std::abs(x - grid.x[s]) <= eps) ++close;
    CHECK(close >= 8);
    double adj = grid.dx[std::min(s, N - 2)];
    if (s > 0) adj = std::min(adj, grid.dx[s - 1]);
    CHECK(adj <= 2.0 * 0.05 * eps);
  }
}

TEST_CASE("uniform grids are uniform and nest under doubling") {
  const StackGeometry geom(2, 0.5);
  const auto coarse = build_grid(geom, 0.05, uniform_spec(400));
  const auto fine = build_grid(geom, 0.05, uniform_spec(800));
  REQUIRE(coarse.size() == 401);
  REQUIRE(fine.size() == 801);

  const auto spacing = [](const Grid1D& g) {
    auto [lo, hi] = std::minmax_element(g.dx.begin(), g.dx.end());
    return std::pair<double, double>(*lo, *hi);
  };
  const auto [clo, chi] = spacing(coarse);
  CHECK(chi - clo <= 1e-12);
  CHECK(chi == doctest::Approx(0.005).epsilon(1e-12));
  for (std::size_t i = 0; i < coarse.size(); ++i)
    CHECK(std::abs(coarse.x[i] - fine.x[2 * i]) <= 1e-12);
}

TEST_CASE("grid construction validates its inputs") {
  const StackGeometry geom(2, 0.5);
  CHECK_THROWS_AS(build_grid(geom, 0.0), ParameterError);
  CHECK_THROWS_AS(build_grid(geom, 1.0), ParameterError);
  CHECK_THROWS_AS(build_grid(geom, 0.05, uniform_spec(2)), ParameterError);
  GridSpec bad;
  bad.growth = 0.9;
  CHECK_THROWS_AS(build_grid(geom, 0.05, bad), ParameterError);
  bad = GridSpec{};
  bad.layer_dx = 0.0;
  CHECK_THROWS_AS(build_grid(geom, 0.05, bad), ParameterError);
}

TEST_CASE("Poisson solve reproduces a manufactured solution at second order") {
  // With rho = eps^2 pi^2 sin(pi x) the exact potential on [-1, 1] with
  // grounded walls is phi = sin(pi x). Realize rho via c+ = 3 + rho, c- = 3.
  const StackGeometry geom(1, 1.0);
  const double eps = 0.5;
  const auto err_at = [&](std::size_t cells) {
    const auto g = build_grid(geom, eps, uniform_spec(cells));
    std::vector<double> cp(g.size()), cm(g.size(), 3.0);
    for (std::size_t j = 0; j < g.size(); ++j)
      cp[j] = 3.0 + eps * eps * M_PI * M_PI * std::sin(M_PI * g.x[j]);
    const auto phi = solve_poisson(cp, cm, g, {0.0, 0.0}, kSym);
    double e = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
      e = std::max(e, std::abs(phi[j] - std::sin(M_PI * g.x[j])));
    return e;
  };
  const double e400 = err_at(400);
  const double e800 = err_at(800);
  CHECK(e400 <= 2e-3);
  CHECK(e400 / e800 >= 3.5);  // ~4 for a second-order scheme
}

TEST_CASE("Poisson solve pins stack nodes to the drive exactly") {
  const StackGeometry geom(3, 0.4);
  const auto g = build_grid(geom, 0.05);
  const std::vector<double> ones(g.size(), 1.0);
  const auto phi = solve_poisson(ones, ones, g, {0.37, -0.11}, kSym);
  // Neutral charge: piecewise-linear potential, flat on each electrode side.
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(phi[g.stack_index[i]] == -0.11);
    CHECK(phi[g.stack_index[3 + i]] == 0.37);
  }
  CHECK(phi[g.center_index] == doctest::Approx(0.5 * (0.37 - 0.11)).epsilon(1e-12));
  for (std::size_t j = 0; j < g.stack_index[2]; ++j)
    CHECK(phi[j] == doctest::Approx(-0.11).epsilon(1e-12));
}

TEST_CASE("neutral state with zero drive is stationary") {
  const auto g = build_grid(StackGeometry(2, 0.5), 0.05);
  FieldState s;
  s.c_plus.assign(g.size(), 1.0);
  s.c_minus.assign(g.size(), 1.0);
  s.phi = solve_poisson(s.c_plus, s.c_minus, g, {0.0, 0.0}, kSym);
  const auto next = step(s, 0.1, g, {0.0, 0.0}, kSym);
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(std::abs(next.c_plus[j] - 1.0) <= 1e-12);
    CHECK(std::abs(next.c_minus[j] - 1.0) <= 1e-12);
    CHECK(std::abs(next.phi[j]) <= 1e-12);
  }
  CHECK(next.time == doctest::Approx(0.1));
}

TEST_CASE("charging run conserves mass and mirror symmetry") {
  RunOptions opt;
  opt.dt = 0.05;
  opt.t_final = 1.0;
  const auto res = run(StackGeometry(1, 1.0), {0.5, -0.5}, kSym, 0.05, opt);
  const auto& d = res.diagnostics;
  REQUIRE(!d.times.empty());
  CHECK(d.times.front() == 0.0);
  for (std::size_t k = 0; k < d.times.size(); ++k) {
    CHECK(std::abs(d.mass_plus[k] - d.mass_plus[0]) <= 1e-11);
    CHECK(std::abs(d.mass_minus[k] - d.mass_minus[0]) <= 1e-11);
  }
  // 1:1 salt, antisymmetric drive: c+(x) = c-(-x) and phi odd.
  const auto& s = res.snapshots.back();
  const std::size_t N = res.grid.size();
  for (std::size_t j = 0; j < N; ++j) {
    CHECK(std::abs(s.c_plus[j] - s.c_minus[N - 1 - j]) <= 1e-10);
    CHECK(std::abs(s.phi[j] + s.phi[N - 1 - j]) <= 1e-10);
  }
  // The two half-cell charges balance exactly for this symmetry.
  for (std::size_t k = 0; k < d.times.size(); ++k) {
    REQUIRE(d.stack_charge[k].size() == 2);
    CHECK(std::abs(d.stack_charge[k][0] + d.stack_charge[k][1]) <= 1e-8);
  }
  // The recorded charge is the solution-side diffuse charge, so the half-cell
  // facing the positive electrode carries the anion excess (negative).
  CHECK(d.stack_charge.back()[1] < -1e-3);
  CHECK(d.center_salt.front() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("run hits requested output times exactly") {
  RunOptions opt;
  opt.dt = 0.125;
  opt.t_final = 1.0;
  opt.output_times = {0.3, 0.7, 1.0};
  const auto res = run(StackGeometry(1, 1.0), {0.2, -0.2}, kSym, 0.05, opt);
  REQUIRE(res.snapshots.size() == 3);
  CHECK(res.snapshots[0].time == 0.3);
  CHECK(res.snapshots[1].time == 0.7);
  CHECK(res.snapshots[2].time == 1.0);
}

TEST_CASE("charge relaxation curve starts at one and decays") {
  RunOptions opt;
  opt.dt = 0.1;
  opt.t_final = 8.0;
  const auto res = run(StackGeometry(1, 1.0), {0.3, -0.3}, kSym, 0.05, opt);
  const auto r = charge_relaxation(res.diagnostics, 1);
  REQUIRE(r.size() == res.diagnostics.times.size());
  CHECK(r.front() == 1.0);
  CHECK(std::abs(r.back()) <= 0.05);
  CHECK(r[r.size() / 2] < 0.5);
  CHECK_THROWS_AS(charge_relaxation(res.diagnostics, 7), ParameterError);
}

TEST_CASE("relaxation normalization rejects an uncharged run") {
  RunOptions opt;
  opt.dt = 0.5;
  opt.t_final = 1.0;
  const auto res = run(StackGeometry(1, 1.0), {0.0, 0.0}, kSym, 0.05, opt);
  CHECK_THROWS_AS(charge_relaxation(res.diagnostics, 0), NumericError);
}

TEST_CASE("step validates inputs and guards stability") {
  const auto g = build_grid(StackGeometry(1, 1.0), 0.05);
  FieldState s;
  s.c_plus.assign(g.size(), 1.0);
  s.c_minus.assign(g.size(), 1.0);
  s.phi = solve_poisson(s.c_plus, s.c_minus, g, {0.0, 0.0}, kSym);
  CHECK_THROWS_AS(step(s, 0.0, g, {0.1, -0.1}, kSym), ParameterError);
  FieldState bad = s;
  bad.c_plus.pop_back();
  CHECK_THROWS_AS(step(bad, 0.1, g, {0.1, -0.1}, kSym), ParameterError);
  // An absurdly large drive and step must fail loudly (either the coupling
  // iteration stalls or positivity is lost), never return garbage silently.
  CHECK_THROWS_AS(step(s, 50.0, g, {40.0, -40.0}, kSym), NumericError);
}

TEST_CASE("run validates timing parameters") {
  CHECK_THROWS_AS(
      [&] {
        RunOptions opt;
        opt.dt = 0.0;
        return run(StackGeometry(1, 1.0), {0.1, -0.1}, kSym, 0.05, opt);
      }(),
      ParameterError);
  CHECK_THROWS_AS(
      [&] {
        RunOptions opt;
        opt.dt = 0.1;
        opt.t_final = 1.0;
        opt.output_times = {2.0};
        return run(StackGeometry(1, 1.0), {0.1, -0.1}, kSym, 0.05, opt);
      }(),
      ParameterError);
}
