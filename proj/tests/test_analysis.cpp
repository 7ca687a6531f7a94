#include <doctest.h>

#include <cmath>

#include "biasdyn/analysis.hpp"
#include "biasdyn/errors.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace biasdyn;
using namespace biasdyn::testing;

namespace {

template <typename T>
bool holds(const AgentFixedClass& c) {
  return std::holds_alternative<T>(c);
}

const std::vector<double> kFig1cR1{0.7, 0.3};
const std::vector<double> kFig1cR2{0.45, 0.55};

}  // namespace

TEST_CASE("fixed_point_residual") {
  SUBCASE("corner consensus") {
    Rng rng(1);
    const auto net = random_connected_graph(8, rng);
    const auto r = random_biases(8, 3, rng);
    for (double v : fixed_point_residual(corner_state(8, 3, 2), r, net)) CHECK(v == 0.0);
  }
  SUBCASE("decoupled pair") {
    const auto x = OpinionState::from_rows({{1, 0}, {0, 1}});
    const auto r = BiasSet::from_rows({{1, 0}, {0, 1}});
    for (double v : fixed_point_residual(x, r, Network(2, {{0, 1}}))) CHECK(v == 0.0);
  }
  SUBCASE("example configuration before its update") {
    const auto x = OpinionState::from_rows({{0.5, 0.5}, {0.8, 0.2}, {0.2, 0.8}});
    const auto r = BiasSet::from_rows({{0.6, 0.4}, {0.5, 0.5}, {0.5, 0.5}});
    const auto res = fixed_point_residual(x, r, Network(3, {{0, 1}, {0, 2}}));
    CHECK(res[0] == doctest::Approx(0.05).epsilon(1e-12));
  }
}

TEST_CASE("classify_fixed_agent") {
  SUBCASE("corner consensus with positive biases is balanced") {
    Rng rng(2);
    const auto net = random_connected_graph(10, rng);
    const auto r = random_biases(10, 3, rng, 0.0);
    const auto x = corner_state(10, 3, 0);
    for (std::size_t i = 0; i < 10; ++i) {
      const auto c = classify_fixed_agent(x, r, net, i, 1e-10);
      REQUIRE(holds<fixed_class::Balanced>(c));
      CHECK(std::get<fixed_class::Balanced>(c).balance_error < 1e-15);
    }
  }
  SUBCASE("opposed pair is decoupled") {
    const auto x = OpinionState::from_rows({{1, 0}, {0, 1}});
    const auto r = BiasSet::from_rows({{1, 0}, {0, 1}});
    const Network net(2, {{0, 1}});
    CHECK(holds<fixed_class::Decoupled>(classify_fixed_agent(x, r, net, 0, 1e-10)));
    CHECK(holds<fixed_class::Decoupled>(classify_fixed_agent(x, r, net, 1, 1e-10)));
  }
  SUBCASE("non-fixed agent reports its residual") {
    const auto x = OpinionState::from_rows({{0.5, 0.5}, {0.8, 0.2}, {0.2, 0.8}});
    const auto r = BiasSet::from_rows({{0.6, 0.4}, {0.5, 0.5}, {0.5, 0.5}});
    const auto c = classify_fixed_agent(x, r, Network(3, {{0, 1}, {0, 2}}), 0, 1e-10);
    REQUIRE(holds<fixed_class::NotFixed>(c));
    CHECK(std::get<fixed_class::NotFixed>(c).residual == doctest::Approx(0.05).epsilon(1e-12));
  }
  SUBCASE("bad index") {
    const auto x = OpinionState::from_rows({{1, 0}, {0, 1}});
    const auto r = BiasSet::from_rows({{1, 0}, {0, 1}});
    CHECK_THROWS_AS(classify_fixed_agent(x, r, Network(2, {{0, 1}}), 2, 1e-10), RangeError);
  }
}

TEST_CASE("recessive_set examples") {
  SUBCASE("shared strictly ordered bias keeps only the top") {
    const auto r = BiasSet::uniform(4, std::vector<double>{0.8, 0.09, 0.11});
    const auto p = recessive_set(r);
    CHECK(p.dominant == std::vector<std::size_t>{0});
    CHECK(p.recessive == std::vector<std::size_t>{1, 2});
  }
  SUBCASE("two opposed majorities share only the bottom option") {
    const auto r = BiasSet::from_rows({{0.8, 0.09, 0.11}, {0.11, 0.09, 0.8}, {0.8, 0.09, 0.11}});
    const auto p = recessive_set(r);
    CHECK(p.recessive == std::vector<std::size_t>{1});
    CHECK(p.dominant == std::vector<std::size_t>{0, 2});
    CHECK(brute_force_recessive(r) == p.recessive);
  }
  SUBCASE("crossed preferences leave nothing recessive") {
    const auto p = recessive_set(BiasSet::from_rows({{0.6, 0.4}, {0.4, 0.6}}));
    CHECK(p.recessive.empty());
    CHECK(p.dominant.size() == 2);
  }
  SUBCASE("ties and zero rows") {
    CHECK(recessive_set(BiasSet::from_rows({{0.5, 0.5, 0.1}})).recessive == std::vector<std::size_t>{2});
    CHECK(recessive_set(BiasSet::from_rows({{0.0, 0.0, 0.0}})).recessive.empty());
    CHECK(recessive_set(BiasSet::from_rows({{0.3}})).recessive.empty());
  }
}

TEST_CASE("recessive_set equals brute-force search and is maximal") {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = uniform_int(rng, 1, 8);
    const std::size_t k = uniform_int(rng, 1, 6);
    // Coarse values create ties, which exercise the >= closure rule.
    Matrix m(n, k);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < k; ++l) m(i, l) = static_cast<double>(uniform_int(rng, 0, 5)) / 5.0;
    }
    const BiasSet r(m);
    const auto p = recessive_set(r);
    CHECK(p.recessive == brute_force_recessive(r));
    CHECK(separates(r, p.recessive));
    for (std::size_t d : p.dominant) {
      auto bigger = p.recessive;
      bigger.push_back(d);
      CHECK_FALSE(separates(r, bigger));
    }
  }
}

TEST_CASE("lyapunov_value") {
  const AltPartition middle{{0, 2}, {1}};
  const auto uniform3 = OpinionState::from_rows({{1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
  CHECK(lyapunov_value(uniform3, middle) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(lyapunov_value(uniform3, AltPartition{{0, 1, 2}, {}}) == 0.0);
  const auto one = OpinionState::from_rows({{0.2, 0.3, 0.5}, {0, 1, 0}});
  CHECK(lyapunov_value(one, middle) == 1.0);
  CHECK_THROWS_AS(lyapunov_value(one, AltPartition{{0}, {1}}), ShapeError);
}

TEST_CASE("Lyapunov function decreases along trajectories with a recessive option") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = uniform_int(rng, 2, 20);
    const auto net = random_connected_graph(n, rng);
    // Option 2 is rated below 0.3 by everyone, the others above 0.4.
    Matrix m(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
      m(i, 0) = uniform(rng, 0.4, 1.0);
      m(i, 1) = uniform(rng, 0.0, 0.3);
      m(i, 2) = uniform(rng, 0.4, 1.0);
    }
    // Agents 0 and 1 disagree on options 0 and 2, so neither is recessive.
    m(0, 0) = 0.9, m(0, 2) = 0.5;
    m(1, 0) = 0.5, m(1, 2) = 0.9;
    const BiasSet r(m);
    const auto p = recessive_set(r);
    REQUIRE(p.recessive == std::vector<std::size_t>{1});
    const auto traj = run(random_state(n, 3, rng), r, net, {.max_steps = 20000, .tol = 1e-13});
    const auto report = check_lyapunov_decrease(traj, p);
    CHECK_FALSE(report.starts_at_one);
    CHECK_FALSE(report.first_violation.has_value());
    CHECK(report.values.back() < 1e-6);
  }
}

TEST_CASE("Lyapunov monitor flags runs starting at V = 1") {
  const auto x = OpinionState::from_rows({{0, 1}, {0.5, 0.5}});
  const auto r = BiasSet::from_rows({{1.0, 0.2}, {1.0, 0.2}});
  const auto traj = run(x, r, Network(2, {{0, 1}}), {.max_steps = 10});
  CHECK(check_lyapunov_decrease(traj, recessive_set(r)).starts_at_one);
}

TEST_CASE("two_agent_fixed_points") {
  const auto c = two_agent_fixed_points(kFig1cR1, kFig1cR2);
  CHECK(c.kind == TwoAgentKind::StableAllOne);
  CHECK(c.alpha_product == doctest::Approx(0.315));
  CHECK(c.beta_product == doctest::Approx(0.165));
  CHECK(two_agent_fixed_points(std::vector{1.0, 0.0}, std::vector{0.0, 1.0}).kind == TwoAgentKind::Continuum);
  CHECK(two_agent_fixed_points(std::vector{0.5, 0.5}, std::vector{0.5, 0.5}).kind == TwoAgentKind::Continuum);
  CHECK(two_agent_fixed_points(std::vector{0.3, 0.7}, std::vector{0.4, 0.6}).kind == TwoAgentKind::StableAllZero);
  CHECK(two_agent_fixed_points(std::vector{0.5, 0.5}, std::vector{0.5, 0.5001}, 1e-3).kind ==
        TwoAgentKind::Continuum);
  CHECK_THROWS_AS(two_agent_fixed_points(std::vector{0.5, 0.5, 0.1}, std::vector{0.5, 0.5}),
                  UnsupportedDimensionError);
}

TEST_CASE("continuum_fixed_point") {
  CHECK(continuum_fixed_point(std::vector{0.5, 0.5}, std::vector{0.5, 0.5}, 0.3) ==
        doctest::Approx(0.3).epsilon(1e-15));
  CHECK(continuum_fixed_point(std::vector{0.7, 0.3}, std::vector{0.3, 0.7}, 0.5) ==
        doctest::Approx(0.7).epsilon(1e-15));
  CHECK(continuum_fixed_point(std::vector{1.0, 0.0}, std::vector{0.0, 1.0}, 0.5) == 1.0);
  CHECK_THROWS_AS(continuum_fixed_point(std::vector{0.0, 0.0}, std::vector{0.5, 0.5}, 0.3),
                  DegenerateInputError);
  CHECK_THROWS_AS(continuum_fixed_point(std::vector{1.0, 0.0}, std::vector{0.0, 1.0}, 0.0),
                  DegenerateInputError);
  CHECK_THROWS_AS(continuum_fixed_point(kFig1cR1, kFig1cR2, 0.5), DomainError);

  // Every point of the curve is a fixed point of the reduced map.
  const Bias2 b1{0.7, 0.3}, b2{0.3, 0.7};
  for (double x2 = 0.0; x2 <= 1.0; x2 += 0.05) {
    const double x1 = continuum_fixed_point(std::vector{0.7, 0.3}, std::vector{0.3, 0.7}, x2);
    const auto next = two_agent_map(b1, b2, x1, x2);
    CHECK(std::abs(next[0] - x1) < 1e-14);
    CHECK(std::abs(next[1] - x2) < 1e-14);
  }
}

TEST_CASE("schur_stable_2x2 examples") {
  CHECK(schur_stable_2x2({{{0.5, 0.0}, {0.0, 0.5}}}));
  CHECK_FALSE(schur_stable_2x2({{{1.0, 0.0}, {0.0, 1.0}}}));
  const Matrix2 j{{{0.7692, 0.5385}, {0.2903, 0.6452}}};
  CHECK_FALSE(schur_stable_2x2(j));
  CHECK(spectral_radius(j) == doctest::Approx(1.1074).epsilon(1e-4));
  CHECK_THROWS_AS(schur_stable_2x2({{{0.5, -0.1}, {0.0, 0.5}}}), DomainError);
}

TEST_CASE("schur_stable_2x2 agrees with the eigenvalue oracle") {
  Rng rng(41);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Matrix2 m{{{uniform(rng, 0, 2), uniform(rng, 0, 2)}, {uniform(rng, 0, 2), uniform(rng, 0, 2)}}};
    const double rho = spectral_radius(m);
    if (std::abs(rho - 1.0) <= 1e-9) continue;
    ++checked;
    CHECK(schur_stable_2x2(m) == (rho < 1.0));
  }
  CHECK(checked > 1900);
}

TEST_CASE("jacobian_origin_2agent") {
  const auto j = jacobian_origin_2agent(std::vector{1.0, 1.0}, std::vector{1.0, 1.0});
  CHECK(j == Matrix2{{{0.5, 0.5}, {0.5, 0.5}}});
  const auto c = jacobian_origin_2agent(kFig1cR1, kFig1cR2);
  CHECK(c[0][0] == doctest::Approx(1 / 1.3).epsilon(1e-15));
  CHECK(c[0][1] == doctest::Approx(0.7 / 1.3).epsilon(1e-15));
  CHECK(c[1][0] == doctest::Approx(0.45 / 1.55).epsilon(1e-15));
  CHECK(c[1][1] == doctest::Approx(1 / 1.55).epsilon(1e-15));
  CHECK(jacobian_origin_2agent(std::vector{1.0, 0.0}, std::vector{1.0, 0.0}) ==
        Matrix2{{{1.0, 1.0}, {1.0, 1.0}}});
}

TEST_CASE("finite_difference_jacobian") {
  SUBCASE("linear map") {
    const VectorMap lin = [](std::span<const double> x) {
      return std::vector<double>{2 * x[0] - x[1] + 0.5 * x[2], 3 * x[1], -x[0] + 4 * x[2]};
    };
    const std::vector<double> p{0.3, -1.2, 2.0};
    const auto j = finite_difference_jacobian(lin, p, 1e-4);
    const double expected[3][3] = {{2, -1, 0.5}, {0, 3, 0}, {-1, 0, 4}};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) CHECK(std::abs(j(r, c) - expected[r][c]) < 1e-9);
    }
  }
  SUBCASE("square") {
    const VectorMap sq = [](std::span<const double> x) { return std::vector<double>{x[0] * x[0]}; };
    const std::vector<double> p{3.0};
    CHECK(std::abs(finite_difference_jacobian(sq, p, 1e-5)(0, 0) - 6.0) < 1e-8);
    // One-sided stencil is still exact for quadratics.
    const BoxDomain box{{3.0}, {10.0}};
    CHECK(std::abs(finite_difference_jacobian(sq, p, 1e-5, box)(0, 0) - 6.0) < 1e-8);
  }
  SUBCASE("errors") {
    const VectorMap bad = [](std::span<const double> x) { return std::vector<double>{1.0 / (x[0] - 1.0)}; };
    const std::vector<double> p{1.0};
    CHECK_THROWS_AS(finite_difference_jacobian(bad, p, 0.0), DomainError);
    const std::vector<double> q{1.0 + 1e-3};
    CHECK_NOTHROW(finite_difference_jacobian(bad, q, 1e-4));
  }
}

TEST_CASE("reduced two-agent map: analytic and numerical Jacobians agree") {
  Rng rng(51);
  const BoxDomain unit{{0.0, 0.0}, {1.0, 1.0}};
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> r1{uniform(rng), uniform(rng)};
    const std::vector<double> r2{uniform(rng), uniform(rng)};
    const Bias2 b1 = to_bias2(r1), b2 = to_bias2(r2);
    const VectorMap f = [&](std::span<const double> x) {
      const auto y = two_agent_map(b1, b2, x[0], x[1]);
      return std::vector<double>{y[0], y[1]};
    };
    const std::vector<double> origin{0.0, 0.0};
    const auto fd = finite_difference_jacobian(f, origin, 1e-5, unit);
    const auto j0 = jacobian_origin_2agent(r1, r2);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) CHECK(std::abs(fd(r, c) - j0[r][c]) < 1e-6);
    }
    // In the mirrored coordinates the Jacobian at (1, 1) is the same matrix.
    const std::vector<double> ones{1.0, 1.0};
    const auto fd1 = finite_difference_jacobian(f, ones, 1e-5, unit);
    const auto j1 = jacobian_ones_2agent(r1, r2);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) CHECK(std::abs(fd1(r, c) - j1[r][c]) < 1e-6);
    }
  }
}

TEST_CASE("reduced two-agent map matches the full update") {
  Rng rng(61);
  const Network pair(2, {{0, 1}});
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> r1{uniform(rng), uniform(rng)};
    const std::vector<double> r2{uniform(rng), uniform(rng)};
    const double x1 = uniform(rng), x2 = uniform(rng);
    const auto full = step(OpinionState::from_rows({{x1, 1 - x1}, {x2, 1 - x2}}),
                           BiasSet::from_rows({r1, r2}), pair);
    const auto reduced = two_agent_map(to_bias2(r1), to_bias2(r2), x1, x2);
    CHECK(std::abs(full(0, 0) - reduced[0]) < 1e-14);
    CHECK(std::abs(full(1, 0) - reduced[1]) < 1e-14);
  }
}

TEST_CASE("two-agent classification is consistent with corner stability") {
  Rng rng(71);
  for (int trial = 0; trial < 500; ++trial) {
    const std::vector<double> r1{uniform(rng), uniform(rng)};
    const std::vector<double> r2{uniform(rng), uniform(rng)};
    const auto c = two_agent_fixed_points(r1, r2);
    const bool origin_stable = schur_stable_2x2(jacobian_origin_2agent(r1, r2));
    const bool ones_stable = schur_stable_2x2(jacobian_ones_2agent(r1, r2));
    if (c.kind == TwoAgentKind::StableAllOne) {
      CHECK_FALSE(origin_stable);
      CHECK(ones_stable);
    } else if (c.kind == TwoAgentKind::StableAllZero) {
      CHECK(origin_stable);
      CHECK_FALSE(ones_stable);
    }
  }
}
