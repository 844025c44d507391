#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "degldp/attacks.hpp"
#include "degldp/graph.hpp"
#include "degldp/protocols.hpp"
#include "degldp/random.hpp"
#include "degldp/randomizers.hpp"

using namespace degldp;

namespace {

bool rows_equal(const BitRow& a, const BitRow& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

bool matrices_equal(const BitMatrix& a, const BitMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

RandomSource user_fork(const RandomSource& trial, Index i) {
  return trial.fork("user").fork(static_cast<std::uint64_t>(i));
}

Graph star_graph() {
  Graph g = empty_graph(5);
  g.add_edge(0, 1);
  g.add_edge(0, 2);
  g.add_edge(0, 3);
  return g;
}

}  // namespace

TEST_CASE("attack spec validation") {
  AttackSpec ok;
  ok.kind = AttackKind::inflation;
  ok.malicious = {1, 4};
  ok.target = 4;
  CHECK_NOTHROW(validate(ok, 6));

  AttackSpec bad = ok;
  bad.malicious = {4, 1};
  CHECK_THROWS_AS(validate(bad, 6), std::invalid_argument);
  bad = ok;
  bad.malicious = {1, 1, 4};
  CHECK_THROWS_AS(validate(bad, 6), std::invalid_argument);
  bad = ok;
  bad.malicious = {1, 7};
  CHECK_THROWS_AS(validate(bad, 6), std::invalid_argument);
  bad = ok;
  bad.b = -1.0;
  CHECK_THROWS_AS(validate(bad, 6), std::invalid_argument);
  bad = ok;
  bad.b = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate(bad, 6), std::invalid_argument);
  bad = ok;
  bad.target = 2;  // honest target cannot inflate itself
  CHECK_THROWS_AS(validate(bad, 6), std::invalid_argument);
  bad = ok;
  bad.target = 6;
  CHECK_THROWS_AS(validate(bad, 6), std::invalid_argument);
  bad = ok;
  bad.kind = AttackKind::deflation;
  bad.target = 4;  // deflation target must be honest
  CHECK_THROWS_AS(validate(bad, 6), std::invalid_argument);
  bad.target = 2;
  CHECK_NOTHROW(validate(bad, 6));
  AttackSpec none;  // kind none ignores the target field entirely
  none.malicious = {0, 2};
  none.target = -1;
  CHECK_NOTHROW(validate(none, 6));
}

TEST_CASE("pair-sampled inflation rewires the assignment") {
  RandomSource rng(501);
  Graph g = generate_er(6, 0.5, rng);
  AttackSpec spec;
  spec.kind = AttackKind::inflation;
  spec.mode = PoisonMode::response;
  spec.malicious = {2};
  spec.target = 2;
  RandomSource trial(77);
  PoisonedBundle out = poisoned_responses_naive(spec, g, 0.25, trial);
  for (Index j = 0; j < 6; ++j) {
    if (j == 2) continue;
    CHECK(out.assignment.covers(2, j));
    CHECK_FALSE(out.assignment.covers(j, 2));
    CHECK(out.bundle.bits(2, j) == 1);  // literal all-ones row
  }
  CHECK(out.bundle.bits(2, 2) == 0);
  // r1(target) is therefore n-1 = 5 regardless of the graph.
  DegreeEstimates est = naive_aggregate(out.bundle, out.assignment, 0.25);
  CHECK(est.value(2) == doctest::Approx((5.0 - 0.25 * 6.0) / 0.5));
}

TEST_CASE("pair-sampled deflation silences a star center") {
  Graph g = star_graph();
  AttackSpec spec;
  spec.kind = AttackKind::deflation;
  spec.mode = PoisonMode::response;
  spec.malicious = {1, 2, 3};
  spec.target = 0;
  RandomSource trial(78);
  PoisonedBundle out = poisoned_responses_naive(spec, g, 0.0, trial);
  DegreeEstimates est = naive_aggregate(out.bundle, out.assignment, 0.0);
  CHECK(est.value(0) == 0.0);

  AttackSpec none;
  RandomSource trial2(78);
  PoisonedBundle honest = poisoned_responses_naive(none, g, 0.0, trial2);
  DegreeEstimates base = naive_aggregate(honest.bundle, honest.assignment, 0.0);
  CHECK(base.value(0) == 3.0);
}

TEST_CASE("pair-sampled honest rows replay the honest responder") {
  RandomSource rng(502);
  Graph g = generate_er(20, 0.3, rng);
  AttackSpec spec;
  spec.kind = AttackKind::deflation;
  spec.mode = PoisonMode::response;
  spec.malicious = {3, 7};
  spec.target = 0;
  const double rho = 0.3;
  RandomSource trial(79);
  PoisonedBundle out = poisoned_responses_naive(spec, g, rho, trial);
  for (Index i = 0; i < g.n(); ++i) {
    RandomSource replay = user_fork(trial, i);
    BitRow expect = naive_respond(g, i, out.assignment, rho, replay);
    if (i == 3 || i == 7) {
      expect(0) = 0;  // deviation is exactly the forced target bit
      CHECK(rows_equal(out.bundle.bits.row(i), expect));
    } else {
      CHECK(rows_equal(out.bundle.bits.row(i), expect));
    }
  }
}

TEST_CASE("matrix attacks leave honest users untouched") {
  RandomSource rng(503);
  Graph g = generate_er(50, 0.3, rng);
  const double rho = 0.25;
  AttackSpec none;
  none.malicious = {1, 2, 3};

  AttackSpec defl;
  defl.kind = AttackKind::deflation;
  defl.mode = PoisonMode::response;
  defl.malicious = {1, 2, 3};
  defl.target = 0;

  RandomSource t1(90), t2(90);
  PoisonedBundle base = poisoned_responses_check(none, g, rho, t1);
  PoisonedBundle out = poisoned_responses_check(defl, g, rho, t2);
  for (Index i = 0; i < g.n(); ++i) {
    if (i == 1 || i == 2 || i == 3) {
      CHECK(out.bundle.bits(i, 0) == 0);  // forced target bit
      for (Index j = 1; j < g.n(); ++j)
        CHECK(out.bundle.bits(i, j) == base.bundle.bits(i, j));
    } else {
      CHECK(rows_equal(out.bundle.bits.row(i), base.bundle.bits.row(i)));
    }
  }

  // Input-mode deflation reuses the same per-position draws, so rows agree
  // away from the target column there too.
  defl.mode = PoisonMode::input;
  RandomSource t3(90);
  PoisonedBundle inp = poisoned_responses_check(defl, g, rho, t3);
  for (Index i : {Index(1), Index(2), Index(3)})
    for (Index j = 1; j < g.n(); ++j)
      CHECK(inp.bundle.bits(i, j) == base.bundle.bits(i, j));
}

TEST_CASE("matrix inflation forges the documented row") {
  RandomSource rng(504);
  Graph g = generate_er(40, 0.35, rng);
  const double rho = 0.25;
  AttackSpec spec;
  spec.kind = AttackKind::inflation;
  spec.mode = PoisonMode::response;
  spec.malicious = {0, 5, 9};
  spec.target = 5;
  spec.b = 1.0;  // b*rho <= 1 and b*(1-rho) <= 1: neither sample can cap

  RandomSource trial(91);
  PoisonedBundle out = poisoned_responses_check(spec, g, rho, trial);

  // Replay the attacker's sampling to reconstruct the forged sets.
  std::vector<Index> h1, h0;
  for (Index j = 0; j < g.n(); ++j) {
    if (j == 5 || j == 0 || j == 9) continue;
    (g.has_edge(5, j) ? h1 : h0).push_back(j);
  }
  RandomSource attacker = trial.fork("attacker");
  const auto f0 = sample_without_replacement(
      h0, static_cast<std::size_t>(std::floor(spec.b * rho * h0.size())),
      attacker);
  const auto f1 = sample_without_replacement(
      h1,
      static_cast<std::size_t>(std::floor(spec.b * (1.0 - rho) * h1.size())),
      attacker);
  BitRow expect = BitRow::Zero(g.n());
  expect(0) = expect(9) = 1;
  for (Index j : f0) expect(j) = 1;
  for (Index j : f1) expect(j) = 1;
  CHECK(rows_equal(out.bundle.bits.row(5), expect));
  CHECK(out.bundle.bits(5, 5) == 0);
  CHECK_FALSE(out.sample_capped);

  // Accomplices equal an honest run except the forced target bit.
  AttackSpec none;
  RandomSource t2(91);
  PoisonedBundle base = poisoned_responses_check(none, g, rho, t2);
  for (Index i : {Index(0), Index(9)}) {
    CHECK(out.bundle.bits(i, 5) == 1);
    for (Index j = 0; j < g.n(); ++j)
      if (j != 5) CHECK(out.bundle.bits(i, j) == base.bundle.bits(i, j));
  }

  SUBCASE("b = 0 keeps only the coalition") {
    AttackSpec b0 = spec;
    b0.b = 0.0;
    RandomSource t3(91);
    PoisonedBundle o = poisoned_responses_check(b0, g, rho, t3);
    BitRow coalition_only = BitRow::Zero(g.n());
    coalition_only(0) = coalition_only(9) = 1;
    CHECK(rows_equal(o.bundle.bits.row(5), coalition_only));
  }
  SUBCASE("huge b caps at the full honest sets") {
    AttackSpec big = spec;
    big.b = 1e9;
    RandomSource t4(91);
    PoisonedBundle o = poisoned_responses_check(big, g, rho, t4);
    CHECK(o.sample_capped);
    for (Index j = 0; j < g.n(); ++j)
      CHECK(o.bundle.bits(5, j) == (j == 5 ? 0 : 1));
  }
  SUBCASE("b = 0 input list is the truth plus the coalition") {
    AttackSpec b0 = spec;
    b0.b = 0.0;
    b0.mode = PoisonMode::input;
    RandomSource t5(91);
    PoisonedBundle o = poisoned_responses_check(b0, g, rho, t5);
    for (Index j = 0; j < g.n(); ++j) {
      if (j == 5) {
        CHECK(o.inputs(5, j) == 0);
      } else if (j == 0 || j == 9) {
        CHECK(o.inputs(5, j) == 1);
      } else {
        CHECK(o.inputs(5, j) == g.adj(5, j));
      }
    }
  }
}

TEST_CASE("input-mode attacks factor through the randomizer") {
  RandomSource rng(505);
  Graph g = generate_er(30, 0.3, rng);
  const double rho = 0.25;

  auto replay_matrix = [&](const PoisonedBundle& out,
                           const RandomSource& trial) {
    REQUIRE(out.inputs.rows() == g.n());
    for (Index i = 0; i < g.n(); ++i) {
      RandomSource fresh = user_fork(trial, i);
      const Index skip[] = {i};
      BitRow expect = rr_row(out.inputs.row(i), skip, rho, fresh);
      CHECK(rows_equal(out.bundle.bits.row(i), expect));
    }
  };

  SUBCASE("matrix deflation") {
    AttackSpec spec;
    spec.kind = AttackKind::deflation;
    spec.mode = PoisonMode::input;
    spec.malicious = {2, 4, 6};
    spec.target = 1;
    RandomSource trial(92);
    PoisonedBundle out = poisoned_responses_check(spec, g, rho, trial);
    replay_matrix(out, trial);
    for (Index i : spec.malicious) CHECK(out.inputs(i, 1) == 0);
  }
  SUBCASE("matrix inflation") {
    AttackSpec spec;
    spec.kind = AttackKind::inflation;
    spec.mode = PoisonMode::input;
    spec.malicious = {2, 4, 6};
    spec.target = 4;
    spec.b = 2.0;
    RandomSource trial(93);
    PoisonedBundle out = poisoned_responses_check(spec, g, rho, trial);
    replay_matrix(out, trial);
    // The forged list covers the coalition and every honest neighbor.
    CHECK(out.inputs(4, 2) == 1);
    CHECK(out.inputs(4, 6) == 1);
    for (Index j = 0; j < g.n(); ++j)
      if (j != 4 && g.has_edge(4, j)) CHECK(out.inputs(4, j) == 1);
  }
  SUBCASE("hybrid inherits the matrix bits") {
    AttackSpec spec;
    spec.kind = AttackKind::inflation;
    spec.mode = PoisonMode::input;
    spec.malicious = {2, 4, 6};
    spec.target = 4;
    RandomSource trial(94);
    PoisonedBundle out =
        poisoned_responses_hybrid(spec, g, rho, 2.0, 5.0, trial);
    replay_matrix(out, trial);
  }
  SUBCASE("pair-sampled deflation") {
    AttackSpec spec;
    spec.kind = AttackKind::deflation;
    spec.mode = PoisonMode::input;
    spec.malicious = {2, 4};
    spec.target = 0;
    RandomSource trial(95);
    PoisonedBundle out = poisoned_responses_naive(spec, g, rho, trial);
    for (Index i = 0; i < g.n(); ++i) {
      RandomSource fresh = user_fork(trial, i);
      BitRow expect = BitRow::Zero(g.n());
      for (Index j = 0; j < g.n(); ++j)
        if (j != i && out.assignment.covers(i, j))
          expect(j) = rr_bit(out.inputs(i, j), rho, fresh);
      CHECK(rows_equal(out.bundle.bits.row(i), expect));
    }
  }
}

TEST_CASE("hybrid deflation keeps every scalar honest") {
  RandomSource rng(506);
  Graph g = generate_er(25, 0.4, rng);
  AttackSpec none;
  none.malicious = {1, 3};
  AttackSpec defl;
  defl.kind = AttackKind::deflation;
  defl.mode = PoisonMode::response;
  defl.malicious = {1, 3};
  defl.target = 2;
  RandomSource t1(96), t2(96);
  PoisonedBundle base = poisoned_responses_hybrid(none, g, 0.25, 2.0, 5.0, t1);
  PoisonedBundle out = poisoned_responses_hybrid(defl, g, 0.25, 2.0, 5.0, t2);
  for (Index i = 0; i < g.n(); ++i)
    CHECK(out.bundle.lap_degree(i) == base.bundle.lap_degree(i));
}

TEST_CASE("hybrid inflation forges popcount plus b tau") {
  SUBCASE("worked edgeless example") {
    Graph g = empty_graph(60);
    AttackSpec spec;
    spec.kind = AttackKind::inflation;
    spec.mode = PoisonMode::response;
    for (Index j = 0; j <= 50; ++j) spec.malicious.push_back(j);
    spec.target = 0;
    spec.b = 1.0;
    RandomSource trial(97);
    PoisonedBundle out =
        poisoned_responses_hybrid(spec, g, 0.0, 1.0, 35.0, trial, true);
    // 50 coalition ones, no honest forgery at rho = 0, plus 1 * 35.
    CHECK(out.bundle.lap_degree(0) == 85.0);
    for (Index i = 1; i < 60; ++i) CHECK(out.bundle.lap_degree(i) == 0.0);
  }
  SUBCASE("random graph, both modes, zero noise") {
    RandomSource rng(507);
    Graph g = generate_er(30, 0.4, rng);
    AttackSpec spec;
    spec.kind = AttackKind::inflation;
    spec.malicious = {0, 5, 9};
    spec.target = 5;
    spec.b = 2.0;
    const double tau = 7.0;
    spec.mode = PoisonMode::response;
    RandomSource t1(98);
    PoisonedBundle resp =
        poisoned_responses_hybrid(spec, g, 0.25, 2.0, tau, t1, true);
    const double pop_resp = resp.bundle.bits.row(5).cast<int>().sum();
    CHECK(resp.bundle.lap_degree(5) == pop_resp + 2.0 * tau);

    spec.mode = PoisonMode::input;
    RandomSource t2(98);
    PoisonedBundle inp =
        poisoned_responses_hybrid(spec, g, 0.25, 2.0, tau, t2, true);
    const double pop_in = inp.inputs.row(5).cast<int>().sum();
    CHECK(inp.bundle.lap_degree(5) == pop_in + 2.0 * tau);

    // Everyone else reports a noiseless true degree.
    for (Index i = 0; i < g.n(); ++i)
      if (i != 5) CHECK(resp.bundle.lap_degree(i) == g.degree(i));
  }
  SUBCASE("tau must be nonnegative") {
    Graph g = empty_graph(4);
    AttackSpec spec;
    RandomSource trial(99);
    CHECK_THROWS_AS(
        poisoned_responses_hybrid(spec, g, 0.25, 1.0, -1.0, trial),
        std::invalid_argument);
  }
}

TEST_CASE("scalar-only attacks") {
  RandomSource rng(508);
  Graph g = generate_er(20, 0.4, rng);
  SUBCASE("inflation reports the maximum degree") {
    AttackSpec spec;
    spec.kind = AttackKind::inflation;
    spec.mode = PoisonMode::response;
    spec.malicious = {2, 7};
    spec.target = 7;
    RandomSource trial(100);
    PoisonedBundle out =
        poisoned_responses_laplace(spec, g, 1.0, trial, true);
    CHECK(out.bundle.lap_degree(7) == 19.0);
    CHECK(out.bundle.lap_degree(2) == g.degree(2));  // accomplice is honest
    for (Index i = 0; i < g.n(); ++i)
      if (i != 7) CHECK(out.bundle.lap_degree(i) == g.degree(i));
  }
  SUBCASE("deflation drops the target edge") {
    AttackSpec spec;
    spec.kind = AttackKind::deflation;
    spec.mode = PoisonMode::response;
    spec.malicious = {2, 7};
    spec.target = 0;
    RandomSource trial(101);
    PoisonedBundle out =
        poisoned_responses_laplace(spec, g, 1.0, trial, true);
    for (Index j : {Index(2), Index(7)})
      CHECK(out.bundle.lap_degree(j) == g.degree(j) - int(g.adj(j, 0)));
    CHECK(out.bundle.lap_degree(0) == g.degree(0));
  }
  SUBCASE("honest scalars match a clean run draw for draw") {
    AttackSpec none;
    AttackSpec defl;
    defl.kind = AttackKind::deflation;
    defl.mode = PoisonMode::response;
    defl.malicious = {2, 7};
    defl.target = 0;
    RandomSource t1(102), t2(102);
    PoisonedBundle base = poisoned_responses_laplace(none, g, 1.0, t1);
    PoisonedBundle out = poisoned_responses_laplace(defl, g, 1.0, t2);
    for (Index i = 0; i < g.n(); ++i)
      if (i != 2 && i != 7)
        CHECK(out.bundle.lap_degree(i) == base.bundle.lap_degree(i));
  }
}

TEST_CASE("audit-protocol attacks") {
  Graph g = star_graph();
  SUBCASE("denying an honest target passes the audit") {
    AttackSpec spec;
    spec.malicious = {1, 2};
    spec.target = 0;
    RandomSource trial(103);
    PoisonedBundle out =
        nonprivate_attack(NonprivateAttack::deflate_honest_target, g, spec,
                          trial);
    CheckStats stats;
    DegreeEstimates est = nonprivate_aggregate(out.bundle, 2, &stats);
    CHECK_FALSE(est.rejected.any());
    CHECK(est.value(0) == 1.0);  // degree 3 minus two denied edges
    CHECK(stats.r10(0) == 2);
  }
  SUBCASE("self-deflation loses 2m-1 while passing") {
    AttackSpec spec;
    spec.malicious = {0, 1};
    spec.target = 0;
    RandomSource trial(104);
    PoisonedBundle out =
        nonprivate_attack(NonprivateAttack::deflate_self, g, spec, trial);
    DegreeEstimates est = nonprivate_aggregate(out.bundle, 2);
    CHECK_FALSE(est.rejected(0));
    CHECK(est.value(0) == 0.0);  // err = degree 3 = 2m - 1
  }
  SUBCASE("infeasible shapes throw") {
    AttackSpec spec;
    spec.malicious = {0, 4};  // vertex 4 is isolated: no edge to accomplice
    spec.target = 0;
    RandomSource trial(105);
    CHECK_THROWS_AS(
        nonprivate_attack(NonprivateAttack::deflate_self, g, spec, trial),
        std::runtime_error);
    AttackSpec big;  // m = 3 accomplice edges OK but only 0 honest left
    big.malicious = {0, 1, 2, 3};
    big.target = 0;
    CHECK_THROWS_AS(
        nonprivate_attack(NonprivateAttack::deflate_self, g, big, trial),
        std::runtime_error);
    AttackSpec wrong_side;
    wrong_side.malicious = {1, 2};
    wrong_side.target = 1;
    CHECK_THROWS_AS(nonprivate_attack(NonprivateAttack::deflate_honest_target,
                                      g, wrong_side, trial),
                    std::invalid_argument);
    AttackSpec honest_self;
    honest_self.malicious = {1, 2};
    honest_self.target = 0;
    CHECK_THROWS_AS(
        nonprivate_attack(NonprivateAttack::deflate_self, g, honest_self,
                          trial),
        std::invalid_argument);
  }
  SUBCASE("empty coalition reports the truth") {
    AttackSpec spec;
    RandomSource trial(106);
    PoisonedBundle out =
        nonprivate_attack(NonprivateAttack::deflate_honest_target, g, spec,
                          trial);
    CHECK(matrices_equal(out.bundle.bits, g.adj));
    CHECK(matrices_equal(out.inputs, g.adj));
  }
}
