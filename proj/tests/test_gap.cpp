#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "gaps/gap.hpp"
#include "test_util.hpp"

using namespace gaps;
using namespace gaps::testing;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// the line x2 = 0 and the half-plane x1 >= 1
std::vector<SetPtr> line_and_halfplane() {
  Matrix a(1, 2);
  a << 0, 1;
  auto line = std::make_shared<AffineSubspace>(a, Vector::Zero(1));
  Vector lo(2), hi(2);
  lo << 1, -kInf;
  hi << kInf, kInf;
  auto half = std::make_shared<Box>(lo, hi);
  return {line, half};
}

GapOperator toy_operator(double a1, double a2, double alpha) {
  GapConfig cfg;
  cfg.alpha = alpha;
  cfg.alphas = {a1, a2};
  return GapOperator(line_and_halfplane(), cfg);
}
}  // namespace

TEST_SUITE("gap") {

TEST_CASE("beta values") {
  CHECK(beta(std::array{1.0, 1.0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(beta(std::array{1.5, 1.5}) == doctest::Approx(6.0 / 7.0).epsilon(1e-14));
  CHECK(beta(std::array{1.9, 1.9}) == doctest::Approx(38.0 / 39.0).epsilon(1e-14));
  CHECK(beta(std::array{1.9, 1.9}) == doctest::Approx(0.974359).epsilon(1e-6));

  CHECK_THROWS_AS(beta(std::array{2.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(beta(std::array{1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(beta(std::span<const double>{}), ConfigError);
}

TEST_CASE("regime selection") {
  GapConfig cfg;
  cfg.alpha = 1.0;
  cfg.alphas = {1.0, 1.0};
  CHECK(validate(cfg) == Regime::AveragedComposition);  // 1 < 1/beta = 3/2

  cfg.alpha = 0.5;
  cfg.alphas = {2.0, 2.0};
  CHECK(validate(cfg) == Regime::DouglasRachford);

  cfg.alpha = 0.7;
  cfg.alphas = {1.5, 2.0};
  CHECK(validate(cfg) == Regime::NonexpansiveComposition);

  cfg.alpha = 1.0;
  cfg.alphas = {2.0, 2.0};
  CHECK_THROWS_AS(validate(cfg), ConfigError);  // the reflection pair needs alpha < 1
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("averaged-composition") != std::string::npos);
    CHECK(msg.find("nonexpansive-composition") != std::string::npos);
    CHECK(msg.find("douglas-rachford") != std::string::npos);
  }
}

TEST_CASE("averagedness constant") {
  GapConfig cfg;
  cfg.alpha = 1.0;
  cfg.alphas = {1.0, 1.0};
  CHECK(averagedness_constant(cfg) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  cfg.alpha = 0.5;
  cfg.alphas = {2.0, 2.0};
  CHECK(averagedness_constant(cfg) == doctest::Approx(0.5).epsilon(1e-14));

  cfg.alphas = {1.9, 1.9};
  cfg.alpha = 0.85 / beta(cfg.alphas);
  CHECK(averagedness_constant(cfg) == doctest::Approx(0.85).epsilon(1e-14));
}

TEST_CASE("composition applies first set first") {
  GapOperator op = toy_operator(1.0, 1.0, 1.0);
  Vector x(2);
  x << 0, 2;
  Vector sx = op.apply_composition(x);
  CHECK(sx[0] == doctest::Approx(1.0));
  CHECK(sx[1] == doctest::Approx(0.0));

  // intersection points are fixed
  Vector star(2);
  star << 2, 0;
  CHECK((op.apply_composition(star) - star).norm() <= 1e-12);

  // single set degenerates to its projection
  auto rng = make_rng(3);
  auto orthant = std::make_shared<NonnegativeOrthant>(4);
  GapConfig single;
  single.alpha = 1.0;
  single.alphas = {1.0};
  GapOperator one({orthant}, single);
  const Vector v = rand_vec(4, rng, 2.0);
  CHECK((one.apply_composition(v) - orthant->project(v)).norm() == doctest::Approx(0.0));
}

TEST_CASE("iteration map") {
  GapOperator op = toy_operator(1.0, 1.0, 1.0);
  Vector x(2);
  x << 0, 2;
  TStep step = op.apply(x);
  CHECK(step.next[0] == doctest::Approx(1.0));
  CHECK(step.next[1] == doctest::Approx(0.0));
  CHECK(step.residual[0] == doctest::Approx(1.0));
  CHECK(step.residual[1] == doctest::Approx(-2.0));

  Vector star(2);
  star << 2, 0;
  TStep fixed = op.apply(star);
  CHECK((fixed.next - star).norm() <= 1e-12);
  CHECK(fixed.residual.norm() <= 1e-12);
}

TEST_CASE("reflection pair steps to the midpoint") {
  GapOperator dr = toy_operator(2.0, 2.0, 0.5);
  const auto sets = line_and_halfplane();
  auto rng = make_rng(5);
  for (int i = 0; i < 10; ++i) {
    const Vector x = rand_vec(2, rng, 3.0);
    const Vector r1 = 2.0 * sets[0]->project(x) - x;
    const Vector r2 = 2.0 * sets[1]->project(r1) - r1;
    const Vector expect = 0.5 * (x + r2);
    CHECK((dr.apply(x).next - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
  }
}

TEST_CASE("monitored candidates") {
  GapOperator op = toy_operator(1.0, 1.0, 1.0);
  Vector x(2);
  x << 0, 2;
  auto candidates = op.monitored_candidates(x);
  REQUIRE(candidates.size() == 2);
  CHECK(candidates[0].first == "first_set");
  CHECK(candidates[0].second[0] == doctest::Approx(0.0));
  CHECK(candidates[0].second[1] == doctest::Approx(0.0));
  CHECK(candidates[1].first == "projection_chain");
  CHECK(candidates[1].second[0] == doctest::Approx(1.0));
  CHECK(candidates[1].second[1] == doctest::Approx(0.0));

  Vector star(2);
  star << 3, 0;
  for (const auto& [label, z] : op.monitored_candidates(star)) {
    CAPTURE(label);
    CHECK((z - star).norm() <= 1e-12);
  }
}

TEST_CASE("reflection-pair fixed points project into the intersection") {
  // C is the x-axis, D the upper half-plane (free x orthant). Points
  // (a, s) with s > 0 are fixed by the reflection pair but lie outside C;
  // their projection onto C must be feasible for both sets.
  Matrix a(1, 2);
  a << 0, 1;
  auto axis = std::make_shared<AffineSubspace>(a, Vector::Zero(1));
  auto upper = std::make_shared<ProductSet>(std::vector<SetPtr>{
      std::make_shared<FreeSpace>(1), std::make_shared<NonnegativeOrthant>(1)});

  GapConfig cfg;
  cfg.alpha = 0.5;
  cfg.alphas = {2.0, 2.0};
  GapOperator dr({axis, upper}, cfg);
  CHECK(dr.regime() == Regime::DouglasRachford);

  auto rng = make_rng(23);
  for (int i = 0; i < 10; ++i) {
    Vector x(2);
    x << rand_vec(1, rng, 3.0)[0], std::abs(rand_vec(1, rng, 2.0)[0]) + 0.1;
    TStep step = dr.apply(x);
    REQUIRE((step.next - x).norm() <= 1e-12 * (1.0 + x.norm()));
    CHECK(axis->distance(x) > 0.05);  // genuinely outside the first set

    const Vector proj = dr.monitored_candidates(x)[0].second;
    CHECK(axis->distance(proj) <= 1e-10);
    CHECK(upper->distance(proj) <= 1e-10);
  }
}

TEST_CASE("averaged inequality") {
  auto rng = make_rng(29);
  const Vector z = rand_vec(6, rng).cwiseAbs() + Vector::Constant(6, 0.2);
  auto affine = affine_through(z, 2, rng);
  auto orthant = std::make_shared<NonnegativeOrthant>(6);

  struct Setting {
    double a1, a2, alpha;
  };
  std::vector<Setting> settings = {{1.0, 1.0, 1.0},
                                   {1.9, 1.9, 0.85 / beta(std::array{1.9, 1.9})},
                                   {1.5, 2.0, 0.7},
                                   {2.0, 2.0, 0.5}};
  for (const auto& s : settings) {
    GapConfig cfg;
    cfg.alpha = s.alpha;
    cfg.alphas = {s.a1, s.a2};
    GapOperator op({affine, orthant}, cfg);
    const double kappa = averagedness_constant(cfg);
    CAPTURE(s.a1);
    CAPTURE(s.alpha);
    for (int i = 0; i < 200; ++i) {
      const Vector x = rand_vec(6, rng, 2.0);
      const Vector y = rand_vec(6, rng, 2.0);
      const Vector tx = op.apply(x).next;
      const Vector ty = op.apply(y).next;
      const double lhs = (tx - ty).squaredNorm();
      const double drift = ((x - tx) - (y - ty)).squaredNorm();
      const double rhs = (x - y).squaredNorm() - (1.0 - kappa) / kappa * drift;
      CHECK(lhs <= rhs + 1e-9 * (1.0 + (x - y).squaredNorm()));
    }
  }
}

TEST_CASE("composition is nonexpansive") {
  auto rng = make_rng(31);
  const Vector z = rand_vec(5, rng).cwiseAbs();
  auto affine = affine_through(z, 2, rng);
  auto orthant = std::make_shared<NonnegativeOrthant>(5);
  for (double a1 : {0.5, 1.0, 1.7, 2.0}) {
    GapConfig cfg;
    cfg.alpha = 0.5;
    cfg.alphas = {a1, a1 == 2.0 ? 2.0 : 1.3};
    GapOperator op({affine, orthant}, cfg);
    for (int i = 0; i < 50; ++i) {
      const Vector x = rand_vec(5, rng, 2.0);
      const Vector y = rand_vec(5, rng, 2.0);
      CHECK((op.apply_composition(x) - op.apply_composition(y)).norm() <=
            (x - y).norm() + 1e-10);
    }
  }
}

TEST_CASE("intersection points are fixed points and conversely") {
  auto rng = make_rng(37);
  for (int inst = 0; inst < 10; ++inst) {
    const Index n = 4 + static_cast<Index>(inst % 3);
    const Vector z = rand_vec(n, rng).cwiseAbs() + Vector::Constant(n, 0.3);
    auto affine = affine_through(z, 2, rng);
    auto orthant = std::make_shared<NonnegativeOrthant>(n);
    GapConfig cfg;
    cfg.alpha = inst % 2 == 0 ? 1.2 : 0.9;
    cfg.alphas = {1.0, inst % 2 == 0 ? 1.5 : 2.0};
    GapOperator op({affine, orthant}, cfg);

    // members of the intersection do not move
    CHECK((op.apply(z).next - z).norm() <= 1e-12 * (1.0 + z.norm()));

    // near-fixed points are nearly feasible
    Vector x = rand_vec(n, rng, 2.0);
    for (int k = 0; k < 50000; ++k) {
      TStep step = op.apply(x);
      if (step.residual.norm() <= 1e-12) break;
      x = step.next;
    }
    if (op.apply(x).residual.norm() <= 1e-12) {
      CHECK(affine->distance(x) <= 1e-8);
      CHECK(orthant->distance(x) <= 1e-8);
    }
  }
}

TEST_CASE("operator construction errors") {
  auto orthant = std::make_shared<NonnegativeOrthant>(3);
  auto other = std::make_shared<NonnegativeOrthant>(4);
  GapConfig cfg;
  cfg.alpha = 0.5;
  cfg.alphas = {1.0, 1.0};
  CHECK_THROWS_AS(GapOperator({orthant, other}, cfg), DimensionError);
  cfg.alphas = {1.0};
  CHECK_THROWS_AS(GapOperator({orthant, orthant}, cfg), ConfigError);
  GapOperator op({orthant, std::make_shared<NonnegativeOrthant>(3)},
                 GapConfig{0.5, {1.0, 1.0}});
  CHECK_THROWS_AS(op.apply(Vector::Zero(2)), DimensionError);
}

}  // TEST_SUITE
