#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "epsinv/step_function.hpp"
#include "generators.hpp"

using namespace epsinv;
using R = Rational;

namespace {
StepFunction<R> halves(const R& a, const R& b) {
  return StepFunction<R>::from_breakpoints({R(0), frac<R>(1, 2)}, {a, b});
}
}  // namespace

TEST_CASE("canonical form merges equal adjacent values") {
  auto f = StepFunction<R>::from_breakpoints({R(0), frac<R>(1, 4), frac<R>(1, 2)},
                                             {R(1), R(1), R(2)});
  CHECK(f.cell_count() == 2);
  CHECK(f.breakpoints() == std::vector<R>{R(0), frac<R>(1, 2)});

  CHECK_THROWS_AS(StepFunction<R>::from_breakpoints({frac<R>(1, 4)}, {R(1)}), InvalidInput);
  CHECK_THROWS_AS(StepFunction<R>::from_breakpoints({R(0), frac<R>(1, 2), frac<R>(1, 4)},
                                                    {R(1), R(2), R(3)}),
                  InvalidInput);
}

TEST_CASE("evaluate uses the right-open convention") {
  auto f = halves(R(1), R(-1));
  CHECK(StepFunction<R>::constant(R(1)).evaluate(frac<R>(7, 10)) == 1);
  CHECK(f.evaluate(frac<R>(1, 2)) == -1);
  CHECK(f.evaluate(frac<R>(499, 1000)) == 1);
  CHECK_THROWS_AS(f.evaluate(R(1)), DomainError);
  CHECK_THROWS_AS(f.evaluate(R(-1)), DomainError);
}

TEST_CASE("linear algebra on hand cases") {
  auto one = StepFunction<R>::constant(R(1));
  CHECK(one.add(one.scale(R(-1))).l1_norm() == 0);
  CHECK(one.scale(R(0)) == StepFunction<R>::constant(R(0)));
  auto left = halves(R(1), R(0));
  auto right = halves(R(0), R(1));
  CHECK(left.add(right) == one);
  CHECK(left.multiply(right) == StepFunction<R>::constant(R(0)));
  CHECK(left.subtract(left).sup_norm() == 0);
}

TEST_CASE("integrals over interval sets") {
  auto one = StepFunction<R>::constant(R(1));
  CHECK(one.integral() == 1);
  R eps = frac<R>(1, 4);
  CHECK(halves(eps, -eps).integral() == 0);
  auto f = StepFunction<R>::from_breakpoints({R(0), frac<R>(1, 4)}, {R(2), R(0)});
  CHECK(f.integral(IntervalSet<R>::from_parts({{R(0), frac<R>(1, 2)}})) == frac<R>(1, 2));
  CHECK(f.integral(IntervalSet<R>::empty_set()) == 0);
}

TEST_CASE("norms and bounds") {
  R eps = frac<R>(1, 8);
  auto f = halves(eps, -eps);
  CHECK(f.l1_norm() == eps);
  CHECK(f.sup_norm() == eps);
  CHECK(f.min_value() == -eps);
  CHECK(StepFunction<R>::constant(R(0)).l1_norm() == 0);
  CHECK(f.ae_leq_abs(eps));
  CHECK_FALSE(f.ae_leq_abs(eps / 2));
  CHECK(StepFunction<R>::constant(R(0)).ae_leq_abs(R(0)));
  CHECK(f.abs_value() == StepFunction<R>::constant(eps));
}

TEST_CASE("composition with affine branches") {
  auto f = halves(R(1), R(-1));
  // x/2 always lands in the left half, (x+1)/2 in the right
  CHECK(f.compose_affine(frac<R>(1, 2), R(0)) == StepFunction<R>::constant(R(1)));
  CHECK(f.compose_affine(frac<R>(1, 2), frac<R>(1, 2)) == StepFunction<R>::constant(R(-1)));
  auto one = StepFunction<R>::constant(R(1));
  CHECK(one.compose_affine(frac<R>(-1, 3), R(1)) == one);
  // decreasing branch reflects the breakpoint
  auto g = f.compose_affine(R(-1), R(1));
  CHECK(g.evaluate(frac<R>(1, 4)) == -1);
  CHECK(g.evaluate(frac<R>(3, 4)) == 1);
  CHECK_THROWS_AS(f.compose_affine(R(2), R(0)), RangeError);
  CHECK_THROWS_AS(f.compose_affine(R(0), R(0)), DomainError);
}

TEST_CASE("grid averaging preserves the integral") {
  auto f = halves(R(1), R(-1));
  CHECK(f.resample_average(1) == StepFunction<R>::constant(R(0)));
  auto g = StepFunction<R>::from_breakpoints({R(0), frac<R>(1, 4)}, {R(1), R(0)});
  CHECK(g.resample_average(2) == halves(frac<R>(1, 2), R(0)));
  auto c = StepFunction<R>::constant(frac<R>(3, 7));
  CHECK(c.resample_average(5) == c);
}

TEST_CASE("indicator matches set membership") {
  auto A = IntervalSet<R>::from_parts({{frac<R>(1, 8), frac<R>(1, 4)}, {frac<R>(1, 2), R(1)}});
  auto chi = StepFunction<R>::indicator(A);
  CHECK(chi.integral() == A.measure());
  CHECK(chi.evaluate(frac<R>(3, 16)) == 1);
  CHECK(chi.evaluate(frac<R>(3, 8)) == 0);
  CHECK(chi.evaluate(frac<R>(3, 4)) == 1);
}

TEST_CASE("randomized identities") {
  std::mt19937_64 rng(21);
  auto battery = random_interval_battery<R>(22, 40);
  for (int i = 0; i < 40; ++i) {
    auto f = testgen::random_step<R>(rng);
    auto g = testgen::random_step<R>(rng);
    const auto& A = battery[static_cast<std::size_t>(i)];
    CHECK(f.add(g).integral(A) == f.integral(A) + g.integral(A));
    CHECK(f.integral(A) + f.integral(A.complement()) == f.integral());
    CHECK(f.abs_value().integral() == f.l1_norm());
    CHECK(f.subtract(g) == f.add(g.scale(R(-1))));
    CHECK(f.resample_average(4).integral() == f.integral());
    // composing with a branch then integrating = weighted restriction identity
    R a = frac<R>(1, 3), b = frac<R>(1, 2);
    auto image = A.affine_image(a, b);
    CHECK(sabs(a) * f.compose_affine(a, b).integral(A) == f.integral(image));
  }
}

TEST_CASE("float mode keeps the same algebra within tolerance") {
  auto f = StepFunction<double>::from_breakpoints({0.0, 0.5}, {0.25, -0.25});
  CHECK(f.integral() == doctest::Approx(0.0));
  CHECK(f.l1_norm() == doctest::Approx(0.25));
  CHECK(f.compose_affine(0.5, 0.0).evaluate(0.9) == doctest::Approx(0.25));
  // near-equal adjacent values merge under the 1e-12 tolerance
  auto g = StepFunction<double>::from_breakpoints({0.0, 0.5}, {1.0, 1.0 + 1e-15});
  CHECK(g.cell_count() == 1);
}
