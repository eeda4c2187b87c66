#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "epsinv/interval_set.hpp"
#include "epsinv/random_sets.hpp"
#include "generators.hpp"

using namespace epsinv;
using R = Rational;

TEST_CASE("canonical form: sort, merge, drop degenerate") {
  auto A = IntervalSet<R>::from_parts(
      {{frac<R>(1, 2), frac<R>(3, 4)}, {R(0), frac<R>(1, 4)}, {frac<R>(1, 4), frac<R>(1, 2)},
       {frac<R>(7, 8), frac<R>(7, 8)}});
  REQUIRE(A.parts().size() == 1);
  CHECK(A.parts()[0].lo == 0);
  CHECK(A.parts()[0].hi == frac<R>(3, 4));
  CHECK(A.measure() == frac<R>(3, 4));

  auto B = IntervalSet<R>::from_parts({{R(0), frac<R>(1, 3)}, {frac<R>(1, 4), frac<R>(1, 2)}});
  CHECK(B.parts().size() == 1);  // overlapping parts merge
  CHECK(B.measure() == frac<R>(1, 2));
}

TEST_CASE("out-of-range parts are rejected, inverted parts are empty") {
  CHECK_THROWS_AS(IntervalSet<R>::from_parts({{frac<R>(-1, 8), frac<R>(1, 4)}}), DomainError);
  CHECK_THROWS_AS(IntervalSet<R>::from_parts({{frac<R>(1, 2), frac<R>(9, 8)}}), DomainError);
  // {x : 1/2 <= x < 1/4} is empty under the half-open reading
  CHECK(IntervalSet<R>::from_parts({{frac<R>(1, 2), frac<R>(1, 4)}}).is_empty());
}

TEST_CASE("membership respects half-open convention") {
  auto A = IntervalSet<R>::from_parts({{frac<R>(1, 4), frac<R>(1, 2)}});
  CHECK(A.contains_point(frac<R>(1, 4)));
  CHECK(A.contains_point(frac<R>(3, 8)));
  CHECK_FALSE(A.contains_point(frac<R>(1, 2)));
  CHECK_FALSE(A.contains_point(R(0)));
}

TEST_CASE("boolean algebra on hand cases") {
  auto A = IntervalSet<R>::from_parts({{R(0), frac<R>(1, 2)}});
  auto B = IntervalSet<R>::from_parts({{frac<R>(1, 4), frac<R>(3, 4)}});
  CHECK(A.intersect(B).measure() == frac<R>(1, 4));
  CHECK(A.union_with(B).measure() == frac<R>(3, 4));
  CHECK(A.set_difference(B) == IntervalSet<R>::from_parts({{R(0), frac<R>(1, 4)}}));
  CHECK(A.complement() == IntervalSet<R>::from_parts({{frac<R>(1, 2), R(1)}}));
  CHECK(IntervalSet<R>::full().complement().is_empty());
  CHECK(IntervalSet<R>::empty_set().complement() == IntervalSet<R>::full());
  CHECK(IntervalSet<R>::full().contains(A));
  CHECK_FALSE(A.contains(B));
}

TEST_CASE("union of touching parts merges") {
  auto A = IntervalSet<R>::from_parts({{R(0), frac<R>(1, 3)}});
  auto B = IntervalSet<R>::from_parts({{frac<R>(1, 3), frac<R>(2, 3)}});
  auto U = A.union_with(B);
  CHECK(U.parts().size() == 1);
  CHECK(U.measure() == frac<R>(2, 3));
}

TEST_CASE("affine image, both orientations") {
  auto A = IntervalSet<R>::from_parts({{R(0), frac<R>(1, 2)}, {frac<R>(3, 4), R(1)}});
  auto up = A.affine_image(frac<R>(1, 2), frac<R>(1, 4));
  CHECK(up == IntervalSet<R>::from_parts(
                  {{frac<R>(1, 4), frac<R>(1, 2)}, {frac<R>(5, 8), frac<R>(3, 4)}}));
  auto down = A.affine_image(frac<R>(-1, 2), frac<R>(1, 2));
  CHECK(down == IntervalSet<R>::from_parts(
                    {{R(0), frac<R>(1, 8)}, {frac<R>(1, 4), frac<R>(1, 2)}}));
  CHECK(up.measure() == A.measure() / 2);
  CHECK(down.measure() == A.measure() / 2);
  CHECK_THROWS_AS(A.affine_image(R(2), R(0)), RangeError);
  CHECK_THROWS_AS(A.affine_image(R(0), R(0)), DomainError);
}

TEST_CASE("randomized identities: inclusion-exclusion, De Morgan, involution") {
  auto battery = random_interval_battery<R>(11, 60);
  std::mt19937_64 rng(12);
  for (std::size_t i = 0; i + 1 < battery.size(); i += 2) {
    const auto& A = battery[i];
    const auto& B = battery[i + 1];
    CHECK(A.union_with(B).measure() + A.intersect(B).measure() == A.measure() + B.measure());
    CHECK(A.complement().complement() == A);
    CHECK(A.union_with(B).complement() == A.complement().intersect(B.complement()));
    CHECK(A.set_difference(B) == A.intersect(B.complement()));
    CHECK(A.union_with(B).contains(A));
    CHECK(A.contains(A.intersect(B)));
    // image then preimage of a monotone affine map is the identity on sets
    R a = frac<R>(testgen::draw(rng, 1, 4), 8);
    if (rng() % 2) a = -a;
    R b = (a > 0) ? frac<R>(testgen::draw(rng, 0, 3), 8) : frac<R>(testgen::draw(rng, 5, 8), 8);
    auto img = A.affine_image(a, b);
    CHECK(img.affine_image(R(1) / a, -b / a) == A);
    CHECK(img.measure() == sabs(a) * A.measure());
  }
}

TEST_CASE("float mode tolerates near-touching endpoints") {
  auto A = IntervalSet<double>::from_parts({{0.0, 1.0 / 3.0}});
  auto B = IntervalSet<double>::from_parts({{1.0 / 3.0 + 1e-15, 0.5}});
  auto U = A.union_with(B);
  CHECK(U.parts().size() == 1);  // gap below tolerance merges
  CHECK(U.measure() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(A.contains_point(1.0 / 3.0 - 1e-16));
}
