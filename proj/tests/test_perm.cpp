#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qdem/perm.hpp"

using namespace qdem;

TEST_CASE("permutation construction validates a bijection") {
  CHECK_NOTHROW(Permutation({2, 1, 3}));
  CHECK_THROWS_AS(Permutation({1, 1, 3}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation({0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation({1, 4, 2}), std::invalid_argument);
  CHECK(Permutation::identity(3) == Permutation({1, 2, 3}));
  CHECK(Permutation::longest(4) == Permutation({4, 3, 2, 1}));
}

TEST_CASE("length examples") {
  CHECK(length(Permutation::identity(5)) == 0);
  CHECK(length(Permutation({4, 3, 2, 1})) == 6);
  CHECK(length(Permutation({2, 1, 3})) == 1);
}

TEST_CASE("length agrees with a quadratic inversion count on all of S_6") {
  for (const auto& a : oracle::all_permutations(6)) CHECK(length(Permutation(a)) == oracle::inversions(a));
}

TEST_CASE("left multiplication swaps values") {
  CHECK(left_multiply_simple(1, Permutation::identity(2)) == Permutation({2, 1}));
  CHECK(left_multiply_simple(1, Permutation({2, 1})) == Permutation::identity(2));
  const auto r = left_multiply_simple(2, Permutation({2, 1, 3}));
  CHECK(r == Permutation({3, 1, 2}));
  CHECK(length(r) == 2);
  CHECK_THROWS_AS(left_multiply_simple(0, Permutation::identity(3)), std::out_of_range);
  CHECK_THROWS_AS(left_multiply_simple(3, Permutation::identity(3)), std::out_of_range);
}

TEST_CASE("simple multiplications change length by exactly one on S_n, n <= 6") {
  for (int n = 2; n <= 6; ++n)
    for (const auto& a : oracle::all_permutations(n)) {
      const Permutation s(a);
      for (int k = 1; k < n; ++k) {
        CHECK(std::abs(length(left_multiply_simple(k, s)) - length(s)) == 1);
        CHECK(std::abs(length(right_multiply_simple(s, k)) - length(s)) == 1);
      }
    }
}

TEST_CASE("left and right simple products match composition with a transposition") {
  for (const auto& a : oracle::all_permutations(4)) {
    const Permutation s(a);
    for (int k = 1; k < 4; ++k) {
      auto t = oracle::identity(4);
      std::swap(t[static_cast<std::size_t>(k - 1)], t[static_cast<std::size_t>(k)]);
      CHECK(left_multiply_simple(k, s) == compose(Permutation(t), s));
      CHECK(right_multiply_simple(s, k) == compose(s, Permutation(t)));
    }
    CHECK(compose(s, inverse(s)) == Permutation::identity(4));
  }
}

TEST_CASE("height function examples") {
  CHECK(height_perm(Permutation::identity(10), 0.5, 0.2) == doctest::Approx(0.3));
  CHECK(height_perm(Permutation::longest(10), 0.5, 0.5) == doctest::Approx(0.5));
  for (const auto& a : oracle::all_permutations(4)) {
    const Permutation s(a);
    CHECK(height_perm(s, 1.0, 0.0) == 1.0);
    for (double y : {0.0, 0.3, 0.5, 1.0}) CHECK(height_perm(s, 0.0, y) == 0.0);
  }
}

TEST_CASE("scaled floor recovers grid indices exactly") {
  for (int n : {7, 100, 2000})
    for (int k = 0; k <= n; ++k) CHECK(scaled_floor(n, static_cast<double>(k) / n) == k);
  CHECK(height_perm(Permutation::identity(100), 1.0, 0.29) == doctest::Approx(0.71));
}

TEST_CASE("height function is monotone on grid points") {
  const Permutation s({3, 7, 1, 5, 2, 8, 6, 4});
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const double x = i / 8.0, y = j / 8.0, d = 1 / 8.0;
      CHECK(height_perm(s, x + d, y) >= height_perm(s, x, y));
      CHECK(height_perm(s, x, y + d) <= height_perm(s, x, y));
    }
}

TEST_CASE("text round trip") {
  const Permutation s({3, 1, 2, 5, 4});
  CHECK(to_string(s) == "3 1 2 5 4");
  CHECK(parse_permutation("3 1 2 5 4") == s);
  CHECK_THROWS(parse_permutation("1 1"));
  CHECK_THROWS(parse_permutation("1 x"));
}

TEST_CASE("sup distance") {
  const auto ax = uniform_axis(5, 0.0, 1.0);
  const auto a = tabulate(Chart::unit_square, ax, ax, [](double, double) { return 0.2; });
  const auto b = tabulate(Chart::unit_square, ax, ax, [](double, double) { return 0.5; });
  CHECK(sup_distance(a, a) == 0.0);
  CHECK(sup_distance(a, b) == doctest::Approx(0.3));
  CHECK(sup_distance(b, a) == sup_distance(a, b));
  const auto c = tabulate(Chart::cylinder, ax, ax, [](double, double) { return 0.2; });
  CHECK_THROWS_AS(sup_distance(a, c), std::invalid_argument);
  const auto d = tabulate(Chart::unit_square, uniform_axis(4, 0.0, 1.0), ax, [](double, double) { return 0.2; });
  CHECK_THROWS_AS(sup_distance(a, d), std::invalid_argument);
}

TEST_CASE("height field validation and csv") {
  auto f = permutation_field(Permutation({2, 1}), 3);
  CHECK_NOTHROW(validate(f));
  f.values[0] = 1.5;
  CHECK_THROWS_AS(validate(f), std::invalid_argument);
  HeightField g = tabulate(Chart::unit_square, {0.0, 0.5}, {0.25}, [](double x, double) { return x / 3; });
  std::ostringstream out;
  write_csv(out, g);
  CHECK(out.str() == "coord1,coord2,value\n0,0.25,0\n0.5,0.25,0.166666666667\n");
  CHECK(chart_name(Chart::unit_square) == "unit-square");
}
