#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qdem/hecke.hpp"

using namespace qdem;

namespace {

const double kGrid[] = {0.0, 0.3, 0.7, 1.0};

double law_distance(const HeckeVector& h, const std::map<oracle::Images, double>& law) {
  double worst = 0.0;
  for (const auto& [a, m] : law) worst = std::max(worst, std::abs(h.probability(Permutation(a)) - m));
  for (const auto& [s, m] : h.entries()) {
    auto it = law.find(oracle::Images(s.images().begin(), s.images().end()));
    worst = std::max(worst, std::abs(m - (it == law.end() ? 0.0 : it->second)));
  }
  return worst;
}

}  // namespace

TEST_CASE("staircase word") {
  CHECK(staircase_word(2).letters == std::vector<int>{1});
  CHECK(staircase_word(3).letters == std::vector<int>{2, 1, 2});
  CHECK(staircase_word(4).letters == std::vector<int>{3, 2, 3, 1, 2, 3});
  for (int n = 2; n <= 12; ++n) CHECK(staircase_word(n).letters.size() == static_cast<std::size_t>(n * (n - 1) / 2));
  CHECK_THROWS_AS(staircase_word(1), std::invalid_argument);
}

TEST_CASE("q-Demazure step") {
  const auto id = Permutation::identity(3);
  const Permutation s1({2, 1, 3});
  CHECK(q_demazure_step(1, id, 0.0, 0.99) == s1);
  CHECK(q_demazure_step(1, id, 1.0, 0.0) == s1);
  CHECK(q_demazure_step(1, s1, 0.0, 0.0) == s1);
  CHECK(q_demazure_step(1, s1, 1.0, 0.5) == id);
  CHECK(q_demazure_step(1, s1, 0.5, 0.4) == id);
  CHECK(q_demazure_step(1, s1, 0.5, 0.6) == s1);
}

TEST_CASE("word sampler at p = 1 and p = 0") {
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    for (double q : kGrid) {
      CHECK(sample_sigma(7, 1.0, q, seed) == Permutation::longest(7));
      CHECK(sample_sigma(7, 0.0, q, seed) == Permutation::identity(7));
    }
}

TEST_CASE("word sampler is deterministic given the seed") {
  CHECK(sample_sigma(30, 0.5, 0.5, 99) == sample_sigma(30, 0.5, 0.5, 99));
  CHECK(sample_sigma(30, 0.5, 0.5, 99) != sample_sigma(30, 0.5, 0.5, 100));
}

TEST_CASE("exact law matches the branch enumeration oracle") {
  for (int n = 2; n <= 4; ++n)
    for (double p : kGrid)
      for (double q : kGrid) {
        const auto h = hecke_exact_distribution(n, p, q);
        CHECK(law_distance(h, oracle::enumerate_law(n, p, q)) < 1e-14);
        CHECK(std::abs(h.total_mass() - 1.0) < 1e-12);
      }
}

TEST_CASE("small exact values") {
  const auto h2 = hecke_exact_distribution(2, 0.3, 0.6);
  CHECK(h2.probability(Permutation::identity(2)) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(h2.probability(Permutation({2, 1})) == doctest::Approx(0.3).epsilon(1e-14));
  const auto h3 = hecke_exact_distribution(3, 0.5, 0.5);
  CHECK(std::abs(h3.probability(Permutation::identity(3)) - 0.1875) < 1e-15);
  // (1-p)^3 + p^2 (1-p) q
  for (double p : {0.2, 0.5, 0.9})
    for (double q : {0.1, 0.5})
      CHECK(std::abs(hecke_exact_distribution(3, p, q).probability(Permutation::identity(3)) -
                     (std::pow(1 - p, 3) + p * p * (1 - p) * q)) < 1e-14);
}

TEST_CASE("expected inversions") {
  CHECK(expected_inversions(hecke_exact_distribution(2, 0.37, 0.5)) == doctest::Approx(0.37));
  for (int n = 2; n <= 5; ++n)
    CHECK(expected_inversions(hecke_exact_distribution(n, 1.0, 0.4)) == doctest::Approx(n * (n - 1) / 2.0));
  // 21/16 from exact rational enumeration.
  CHECK(std::abs(expected_inversions(hecke_exact_distribution(3, 0.5, 0.5)) - 1.3125) < 1e-14);
}

TEST_CASE("q = 0 support is the set of Demazure products of subwords") {
  for (int n = 2; n <= 4; ++n) {
    const auto reach = oracle::demazure_reachable(n);
    const auto h = hecke_exact_distribution(n, 0.5, 0.0);
    std::set<oracle::Images> support;
    for (const auto& [s, m] : h.entries())
      if (m > 0) support.insert(oracle::Images(s.images().begin(), s.images().end()));
    CHECK(support == reach);
  }
}

TEST_CASE("q = 1 law is the group-product pushforward") {
  for (int n = 2; n <= 4; ++n)
    for (double p : {0.3, 0.7}) CHECK(law_distance(hecke_exact_distribution(n, p, 1.0), oracle::group_pushforward(n, p)) < 1e-14);
}

TEST_CASE("support lengths stay below the longest element") {
  const auto h = hecke_exact_distribution(6, 0.6, 0.4);
  for (const auto& [s, m] : h.entries()) {
    CHECK(m >= 0.0);
    CHECK(length(s) <= 15);
  }
}

TEST_CASE("exact cap") {
  CHECK_THROWS_AS(hecke_exact_distribution(8, 0.5, 0.5), std::domain_error);
  CHECK_NOTHROW(hecke_exact_distribution(8, 0.5, 0.5, 8));
}

TEST_CASE("adjusted parameter does not match at small n") {
  const double tv = total_variation(hecke_exact_distribution(4, 0.5, 0.5), hecke_exact_distribution(4, 1.0 / 3.0, 0.0));
  CHECK(tv > 0.01);
  CHECK(tv == doctest::Approx(0.2258605538408779).epsilon(1e-12));
}

TEST_CASE("Monte Carlo agrees with the exact law at n = 4") {
  const int N = 200000;
  HeckeVector emp(4);
  for (int s = 0; s < N; ++s) emp.add(sample_sigma(4, 0.7, 0.3, sample_seed(5, s)), 1.0 / N);
  CHECK(total_variation(emp, hecke_exact_distribution(4, 0.7, 0.3)) < 0.01);
}

TEST_CASE("json ordering") {
  const auto j = to_json(hecke_exact_distribution(3, 0.5, 0.5));
  REQUIRE(j.size() == 6);
  CHECK(j[0]["perm"] == "1 3 2");
  CHECK(j[1]["perm"] == "1 2 3");
  for (std::size_t i = 1; i < j.size(); ++i) CHECK(j[i - 1]["prob"].get<double>() >= j[i]["prob"].get<double>());
  CHECK(j[2]["perm"] == "2 1 3");  // ties broken lexicographically
}
