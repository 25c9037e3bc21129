#include <doctest.h>

#include "support/oracles.hpp"
#include "tkmp/errors.hpp"
#include "tkmp/monomials.hpp"

using namespace tkmp;

TEST_CASE("enumerate matches the brute-force graded lex order") {
  for (int n = 1; n <= 4; ++n) {
    for (int d = 0; d <= 6; ++d) {
      const MonomialBasis b(n, d);
      const auto ref = oracle::graded_lex(n, d);
      REQUIRE(b.size() == ref.size());
      for (std::size_t i = 0; i < b.size(); ++i) {
        for (int v = 0; v < n; ++v) CHECK(b[i][v] == ref[i][static_cast<std::size_t>(v)]);
      }
    }
  }
}

TEST_CASE("small listings") {
  const MonomialBasis one(1, 2);
  CHECK(one[0] == Exponent{0});
  CHECK(one[1] == Exponent{1});
  CHECK(one[2] == Exponent{2});
  const MonomialBasis two(2, 2);
  const std::vector<Exponent> expect{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  REQUIRE(two.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(two[i] == expect[i]);
  CHECK(MonomialBasis(4, 2).size() == 15);
}

TEST_CASE("index_of") {
  const MonomialBasis b(2, 2);
  CHECK(b.index_of(Exponent{0, 0}) == 0);
  CHECK(b.index_of(Exponent{1, 1}) == 4);
  const MonomialBasis b6(2, 6);
  CHECK(b6.index_of(Exponent{0, 6}) == 27);
  // cross-check by linear scan
  for (std::size_t i = 0; i < b6.size(); ++i) {
    if (b6[i] == Exponent{0, 6}) CHECK(i == 27);
  }
  CHECK_THROWS_AS(b.index_of(Exponent{2, 1}), DegreeExceeded);
}

TEST_CASE("monomial_count") {
  CHECK(monomial_count(2, 6) == 28);
  CHECK(monomial_count(5, 0) == 1);
  CHECK(monomial_count(4, 4) == 70);
  for (int n = 1; n <= 8; ++n) {
    for (int d = 0; d <= 12; ++d) CHECK(monomial_count(n, d) == oracle::binomial(n + d, d));
  }
  CHECK_THROWS_AS(monomial_count(200, 200), CapacityError);
}

TEST_CASE("prefix property, identity permutation, degree counts") {
  for (int n = 1; n <= 4; ++n) {
    const int dmax = 8;
    const MonomialBasis big(n, dmax);
    for (int dp = 0; dp <= dmax; ++dp) {
      const MonomialBasis small(n, dp);
      for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i] == big[i]);
      std::size_t total = 0;
      for (int t = 0; t <= dp; ++t) total += oracle::binomial(n + t - 1, t);
      CHECK(total == small.size());
    }
    for (std::size_t i = 0; i < big.size(); ++i) {
      CHECK(big.index_of(big[i]) == i);
      CHECK(graded_lex_rank(big[i]) == i);
      CHECK(big.degree(i) == big[i].degree());
    }
  }
}

TEST_CASE("exponent arithmetic and ordering") {
  const Exponent a{2, 1}, b{1, 0};
  CHECK(a + b == Exponent{3, 1});
  CHECK(a.divisible_by(b));
  CHECK_FALSE(b.divisible_by(a));
  CHECK(a - b == Exponent{1, 1});
  CHECK(Exponent{1, 0} < Exponent{0, 2});   // lower degree first
  CHECK(Exponent{2, 0} < Exponent{1, 1});   // x1 greatest within a degree
}
