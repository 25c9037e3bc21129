#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace tkmp {

// A multi-index alpha in N^n. The total degree is cached.
class Exponent {
 public:
  using value_type = std::uint16_t;

  Exponent() = default;
  explicit Exponent(int n);
  Exponent(std::initializer_list<int> entries);
  explicit Exponent(std::span<const int> entries);

  int size() const noexcept { return static_cast<int>(entries_.size()); }
  int degree() const noexcept { return degree_; }
  int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  void set(int i, int value);

  Exponent operator+(const Exponent& other) const;
  // True if other <= *this componentwise.
  bool divisible_by(const Exponent& other) const;
  Exponent operator-(const Exponent& other) const;

  bool operator==(const Exponent& other) const noexcept { return entries_ == other.entries_; }
  // Graded lexicographic order with x1 > x2 > ... > xn: lower degree first,
  // ties broken by the first differing entry, larger entry first.
  std::strong_ordering operator<=>(const Exponent& other) const noexcept;

  std::string to_string() const;
  const std::vector<value_type>& entries() const noexcept { return entries_; }

 private:
  std::vector<value_type> entries_;
  int degree_ = 0;
};

struct ExponentHash {
  std::size_t operator()(const Exponent& e) const noexcept;
};

// Exact binomial coefficient C(n+d, d); throws CapacityError on overflow.
std::size_t monomial_count(int n, int d);

// All exponents of n variables with degree <= d in graded lexicographic
// order. The basis for degree d' < d is a prefix of the basis for d.
class MonomialBasis {
 public:
  MonomialBasis(int n, int d);

  int num_vars() const noexcept { return n_; }
  int max_degree() const noexcept { return d_; }
  std::size_t size() const noexcept { return table_.size(); }
  const Exponent& operator[](std::size_t i) const { return table_[i]; }
  int degree(std::size_t i) const { return degrees_[i]; }
  const std::vector<Exponent>& table() const noexcept { return table_; }

  // Position of alpha; throws DegreeExceeded when |alpha| > max_degree().
  std::size_t index_of(const Exponent& alpha) const;

 private:
  int n_;
  int d_;
  std::vector<Exponent> table_;
  std::vector<int> degrees_;
};

MonomialBasis enumerate(int n, int d);

// Graded lex rank of alpha among all exponents of its variable count; needs
// no table, so it also indexes bases that were never materialised.
std::size_t graded_lex_rank(const Exponent& alpha);

}  // namespace tkmp
