#include "tkmp/monomials.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "tkmp/errors.hpp"

namespace tkmp {

namespace {

// C(a, b) with overflow detection.
std::size_t checked_binomial(std::size_t a, std::size_t b) {
  if (b > a) return 0;
  b = std::min(b, a - b);
  std::size_t result = 1;
  for (std::size_t i = 1; i <= b; ++i) {
    // result * (a - b + i) is divisible by i; split the division to stay exact
    const std::size_t g = std::gcd(result, i);
    const std::size_t factor = (a - b + i) / (i / g);
    if (result / g > std::numeric_limits<std::size_t>::max() / factor) {
      throw CapacityError("binomial coefficient C(" + std::to_string(a) + ", " +
                          std::to_string(b) + ") overflows");
    }
    result = result / g * factor;
  }
  return result;
}

}  // namespace

Exponent::Exponent(int n) : entries_(static_cast<std::size_t>(n), 0) {}

Exponent::Exponent(std::initializer_list<int> entries) {
  entries_.reserve(entries.size());
  for (int e : entries) {
    if (e < 0) throw ValidationError("negative exponent entry");
    entries_.push_back(static_cast<value_type>(e));
    degree_ += e;
  }
}

Exponent::Exponent(std::span<const int> entries) {
  entries_.reserve(entries.size());
  for (int e : entries) {
    if (e < 0) throw ValidationError("negative exponent entry");
    entries_.push_back(static_cast<value_type>(e));
    degree_ += e;
  }
}

void Exponent::set(int i, int value) {
  if (value < 0 || value > std::numeric_limits<value_type>::max()) {
    throw ValidationError("exponent entry out of range");
  }
  auto& slot = entries_[static_cast<std::size_t>(i)];
  degree_ += value - slot;
  slot = static_cast<value_type>(value);
}

Exponent Exponent::operator+(const Exponent& other) const {
  Exponent out(*this);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    out.entries_[i] = static_cast<value_type>(out.entries_[i] + other.entries_[i]);
  }
  out.degree_ = degree_ + other.degree_;
  return out;
}

bool Exponent::divisible_by(const Exponent& other) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i] < other.entries_[i]) return false;
  }
  return true;
}

Exponent Exponent::operator-(const Exponent& other) const {
  if (!divisible_by(other)) throw ValidationError("exponent subtraction underflow");
  Exponent out(*this);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    out.entries_[i] = static_cast<value_type>(out.entries_[i] - other.entries_[i]);
  }
  out.degree_ = degree_ - other.degree_;
  return out;
}

std::strong_ordering Exponent::operator<=>(const Exponent& other) const noexcept {
  if (degree_ != other.degree_) return degree_ <=> other.degree_;
  // Same degree: the larger leading entry comes first.
  for (std::size_t i = 0; i < entries_.size() && i < other.entries_.size(); ++i) {
    if (entries_[i] != other.entries_[i]) return other.entries_[i] <=> entries_[i];
  }
  return entries_.size() <=> other.entries_.size();
}

std::string Exponent::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(entries_[i]);
  }
  return out + ")";
}

std::size_t ExponentHash::operator()(const Exponent& e) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto v : e.entries()) {
    h ^= v;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t monomial_count(int n, int d) {
  if (n < 1 || d < 0) throw ValidationError("monomial_count needs n >= 1 and d >= 0");
  return checked_binomial(static_cast<std::size_t>(n + d), static_cast<std::size_t>(d));
}

std::size_t graded_lex_rank(const Exponent& alpha) {
  const int n = alpha.size();
  const int t = alpha.degree();
  // Monomials of degree < t come first.
  std::size_t pos = t == 0 ? 0 : checked_binomial(static_cast<std::size_t>(n + t - 1),
                                                   static_cast<std::size_t>(n));
  // Within degree t, count exponents whose first differing entry is larger.
  int remaining = t;
  for (int i = 0; i + 1 < n; ++i) {
    const int a = alpha[i];
    const int parts = n - i - 1;
    if (remaining - a >= 1) {
      pos += checked_binomial(static_cast<std::size_t>(remaining - a - 1 + parts),
                              static_cast<std::size_t>(parts));
    }
    remaining -= a;
  }
  return pos;
}

MonomialBasis::MonomialBasis(int n, int d) : n_(n), d_(d) {
  if (n < 1 || d < 0) throw ValidationError("MonomialBasis needs n >= 1 and d >= 0");
  const std::size_t count = monomial_count(n, d);
  table_.reserve(count);
  degrees_.reserve(count);

  std::vector<int> current(static_cast<std::size_t>(n), 0);
  for (int t = 0; t <= d; ++t) {
    // Lex-descending walk over compositions of t into n parts.
    std::fill(current.begin(), current.end(), 0);
    current[0] = t;
    while (true) {
      table_.emplace_back(std::span<const int>(current));
      degrees_.push_back(t);
      // Find the rightmost non-last position with a positive entry, move one
      // unit to the right and gather the tail into the next slot.
      int i = n - 2;
      while (i >= 0 && current[static_cast<std::size_t>(i)] == 0) --i;
      if (i < 0) break;
      const int tail = current[static_cast<std::size_t>(n - 1)];
      current[static_cast<std::size_t>(n - 1)] = 0;
      current[static_cast<std::size_t>(i)] -= 1;
      current[static_cast<std::size_t>(i + 1)] = tail + 1;
    }
  }
}

std::size_t MonomialBasis::index_of(const Exponent& alpha) const {
  if (alpha.size() != n_) throw ValidationError("exponent has wrong variable count");
  if (alpha.degree() > d_) {
    throw DegreeExceeded("exponent " + alpha.to_string() + " exceeds basis degree " +
                         std::to_string(d_));
  }
  return graded_lex_rank(alpha);
}

MonomialBasis enumerate(int n, int d) { return MonomialBasis(n, d); }

}  // namespace tkmp
