#pragma once

#include <compare>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

namespace qcmt {

using Complex = std::complex<double>;

/// Default pruning threshold for coefficients produced by numerical routines.
inline constexpr double kNumericPruneEpsilon = 1e-14;

/**
 * A measurement label together with the label of its adjoint partner.
 *
 * Equality and ordering use the tag only, so the tag must determine the
 * partner within one index set. A self-conjugate index is its own partner.
 */
class Index {
 public:
  explicit Index(std::string tag);
  Index(std::string tag, std::string partner_tag);

  const std::string& tag() const noexcept { return tag_; }
  const std::string& partner_tag() const noexcept { return partner_; }
  bool self_conjugate() const noexcept { return tag_ == partner_; }

  friend bool operator==(const Index& a, const Index& b) noexcept {
    return a.tag_ == b.tag_;
  }
  friend std::strong_ordering operator<=>(const Index& a,
                                          const Index& b) noexcept {
    return a.tag_ <=> b.tag_;
  }

 private:
  std::string tag_;
  std::string partner_;
};

/// i -> i^c. Applying it twice returns an index equal to (and with the same
/// partner as) the original.
Index involve(const Index& i);

/// An ordered product of generators. The empty word is the identity.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Index> factors) : factors_(factors) {}
  explicit Word(std::vector<Index> factors) : factors_(std::move(factors)) {}

  const std::vector<Index>& factors() const noexcept { return factors_; }
  std::size_t size() const noexcept { return factors_.size(); }
  bool empty() const noexcept { return factors_.empty(); }
  const Index& operator[](std::size_t k) const { return factors_[k]; }

  /// Reversed order with every factor replaced by its involution partner.
  Word adjoint() const;

  /// "M1*M2", or "1" for the identity word.
  std::string to_string() const;

  friend Word operator*(const Word& a, const Word& b);
  friend bool operator==(const Word& a, const Word& b) = default;
  /// Shorter words first, then lexicographic by tag.
  friend bool operator<(const Word& a, const Word& b);

 private:
  std::vector<Index> factors_;
};

/// Finite complex-linear combination of words in the free *-algebra.
class AlgebraElement {
 public:
  using TermMap = std::map<Word, Complex>;

  AlgebraElement() = default;
  AlgebraElement(const Word& w, Complex coefficient = 1.0);
  explicit AlgebraElement(const Index& generator, Complex coefficient = 1.0);

  static AlgebraElement identity(Complex coefficient = 1.0);

  const TermMap& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Coefficient of `w`, zero when absent.
  Complex coefficient(const Word& w) const;

  /// Accumulates c·w, dropping the term if the sum is exactly zero.
  void add_term(const Word& w, Complex c);

  /// Copy with every coefficient of modulus <= epsilon removed.
  AlgebraElement pruned(double epsilon = kNumericPruneEpsilon) const;

  std::string to_string() const;

  AlgebraElement& operator+=(const AlgebraElement& other);
  AlgebraElement& operator-=(const AlgebraElement& other);
  AlgebraElement& operator*=(Complex scalar);

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) {
    return a += b;
  }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) {
    return a -= b;
  }
  friend AlgebraElement operator-(AlgebraElement a) { return a *= -1.0; }
  friend AlgebraElement operator*(Complex s, AlgebraElement a) {
    return a *= s;
  }
  friend AlgebraElement operator*(AlgebraElement a, Complex s) {
    return a *= s;
  }
  friend AlgebraElement operator*(const AlgebraElement& a,
                                  const AlgebraElement& b);
  friend bool operator==(const AlgebraElement& a,
                         const AlgebraElement& b) = default;

 private:
  TermMap terms_;
};

AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b);

/// Anti-linear, order-reversing adjoint.
AlgebraElement adjoint(const AlgebraElement& a);

/// [a, b] = ab - ba.
AlgebraElement commutator(const AlgebraElement& a, const AlgebraElement& b);

}  // namespace qcmt
