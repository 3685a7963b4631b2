#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qcmt/algebra.hpp"
#include "qcmt/gaussian.hpp"
#include "qcmt/gns.hpp"

namespace qcmt {

/**
 * A word of the algebra extended by the vacuum projector V, stored as the
 * segments A_0 V A_1 V ... V A_k (k projectors, k + 1 segments).
 *
 * Normal form: interior segments are never empty, which imposes V V = V.
 * The first and last segments may be the identity.
 */
class ExtendedWord {
 public:
  /// The identity.
  ExtendedWord() : segments_(1) {}
  explicit ExtendedWord(Word w) : segments_{std::move(w)} {}
  explicit ExtendedWord(std::vector<Word> segments);

  static ExtendedWord projector() { return ExtendedWord({Word{}, Word{}}); }

  const std::vector<Word>& segments() const noexcept { return segments_; }
  std::size_t projector_count() const noexcept { return segments_.size() - 1; }

  /// Reverses the segments and takes the adjoint of each (V^dagger = V).
  ExtendedWord adjoint() const;

  /// Factors joined by '*', projectors as "V"; "1" for the identity.
  std::string to_string() const;

  friend ExtendedWord operator*(const ExtendedWord& a, const ExtendedWord& b);
  friend bool operator==(const ExtendedWord& a, const ExtendedWord& b) = default;
  friend bool operator<(const ExtendedWord& a, const ExtendedWord& b);

 private:
  void normalize();

  std::vector<Word> segments_;
};

/// Complex-linear combination of extended words.
class ExtendedElement {
 public:
  using TermMap = std::map<ExtendedWord, Complex>;

  ExtendedElement() = default;
  ExtendedElement(const ExtendedWord& w, Complex c = 1.0) { add_term(w, c); }
  explicit ExtendedElement(const AlgebraElement& a);

  const TermMap& terms() const noexcept { return terms_; }
  void add_term(const ExtendedWord& w, Complex c);

  ExtendedElement& operator+=(const ExtendedElement& other);
  friend ExtendedElement operator+(ExtendedElement a, const ExtendedElement& b) {
    return a += b;
  }
  friend ExtendedElement operator*(Complex s, const ExtendedElement& a);
  friend ExtendedElement operator*(const ExtendedElement& a,
                                   const ExtendedElement& b);

 private:
  TermMap terms_;
};

ExtendedElement adjoint(const ExtendedElement& a);

/// rho(A_0 V A_1 ... V A_k) = prod_j rho(A_j).
Complex extended_expect(const State& s, const ExtendedWord& w);
Complex extended_expect(const State& s, const ExtendedElement& a);

/// (rho(M_i V M_j), rho(V M_i M_j)). For a mean-zero Gaussian state this is
/// (0, (i^c, j)), so unequal entries witness [M_i, V] != 0.
std::pair<Complex, Complex> commutation_witness(const State& s, const Index& i,
                                                const Index& j);

/// Gram matrix rho(x_a^dagger x_b) of extended words.
GramReport extended_gram(const std::vector<ExtendedWord>& basis, const State& s,
                         double tolerance = kPsdTolerance);

/**
 * Positivity probe of the extended state: each trial spans the identity and
 * three random extended words with at most two projectors and segments of
 * length <= 2. +infinity when trials == 0.
 */
double extended_positivity_probe(const State& s, std::size_t trials,
                                 std::uint64_t seed = 0);

/// Default threshold below which a conditioner is considered null.
inline constexpr double kConditionTolerance = 1e-12;

/// A -> rho(X^dagger A X) / rho(X^dagger X).
class ConditionedState final : public State {
 public:
  ConditionedState(std::shared_ptr<const State> base, AlgebraElement conditioner,
                   double tolerance = kConditionTolerance);

  const AlgebraElement& conditioner() const noexcept { return conditioner_; }
  double normalization() const noexcept { return normalization_; }

  Complex evaluate(const Word& w) const override;
  std::vector<Index> generators() const override { return base_->generators(); }

 private:
  std::shared_ptr<const State> base_;
  AlgebraElement conditioner_;
  AlgebraElement conditioner_adjoint_;
  double normalization_;
};

/// Throws std::domain_error when rho(X^dagger X) <= tolerance.
ConditionedState condition(std::shared_ptr<const State> s, AlgebraElement x,
                           double tolerance = kConditionTolerance);

}  // namespace qcmt
