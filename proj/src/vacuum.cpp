#include "qcmt/vacuum.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "qcmt/random.hpp"

namespace qcmt {

ExtendedWord::ExtendedWord(std::vector<Word> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) segments_.emplace_back();
  normalize();
}

void ExtendedWord::normalize() {
  if (segments_.size() <= 2) return;
  std::vector<Word> out;
  out.reserve(segments_.size());
  out.push_back(std::move(segments_.front()));
  for (std::size_t k = 1; k + 1 < segments_.size(); ++k) {
    if (!segments_[k].empty()) out.push_back(std::move(segments_[k]));
  }
  out.push_back(std::move(segments_.back()));
  segments_ = std::move(out);
}

ExtendedWord ExtendedWord::adjoint() const {
  std::vector<Word> out;
  out.reserve(segments_.size());
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    out.push_back(it->adjoint());
  }
  return ExtendedWord(std::move(out));
}

std::string ExtendedWord::to_string() const {
  std::vector<std::string> parts;
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    if (k) parts.emplace_back("V");
    if (!segments_[k].empty()) parts.push_back(segments_[k].to_string());
  }
  if (parts.empty()) return "1";
  std::string out = parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k) out += "*" + parts[k];
  return out;
}

ExtendedWord operator*(const ExtendedWord& a, const ExtendedWord& b) {
  std::vector<Word> segments(a.segments_.begin(), a.segments_.end() - 1);
  segments.push_back(a.segments_.back() * b.segments_.front());
  segments.insert(segments.end(), b.segments_.begin() + 1, b.segments_.end());
  return ExtendedWord(std::move(segments));
}

bool operator<(const ExtendedWord& a, const ExtendedWord& b) {
  if (a.segments_.size() != b.segments_.size()) {
    return a.segments_.size() < b.segments_.size();
  }
  return std::lexicographical_compare(a.segments_.begin(), a.segments_.end(),
                                      b.segments_.begin(), b.segments_.end());
}

ExtendedElement::ExtendedElement(const AlgebraElement& a) {
  for (const auto& [w, c] : a.terms()) add_term(ExtendedWord(w), c);
}

void ExtendedElement::add_term(const ExtendedWord& w, Complex c) {
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

ExtendedElement& ExtendedElement::operator+=(const ExtendedElement& other) {
  for (const auto& [w, c] : other.terms_) add_term(w, c);
  return *this;
}

ExtendedElement operator*(Complex s, const ExtendedElement& a) {
  ExtendedElement out;
  for (const auto& [w, c] : a.terms_) out.add_term(w, s * c);
  return out;
}

ExtendedElement operator*(const ExtendedElement& a, const ExtendedElement& b) {
  ExtendedElement out;
  for (const auto& [wa, ca] : a.terms_) {
    for (const auto& [wb, cb] : b.terms_) out.add_term(wa * wb, ca * cb);
  }
  return out;
}

ExtendedElement adjoint(const ExtendedElement& a) {
  ExtendedElement out;
  for (const auto& [w, c] : a.terms()) out.add_term(w.adjoint(), std::conj(c));
  return out;
}

Complex extended_expect(const State& s, const ExtendedWord& w) {
  Complex value = 1.0;
  for (const auto& segment : w.segments()) {
    value *= s.evaluate(segment);
    if (value == Complex{}) break;
  }
  return value;
}

Complex extended_expect(const State& s, const ExtendedElement& a) {
  Complex total = 0.0;
  for (const auto& [w, c] : a.terms()) total += c * extended_expect(s, w);
  return total;
}

std::pair<Complex, Complex> commutation_witness(const State& s, const Index& i,
                                                const Index& j) {
  const ExtendedWord left({Word{i}, Word{j}});
  const ExtendedWord right({Word{}, Word{i, j}});
  return {extended_expect(s, left), extended_expect(s, right)};
}

GramReport extended_gram(const std::vector<ExtendedWord>& basis, const State& s,
                         double tolerance) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const ExtendedWord left = basis[static_cast<std::size_t>(a)].adjoint();
    for (Eigen::Index b = 0; b < n; ++b) {
      g(a, b) = extended_expect(s, left * basis[static_cast<std::size_t>(b)]);
    }
  }
  return gram_report(std::move(g), tolerance);
}

double extended_positivity_probe(const State& s, std::size_t trials,
                                 std::uint64_t seed) {
  const auto generators = s.generators();
  Rng rng(seed);
  auto random_segment = [&]() {
    std::vector<Index> factors;
    if (generators.empty()) return Word{};
    const std::size_t len = rng.index(3);
    for (std::size_t f = 0; f < len; ++f) {
      factors.push_back(generators[rng.index(generators.size())]);
    }
    return Word(std::move(factors));
  };
  auto sample = [&](std::size_t) {
    std::vector<ExtendedWord> words{ExtendedWord{}};
    for (int k = 0; k < 3; ++k) {
      const std::size_t projectors = rng.index(3);
      std::vector<Word> segments;
      for (std::size_t p = 0; p <= projectors; ++p) {
        segments.push_back(random_segment());
      }
      ExtendedWord w(std::move(segments));
      if (std::find(words.begin(), words.end(), w) == words.end()) {
        words.push_back(std::move(w));
      }
    }
    return words;
  };
  auto inner = [&](const ExtendedWord& a, const ExtendedWord& b) {
    return extended_expect(s, a.adjoint() * b);
  };
  return probe_min_eigenvalue<ExtendedWord>(trials, sample, inner);
}

ConditionedState::ConditionedState(std::shared_ptr<const State> base,
                                   AlgebraElement conditioner, double tolerance)
    : base_(std::move(base)),
      conditioner_(std::move(conditioner)),
      conditioner_adjoint_(adjoint(conditioner_)),
      normalization_(0.0) {
  if (!base_) throw std::invalid_argument("conditioned state needs a base state");
  const Complex norm = base_->expect(conditioner_adjoint_ * conditioner_);
  normalization_ = norm.real();
  if (!(normalization_ > tolerance)) {
    throw std::domain_error("null conditioner: rho(X^dagger X) = " +
                            std::to_string(normalization_) +
                            " is not above tolerance");
  }
}

Complex ConditionedState::evaluate(const Word& w) const {
  return base_->expect(conditioner_adjoint_ * AlgebraElement(w) * conditioner_) /
         normalization_;
}

ConditionedState condition(std::shared_ptr<const State> s, AlgebraElement x,
                           double tolerance) {
  return ConditionedState(std::move(s), std::move(x), tolerance);
}

}  // namespace qcmt
