#include "qcmt/algebra.hpp"

#include <algorithm>

#include "qcmt/format.hpp"

namespace qcmt {

Index::Index(std::string tag) : tag_(tag), partner_(std::move(tag)) {}

Index::Index(std::string tag, std::string partner_tag)
    : tag_(std::move(tag)), partner_(std::move(partner_tag)) {}

Index involve(const Index& i) { return Index(i.partner_tag(), i.tag()); }

Word Word::adjoint() const {
  std::vector<Index> out;
  out.reserve(factors_.size());
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    out.push_back(involve(*it));
  }
  return Word(std::move(out));
}

std::string Word::to_string() const {
  if (factors_.empty()) return "1";
  std::string out;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (k) out += '*';
    out += 'M';
    out += factors_[k].tag();
  }
  return out;
}

Word operator*(const Word& a, const Word& b) {
  std::vector<Index> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.factors_.begin(), a.factors_.end());
  out.insert(out.end(), b.factors_.begin(), b.factors_.end());
  return Word(std::move(out));
}

bool operator<(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.factors_.begin(), a.factors_.end(),
                                      b.factors_.begin(), b.factors_.end());
}

AlgebraElement::AlgebraElement(const Word& w, Complex coefficient) {
  add_term(w, coefficient);
}

AlgebraElement::AlgebraElement(const Index& generator, Complex coefficient) {
  add_term(Word{generator}, coefficient);
}

AlgebraElement AlgebraElement::identity(Complex coefficient) {
  return AlgebraElement(Word{}, coefficient);
}

Complex AlgebraElement::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Complex{} : it->second;
}

void AlgebraElement::add_term(const Word& w, Complex c) {
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

AlgebraElement AlgebraElement::pruned(double epsilon) const {
  AlgebraElement out;
  for (const auto& [w, c] : terms_) {
    if (std::abs(c) > epsilon) out.terms_.emplace(w, c);
  }
  return out;
}

std::string AlgebraElement::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += format_complex(c) + "*" + w.to_string();
  }
  return out;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
  for (const auto& [w, c] : other.terms_) add_term(w, c);
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& other) {
  for (const auto& [w, c] : other.terms_) add_term(w, -c);
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(Complex scalar) {
  if (scalar == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= scalar;
    // underflow can still produce an exact zero
    if (it->second == Complex{}) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  AlgebraElement out;
  for (const auto& [wa, ca] : a.terms_) {
    for (const auto& [wb, cb] : b.terms_) out.add_term(wa * wb, ca * cb);
  }
  return out;
}

AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b) {
  return a * b;
}

AlgebraElement adjoint(const AlgebraElement& a) {
  AlgebraElement out;
  for (const auto& [w, c] : a.terms()) out.add_term(w.adjoint(), std::conj(c));
  return out;
}

AlgebraElement commutator(const AlgebraElement& a, const AlgebraElement& b) {
  return a * b - b * a;
}

}  // namespace qcmt
