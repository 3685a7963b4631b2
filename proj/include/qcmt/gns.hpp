#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcmt/algebra.hpp"
#include "qcmt/gaussian.hpp"

namespace qcmt {

/// All words of length <= degree over `indices`, identity first, then by
/// length and lexicographically in index-list order.
struct MonomialBasis {
  std::vector<Index> indices;
  std::size_t degree = 0;
  std::vector<Word> words;
};

MonomialBasis build_basis(std::span<const Index> indices, std::size_t degree);

/// Gram matrix of a basis under a state with its sorted spectrum.
struct GramReport {
  Eigen::MatrixXcd gram;
  std::vector<double> eigenvalues;  // ascending
  std::size_t null_dimension = 0;   // #{|lambda| <= tolerance}
  double tolerance = kPsdTolerance;

  std::size_t dimension() const { return eigenvalues.size(); }
  double min_eigenvalue() const {
    return eigenvalues.empty() ? std::numeric_limits<double>::infinity()
                               : eigenvalues.front();
  }
  bool positive_semidefinite() const { return min_eigenvalue() >= -tolerance; }

  /// {"dimension", "eigenvalues", "null_dimension", "tolerance"}.
  std::string to_json() const;
};

/// Spectrum of an already-assembled Gram matrix. Throws if it is not
/// Hermitian to 1e-12 (relative to its largest entry).
GramReport gram_report(Eigen::MatrixXcd gram, double tolerance = kPsdTolerance);

/// G_ab = rho(w_a^dagger w_b).
GramReport gram(const MonomialBasis& basis, const State& s,
                double tolerance = kPsdTolerance);

/**
 * Truncated GNS representation.
 *
 * Vectors are coordinates in an orthonormal basis of the degree-d span
 * modulo the Gram null space. Each generator maps that space into the
 * degree-(d+1) space; `embedding` is the isometric inclusion of the former
 * into the latter, so words act as embedding^H * map_i1 * ... * map_ik.
 * This reproduces the state exactly for words of length <= d.
 */
class Representation {
 public:
  const MonomialBasis& basis() const noexcept { return basis_; }
  std::size_t dimension() const noexcept {
    return static_cast<std::size_t>(cyclic_.size());
  }
  std::size_t raised_dimension() const noexcept {
    return static_cast<std::size_t>(embedding_.rows());
  }
  const Eigen::VectorXcd& cyclic_vector() const noexcept { return cyclic_; }
  const Eigen::MatrixXcd& embedding() const noexcept { return embedding_; }

  /// Degree-raising matrix of a generator (raised_dimension x dimension).
  const Eigen::MatrixXcd& map(const Index& generator) const;

  /// Square matrix of pi(w) on the degree-d quotient.
  Eigen::MatrixXcd operator_matrix(const Word& w) const;

  /// <Omega, pi(w) Omega>.
  Complex vacuum_expectation(const Word& w) const;

 private:
  friend Representation represent(const MonomialBasis&, const State&, double);

  MonomialBasis basis_;
  std::map<std::string, Eigen::MatrixXcd> maps_;
  Eigen::MatrixXcd embedding_;
  Eigen::VectorXcd cyclic_;
};

/**
 * Builds the representation on the quotient by the Gram null space
 * (eigenvalues <= 1e-10 * largest are dropped). Throws std::domain_error
 * when an eigenvalue is below -tolerance, i.e. the functional is not a state.
 */
Representation represent(const MonomialBasis& basis, const State& s,
                         double tolerance = kPsdTolerance);

/**
 * Smallest eigenvalue over `trials` random Gram matrices.
 *
 * `sample` fills a list of elements for one trial and `inner` evaluates
 * rho(a^dagger b) between two of them. The result is the minimum of
 * rho(A^dagger A) over unit-norm combinations A of the sampled elements;
 * +infinity when trials == 0.
 */
template <typename Element>
double probe_min_eigenvalue(
    std::size_t trials,
    const std::function<std::vector<Element>(std::size_t trial)>& sample,
    const std::function<Complex(const Element&, const Element&)>& inner) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto elements = sample(t);
    const auto n = static_cast<Eigen::Index>(elements.size());
    if (n == 0) continue;
    Eigen::MatrixXcd g(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        g(a, b) = inner(elements[static_cast<std::size_t>(a)],
                        elements[static_cast<std::size_t>(b)]);
      }
    }
    const Eigen::MatrixXcd h = (g + g.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    worst = std::min(worst, solver.eigenvalues().minCoeff());
  }
  return worst;
}

/**
 * Worst-case Re rho(A^dagger A) over random unit-norm A spanned by the
 * identity and three random words of length 1..max_len per trial. Genuine
 * states return >= -1e-10; +infinity when trials == 0.
 */
double positivity_probe(const State& s, std::size_t trials, std::size_t max_len,
                        std::uint64_t seed = 0);

}  // namespace qcmt
