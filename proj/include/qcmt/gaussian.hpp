#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "qcmt/algebra.hpp"

namespace qcmt {

/// Longest word the perfect-matching expansion will evaluate.
inline constexpr std::size_t kMaxWickLength = 12;

/// Default eigenvalue tolerance for positive semi-definiteness checks.
inline constexpr double kPsdTolerance = 1e-10;

/**
 * The sesquilinear pairing (i, j) over a finite index list.
 *
 * Rows and columns follow `indices()`. Every index's involution partner must
 * itself be registered, and the kernel is authoritative about the involution
 * of the tags it holds. Construction checks Hermiticity; positivity is
 * checked separately (see `checked`) so that non-states can still be probed.
 */
class GaussianKernel {
 public:
  GaussianKernel(std::vector<Index> indices, Eigen::MatrixXcd matrix,
                 double hermiticity_tolerance = 1e-12);

  /// As the constructor, but also rejects matrices whose smallest eigenvalue
  /// is below -psd_tolerance.
  static GaussianKernel checked(std::vector<Index> indices,
                                Eigen::MatrixXcd matrix,
                                double psd_tolerance = kPsdTolerance);

  /// Real symmetric kernel over self-conjugate indices.
  static GaussianKernel trivial_involution(std::vector<std::string> tags,
                                           const Eigen::MatrixXd& matrix);

  const std::vector<Index>& indices() const noexcept { return indices_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
  std::size_t size() const noexcept { return indices_.size(); }

  bool contains(const Index& i) const;
  /// Throws std::out_of_range for unknown tags.
  std::size_t position(const Index& i) const;
  /// The registered copy of `i`, carrying the kernel's involution.
  const Index& registered(const Index& i) const;
  Index conjugate(const Index& i) const;

  /// (i, j).
  Complex pair(const Index& i, const Index& j) const;

  double min_eigenvalue() const;
  bool is_positive_semidefinite(double tolerance = kPsdTolerance) const;

 private:
  std::vector<Index> indices_;
  Eigen::MatrixXcd matrix_;
  std::unordered_map<std::string, std::size_t> position_;
};

/// rho(M_i M_j) = (i^c, j).
Complex two_point(const GaussianKernel& k, const Index& i, const Index& j);

/**
 * Mean-zero Gaussian moment of an ordered word: zero for odd length, else
 * the sum over perfect matchings {(m, n): m < n} of prod (i_m^c, i_n).
 * Throws std::length_error beyond kMaxWickLength factors.
 */
Complex wick_expect(const GaussianKernel& k, const Word& w);

/// exp[-sum_m l_m^2 (i_m^c, i_m)/2 - sum_{m<n} l_m l_n (i_m^c, i_n)].
Complex generating_function(const GaussianKernel& k,
                            std::span<const Index> indices,
                            std::span<const double> lambdas);

/**
 * Independent route to the moment of `w`: the mixed partial derivative
 * d^N/dl_1..dl_N of the generating function at l = 0, divided by i^N.
 * Computed by exact power-series expansion of the exponential truncated to
 * square-free monomials (no higher power of any l_m can reach the mixed
 * coefficient).
 */
Complex moment_from_generating_function(const GaussianKernel& k,
                                        const Word& w);

/// (i^c, j) - (j^c, i): the scalar c with rho(A [M_i, M_j] B) = c rho(A B).
Complex commutator_factor(const GaussianKernel& k, const Index& i,
                          const Index& j);

/// A linear functional on the free algebra, defined by its value on words.
class State {
 public:
  virtual ~State() = default;

  virtual Complex evaluate(const Word& w) const = 0;

  /// Generators the state can evaluate; used to sample probe elements.
  virtual std::vector<Index> generators() const = 0;

  /// Linear extension of `evaluate`.
  Complex expect(const AlgebraElement& a) const;
};

class GaussianState final : public State {
 public:
  explicit GaussianState(GaussianKernel kernel) : kernel_(std::move(kernel)) {}

  const GaussianKernel& kernel() const noexcept { return kernel_; }

  Complex evaluate(const Word& w) const override {
    return wick_expect(kernel_, w);
  }
  std::vector<Index> generators() const override { return kernel_.indices(); }

 private:
  GaussianKernel kernel_;
};

inline Complex expect(const State& s, const AlgebraElement& a) {
  return s.expect(a);
}

}  // namespace qcmt
