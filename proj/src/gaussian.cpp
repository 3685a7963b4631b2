#include "qcmt/gaussian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qcmt {

GaussianKernel::GaussianKernel(std::vector<Index> indices,
                               Eigen::MatrixXcd matrix,
                               double hermiticity_tolerance)
    : indices_(std::move(indices)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(indices_.size());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw std::invalid_argument("kernel matrix is " +
                                std::to_string(matrix_.rows()) + "x" +
                                std::to_string(matrix_.cols()) + " but " +
                                std::to_string(n) + " indices were given");
  }
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (!position_.emplace(indices_[k].tag(), k).second) {
      throw std::invalid_argument("duplicate kernel index '" +
                                  indices_[k].tag() + "'");
    }
  }
  for (const auto& i : indices_) {
    auto it = position_.find(i.partner_tag());
    if (it == position_.end()) {
      throw std::invalid_argument("involution partner '" + i.partner_tag() +
                                  "' of index '" + i.tag() +
                                  "' is not registered");
    }
    if (indices_[it->second].partner_tag() != i.tag()) {
      throw std::invalid_argument("involution is not an involution at '" +
                                  i.tag() + "'");
    }
  }
  if (n > 0) {
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (asym > hermiticity_tolerance * scale) {
      throw std::invalid_argument("kernel matrix is not Hermitian (max |K - K^H| = " +
                                  std::to_string(asym) + ")");
    }
  }
}

GaussianKernel GaussianKernel::checked(std::vector<Index> indices,
                                       Eigen::MatrixXcd matrix,
                                       double psd_tolerance) {
  GaussianKernel k(std::move(indices), std::move(matrix));
  if (!k.is_positive_semidefinite(psd_tolerance)) {
    throw std::invalid_argument("kernel matrix is not positive semi-definite "
                                "(smallest eigenvalue " +
                                std::to_string(k.min_eigenvalue()) + ")");
  }
  return k;
}

GaussianKernel GaussianKernel::trivial_involution(
    std::vector<std::string> tags, const Eigen::MatrixXd& matrix) {
  std::vector<Index> indices;
  indices.reserve(tags.size());
  for (auto& t : tags) indices.emplace_back(std::move(t));
  return GaussianKernel(std::move(indices), matrix.cast<Complex>());
}

bool GaussianKernel::contains(const Index& i) const {
  return position_.count(i.tag()) != 0;
}

std::size_t GaussianKernel::position(const Index& i) const {
  auto it = position_.find(i.tag());
  if (it == position_.end()) {
    throw std::out_of_range("index '" + i.tag() + "' is not in the kernel");
  }
  return it->second;
}

const Index& GaussianKernel::registered(const Index& i) const {
  return indices_[position(i)];
}

Index GaussianKernel::conjugate(const Index& i) const {
  return involve(registered(i));
}

Complex GaussianKernel::pair(const Index& i, const Index& j) const {
  return matrix_(static_cast<Eigen::Index>(position(i)),
                 static_cast<Eigen::Index>(position(j)));
}

double GaussianKernel::min_eigenvalue() const {
  if (indices_.empty()) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool GaussianKernel::is_positive_semidefinite(double tolerance) const {
  return min_eigenvalue() >= -tolerance;
}

Complex two_point(const GaussianKernel& k, const Index& i, const Index& j) {
  return k.pair(k.conjugate(i), j);
}

namespace {

// Sum over perfect matchings of the positions not yet in `used`.
Complex sum_matchings(const Eigen::MatrixXcd& contraction, unsigned used,
                      unsigned full) {
  if (used == full) return 1.0;
  int first = 0;
  while (used & (1u << first)) ++first;
  Complex total = 0.0;
  const auto n = static_cast<int>(contraction.rows());
  for (int second = first + 1; second < n; ++second) {
    if (used & (1u << second)) continue;
    const Complex c = contraction(first, second);
    if (c == Complex{}) continue;
    total += c * sum_matchings(contraction, used | (1u << first) | (1u << second),
                               full);
  }
  return total;
}

}  // namespace

Complex wick_expect(const GaussianKernel& k, const Word& w) {
  const std::size_t n = w.size();
  if (n > kMaxWickLength) {
    throw std::length_error("word of length " + std::to_string(n) +
                            " exceeds the Wick expansion cap of " +
                            std::to_string(kMaxWickLength));
  }
  if (n % 2 == 1) return 0.0;
  if (n == 0) return 1.0;

  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd contraction = Eigen::MatrixXcd::Zero(size, size);
  for (Eigen::Index m = 0; m < size; ++m) {
    for (Eigen::Index l = m + 1; l < size; ++l) {
      contraction(m, l) = two_point(k, w[m], w[l]);
    }
  }
  return sum_matchings(contraction, 0u, (1u << n) - 1u);
}

Complex generating_function(const GaussianKernel& k,
                            std::span<const Index> indices,
                            std::span<const double> lambdas) {
  if (indices.size() != lambdas.size()) {
    throw std::invalid_argument(
        "generating_function: " + std::to_string(indices.size()) +
        " indices but " + std::to_string(lambdas.size()) + " parameters");
  }
  Complex exponent = 0.0;
  for (std::size_t m = 0; m < indices.size(); ++m) {
    exponent -= lambdas[m] * lambdas[m] * two_point(k, indices[m], indices[m]) / 2.0;
    for (std::size_t l = m + 1; l < indices.size(); ++l) {
      exponent -= lambdas[m] * lambdas[l] * two_point(k, indices[m], indices[l]);
    }
  }
  return std::exp(exponent);
}

Complex moment_from_generating_function(const GaussianKernel& k,
                                        const Word& w) {
  constexpr std::size_t kMaxOracleLength = 20;
  const std::size_t n = w.size();
  if (n > kMaxOracleLength) {
    throw std::length_error("generating-function expansion limited to " +
                            std::to_string(kMaxOracleLength) + " factors");
  }
  const std::size_t full = (std::size_t{1} << n) - 1;

  // Square-free part of the exponent: only the cross terms -l_m l_n a_mn.
  std::vector<std::pair<std::size_t, Complex>> exponent;
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t l = m + 1; l < n; ++l) {
      exponent.emplace_back((std::size_t{1} << m) | (std::size_t{1} << l),
                            -two_point(k, w[m], w[l]));
    }
  }

  // exp(E) = sum_j E^j / j!, truncated to square-free monomials; E has no
  // constant term so j <= n/2 suffices.
  std::vector<Complex> series(full + 1, 0.0);
  std::vector<Complex> power(full + 1, 0.0);
  power[0] = 1.0;
  series[0] = 1.0;
  double factorial = 1.0;
  for (std::size_t j = 1; 2 * j <= n; ++j) {
    std::vector<Complex> next(full + 1, 0.0);
    for (std::size_t a = 0; a <= full; ++a) {
      if (power[a] == Complex{}) continue;
      for (const auto& [mask, c] : exponent) {
        if ((a & mask) == 0) next[a | mask] += power[a] * c;
      }
    }
    power = std::move(next);
    factorial *= static_cast<double>(j);
    for (std::size_t a = 0; a <= full; ++a) series[a] += power[a] / factorial;
  }

  // Mixed coefficient equals i^N rho(M_1..M_N).
  Complex i_pow = 1.0;
  for (std::size_t m = 0; m < n; ++m) i_pow *= Complex(0.0, 1.0);
  return series[full] / i_pow;
}

Complex commutator_factor(const GaussianKernel& k, const Index& i,
                          const Index& j) {
  return two_point(k, i, j) - two_point(k, j, i);
}

Complex State::expect(const AlgebraElement& a) const {
  Complex total = 0.0;
  for (const auto& [w, c] : a.terms()) total += c * evaluate(w);
  return total;
}

}  // namespace qcmt
