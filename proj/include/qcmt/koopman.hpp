#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qcmt/algebra.hpp"
#include "qcmt/gaussian.hpp"

namespace qcmt {

/**
 * Complex-coefficient polynomial in canonical coordinates
 * (q_1..q_n, p_1..p_n).
 *
 * Exponent vectors have length 2n, q exponents first. Zero coefficients are
 * never stored. Arithmetic is exact whenever coefficients stay integers (or
 * dyadic rationals) below 2^53, which is how the symbolic checks use it.
 */
class PhaseSpacePolynomial {
 public:
  using Exponents = std::vector<unsigned>;
  using TermMap = std::map<Exponents, Complex>;

  explicit PhaseSpacePolynomial(std::size_t dimension);

  static PhaseSpacePolynomial constant(std::size_t dimension, Complex c);
  static PhaseSpacePolynomial q(std::size_t dimension, std::size_t i);
  static PhaseSpacePolynomial p(std::size_t dimension, std::size_t i);
  static PhaseSpacePolynomial monomial(std::size_t dimension,
                                       Exponents exponents, Complex c = 1.0);

  std::size_t dimension() const noexcept { return dimension_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  bool is_real() const;

  void add_term(const Exponents& e, Complex c);

  PhaseSpacePolynomial derivative_q(std::size_t i) const;
  PhaseSpacePolynomial derivative_p(std::size_t i) const;

  /// Value at a real phase-space point (q_1..q_n, p_1..p_n).
  Complex evaluate(std::span<const double> point) const;

  std::string to_string() const;

  PhaseSpacePolynomial& operator+=(const PhaseSpacePolynomial& other);
  PhaseSpacePolynomial& operator-=(const PhaseSpacePolynomial& other);
  PhaseSpacePolynomial& operator*=(Complex s);

  friend PhaseSpacePolynomial operator+(PhaseSpacePolynomial a,
                                        const PhaseSpacePolynomial& b) {
    return a += b;
  }
  friend PhaseSpacePolynomial operator-(PhaseSpacePolynomial a,
                                        const PhaseSpacePolynomial& b) {
    return a -= b;
  }
  friend PhaseSpacePolynomial operator*(Complex s, PhaseSpacePolynomial a) {
    return a *= s;
  }
  friend PhaseSpacePolynomial operator*(const PhaseSpacePolynomial& a,
                                        const PhaseSpacePolynomial& b);
  friend bool operator==(const PhaseSpacePolynomial& a,
                         const PhaseSpacePolynomial& b) = default;

 private:
  PhaseSpacePolynomial derivative(std::size_t slot) const;
  void require_same_dimension(const PhaseSpacePolynomial& other) const;

  std::size_t dimension_;
  TermMap terms_;
};

/// {u, v} = sum_i (du/dq_i dv/dp_i - du/dp_i dv/dq_i).
PhaseSpacePolynomial poisson(const PhaseSpacePolynomial& u,
                             const PhaseSpacePolynomial& v);

enum class KoopmanKind { Y, Z };

/// Y_u acts by multiplication, Z_u by f -> {u, f}.
struct KoopmanOperator {
  KoopmanKind kind;
  PhaseSpacePolynomial symbol;

  static KoopmanOperator Y(PhaseSpacePolynomial u) {
    return {KoopmanKind::Y, std::move(u)};
  }
  static KoopmanOperator Z(PhaseSpacePolynomial u) {
    return {KoopmanKind::Z, std::move(u)};
  }
};

PhaseSpacePolynomial apply(const KoopmanOperator& op,
                           const PhaseSpacePolynomial& f);

/// Residuals of the three commutation relations applied to a test function.
struct BracketResiduals {
  PhaseSpacePolynomial yy;  // [Y_u, Y_v] f
  PhaseSpacePolynomial zy;  // ([Z_u, Y_v] - Y_{u,v}) f
  PhaseSpacePolynomial zz;  // ([Z_u, Z_v] - Z_{u,v}) f

  bool all_zero() const { return yy.is_zero() && zy.is_zero() && zz.is_zero(); }
};

BracketResiduals bracket_residuals(const PhaseSpacePolynomial& u,
                                   const PhaseSpacePolynomial& v,
                                   const PhaseSpacePolynomial& f);

/// {u,{v,w}} + {v,{w,u}} + {w,{u,v}}.
PhaseSpacePolynomial jacobi_residual(const PhaseSpacePolynomial& u,
                                     const PhaseSpacePolynomial& v,
                                     const PhaseSpacePolynomial& w);

/// Exponentiated generator: a canonical (Z) or non-canonical (Y) flow.
struct FlowSpec {
  KoopmanOperator generator;
  double time = 0.0;
};

enum class FlowMethod {
  automatic,     // exact map for symbols of degree <= 2, integrator otherwise
  exact_linear,  // requires degree <= 2
  integrator,
};

/// Default step for the Gauss-Legendre integrator.
inline constexpr double kDefaultFlowStep = 1e-3;

using PhasePoint = Eigen::VectorXd;

/// Mapped points for Z-flows, multipliers e^{t u(x)} for Y-flows.
using FlowResult = std::variant<std::vector<PhasePoint>, std::vector<double>>;

/**
 * Samples a flow at the given points.
 *
 * Z-flows integrate Hamilton's equations dq/dt = du/dp, dp/dt = -du/dq, so
 * that f(phi_t(x)) = (e^{-t Z_u} f)(x). Symbols of degree <= 2 use the exact
 * affine symplectic map; others use the fourth-order Gauss-Legendre method
 * with `steps` fixed steps (0 picks |t| / kDefaultFlowStep). Symbols must be
 * real. Throws NumericalError on non-finite values.
 */
FlowResult flow_sample(const FlowSpec& spec, std::span<const PhasePoint> points,
                       std::size_t steps = 0,
                       FlowMethod method = FlowMethod::automatic);

/// Central-difference Jacobian of a Z-flow map at `point`.
Eigen::MatrixXd flow_jacobian(const FlowSpec& spec, const PhasePoint& point,
                              std::size_t steps = 0,
                              FlowMethod method = FlowMethod::automatic,
                              double delta = 1e-5);

/// max |M^T J M - J| for the canonical symplectic form J.
double symplectic_defect(const Eigen::MatrixXd& jacobian);

/**
 * Classical Gibbs state of H = p^2/2m + m w^2 q^2/2 as a kernel over the
 * self-conjugate indices "q", "p": (q,q) = kT/(m w^2), (p,p) = m kT.
 */
GaussianKernel gibbs_oscillator_kernel(double mass, double frequency,
                                       double temperature);

}  // namespace qcmt
