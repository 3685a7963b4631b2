#include "qcmt/koopman.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "qcmt/errors.hpp"
#include "qcmt/format.hpp"

namespace qcmt {

PhaseSpacePolynomial::PhaseSpacePolynomial(std::size_t dimension)
    : dimension_(dimension) {
  if (dimension == 0) {
    throw std::invalid_argument("phase space dimension must be positive");
  }
}

PhaseSpacePolynomial PhaseSpacePolynomial::constant(std::size_t dimension,
                                                    Complex c) {
  PhaseSpacePolynomial out(dimension);
  out.add_term(Exponents(2 * dimension, 0u), c);
  return out;
}

PhaseSpacePolynomial PhaseSpacePolynomial::q(std::size_t dimension,
                                             std::size_t i) {
  if (i >= dimension) throw std::out_of_range("q index out of range");
  Exponents e(2 * dimension, 0u);
  e[i] = 1;
  return monomial(dimension, std::move(e));
}

PhaseSpacePolynomial PhaseSpacePolynomial::p(std::size_t dimension,
                                             std::size_t i) {
  if (i >= dimension) throw std::out_of_range("p index out of range");
  Exponents e(2 * dimension, 0u);
  e[dimension + i] = 1;
  return monomial(dimension, std::move(e));
}

PhaseSpacePolynomial PhaseSpacePolynomial::monomial(std::size_t dimension,
                                                    Exponents exponents,
                                                    Complex c) {
  PhaseSpacePolynomial out(dimension);
  out.add_term(exponents, c);
  return out;
}

int PhaseSpacePolynomial::degree() const {
  int best = -1;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (unsigned x : e) d += static_cast<int>(x);
    best = std::max(best, d);
  }
  return best;
}

bool PhaseSpacePolynomial::is_real() const {
  for (const auto& [e, c] : terms_) {
    if (c.imag() != 0.0) return false;
  }
  return true;
}

void PhaseSpacePolynomial::add_term(const Exponents& e, Complex c) {
  if (e.size() != 2 * dimension_) {
    throw std::invalid_argument("exponent vector has length " +
                                std::to_string(e.size()) + ", expected " +
                                std::to_string(2 * dimension_));
  }
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

PhaseSpacePolynomial PhaseSpacePolynomial::derivative(std::size_t slot) const {
  PhaseSpacePolynomial out(dimension_);
  for (const auto& [e, c] : terms_) {
    if (e[slot] == 0) continue;
    Exponents d = e;
    d[slot] -= 1;
    out.add_term(d, c * static_cast<double>(e[slot]));
  }
  return out;
}

PhaseSpacePolynomial PhaseSpacePolynomial::derivative_q(std::size_t i) const {
  if (i >= dimension_) throw std::out_of_range("q index out of range");
  return derivative(i);
}

PhaseSpacePolynomial PhaseSpacePolynomial::derivative_p(std::size_t i) const {
  if (i >= dimension_) throw std::out_of_range("p index out of range");
  return derivative(dimension_ + i);
}

Complex PhaseSpacePolynomial::evaluate(std::span<const double> point) const {
  if (point.size() != 2 * dimension_) {
    throw std::invalid_argument("phase-space point has " +
                                std::to_string(point.size()) +
                                " coordinates, expected " +
                                std::to_string(2 * dimension_));
  }
  Complex total = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = 1.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      for (unsigned r = 0; r < e[k]; ++r) m *= point[k];
    }
    total += c * m;
  }
  return total;
}

std::string PhaseSpacePolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += format_complex(c);
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      out += '*';
      out += k < dimension_ ? 'q' : 'p';
      out += std::to_string(k % dimension_ + 1);
      if (e[k] > 1) out += "^" + std::to_string(e[k]);
    }
  }
  return out;
}

void PhaseSpacePolynomial::require_same_dimension(
    const PhaseSpacePolynomial& other) const {
  if (other.dimension_ != dimension_) {
    throw std::invalid_argument("phase space dimension mismatch: " +
                                std::to_string(dimension_) + " vs " +
                                std::to_string(other.dimension_));
  }
}

PhaseSpacePolynomial& PhaseSpacePolynomial::operator+=(
    const PhaseSpacePolynomial& other) {
  require_same_dimension(other);
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

PhaseSpacePolynomial& PhaseSpacePolynomial::operator-=(
    const PhaseSpacePolynomial& other) {
  require_same_dimension(other);
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

PhaseSpacePolynomial& PhaseSpacePolynomial::operator*=(Complex s) {
  TermMap scaled;
  for (const auto& [e, c] : terms_) {
    const Complex v = c * s;
    if (v != Complex{}) scaled.emplace(e, v);
  }
  terms_ = std::move(scaled);
  return *this;
}

PhaseSpacePolynomial operator*(const PhaseSpacePolynomial& a,
                               const PhaseSpacePolynomial& b) {
  a.require_same_dimension(b);
  PhaseSpacePolynomial out(a.dimension_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      PhaseSpacePolynomial::Exponents e(ea.size());
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

PhaseSpacePolynomial poisson(const PhaseSpacePolynomial& u,
                             const PhaseSpacePolynomial& v) {
  if (u.dimension() != v.dimension()) {
    throw std::invalid_argument("poisson: dimension mismatch");
  }
  PhaseSpacePolynomial out(u.dimension());
  for (std::size_t i = 0; i < u.dimension(); ++i) {
    out += u.derivative_q(i) * v.derivative_p(i);
    out -= u.derivative_p(i) * v.derivative_q(i);
  }
  return out;
}

PhaseSpacePolynomial apply(const KoopmanOperator& op,
                           const PhaseSpacePolynomial& f) {
  if (op.symbol.dimension() != f.dimension()) {
    throw std::invalid_argument("apply: dimension mismatch");
  }
  return op.kind == KoopmanKind::Y ? op.symbol * f : poisson(op.symbol, f);
}

BracketResiduals bracket_residuals(const PhaseSpacePolynomial& u,
                                   const PhaseSpacePolynomial& v,
                                   const PhaseSpacePolynomial& f) {
  const auto Yu = KoopmanOperator::Y(u);
  const auto Yv = KoopmanOperator::Y(v);
  const auto Zu = KoopmanOperator::Z(u);
  const auto Zv = KoopmanOperator::Z(v);
  const auto uv = poisson(u, v);

  auto yy = apply(Yu, apply(Yv, f)) - apply(Yv, apply(Yu, f));
  auto zy = apply(Zu, apply(Yv, f)) - apply(Yv, apply(Zu, f)) -
            apply(KoopmanOperator::Y(uv), f);
  auto zz = apply(Zu, apply(Zv, f)) - apply(Zv, apply(Zu, f)) -
            apply(KoopmanOperator::Z(uv), f);
  return {std::move(yy), std::move(zy), std::move(zz)};
}

PhaseSpacePolynomial jacobi_residual(const PhaseSpacePolynomial& u,
                                     const PhaseSpacePolynomial& v,
                                     const PhaseSpacePolynomial& w) {
  return poisson(u, poisson(v, w)) + poisson(v, poisson(w, u)) +
         poisson(w, poisson(u, v));
}

namespace {

// Hamiltonian vector field J grad u for a real symbol.
class HamiltonianField {
 public:
  explicit HamiltonianField(const PhaseSpacePolynomial& u) : n_(u.dimension()) {
    for (std::size_t i = 0; i < n_; ++i) dq_.push_back(u.derivative_q(i));
    for (std::size_t i = 0; i < n_; ++i) dp_.push_back(u.derivative_p(i));
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(2 * n_);
    const std::span<const double> pt(x.data(), static_cast<std::size_t>(x.size()));
    for (std::size_t i = 0; i < n_; ++i) {
      out(static_cast<Eigen::Index>(i)) = dp_[i].evaluate(pt).real();
      out(static_cast<Eigen::Index>(n_ + i)) = -dq_[i].evaluate(pt).real();
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<PhaseSpacePolynomial> dq_;
  std::vector<PhaseSpacePolynomial> dp_;
};

void require_finite(const Eigen::VectorXd& x, const char* where) {
  if (!x.allFinite()) {
    throw NumericalError(std::string("non-finite phase-space point in ") +
                         where);
  }
}

// Augmented generator [[J H, J g], [0, 0]] of the affine Hamiltonian flow.
Eigen::MatrixXd affine_generator(const PhaseSpacePolynomial& u) {
  const auto n = static_cast<Eigen::Index>(u.dimension());
  const Eigen::Index d = 2 * n;
  Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd gradient = Eigen::VectorXd::Zero(d);
  for (const auto& [e, c] : u.terms()) {
    std::vector<Eigen::Index> slots;
    for (std::size_t k = 0; k < e.size(); ++k) {
      for (unsigned r = 0; r < e[k]; ++r) slots.push_back(static_cast<Eigen::Index>(k));
    }
    if (slots.size() == 1) {
      gradient(slots[0]) += c.real();
    } else if (slots.size() == 2) {
      if (slots[0] == slots[1]) {
        hessian(slots[0], slots[0]) += 2.0 * c.real();
      } else {
        hessian(slots[0], slots[1]) += c.real();
        hessian(slots[1], slots[0]) += c.real();
      }
    }
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d, d);
  J.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(d + 1, d + 1);
  generator.topLeftCorner(d, d) = J * hessian;
  generator.topRightCorner(d, 1) = J * gradient;
  return generator;
}

// One step of the two-stage Gauss-Legendre method (order 4, symplectic).
Eigen::VectorXd gauss_legendre_step(const HamiltonianField& field,
                                    const Eigen::VectorXd& x, double h) {
  static const double s3 = std::sqrt(3.0);
  const double a11 = 0.25, a12 = 0.25 - s3 / 6.0;
  const double a21 = 0.25 + s3 / 6.0, a22 = 0.25;

  Eigen::VectorXd k1 = field(x);
  Eigen::VectorXd k2 = k1;
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd n1 = field(x + h * (a11 * k1 + a12 * k2));
    Eigen::VectorXd n2 = field(x + h * (a21 * k1 + a22 * k2));
    const double change = std::max((n1 - k1).lpNorm<Eigen::Infinity>(),
                                   (n2 - k2).lpNorm<Eigen::Infinity>());
    k1 = std::move(n1);
    k2 = std::move(n2);
    const double scale = 1.0 + std::max(k1.lpNorm<Eigen::Infinity>(),
                                        k2.lpNorm<Eigen::Infinity>());
    if (!std::isfinite(change)) break;
    if (change <= 1e-15 * scale) {
      return x + 0.5 * h * (k1 + k2);
    }
  }
  throw NumericalError("Gauss-Legendre stage iteration did not converge (step " +
                       format_double(h) + ")");
}

}  // namespace

FlowResult flow_sample(const FlowSpec& spec, std::span<const PhasePoint> points,
                       std::size_t steps, FlowMethod method) {
  const auto& u = spec.generator.symbol;
  if (!u.is_real()) {
    throw std::invalid_argument("flow generators must have real symbols");
  }
  const auto d = static_cast<Eigen::Index>(2 * u.dimension());
  for (const auto& x : points) {
    if (x.size() != d) {
      throw std::invalid_argument("phase-space point has wrong dimension");
    }
  }
  if (!std::isfinite(spec.time)) throw NumericalError("non-finite flow time");

  if (spec.generator.kind == KoopmanKind::Y) {
    std::vector<double> multipliers;
    multipliers.reserve(points.size());
    for (const auto& x : points) {
      const std::span<const double> pt(x.data(), static_cast<std::size_t>(x.size()));
      const double value = std::exp(spec.time * u.evaluate(pt).real());
      if (!std::isfinite(value)) {
        throw NumericalError("Y-flow multiplier overflowed");
      }
      multipliers.push_back(value);
    }
    return multipliers;
  }

  const bool affine = u.degree() <= 2;
  if (method == FlowMethod::exact_linear && !affine) {
    throw std::invalid_argument("exact flow requires a symbol of degree <= 2");
  }

  std::vector<PhasePoint> mapped;
  mapped.reserve(points.size());
  if (method != FlowMethod::integrator && affine) {
    const Eigen::MatrixXd propagator = (spec.time * affine_generator(u)).exp();
    for (const auto& x : points) {
      Eigen::VectorXd y(d + 1);
      y << x, 1.0;
      Eigen::VectorXd out = (propagator * y).head(d);
      require_finite(out, "exact flow");
      mapped.push_back(std::move(out));
    }
    return mapped;
  }

  if (steps == 0) {
    steps = static_cast<std::size_t>(
        std::max(1.0, std::ceil(std::abs(spec.time) / kDefaultFlowStep)));
  }
  const double h = spec.time / static_cast<double>(steps);
  const HamiltonianField field(u);
  for (const auto& x0 : points) {
    Eigen::VectorXd x = x0;
    for (std::size_t s = 0; s < steps; ++s) {
      x = gauss_legendre_step(field, x, h);
      require_finite(x, "Gauss-Legendre flow");
    }
    mapped.push_back(std::move(x));
  }
  return mapped;
}

Eigen::MatrixXd flow_jacobian(const FlowSpec& spec, const PhasePoint& point,
                              std::size_t steps, FlowMethod method,
                              double delta) {
  if (spec.generator.kind != KoopmanKind::Z) {
    throw std::invalid_argument("flow_jacobian requires a Z-flow");
  }
  const Eigen::Index d = point.size();
  std::vector<PhasePoint> probes;
  probes.reserve(static_cast<std::size_t>(2 * d));
  for (Eigen::Index k = 0; k < d; ++k) {
    PhasePoint plus = point, minus = point;
    plus(k) += delta;
    minus(k) -= delta;
    probes.push_back(std::move(plus));
    probes.push_back(std::move(minus));
  }
  const auto images =
      std::get<std::vector<PhasePoint>>(flow_sample(spec, probes, steps, method));
  Eigen::MatrixXd jac(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    jac.col(k) = (images[static_cast<std::size_t>(2 * k)] -
                  images[static_cast<std::size_t>(2 * k + 1)]) /
                 (2.0 * delta);
  }
  return jac;
}

double symplectic_defect(const Eigen::MatrixXd& jacobian) {
  const Eigen::Index d = jacobian.rows();
  if (d % 2 != 0 || jacobian.cols() != d) {
    throw std::invalid_argument("jacobian must be square of even size");
  }
  const Eigen::Index n = d / 2;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d, d);
  J.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return (jacobian.transpose() * J * jacobian - J).cwiseAbs().maxCoeff();
}

GaussianKernel gibbs_oscillator_kernel(double mass, double frequency,
                                       double temperature) {
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(mass) || !positive(frequency) || !positive(temperature)) {
    throw std::invalid_argument(
        "gibbs_oscillator_kernel: mass, frequency and temperature must be "
        "positive and finite");
  }
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(2, 2);
  k(0, 0) = temperature / (mass * frequency * frequency);
  k(1, 1) = mass * temperature;
  return GaussianKernel::trivial_involution({"q", "p"}, k);
}

}  // namespace qcmt
