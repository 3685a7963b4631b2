#include "qcmt/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>

#include "qcmt/errors.hpp"
#include "qcmt/format.hpp"

namespace qcmt {

namespace {

constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double t;
  double x;
};

// Active boost by rapidity chi.
Vec2 lorentz(double chi, Vec2 v) {
  const double c = std::cosh(chi), s = std::sinh(chi);
  return {c * v.t + s * v.x, s * v.t + c * v.x};
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void validate_component(const WavepacketComponent& c) {
  if (!(std::isfinite(c.width) && c.width > 0.0)) {
    throw std::invalid_argument("wavepacket width must be positive and finite");
  }
  if (!finite(c.amplitude) || !std::isfinite(c.t0) || !std::isfinite(c.x0) ||
      !std::isfinite(c.omega0) || !std::isfinite(c.k0) ||
      !std::isfinite(c.envelope_rapidity)) {
    throw std::invalid_argument("wavepacket parameters must be finite");
  }
}

}  // namespace

Wavepacket::Wavepacket(std::vector<WavepacketComponent> components)
    : components_(std::move(components)) {
  for (const auto& c : components_) validate_component(c);
}

Wavepacket Wavepacket::gaussian(double t0, double x0, double width,
                                double omega0, double k0, Complex amplitude) {
  WavepacketComponent c;
  c.amplitude = amplitude;
  c.t0 = t0;
  c.x0 = x0;
  c.width = width;
  c.omega0 = omega0;
  c.k0 = k0;
  return Wavepacket({c});
}

Wavepacket Wavepacket::conjugate() const {
  std::vector<WavepacketComponent> out = components_;
  for (auto& c : out) {
    c.amplitude = std::conj(c.amplitude);
    c.omega0 = -c.omega0;
    c.k0 = -c.k0;
  }
  return Wavepacket(std::move(out));
}

Complex Wavepacket::value(double t, double x) const {
  Complex total = 0.0;
  for (const auto& c : components_) {
    const Vec2 z{t - c.t0, x - c.x0};
    const Vec2 r = lorentz(-c.envelope_rapidity, z);
    const double envelope =
        std::exp(-(r.t * r.t + r.x * r.x) / (2.0 * c.width * c.width));
    const double phase = -(c.omega0 * z.t - c.k0 * z.x);
    total += c.amplitude * envelope * Complex(std::cos(phase), std::sin(phase));
  }
  return total;
}

Complex Wavepacket::fourier(double omega, double k) const {
  Complex total = 0.0;
  for (const auto& c : components_) {
    const Vec2 q = lorentz(-c.envelope_rapidity, {omega - c.omega0, k - c.k0});
    const double s2 = c.width * c.width;
    const double gauss = 2.0 * kPi * s2 * std::exp(-s2 * (q.t * q.t + q.x * q.x) / 2.0);
    const double phase = omega * c.t0 - k * c.x0;
    total += c.amplitude * gauss * Complex(std::cos(phase), std::sin(phase));
  }
  return total;
}

double Wavepacket::fourier_envelope(double omega, double k) const {
  double total = 0.0;
  for (const auto& c : components_) {
    const Vec2 q = lorentz(-c.envelope_rapidity, {omega - c.omega0, k - c.k0});
    const double s2 = c.width * c.width;
    total += std::abs(c.amplitude) * 2.0 * kPi * s2 *
             std::exp(-s2 * (q.t * q.t + q.x * q.x) / 2.0);
  }
  return total;
}

std::uint64_t Wavepacket::structural_hash() const {
  // FNV-1a over the IEEE bit patterns; -0.0 is folded into 0.0.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double v) {
    if (v == 0.0) v = 0.0;
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<double>(components_.size()));
  for (const auto& c : components_) {
    mix(c.amplitude.real());
    mix(c.amplitude.imag());
    mix(c.t0);
    mix(c.x0);
    mix(c.width);
    mix(c.omega0);
    mix(c.k0);
    mix(c.envelope_rapidity);
  }
  return h;
}

std::string Wavepacket::tag() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = structural_hash();
  std::string out = "wp";
  for (int shift = 60; shift >= 0; shift -= 4) out += kHex[(h >> shift) & 0xfu];
  return out;
}

Wavepacket& Wavepacket::operator+=(const Wavepacket& other) {
  components_.insert(components_.end(), other.components_.begin(),
                     other.components_.end());
  return *this;
}

Wavepacket operator*(Complex s, const Wavepacket& f) {
  std::vector<WavepacketComponent> out = f.components_;
  for (auto& c : out) c.amplitude *= s;
  return Wavepacket(std::move(out));
}

PoincareElement PoincareElement::compose(const PoincareElement& other) const {
  const Vec2 shifted = lorentz(rapidity, {other.a_t, other.a_x});
  return {rapidity + other.rapidity, shifted.t + a_t, shifted.x + a_x};
}

PoincareElement PoincareElement::inverse() const {
  const Vec2 back = lorentz(-rapidity, {a_t, a_x});
  return {-rapidity, -back.t, -back.x};
}

Wavepacket poincare_act(const PoincareElement& g, const Wavepacket& f) {
  std::vector<WavepacketComponent> out = f.components();
  for (auto& c : out) {
    const Vec2 center = lorentz(g.rapidity, {c.t0, c.x0});
    const Vec2 wave = lorentz(g.rapidity, {c.omega0, c.k0});
    c.t0 = center.t + g.a_t;
    c.x0 = center.x + g.a_x;
    c.omega0 = wave.t;
    c.k0 = wave.x;
    c.envelope_rapidity += g.rapidity;
  }
  return Wavepacket(std::move(out));
}

Wavepacket reflect_space(const Wavepacket& f) {
  std::vector<WavepacketComponent> out = f.components();
  for (auto& c : out) {
    c.x0 = -c.x0;
    c.k0 = -c.k0;
    c.envelope_rapidity = -c.envelope_rapidity;
  }
  return Wavepacket(std::move(out));
}

void FieldKernelSpec::validate() const {
  if (!(std::isfinite(mass) && mass > 0.0)) {
    throw std::invalid_argument("field spec: mass must be positive and finite");
  }
  if (!(std::isfinite(hbar) && hbar > 0.0)) {
    throw std::invalid_argument("field spec: hbar must be positive and finite");
  }
  if (!(beta > 0.0)) {
    throw std::invalid_argument("field spec: beta must be positive (or infinite)");
  }
  const double norm = rest_frame_t * rest_frame_t - rest_frame_x * rest_frame_x;
  if (!(rest_frame_t > 0.0) || std::abs(norm - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "field spec: rest_frame must be a future-pointing unit time-like vector");
  }
}

namespace {

// Gauss-Kronrod 15-point rule (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  Complex value;
  double error;

  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const std::function<Complex(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Complex fc = f(center);
  Complex kronrod = fc * kWgk[7];
  Complex gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const Complex sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

Complex integrate_adaptive(const std::function<Complex(double)>& f, double lo,
                           double hi, const QuadratureOptions& opts) {
  constexpr int kInitialPanels = 32;
  std::priority_queue<Panel> panels;
  Complex total = 0.0;
  double error = 0.0;
  const double width = (hi - lo) / kInitialPanels;
  for (int p = 0; p < kInitialPanels; ++p) {
    const double a = lo + p * width;
    const double b = p + 1 == kInitialPanels ? hi : a + width;
    Panel panel = gauss_kronrod(f, a, b);
    total += panel.value;
    error += panel.error;
    panels.push(panel);
  }
  while (error > opts.absolute_tolerance && panels.size() < opts.max_intervals) {
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = gauss_kronrod(f, worst.a, mid);
    const Panel right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  if (!finite(total)) {
    throw NumericalError("kernel quadrature produced a non-finite value on [" +
                         format_double(lo) + ", " + format_double(hi) + "]");
  }
  if (error > opts.absolute_tolerance) {
    throw NumericalError(
        "kernel quadrature did not converge: estimated error " +
        format_double(error) + " after " + std::to_string(panels.size()) +
        " panels on [" + format_double(lo) + ", " + format_double(hi) +
        "], tolerance " + format_double(opts.absolute_tolerance));
  }
  return total;
}

double bose_occupation(const FieldKernelSpec& spec, double omega, double k) {
  if (spec.is_vacuum()) return 0.0;
  const double energy = omega * spec.rest_frame_t - k * spec.rest_frame_x;
  return 1.0 / std::expm1(spec.beta * spec.hbar * energy);
}

// Integrand envelope at k; decreasing beyond the packets' momentum support.
double kernel_envelope(const FieldKernelSpec& spec, const Wavepacket& f,
                       const Wavepacket& g, double k) {
  const double omega = std::sqrt(k * k + spec.mass * spec.mass);
  const double n = bose_occupation(spec, omega, k);
  const double plus = f.fourier_envelope(omega, k) * g.fourier_envelope(omega, k);
  const double minus = f.fourier_envelope(-omega, -k) * g.fourier_envelope(-omega, -k);
  return spec.hbar / (4.0 * kPi * omega) * ((1.0 + n) * plus + n * minus);
}

double momentum_cutoff(const FieldKernelSpec& spec, const Wavepacket& f,
                       const Wavepacket& g, double envelope_cutoff) {
  double cutoff = 1.0;
  for (const Wavepacket* packet : {&f, &g}) {
    for (const auto& c : packet->components()) {
      const double stretch = std::exp(std::abs(c.envelope_rapidity));
      cutoff = std::max(cutoff, (std::abs(c.omega0) + std::abs(c.k0)) * stretch +
                                    stretch / c.width);
    }
  }
  auto below = [&](double k) {
    for (double factor : {1.0, 1.25, 1.5, 2.0, 3.0, 4.0}) {
      if (kernel_envelope(spec, f, g, factor * k) >= envelope_cutoff ||
          kernel_envelope(spec, f, g, -factor * k) >= envelope_cutoff) {
        return false;
      }
    }
    return true;
  };
  for (int doubling = 0; doubling < 40 && !below(cutoff); ++doubling) cutoff *= 2.0;
  if (!below(cutoff)) {
    throw NumericalError("could not place the momentum cutoff (envelope still above " +
                         format_double(envelope_cutoff) + " at k = " +
                         format_double(cutoff) + ")");
  }
  return cutoff;
}

Complex shell_integral(const FieldKernelSpec& spec, const Wavepacket& f,
                       const Wavepacket& g, const QuadratureOptions& opts) {
  spec.validate();
  const double cutoff = momentum_cutoff(spec, f, g, opts.envelope_cutoff);
  const bool thermal = !spec.is_vacuum();
  auto integrand = [&](double k) -> Complex {
    const double omega = std::sqrt(k * k + spec.mass * spec.mass);
    Complex value = std::conj(f.fourier(omega, k)) * g.fourier(omega, k);
    if (thermal) {
      const double n = bose_occupation(spec, omega, k);
      value = (1.0 + n) * value +
              n * std::conj(f.fourier(-omega, -k)) * g.fourier(-omega, -k);
    }
    return spec.hbar / (4.0 * kPi * omega) * value;
  };
  return integrate_adaptive(integrand, -cutoff, cutoff, opts);
}

}  // namespace

Complex vacuum_kernel(const FieldKernelSpec& spec, const Wavepacket& f,
                      const Wavepacket& g, const QuadratureOptions& opts) {
  FieldKernelSpec vacuum = spec;
  vacuum.beta = std::numeric_limits<double>::infinity();
  return shell_integral(vacuum, f, g, opts);
}

Complex thermal_kernel(const FieldKernelSpec& spec, const Wavepacket& f,
                       const Wavepacket& g, const QuadratureOptions& opts) {
  if (!std::isfinite(spec.beta)) {
    throw std::invalid_argument("thermal_kernel requires a finite beta");
  }
  return shell_integral(spec, f, g, opts);
}

Complex field_kernel(const FieldKernelSpec& spec, const Wavepacket& f,
                     const Wavepacket& g, const QuadratureOptions& opts) {
  return spec.is_vacuum() ? vacuum_kernel(spec, f, g, opts)
                          : thermal_kernel(spec, f, g, opts);
}

Complex commutator_kernel(const FieldKernelSpec& spec, const Wavepacket& f,
                          const Wavepacket& g, const QuadratureOptions& opts) {
  return field_kernel(spec, f.conjugate(), g, opts) -
         field_kernel(spec, g.conjugate(), f, opts);
}

Index packet_index(const Wavepacket& f) {
  return Index(f.tag(), f.conjugate().tag());
}

GaussianKernel kernel_as_gaussian(const FieldKernelSpec& spec,
                                  std::span<const Wavepacket> packets,
                                  const QuadratureOptions& opts) {
  std::vector<Wavepacket> all;
  std::vector<Index> indices;
  auto add = [&](const Wavepacket& f) {
    Index i = packet_index(f);
    if (std::find(indices.begin(), indices.end(), i) != indices.end()) return;
    indices.push_back(std::move(i));
    all.push_back(f);
  };
  for (const auto& f : packets) add(f);
  for (std::size_t k = 0, n = all.size(); k < n; ++k) add(all[k].conjugate());

  const auto n = static_cast<Eigen::Index>(all.size());
  Eigen::MatrixXcd matrix(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      const Complex v = field_kernel(spec, all[static_cast<std::size_t>(a)],
                                     all[static_cast<std::size_t>(b)], opts);
      if (a == b) {
        matrix(a, a) = v.real();
      } else {
        matrix(a, b) = v;
        matrix(b, a) = std::conj(v);
      }
    }
  }
  return GaussianKernel(std::move(indices), std::move(matrix));
}

double invariance_deviation(const FieldKernelSpec& spec, const PoincareElement& g,
                            std::span<const Wavepacket> packets,
                            const QuadratureOptions& opts) {
  double worst = 0.0;
  for (std::size_t a = 0; a < packets.size(); ++a) {
    const Wavepacket ga = poincare_act(g, packets[a]);
    for (std::size_t b = 0; b < packets.size(); ++b) {
      const Wavepacket gb = poincare_act(g, packets[b]);
      const Complex moved = field_kernel(spec, ga, gb, opts);
      const Complex fixed = field_kernel(spec, packets[a], packets[b], opts);
      worst = std::max(worst, std::abs(moved - fixed));
    }
  }
  return worst;
}

}  // namespace qcmt
