#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qcmt/algebra.hpp"
#include "qcmt/gaussian.hpp"

namespace qcmt {

/**
 * One Gaussian-modulated plane wave on 1+1-D Minkowski space,
 *
 *   a * exp(-i (w0 (t - t0) - k0 (x - x0))) * exp(-|R (y - c)|^2 / (2 s^2)),
 *
 * where R is the boost by -envelope_rapidity, so the envelope is isotropic
 * in the frame moving with that rapidity. Carrying the envelope rapidity
 * keeps the family closed under boosts.
 */
struct WavepacketComponent {
  Complex amplitude{1.0, 0.0};
  double t0 = 0.0;
  double x0 = 0.0;
  double width = 1.0;
  double omega0 = 0.0;
  double k0 = 0.0;
  double envelope_rapidity = 0.0;

  friend bool operator==(const WavepacketComponent&,
                         const WavepacketComponent&) = default;
};

/// Finite sum of components; the test-function index type of the field.
class Wavepacket {
 public:
  Wavepacket() = default;
  explicit Wavepacket(std::vector<WavepacketComponent> components);

  /// Single component with unit amplitude unless given.
  static Wavepacket gaussian(double t0, double x0, double width,
                             double omega0 = 0.0, double k0 = 0.0,
                             Complex amplitude = 1.0);

  const std::vector<WavepacketComponent>& components() const noexcept {
    return components_;
  }

  /// Pointwise complex conjugate: conjugated amplitudes, negated wavevectors.
  Wavepacket conjugate() const;

  /// f(t, x).
  Complex value(double t, double x) const;

  /// F(w, k) = integral dt dx e^{i(w t - k x)} f(t, x), in closed form.
  Complex fourier(double omega, double k) const;

  /// Upper bound on |F(w, k)| used to place the quadrature cutoff.
  double fourier_envelope(double omega, double k) const;

  /// Stable hash of the component parameters.
  std::uint64_t structural_hash() const;
  /// "wp" followed by the hex structural hash.
  std::string tag() const;

  Wavepacket& operator+=(const Wavepacket& other);
  friend Wavepacket operator+(Wavepacket a, const Wavepacket& b) {
    return a += b;
  }
  friend Wavepacket operator*(Complex s, const Wavepacket& f);
  friend bool operator==(const Wavepacket&, const Wavepacket&) = default;

 private:
  std::vector<WavepacketComponent> components_;
};

/// Proper orthochronous Poincare element y -> L(rapidity) y + (a_t, a_x).
struct PoincareElement {
  double rapidity = 0.0;
  double a_t = 0.0;
  double a_x = 0.0;

  static PoincareElement boost(double rapidity) { return {rapidity, 0.0, 0.0}; }
  static PoincareElement translation(double a_t, double a_x) {
    return {0.0, a_t, a_x};
  }

  /// (this * other)(y) = this(other(y)).
  PoincareElement compose(const PoincareElement& other) const;
  PoincareElement inverse() const;
};

/// (g f)(y) = f(g^{-1} y), realised as a parameter map per component.
Wavepacket poincare_act(const PoincareElement& g, const Wavepacket& f);

/// (P f)(t, x) = f(t, -x).
Wavepacket reflect_space(const Wavepacket& f);

/**
 * Free scalar field of mass m. beta = +infinity selects the vacuum; a finite
 * beta adds Bose occupation n = 1/(e^{beta hbar E} - 1), with E the energy
 * in the rest frame of `rest_frame` (a future-pointing unit time-like vector).
 */
struct FieldKernelSpec {
  double mass = 1.0;
  double hbar = 1.0;
  double beta = std::numeric_limits<double>::infinity();
  double rest_frame_t = 1.0;
  double rest_frame_x = 0.0;

  bool is_vacuum() const { return beta == std::numeric_limits<double>::infinity(); }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct QuadratureOptions {
  double absolute_tolerance = 1e-12;
  /// Integrand envelope at the k cutoff.
  double envelope_cutoff = 1e-13;
  std::size_t max_intervals = 4000;
};

/// (f, g) = hbar int dk/(4 pi w_k) F*(w_k, k) G(w_k, k). Ignores beta.
Complex vacuum_kernel(const FieldKernelSpec& spec, const Wavepacket& f,
                      const Wavepacket& g, const QuadratureOptions& opts = {});

/**
 * hbar int dk/(4 pi w_k) [(1 + n) F*(p) G(p) + n F*(-p) G(-p)], p = (w_k, k).
 * Requires finite beta.
 */
Complex thermal_kernel(const FieldKernelSpec& spec, const Wavepacket& f,
                       const Wavepacket& g, const QuadratureOptions& opts = {});

/// vacuum_kernel or thermal_kernel according to spec.beta.
Complex field_kernel(const FieldKernelSpec& spec, const Wavepacket& f,
                     const Wavepacket& g, const QuadratureOptions& opts = {});

/// (f*, g) - (g*, f); independent of beta.
Complex commutator_kernel(const FieldKernelSpec& spec, const Wavepacket& f,
                          const Wavepacket& g, const QuadratureOptions& opts = {});

/// Index carrying a packet's tag with its conjugate's tag as partner.
Index packet_index(const Wavepacket& f);

/**
 * Pairwise kernel matrix over the packets plus any missing conjugates
 * (appended after the given packets, duplicates removed). The lower
 * triangle is filled by Hermitian symmetry.
 */
GaussianKernel kernel_as_gaussian(const FieldKernelSpec& spec,
                                  std::span<const Wavepacket> packets,
                                  const QuadratureOptions& opts = {});

/// max_{a,b} |(g f_a, g f_b) - (f_a, f_b)|.
double invariance_deviation(const FieldKernelSpec& spec, const PoincareElement& g,
                            std::span<const Wavepacket> packets,
                            const QuadratureOptions& opts = {});

}  // namespace qcmt
