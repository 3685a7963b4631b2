#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <qcmt/errors.hpp>
#include <qcmt/kernels.hpp>

using namespace qcmt;

namespace {

constexpr double kPi = std::numbers::pi;

FieldKernelSpec vacuum_spec() { return FieldKernelSpec{}; }

FieldKernelSpec thermal_spec(double beta) {
  FieldKernelSpec s;
  s.beta = beta;
  return s;
}

std::vector<Wavepacket> sample_packets() {
  return {Wavepacket::gaussian(0.0, 0.0, 1.0),
          Wavepacket::gaussian(0.5, 1.0, 1.0, 1.2, 0.4),
          Wavepacket::gaussian(-0.3, -0.8, 1.0, 0.0, -0.7, Complex(0.6, 0.8))};
}

// Riemann-sum oracle for F(w, k) of a packet on a dense grid; spectrally
// accurate for Gaussian envelopes.
Complex fourier_oracle(const Wavepacket& f, double omega, double k) {
  const double half = 14.0;
  const int n = 561;
  const double h = 2.0 * half / (n - 1);
  Complex sum = 0.0;
  for (int a = 0; a < n; ++a) {
    const double t = -half + a * h;
    for (int b = 0; b < n; ++b) {
      const double x = -half + b * h;
      sum += f.value(t, x) * std::exp(Complex(0.0, omega * t - k * x));
    }
  }
  return sum * h * h;
}

// Plain trapezoid over k for the vacuum and thermal integrals.
Complex kernel_oracle(const FieldKernelSpec& spec, const Wavepacket& f, const Wavepacket& g) {
  const double kmax = 20.0;
  const int n = 40001;
  const double h = 2.0 * kmax / (n - 1);
  Complex sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double k = -kmax + j * h;
    const double w = std::sqrt(k * k + spec.mass * spec.mass);
    Complex term = std::conj(f.fourier(w, k)) * g.fourier(w, k);
    if (!spec.is_vacuum()) {
      const double energy = w * spec.rest_frame_t - k * spec.rest_frame_x;
      const double occ = 1.0 / std::expm1(spec.beta * spec.hbar * energy);
      term = (1.0 + occ) * term + occ * std::conj(f.fourier(-w, -k)) * g.fourier(-w, -k);
    }
    sum += ((j == 0 || j == n - 1) ? 0.5 : 1.0) * term / (4.0 * kPi * w);
  }
  return spec.hbar * sum * h;
}

}  // namespace

TEST(WavepacketTest, RejectsBadWidth) {
  EXPECT_THROW(Wavepacket::gaussian(0, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(Wavepacket::gaussian(0, 0, -1.0), std::invalid_argument);
}

TEST(WavepacketTest, FourierMatchesGridIntegral) {
  const auto packets = sample_packets();
  for (const auto& f : packets) {
    for (auto [w, k] : {std::pair{0.0, 0.0}, std::pair{1.3, -0.4}, std::pair{-0.7, 1.1}}) {
      EXPECT_NEAR(std::abs(f.fourier(w, k) - fourier_oracle(f, w, k)), 0.0, 1e-9);
    }
  }
}

TEST(WavepacketTest, BoostedFourierMatchesGridIntegral) {
  const auto f = poincare_act({0.6, 0.3, -0.2}, sample_packets()[1]);
  for (auto [w, k] : {std::pair{0.2, 0.1}, std::pair{1.5, 0.9}}) {
    EXPECT_NEAR(std::abs(f.fourier(w, k) - fourier_oracle(f, w, k)), 0.0, 1e-9);
  }
}

TEST(WavepacketTest, ConjugateIsPointwise) {
  const auto f = sample_packets()[2];
  const auto fc = f.conjugate();
  for (auto [t, x] : {std::pair{0.1, 0.2}, std::pair{-1.0, 0.7}}) {
    EXPECT_NEAR(std::abs(fc.value(t, x) - std::conj(f.value(t, x))), 0.0, 1e-15);
  }
  EXPECT_EQ(fc.conjugate(), f);
}

TEST(WavepacketTest, LinearCombinationsArePointwise) {
  const auto p = sample_packets();
  const auto h = p[0] + Complex(2.0, -1.0) * p[1];
  EXPECT_NEAR(std::abs(h.value(0.3, 0.4) -
                       (p[0].value(0.3, 0.4) + Complex(2.0, -1.0) * p[1].value(0.3, 0.4))),
              0.0, 1e-15);
}

TEST(WavepacketTest, TagIsStructural) {
  const auto p = sample_packets();
  EXPECT_EQ(p[1].tag(), sample_packets()[1].tag());
  EXPECT_NE(p[0].tag(), p[1].tag());
  EXPECT_EQ(p[0].tag().rfind("wp", 0), 0u);
}

TEST(PoincareTest, IdentityAndTranslation) {
  const auto f = sample_packets()[1];
  EXPECT_EQ(poincare_act({}, f), f);
  const auto shifted = poincare_act(PoincareElement::translation(1.0, 0.0), f);
  EXPECT_DOUBLE_EQ(shifted.components()[0].t0, f.components()[0].t0 + 1.0);
}

TEST(PoincareTest, ActionIsPullback) {
  const auto f = sample_packets()[1];
  const PoincareElement g{0.4, 0.3, -0.5};
  const auto gf = poincare_act(g, f);
  const auto inv = g.inverse();
  for (auto [t, x] : {std::pair{0.2, -0.1}, std::pair{1.0, 0.8}}) {
    const double ct = std::cosh(inv.rapidity), st = std::sinh(inv.rapidity);
    const double tt = ct * t + st * x + inv.a_t;
    const double xx = st * t + ct * x + inv.a_x;
    EXPECT_NEAR(std::abs(gf.value(t, x) - f.value(tt, xx)), 0.0, 1e-13);
  }
}

TEST(PoincareTest, BoostInverseRestoresParameters) {
  const auto f = sample_packets()[2];
  const auto back = poincare_act(PoincareElement::boost(-0.5),
                                 poincare_act(PoincareElement::boost(0.5), f));
  const auto& a = back.components()[0];
  const auto& b = f.components()[0];
  EXPECT_NEAR(a.t0, b.t0, 1e-12);
  EXPECT_NEAR(a.x0, b.x0, 1e-12);
  EXPECT_NEAR(a.omega0, b.omega0, 1e-12);
  EXPECT_NEAR(a.k0, b.k0, 1e-12);
  EXPECT_NEAR(a.envelope_rapidity, b.envelope_rapidity, 1e-12);
}

TEST(PoincareTest, CompatibleWithConjugation) {
  const auto f = sample_packets()[2];
  const PoincareElement g{0.3, 1.0, 2.0};
  EXPECT_EQ(poincare_act(g, f.conjugate()), poincare_act(g, f).conjugate());
}

TEST(PoincareTest, CompositionIsAction) {
  const auto f = sample_packets()[1];
  const PoincareElement g{0.3, 0.1, 0.2};
  const PoincareElement h{-0.7, 0.4, -0.3};
  const auto lhs = poincare_act(g.compose(h), f);
  const auto rhs = poincare_act(g, poincare_act(h, f));
  EXPECT_NEAR(std::abs(lhs.value(0.1, 0.2) - rhs.value(0.1, 0.2)), 0.0, 1e-13);
}

TEST(VacuumKernelTest, MatchesTrapezoidOracle) {
  const auto p = sample_packets();
  for (const auto& f : p) {
    for (const auto& g : p) {
      EXPECT_NEAR(std::abs(vacuum_kernel(vacuum_spec(), f, g) - kernel_oracle(vacuum_spec(), f, g)),
                  0.0, 1e-10);
    }
  }
}

TEST(VacuumKernelTest, HermitianAndPositive) {
  const auto p = sample_packets();
  for (const auto& f : p) {
    const Complex ff = vacuum_kernel(vacuum_spec(), f, f);
    EXPECT_GE(ff.real(), 0.0);
    EXPECT_NEAR(ff.imag(), 0.0, 1e-14);
    for (const auto& g : p) {
      EXPECT_NEAR(std::abs(vacuum_kernel(vacuum_spec(), f, g) -
                           std::conj(vacuum_kernel(vacuum_spec(), g, f))),
                  0.0, 1e-12);
    }
  }
}

TEST(VacuumKernelTest, PoincareInvariant) {
  const auto p = sample_packets();
  for (double chi : {-0.5, -0.25, 0.25, 0.5}) {
    EXPECT_LE(invariance_deviation(vacuum_spec(), PoincareElement::boost(chi), p), 1e-6);
  }
  EXPECT_LE(invariance_deviation(vacuum_spec(), PoincareElement{0.5, 1.0, -2.0}, p), 1e-6);
}

TEST(VacuumKernelTest, LinearInHbar) {
  const auto p = sample_packets();
  FieldKernelSpec s = vacuum_spec();
  s.hbar = 2.5;
  EXPECT_NEAR(std::abs(vacuum_kernel(s, p[0], p[1]) - 2.5 * vacuum_kernel(vacuum_spec(), p[0], p[1])),
              0.0, 1e-12);
}

TEST(VacuumKernelTest, ParameterValidation) {
  const auto p = sample_packets();
  FieldKernelSpec s;
  s.mass = 0.0;
  EXPECT_THROW(vacuum_kernel(s, p[0], p[0]), std::invalid_argument);
  s = {};
  s.rest_frame_t = 0.5;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(ThermalKernelTest, MatchesTrapezoidOracle) {
  const auto p = sample_packets();
  const auto spec = thermal_spec(1.0);
  for (const auto& f : p) {
    for (const auto& g : p) {
      EXPECT_NEAR(std::abs(thermal_kernel(spec, f, g) - kernel_oracle(spec, f, g)), 0.0, 1e-10);
    }
  }
}

TEST(ThermalKernelTest, BoostedRestFrameMatchesOracle) {
  FieldKernelSpec spec = thermal_spec(0.8);
  spec.rest_frame_t = std::cosh(0.3);
  spec.rest_frame_x = std::sinh(0.3);
  const auto p = sample_packets();
  EXPECT_NEAR(std::abs(thermal_kernel(spec, p[1], p[2]) - kernel_oracle(spec, p[1], p[2])), 0.0,
              1e-10);
}

TEST(ThermalKernelTest, RequiresFiniteBeta) {
  const auto p = sample_packets();
  EXPECT_THROW(thermal_kernel(vacuum_spec(), p[0], p[0]), std::invalid_argument);
}

TEST(ThermalKernelTest, ZeroTemperatureLimit) {
  const auto p = sample_packets();
  const auto spec = thermal_spec(40.0);
  for (const auto& f : p) {
    for (const auto& g : p) {
      EXPECT_LE(std::abs(thermal_kernel(spec, f, g) - vacuum_kernel(vacuum_spec(), f, g)), 1e-8);
    }
  }
}

TEST(ThermalKernelTest, BoostsAreDetected) {
  const auto p = sample_packets();
  EXPECT_GT(invariance_deviation(thermal_spec(1.0), PoincareElement::boost(0.5), p), 1e-3);
}

TEST(ThermalKernelTest, RestFrameStabilizerIsASymmetry) {
  const auto p = sample_packets();
  const auto spec = thermal_spec(1.0);
  EXPECT_LE(invariance_deviation(spec, PoincareElement::translation(2.0, 0.0), p), 1e-8);
  EXPECT_LE(invariance_deviation(spec, PoincareElement::translation(0.0, -1.5), p), 1e-8);
  for (const auto& f : p) {
    for (const auto& g : p) {
      EXPECT_LE(std::abs(thermal_kernel(spec, reflect_space(f), reflect_space(g)) -
                         thermal_kernel(spec, f, g)),
                1e-8);
    }
  }
}

TEST(ThermalKernelTest, HighTemperatureExcessScalesWithTemperature) {
  const auto p = sample_packets();
  const auto vac = vacuum_kernel(vacuum_spec(), p[0], p[0]);
  const auto excess = [&](double beta) {
    return (thermal_kernel(thermal_spec(beta), p[0], p[0]) - vac).real();
  };
  const double ratio = excess(0.025) / excess(0.05);
  EXPECT_NEAR(ratio, 2.0, 0.1);
}

TEST(CommutatorKernelTest, RealPacketWithItselfVanishes) {
  const auto f = Wavepacket::gaussian(0.0, 0.0, 1.0);
  EXPECT_NEAR(std::abs(commutator_kernel(vacuum_spec(), f, f)), 0.0, 1e-15);
}

TEST(CommutatorKernelTest, SpacelikeDecay) {
  const auto f = Wavepacket::gaussian(0.0, 0.0, 1.0);
  const auto modulated = Wavepacket::gaussian(0.0, 0.0, 1.0, 1.0, 0.5);
  for (double dx : {10.0, 12.0, 15.0}) {
    const auto g = Wavepacket::gaussian(0.0, dx, 1.0);
    EXPECT_LE(std::abs(commutator_kernel(vacuum_spec(), f, g)), 1e-6);
    const auto h = Wavepacket::gaussian(0.0, dx, 1.0, 1.0, 0.5);
    EXPECT_LE(std::abs(commutator_kernel(vacuum_spec(), modulated, h)), 1e-6);
  }
}

TEST(CommutatorKernelTest, TimelikeDoesNotDecay) {
  // Sanity: the same packets separated in time have a sizeable commutator.
  const auto f = Wavepacket::gaussian(0.0, 0.0, 1.0);
  const auto g = Wavepacket::gaussian(3.0, 0.0, 1.0);
  EXPECT_GT(std::abs(commutator_kernel(vacuum_spec(), f, g)), 1e-3);
}

TEST(CommutatorKernelTest, TemperatureIndependent) {
  const auto p = sample_packets();
  for (double beta : {0.5, 1.0, 3.0}) {
    for (const auto& f : p) {
      for (const auto& g : p) {
        EXPECT_LE(std::abs(commutator_kernel(thermal_spec(beta), f, g) -
                           commutator_kernel(vacuum_spec(), f, g)),
                  1e-10);
      }
    }
  }
}

TEST(KernelAsGaussianTest, SinglePacket) {
  const std::vector<Wavepacket> one{Wavepacket::gaussian(0, 0, 1)};
  const auto k = kernel_as_gaussian(vacuum_spec(), one);
  EXPECT_EQ(k.size(), 1u);
  EXPECT_TRUE(k.is_positive_semidefinite());
}

TEST(KernelAsGaussianTest, AppendsConjugatesAndIsPositive) {
  const auto p = sample_packets();
  for (const auto& spec : {vacuum_spec(), thermal_spec(1.0)}) {
    const auto k = kernel_as_gaussian(spec, p);
    EXPECT_EQ(k.size(), 5u);  // two modulated packets gain conjugates
    EXPECT_GE(k.min_eigenvalue(), -1e-10);
    for (const auto& f : p) {
      EXPECT_TRUE(k.contains(packet_index(f.conjugate())));
      EXPECT_EQ(k.conjugate(packet_index(f)).tag(), f.conjugate().tag());
    }
  }
}

TEST(KernelAsGaussianTest, IndexLinearity) {
  const auto p = sample_packets();
  const auto spec = thermal_spec(1.0);
  const Complex l(0.5, -1.5), m(2.0, 0.25);
  const auto lhs = field_kernel(spec, l * p[0] + m * p[1], p[2]);
  const auto rhs = std::conj(l) * field_kernel(spec, p[0], p[2]) +
                   std::conj(m) * field_kernel(spec, p[1], p[2]);
  EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-10);
  const auto lin = field_kernel(spec, p[2], l * p[0] + m * p[1]);
  EXPECT_NEAR(std::abs(lin - (l * field_kernel(spec, p[2], p[0]) + m * field_kernel(spec, p[2], p[1]))),
              0.0, 1e-10);
}

TEST(QuadratureTest, FailureCarriesDiagnostics) {
  const auto p = sample_packets();
  QuadratureOptions opts;
  opts.max_intervals = 1;
  opts.absolute_tolerance = 1e-30;
  try {
    vacuum_kernel(vacuum_spec(), p[1], p[2], opts);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("error"), std::string::npos);
  }
}
