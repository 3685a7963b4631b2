#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <spdlog/spdlog.h>

#include "qcmt/cli.hpp"
#include "qcmt/errors.hpp"
#include "qcmt/format.hpp"
#include "qcmt/gns.hpp"
#include "qcmt/koopman.hpp"
#include "qcmt/random.hpp"

namespace qcmt::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kWickTolerance = 1e-8;
constexpr double kCommutatorTolerance = 1e-10;
constexpr double kReproductionTolerance = 1e-9;
constexpr double kVacuumInvarianceTolerance = 1e-6;
constexpr double kThermalSensitivity = 1e-3;
constexpr double kZeroTemperatureTolerance = 1e-8;
constexpr double kStabilizerTolerance = 1e-8;
constexpr double kMicrocausalityTolerance = 1e-6;
constexpr double kBetaIndependenceTolerance = 1e-10;
constexpr std::size_t kMaxOracleWords = 20000;

struct Check {
  std::string name;
  bool passed = true;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json to_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["passed"] = c.passed;
  j["worst"] = number_or_null(c.worst);
  j["tolerance"] = c.tolerance;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

Word random_word(Rng& rng, const std::vector<Index>& gens, std::size_t len) {
  std::vector<Index> f;
  for (std::size_t k = 0; k < len; ++k) f.push_back(gens[rng.index(gens.size())]);
  return Word(std::move(f));
}

AlgebraElement random_element(Rng& rng, const std::vector<Index>& gens,
                              std::size_t max_terms, std::size_t max_len) {
  AlgebraElement out;
  const std::size_t terms = 1 + rng.index(max_terms);
  for (std::size_t t = 0; t < terms; ++t) {
    out.add_term(random_word(rng, gens, rng.index(max_len + 1)),
                 Complex(static_cast<double>(rng.integer(-3, 3)),
                         static_cast<double>(rng.integer(-3, 3))));
  }
  return out;
}

PhaseSpacePolynomial random_polynomial(Rng& rng, std::size_t n, unsigned max_degree) {
  PhaseSpacePolynomial out(n);
  const std::size_t terms = 1 + rng.index(5);
  for (std::size_t t = 0; t < terms; ++t) {
    PhaseSpacePolynomial::Exponents e(2 * n, 0);
    const auto degree = static_cast<unsigned>(rng.index(max_degree + 1));
    for (unsigned d = 0; d < degree; ++d) ++e[rng.index(2 * n)];
    out.add_term(e, static_cast<double>(rng.integer(-5, 5)));
  }
  return out;
}

double max_coefficient(const PhaseSpacePolynomial& p) {
  double worst = 0.0;
  for (const auto& [e, c] : p.terms()) worst = std::max(worst, std::abs(c));
  return worst;
}

std::vector<Word> words_up_to(const std::vector<Index>& gens, std::size_t max_len) {
  std::vector<Word> out{Word{}};
  std::vector<Word> layer{Word{}};
  for (std::size_t len = 1; len <= max_len && !gens.empty(); ++len) {
    std::vector<Word> next;
    for (const auto& w : layer) {
      for (const auto& g : gens) next.push_back(w * Word{g});
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

std::size_t oracle_length(std::size_t n) {
  std::size_t len = 0;
  std::size_t total = 1;
  std::size_t layer = 1;
  while (len < 6) {
    layer *= std::max<std::size_t>(n, 1);
    if (total + layer > kMaxOracleWords) break;
    total += layer;
    ++len;
  }
  return len;
}

Check algebra_laws(const std::vector<Index>& gens, std::size_t trials, Rng& rng) {
  Check c{"algebra_laws", true, 0.0, 0.0, ""};
  if (gens.empty()) return c;
  std::size_t violations = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto x = random_element(rng, gens, 3, 3);
    const auto y = random_element(rng, gens, 3, 3);
    const auto z = random_element(rng, gens, 3, 3);
    const Complex l(static_cast<double>(rng.integer(-3, 3)), static_cast<double>(rng.integer(-3, 3)));
    if ((x * y) * z != x * (y * z)) ++violations;
    if (adjoint(x * y) != adjoint(y) * adjoint(x)) ++violations;
    if (adjoint(adjoint(x)) != x) ++violations;
    if (adjoint(l * x + y) != std::conj(l) * adjoint(x) + adjoint(y)) ++violations;
  }
  c.worst = static_cast<double>(violations);
  c.passed = violations == 0;
  if (!c.passed) c.detail = std::to_string(violations) + " law violations";
  return c;
}

Check wick_oracle(const GaussianKernel& k) {
  Check c{"wick_generating_function", true, 0.0, kWickTolerance, ""};
  const std::size_t len = oracle_length(k.size());
  const auto words = words_up_to(k.indices(), len);
  for (const auto& w : words) {
    const double diff = std::abs(wick_expect(k, w) - moment_from_generating_function(k, w));
    if (diff > c.worst) {
      c.worst = diff;
      c.detail = "worst word " + w.to_string();
    }
  }
  c.passed = c.worst <= c.tolerance;
  if (c.detail.empty()) c.detail = std::to_string(words.size()) + " words up to length " + std::to_string(len);
  return c;
}

Check commutator_identity(const GaussianKernel& k, std::size_t trials, Rng& rng) {
  Check c{"commutator_identity", true, 0.0, kCommutatorTolerance, ""};
  const auto& gens = k.indices();
  if (gens.empty()) return c;
  for (std::size_t t = 0; t < trials; ++t) {
    const Word a = random_word(rng, gens, rng.index(4));
    const Word b = random_word(rng, gens, rng.index(4));
    const Index& i = gens[rng.index(gens.size())];
    const Index& j = gens[rng.index(gens.size())];
    const Complex lhs = wick_expect(k, a * Word{i, j} * b) - wick_expect(k, a * Word{j, i} * b);
    const Complex rhs = commutator_factor(k, i, j) * wick_expect(k, a * b);
    c.worst = std::max(c.worst, std::abs(lhs - rhs));
  }
  c.passed = c.worst <= c.tolerance;
  return c;
}

Check state_axioms(const State& s, std::size_t trials, double tolerance, Rng& rng) {
  Check c{"state_axioms", true, 0.0, tolerance, ""};
  const auto gens = s.generators();
  c.worst = std::abs(s.expect(AlgebraElement::identity()) - 1.0);
  if (!gens.empty()) {
    for (std::size_t t = 0; t < trials; ++t) {
      const auto a = random_element(rng, gens, 4, 3);
      c.worst = std::max(c.worst, std::max(0.0, -s.expect(adjoint(a) * a).real()));
      c.worst = std::max(c.worst, std::abs(s.expect(adjoint(a)) - std::conj(s.expect(a))));
    }
  }
  c.passed = c.worst <= tolerance;
  return c;
}

Check koopman_brackets(std::size_t trials, Rng& rng) {
  Check c{"koopman_brackets", true, 0.0, 0.0, ""};
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = 1 + rng.index(2);
    const auto u = random_polynomial(rng, n, 3);
    const auto v = random_polynomial(rng, n, 3);
    const auto f = random_polynomial(rng, n, 3);
    const auto r = bracket_residuals(u, v, f);
    c.worst = std::max({c.worst, max_coefficient(r.yy), max_coefficient(r.zy),
                        max_coefficient(r.zz), max_coefficient(jacobi_residual(u, v, f))});
  }
  c.passed = c.worst == 0.0;
  c.detail = std::to_string(trials) + " random triples, degree <= 3, n <= 2";
  return c;
}

Check gram_psd(const GaussianKernel& k, const State& s, std::size_t max_degree, double tolerance) {
  Check c{"gram_psd", true, std::numeric_limits<double>::infinity(), tolerance, ""};
  for (std::size_t d = 0; d <= max_degree; ++d) {
    const auto report = gram(build_basis(k.indices(), d), s, tolerance);
    if (report.min_eigenvalue() < c.worst) {
      c.worst = report.min_eigenvalue();
      c.detail = "smallest eigenvalue at degree " + std::to_string(d);
    }
  }
  c.passed = c.worst >= -tolerance;
  return c;
}

Check gns_reproduction(const GaussianKernel& k, const State& s, std::size_t max_degree,
                       double tolerance) {
  Check c{"gns_reproduction", true, 0.0, kReproductionTolerance, ""};
  try {
    const auto rep = represent(build_basis(k.indices(), max_degree), s, tolerance);
    for (const auto& w : words_up_to(k.indices(), max_degree)) {
      c.worst = std::max(c.worst, std::abs(rep.vacuum_expectation(w) - s.evaluate(w)));
    }
    c.detail = "representation dimension " + std::to_string(rep.dimension());
  } catch (const std::domain_error& e) {
    c.worst = std::numeric_limits<double>::infinity();
    c.detail = e.what();
  }
  c.passed = c.worst <= c.tolerance;
  return c;
}

Check probe_check(std::string name, double value, double tolerance) {
  Check c{std::move(name), true, value, tolerance, ""};
  c.passed = !(value < -tolerance);
  if (!std::isfinite(value)) c.detail = "no trials";
  return c;
}

// Field checks.

struct FieldContext {
  const FieldKernelConfig& field;
  std::vector<Wavepacket> packets;
  std::vector<double> betas;
};

FieldKernelSpec with_beta(FieldKernelSpec spec, double beta) {
  spec.beta = beta;
  return spec;
}

double kernel_gap(const FieldKernelSpec& a, const FieldKernelSpec& b,
                  const std::vector<Wavepacket>& packets) {
  double worst = 0.0;
  for (const auto& f : packets) {
    for (const auto& g : packets) {
      worst = std::max(worst, std::abs(field_kernel(a, f, g) - field_kernel(b, f, g)));
    }
  }
  return worst;
}

// Translation by `amount` along the rest-frame time direction.
PoincareElement rest_frame_time_shift(const FieldKernelSpec& spec, double amount) {
  return PoincareElement::translation(amount * spec.rest_frame_t, amount * spec.rest_frame_x);
}

// Translation by `amount` along the rest-frame spatial direction.
PoincareElement rest_frame_space_shift(const FieldKernelSpec& spec, double amount) {
  return PoincareElement::translation(amount * spec.rest_frame_x, amount * spec.rest_frame_t);
}

std::vector<Check> field_checks(const ExperimentConfig& cfg, const FieldContext& ctx) {
  std::vector<Check> out;
  const FieldKernelSpec vacuum = with_beta(ctx.field.spec, std::numeric_limits<double>::infinity());
  const std::vector<double> rapidities =
      cfg.rapidities.empty() ? std::vector<double>{-0.5, -0.25, 0.25, 0.5} : cfg.rapidities;

  Check inv{"vacuum_poincare_invariance", true, 0.0, kVacuumInvarianceTolerance, ""};
  for (double chi : rapidities) {
    inv.worst = std::max(inv.worst, invariance_deviation(vacuum, PoincareElement::boost(chi), ctx.packets));
    inv.worst = std::max(inv.worst, invariance_deviation(vacuum, PoincareElement{chi, 1.0, -0.5}, ctx.packets));
  }
  inv.passed = inv.worst <= inv.tolerance;
  out.push_back(inv);

  Check sens{"thermal_boost_sensitivity", true, std::numeric_limits<double>::infinity(),
             kThermalSensitivity, "deviation at rapidity 0.5 must exceed the tolerance"};
  Check stab{"thermal_stabilizer_invariance", true, 0.0, kStabilizerTolerance, ""};
  Check beta_ind{"commutator_beta_independence", true, 0.0, kBetaIndependenceTolerance, ""};
  for (double beta : ctx.betas) {
    const FieldKernelSpec thermal = with_beta(ctx.field.spec, beta);
    sens.worst = std::min(sens.worst, invariance_deviation(thermal, PoincareElement::boost(0.5), ctx.packets));
    stab.worst = std::max(stab.worst, invariance_deviation(thermal, rest_frame_time_shift(thermal, 2.0), ctx.packets));
    stab.worst = std::max(stab.worst, invariance_deviation(thermal, rest_frame_space_shift(thermal, 1.5), ctx.packets));
    for (const auto& f : ctx.packets) {
      for (const auto& g : ctx.packets) {
        beta_ind.worst = std::max(beta_ind.worst, std::abs(commutator_kernel(thermal, f, g) -
                                                           commutator_kernel(vacuum, f, g)));
      }
    }
  }
  if (ctx.betas.empty()) sens.worst = 0.0;
  sens.passed = ctx.betas.empty() || sens.worst > sens.tolerance;
  stab.passed = stab.worst <= stab.tolerance;
  beta_ind.passed = beta_ind.worst <= beta_ind.tolerance;
  out.push_back(sens);
  out.push_back(stab);

  // beta hbar omega_min = 40.
  const double cold = 40.0 / (ctx.field.spec.hbar * ctx.field.spec.mass);
  Check limit{"zero_temperature_limit", true, kernel_gap(with_beta(ctx.field.spec, cold), vacuum, ctx.packets),
              kZeroTemperatureTolerance, ""};
  limit.passed = limit.worst <= limit.tolerance;
  out.push_back(limit);

  const std::vector<double> separations =
      cfg.separations.empty() ? std::vector<double>{10.0} : cfg.separations;
  Check micro{"microcausality", true, 0.0, kMicrocausalityTolerance, ""};
  for (double dx : separations) {
    for (const auto& f : ctx.packets) {
      const auto g = poincare_act(rest_frame_space_shift(ctx.field.spec, dx), f);
      micro.worst = std::max(micro.worst, std::abs(commutator_kernel(vacuum, f, g)));
    }
  }
  micro.passed = micro.worst <= micro.tolerance;
  out.push_back(micro);
  out.push_back(beta_ind);
  return out;
}

std::vector<double> thermal_betas(const ExperimentConfig& cfg, const FieldKernelSpec& spec) {
  if (!cfg.betas.empty()) return cfg.betas;
  if (!spec.is_vacuum()) return {spec.beta};
  return {1.0};
}

std::string csv_complex(Complex z) {
  return format_double(z.real()) + "," + format_double(z.imag());
}

}  // namespace

RunResult run_verify(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  const GaussianKernel kernel = build_kernel(cfg);
  const GaussianState state(kernel);
  if (kernel.size() == 0) {
    result.warnings.push_back("empty index set: state checks pass vacuously");
  }
  Rng rng(cfg.seed);

  std::vector<Check> checks;
  checks.push_back(algebra_laws(kernel.indices(), cfg.trials, rng));
  checks.push_back(wick_oracle(kernel));
  checks.push_back(commutator_identity(kernel, cfg.trials, rng));
  checks.push_back(state_axioms(state, cfg.trials, cfg.tolerance, rng));
  checks.push_back(koopman_brackets(cfg.trials, rng));
  checks.push_back(gram_psd(kernel, state, cfg.max_degree, cfg.tolerance));
  checks.push_back(gns_reproduction(kernel, state, cfg.max_degree, cfg.tolerance));
  checks.push_back(probe_check("positivity_probe",
                               positivity_probe(state, cfg.trials, 3, cfg.seed), cfg.tolerance));
  checks.push_back(probe_check("extended_positivity",
                               extended_positivity_probe(state, cfg.trials, cfg.seed), cfg.tolerance));
  if (const auto* field = std::get_if<FieldKernelConfig>(&cfg.kernel)) {
    FieldContext ctx{*field, {}, thermal_betas(cfg, field->spec)};
    for (const auto& p : field->packets) ctx.packets.push_back(p.packet);
    for (auto& c : field_checks(cfg, ctx)) checks.push_back(std::move(c));
  }

  bool passed = true;
  Json report;
  report["mode"] = "verify";
  report["seed"] = cfg.seed;
  report["tolerance"] = cfg.tolerance;
  Json list = Json::array();
  for (const auto& c : checks) {
    spdlog::debug("{}: {} (worst {})", c.name, c.passed ? "pass" : "FAIL", format_double(c.worst));
    passed = passed && c.passed;
    list.push_back(to_json(c));
  }
  report["passed"] = passed;
  report["checks"] = std::move(list);
  report["warnings"] = result.warnings;
  report["config"] = cfg.echo;
  if (cfg.record_timing) {
    report["timing_ms"] = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
  }
  result.output = report.dump(2) + "\n";
  result.exit_code = passed ? kExitPass : kExitCheckFailure;
  return result;
}

RunResult run_moments(const ExperimentConfig& cfg) {
  if (cfg.words.empty()) throw ConfigError("words", "moments needs a non-empty word list");
  const GaussianKernel kernel = build_kernel(cfg);
  const GaussianState state(kernel);
  std::vector<ExtendedWord> words;
  for (std::size_t k = 0; k < cfg.words.size(); ++k) {
    words.push_back(parse_word(cfg.words[k], kernel, "words[" + std::to_string(k) + "]"));
  }
  RunResult result;
  std::ostringstream out;
  out << "word,re,im\n";
  for (const auto& w : words) {
    try {
      const Complex value = extended_expect(state, w);
      out << w.to_string() << "," << csv_complex(value) << "\n";
    } catch (const std::length_error& e) {
      out << w.to_string() << ",error,error\n";
      result.warnings.push_back(w.to_string() + ": " + e.what());
      result.exit_code = kExitNumericalFailure;
    }
  }
  result.output = out.str();
  return result;
}

RunResult run_gram(const ExperimentConfig& cfg) {
  const GaussianKernel kernel = build_kernel(cfg);
  const GaussianState state(kernel);
  const auto basis = build_basis(kernel.indices(), cfg.max_degree);
  const auto report = gram(basis, state, cfg.tolerance);
  Json j;
  j["mode"] = "gram";
  j["degree"] = cfg.max_degree;
  Json words = Json::array();
  for (const auto& w : basis.words) words.push_back(w.to_string());
  j["basis"] = std::move(words);
  const auto spectrum = Json::parse(report.to_json());
  for (const auto& item : spectrum.items()) j[item.key()] = item.value();
  j["min_eigenvalue"] = number_or_null(report.min_eigenvalue());
  j["passed"] = report.positive_semidefinite();
  RunResult result;
  result.output = j.dump(2) + "\n";
  result.exit_code = report.positive_semidefinite() ? kExitPass : kExitCheckFailure;
  return result;
}

RunResult run_boost_scan(const ExperimentConfig& cfg) {
  const auto* field = std::get_if<FieldKernelConfig>(&cfg.kernel);
  if (!field) throw ConfigError("kernel.type", "boost-scan needs a field kernel");
  if (cfg.rapidities.empty()) throw ConfigError("rapidities", "boost-scan needs a non-empty rapidity list");
  if (field->packets.empty()) throw ConfigError("kernel.packets", "boost-scan needs at least one packet");
  double beta = field->spec.beta;
  if (field->spec.is_vacuum()) {
    if (cfg.betas.empty()) throw ConfigError("betas", "boost-scan needs a finite kernel.beta or a betas entry");
    beta = cfg.betas.front();
  }
  auto find = [&](const std::string& name) -> const Wavepacket& {
    for (const auto& p : field->packets) {
      if (p.name == name) return p.packet;
    }
    throw ConfigError("pair", "unknown packet '" + name + "'");
  };
  const Wavepacket& f = cfg.pair.empty() ? field->packets.front().packet : find(cfg.pair[0]);
  const Wavepacket& g = cfg.pair.empty() ? field->packets[std::min<std::size_t>(1, field->packets.size() - 1)].packet
                                         : find(cfg.pair[1]);

  const FieldKernelSpec vacuum = with_beta(field->spec, std::numeric_limits<double>::infinity());
  const FieldKernelSpec thermal = with_beta(field->spec, beta);
  RunResult result;
  std::ostringstream out;
  out << "rapidity,vacuum_deviation,thermal_deviation\n";
  const Complex vac0 = field_kernel(vacuum, f, g);
  const Complex th0 = field_kernel(thermal, f, g);
  for (double chi : cfg.rapidities) {
    try {
      const auto boost = PoincareElement::boost(chi);
      const auto bf = poincare_act(boost, f);
      const auto bg = poincare_act(boost, g);
      const double dv = std::abs(field_kernel(vacuum, bf, bg) - vac0);
      const double dt = std::abs(field_kernel(thermal, bf, bg) - th0);
      out << format_double(chi) << "," << format_double(dv) << "," << format_double(dt) << "\n";
    } catch (const NumericalError& e) {
      out << format_double(chi) << ",error,error\n";
      result.warnings.push_back(e.what());
      result.exit_code = kExitNumericalFailure;
    }
  }
  result.output = out.str();
  return result;
}

RunResult run_witness(const ExperimentConfig& cfg) {
  const GaussianKernel kernel = build_kernel(cfg);
  const GaussianState state(kernel);
  std::ostringstream out;
  out << "i,j,left_re,left_im,right_re,right_im,gap\n";
  for (const auto& i : kernel.indices()) {
    for (const auto& j : kernel.indices()) {
      const auto [left, right] = commutation_witness(state, i, j);
      out << i.tag() << "," << j.tag() << "," << csv_complex(left) << "," << csv_complex(right)
          << "," << format_double(std::abs(left - right)) << "\n";
    }
  }
  RunResult result;
  if (kernel.size() == 0) result.warnings.push_back("empty index set: no witness rows");
  result.output = out.str();
  return result;
}

RunResult run(Mode mode, const ExperimentConfig& cfg) {
  try {
    switch (mode) {
      case Mode::verify: return run_verify(cfg);
      case Mode::moments: return run_moments(cfg);
      case Mode::gram: return run_gram(cfg);
      case Mode::boost_scan: return run_boost_scan(cfg);
      case Mode::witness: return run_witness(cfg);
    }
  } catch (const NumericalError& e) {
    RunResult failed;
    failed.exit_code = kExitNumericalFailure;
    failed.warnings.push_back(e.what());
    return failed;
  }
  return {};
}

}  // namespace qcmt::cli
