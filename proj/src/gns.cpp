#include "qcmt/gns.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qcmt/random.hpp"

namespace qcmt {

MonomialBasis build_basis(std::span<const Index> indices, std::size_t degree) {
  MonomialBasis basis;
  basis.degree = degree;
  for (const auto& i : indices) {
    if (std::find(basis.indices.begin(), basis.indices.end(), i) ==
        basis.indices.end()) {
      basis.indices.push_back(i);
    }
  }
  basis.words.emplace_back();
  if (basis.indices.empty()) return basis;

  std::vector<Word> layer{Word{}};
  for (std::size_t len = 1; len <= degree; ++len) {
    std::vector<Word> next;
    next.reserve(layer.size() * basis.indices.size());
    for (const auto& w : layer) {
      for (const auto& i : basis.indices) next.push_back(w * Word{i});
    }
    basis.words.insert(basis.words.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return basis;
}

std::string GramReport::to_json() const {
  nlohmann::ordered_json j;
  j["dimension"] = dimension();
  j["eigenvalues"] = eigenvalues;
  j["null_dimension"] = null_dimension;
  j["tolerance"] = tolerance;
  return j.dump(2);
}

GramReport gram_report(Eigen::MatrixXcd gram, double tolerance) {
  GramReport report;
  report.tolerance = tolerance;
  if (gram.rows() != gram.cols()) {
    throw std::invalid_argument("Gram matrix must be square");
  }
  if (gram.size() > 0) {
    const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
    const double asym = (gram - gram.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) {
      throw std::domain_error("Gram matrix is not Hermitian (max asymmetry " +
                              std::to_string(asym) + ")");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        gram, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    report.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(report.eigenvalues.begin(), report.eigenvalues.end());
    report.null_dimension = static_cast<std::size_t>(
        std::count_if(report.eigenvalues.begin(), report.eigenvalues.end(),
                      [tolerance](double x) { return std::abs(x) <= tolerance; }));
  }
  report.gram = std::move(gram);
  return report;
}

namespace {

Eigen::MatrixXcd gram_matrix(const std::vector<Word>& words, const State& s) {
  const auto n = static_cast<Eigen::Index>(words.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const Word left = words[static_cast<std::size_t>(a)].adjoint();
    for (Eigen::Index b = 0; b < n; ++b) {
      g(a, b) = s.evaluate(left * words[static_cast<std::size_t>(b)]);
    }
  }
  return g;
}

// Orthonormal frame of the quotient: columns are word-coefficient vectors
// U_k / sqrt(lambda_k) for the retained eigenpairs.
Eigen::MatrixXcd quotient_frame(const Eigen::MatrixXcd& g, double tolerance) {
  const Eigen::MatrixXcd h = (g + g.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const auto& ev = solver.eigenvalues();
  const double largest = ev.size() ? ev.maxCoeff() : 0.0;
  if (ev.size() && ev.minCoeff() < -tolerance * std::max(1.0, largest)) {
    throw std::domain_error(
        "Gram matrix has eigenvalue " + std::to_string(ev.minCoeff()) +
        " below -tolerance; the functional is not a state");
  }
  const double threshold = 1e-10 * largest;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) > threshold) keep.push_back(k);
  }
  Eigen::MatrixXcd frame(g.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    frame.col(static_cast<Eigen::Index>(c)) =
        solver.eigenvectors().col(keep[c]) / std::sqrt(ev(keep[c]));
  }
  return frame;
}

}  // namespace

GramReport gram(const MonomialBasis& basis, const State& s, double tolerance) {
  return gram_report(gram_matrix(basis.words, s), tolerance);
}

const Eigen::MatrixXcd& Representation::map(const Index& generator) const {
  auto it = maps_.find(generator.tag());
  if (it == maps_.end()) {
    throw std::out_of_range("generator '" + generator.tag() +
                            "' is not represented");
  }
  return it->second;
}

Eigen::MatrixXcd Representation::operator_matrix(const Word& w) const {
  const auto r = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(r, r);
  for (auto it = w.factors().rbegin(); it != w.factors().rend(); ++it) {
    op = embedding_.adjoint() * map(*it) * op;
  }
  return op;
}

Complex Representation::vacuum_expectation(const Word& w) const {
  Eigen::VectorXcd v = cyclic_;
  for (auto it = w.factors().rbegin(); it != w.factors().rend(); ++it) {
    v = embedding_.adjoint() * (map(*it) * v);
  }
  return cyclic_.dot(v);
}

Representation represent(const MonomialBasis& basis, const State& s,
                         double tolerance) {
  const MonomialBasis raised = build_basis(basis.indices, basis.degree + 1);
  const auto n_low = static_cast<Eigen::Index>(basis.words.size());
  const Eigen::MatrixXcd g_raised = gram_matrix(raised.words, s);
  const Eigen::MatrixXcd g_low = g_raised.topLeftCorner(n_low, n_low);

  const auto low = quotient_frame(g_low, tolerance);
  const auto high = quotient_frame(g_raised, tolerance);

  std::map<Word, Eigen::Index> position;
  for (std::size_t k = 0; k < raised.words.size(); ++k) {
    position.emplace(raised.words[k], static_cast<Eigen::Index>(k));
  }

  // Coordinates of a raised-space coefficient vector c are F^H G c.
  const Eigen::MatrixXcd coords = high.adjoint() * g_raised;

  Representation rep;
  rep.basis_ = basis;

  Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(g_raised.rows(), low.cols());
  padded.topRows(n_low) = low;
  rep.embedding_ = coords * padded;

  for (const auto& i : basis.indices) {
    Eigen::MatrixXcd shifted = Eigen::MatrixXcd::Zero(g_raised.rows(), low.cols());
    for (Eigen::Index a = 0; a < n_low; ++a) {
      const Word image = Word{i} * basis.words[static_cast<std::size_t>(a)];
      shifted.row(position.at(image)) += low.row(a);
    }
    rep.maps_.emplace(i.tag(), coords * shifted);
  }

  Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(n_low);
  unit(0) = 1.0;
  rep.cyclic_ = low.adjoint() * (g_low * unit);
  return rep;
}

double positivity_probe(const State& s, std::size_t trials, std::size_t max_len,
                        std::uint64_t seed) {
  const auto generators = s.generators();
  Rng rng(seed);
  auto sample = [&](std::size_t) {
    std::vector<Word> words{Word{}};
    if (generators.empty() || max_len == 0) return words;
    for (int k = 0; k < 3; ++k) {
      const std::size_t len = 1 + rng.index(max_len);
      std::vector<Index> factors;
      for (std::size_t f = 0; f < len; ++f) {
        factors.push_back(generators[rng.index(generators.size())]);
      }
      Word w(std::move(factors));
      if (std::find(words.begin(), words.end(), w) == words.end()) {
        words.push_back(std::move(w));
      }
    }
    return words;
  };
  auto inner = [&](const Word& a, const Word& b) {
    return s.evaluate(a.adjoint() * b);
  };
  return probe_min_eigenvalue<Word>(trials, sample, inner);
}

}  // namespace qcmt
