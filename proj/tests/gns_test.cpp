#include <gtest/gtest.h>

#include <stdexcept>

#include <qcmt/gns.hpp>
#include <qcmt/koopman.hpp>

#include "test_support.hpp"

using namespace qcmt;

namespace {

GaussianKernel kernel2(double off) {
  Eigen::MatrixXd k(2, 2);
  k << 1.0, off, off, 1.0;
  return GaussianKernel::trivial_involution({"1", "2"}, k);
}

GaussianKernel kernel3() {
  Eigen::MatrixXd k(3, 3);
  k << 1.0, 0.5, 0.2, 0.5, 1.0, 0.3, 0.2, 0.3, 1.0;
  return GaussianKernel::trivial_involution({"1", "2", "3"}, k);
}

std::vector<Word> all_words(const std::vector<Index>& gens, std::size_t max_len) {
  std::vector<Word> out{Word{}};
  std::vector<Word> layer{Word{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Word> next;
    for (const auto& w : layer) {
      for (const auto& g : gens) next.push_back(w * Word{g});
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

}  // namespace

TEST(BasisTest, Enumeration) {
  const Index m1("1"), m2("2");
  const std::vector<Index> two{m1, m2};
  const auto b = build_basis(two, 1);
  ASSERT_EQ(b.words.size(), 3u);
  EXPECT_EQ(b.words[0], Word{});
  EXPECT_EQ(b.words[1], Word{m1});
  EXPECT_EQ(b.words[2], Word{m2});

  const std::vector<Index> one{m1};
  const auto c = build_basis(one, 2);
  ASSERT_EQ(c.words.size(), 3u);
  EXPECT_EQ(c.words[2], (Word{m1, m1}));

  EXPECT_EQ(build_basis(std::span<const Index>{}, 3).words.size(), 1u);
}

TEST(BasisTest, SizeAndNoDuplicates) {
  const auto k = kernel3();
  const auto b = build_basis(k.indices(), 3);
  EXPECT_EQ(b.words.size(), 1u + 3u + 9u + 27u);
  for (std::size_t a = 0; a < b.words.size(); ++a) {
    for (std::size_t c = a + 1; c < b.words.size(); ++c) EXPECT_NE(b.words[a], b.words[c]);
  }
}

TEST(GramTest, DegreeOneTwoIndices) {
  const GaussianState s(kernel2(0.5));
  const auto report = gram(build_basis(s.kernel().indices(), 1), s);
  Eigen::MatrixXcd expected(3, 3);
  expected << 1, 0, 0, 0, 1, 0.5, 0, 0.5, 1;
  EXPECT_LT((report.gram - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(report.eigenvalues.front(), 0.5, 1e-12);
  EXPECT_TRUE(report.positive_semidefinite());
}

TEST(GramTest, IdentityBasis) {
  const GaussianState s(kernel3());
  const auto report = gram(build_basis(std::span<const Index>{}, 0), s);
  ASSERT_EQ(report.dimension(), 1u);
  EXPECT_EQ(report.gram(0, 0), Complex(1.0));
}

TEST(GramTest, DegenerateKernelHasNullSpace) {
  const GaussianState s(kernel2(1.0));
  const auto report = gram(build_basis(s.kernel().indices(), 1), s);
  EXPECT_GE(report.null_dimension, 1u);
}

TEST(GramTest, PositiveUpToDegreeThree) {
  for (const auto& k : {kernel3(), gibbs_oscillator_kernel(1.0, 1.0, 1.0)}) {
    const GaussianState s(k);
    for (std::size_t d = 0; d <= 3; ++d) {
      EXPECT_GE(gram(build_basis(k.indices(), d), s).min_eigenvalue(), -1e-10);
    }
  }
}

TEST(GramTest, NonHermitianRejected) {
  Eigen::MatrixXcd g(2, 2);
  g << 1, 1, 0, 1;
  EXPECT_THROW(gram_report(g), std::domain_error);
}

TEST(GramTest, JsonShape) {
  const GaussianState s(kernel2(0.5));
  const std::string json = gram(build_basis(s.kernel().indices(), 1), s).to_json();
  EXPECT_NE(json.find("\"dimension\": 3"), std::string::npos);
  EXPECT_NE(json.find("\"null_dimension\": 0"), std::string::npos);
}

TEST(RepresentationTest, ReproducesTwoPoint) {
  const auto k = kernel2(0.5);
  const GaussianState s(k);
  const auto rep = represent(build_basis(k.indices(), 1), s);
  const Complex v = rep.vacuum_expectation(Word{Index("1"), Index("2")});
  EXPECT_NEAR(std::abs(v - 0.5), 0.0, 1e-12);
}

TEST(RepresentationTest, IdentityWordIsIdentity) {
  const auto k = kernel3();
  const GaussianState s(k);
  const auto rep = represent(build_basis(k.indices(), 2), s);
  const auto id = rep.operator_matrix(Word{});
  EXPECT_LT((id - Eigen::MatrixXcd::Identity(id.rows(), id.cols())).cwiseAbs().maxCoeff(),
            1e-15);
  EXPECT_NEAR(rep.cyclic_vector().norm(), 1.0, 1e-12);
}

TEST(RepresentationTest, NullQuotientShrinksSpace) {
  const auto k = kernel2(1.0);
  const GaussianState s(k);
  const auto basis = build_basis(k.indices(), 1);
  const auto rep = represent(basis, s);
  EXPECT_LT(rep.dimension(), basis.words.size());
  EXPECT_NEAR(std::abs(rep.vacuum_expectation(Word{Index("1"), Index("2")}) - 1.0), 0.0,
              1e-10);
}

TEST(RepresentationTest, ReproducesAllWordsUpToDegree) {
  Eigen::MatrixXcd m(3, 3);
  const Complex i(0.0, 1.0);
  m << 1.0, 0.3 * i, 0.1, -0.3 * i, 2.0, 0.2 + 0.1 * i, 0.1, 0.2 - 0.1 * i, 1.5;
  const GaussianKernel k({Index("a", "b"), Index("b", "a"), Index("c")}, m);
  const GaussianState s(k);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto rep = represent(build_basis(k.indices(), d), s);
    for (const auto& w : all_words(k.indices(), d)) {
      EXPECT_NEAR(std::abs(rep.vacuum_expectation(w) - s.evaluate(w)), 0.0, 1e-9)
          << "d=" << d << " " << w.to_string();
    }
  }
}

TEST(RepresentationTest, AdjointMatchesMatrixAdjointOnQuotient) {
  // <pi(w) Omega, Omega> = conj <Omega, pi(w) Omega>
  const auto k = kernel3();
  const GaussianState s(k);
  const auto rep = represent(build_basis(k.indices(), 2), s);
  for (const auto& w : all_words(k.indices(), 2)) {
    const Complex a = rep.vacuum_expectation(w.adjoint());
    EXPECT_NEAR(std::abs(a - std::conj(rep.vacuum_expectation(w))), 0.0, 1e-12);
  }
}

TEST(RepresentationTest, IndefiniteFunctionalRejected) {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;
  const GaussianState s(GaussianKernel({Index("1"), Index("2")}, m));
  EXPECT_THROW(represent(build_basis(s.kernel().indices(), 1), s), std::domain_error);
}

TEST(PositivityProbeTest, GaussianStateIsPositive) {
  const GaussianState s(kernel3());
  EXPECT_GE(positivity_probe(s, 200, 3), -1e-10);
}

TEST(PositivityProbeTest, DetectsNonState) {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;
  const GaussianState s(GaussianKernel({Index("1"), Index("2")}, m));
  EXPECT_LT(positivity_probe(s, 50, 1), -1e-6);
}

TEST(PositivityProbeTest, ZeroTrialsIsNoEvidence) {
  const GaussianState s(kernel3());
  EXPECT_EQ(positivity_probe(s, 0, 2), std::numeric_limits<double>::infinity());
}

TEST(PositivityProbeTest, DeterministicForSeed) {
  const GaussianState s(kernel3());
  EXPECT_EQ(positivity_probe(s, 30, 3, 5), positivity_probe(s, 30, 3, 5));
}
