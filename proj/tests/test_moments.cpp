#include <gtest/gtest.h>

#include "fpsub/moments.hpp"
#include "kappa_oracle.hpp"
#include "test_util.hpp"

using namespace fpsub;
using fpsub::testing::dist;
using fpsub::testing::kappa_pi;

namespace {

MatrixModel bernoulli_model(const std::string& name = "x") {
  return MatrixModel(BaseAlgebra::full(1), 2, {{name, fpsub::testing::bernoulli(1, 2)}});
}

FreePair random_pair(int n, int N1, int N2, std::mt19937_64& rng) {
  using fpsub::testing::random_matrix;
  using fpsub::testing::random_self_adjoint;
  MatrixModel m1(BaseAlgebra::full(n), N1,
                 {{"x1", random_self_adjoint(n * N1, 1.0, rng)},
                  {"y", random_matrix(n * N1, rng) * 0.5}});
  MatrixModel m2(BaseAlgebra::full(n), N2, {{"x2", random_self_adjoint(n * N2, 1.0, rng)}});
  return FreePair(m1, m2);
}

Word random_word(const FreePair& pair, int len, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coin(0, 2);
  const int n = pair.base().dim();
  Word w;
  for (int i = 0; i < len; ++i) {
    int c = coin(rng);
    w.letters.push_back(c == 0 ? Letter{1, "x1"} : c == 1 ? Letter{2, "x2"} : Letter{1, "y"});
    if (i > 0) w.coeffs.push_back(fpsub::testing::random_matrix(n, rng) * 0.7);
  }
  if (coin(rng) == 0) w.left = fpsub::testing::random_matrix(n, rng);
  if (coin(rng) == 0) w.right = fpsub::testing::random_matrix(n, rng);
  return w;
}

Word make_word(std::vector<Letter> letters, int n = 1) {
  Word w;
  w.letters = std::move(letters);
  w.coeffs.assign(w.letters.size() - 1, identity(n));
  return w;
}

}  // namespace

TEST(JointCumulant, FirstCumulantIsTheMean) {
  std::mt19937_64 rng(10);
  MatrixModel m(BaseAlgebra::full(2), 3, {{"a", fpsub::testing::random_matrix(6, rng)}});
  std::vector<std::string> a{"a"};
  EXPECT_LT(dist(joint_cumulant(m, a, {}), expect(m.element("a"), m)), 1e-15);
}

TEST(JointCumulant, BernoulliValues) {
  MatrixModel m = bernoulli_model();
  auto kappa = [&](int k) {
    std::vector<std::string> letters(k, "x");
    std::vector<CMatrix> c(k - 1, identity(1));
    return joint_cumulant(m, letters, c)(0, 0);
  };
  // m2 = 1 = k2; m4 = 1 = k4 + 2 k2^2
  EXPECT_NEAR(std::abs(kappa(2) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(kappa(3)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(kappa(4) + 1.0), 0.0, 1e-14);
  // m6 = 1 = k6 + 6 k4 k2 + 5 k2^3 (all-pair and pair/4-block partitions)
  EXPECT_NEAR(std::abs(kappa(6) - (1.0 - 6.0 * (-1.0) - 5.0)), 0.0, 1e-13);
}

TEST(JointCumulant, SecondCumulantClosedForm) {
  std::mt19937_64 rng(11);
  MatrixModel m(BaseAlgebra::full(2), 3, {{"x", fpsub::testing::random_self_adjoint(6, 1.0, rng)}});
  for (int trial = 0; trial < 5; ++trial) {
    CMatrix c = fpsub::testing::random_matrix(2, rng);
    std::vector<std::string> letters{"x", "x"};
    std::vector<CMatrix> coeffs{c};
    CMatrix ex = expect(m.element("x"), m);
    CMatrix want = word_expectation(m, letters, coeffs) - ex * c * ex;
    EXPECT_LT(dist(joint_cumulant(m, letters, coeffs), want), 1e-13);
  }
}

TEST(JointCumulant, ConstantsHaveNoHigherCumulants) {
  std::mt19937_64 rng(12);
  MatrixModel base(BaseAlgebra::full(2), 2);
  CMatrix c = fpsub::testing::random_matrix(2, rng);
  MatrixModel m = base.with_element("c", embed(c, base));
  for (int k = 2; k <= 5; ++k) {
    std::vector<std::string> letters(k, "c");
    std::vector<CMatrix> coeffs;
    for (int i = 0; i + 1 < k; ++i) coeffs.push_back(fpsub::testing::random_matrix(2, rng));
    EXPECT_LT(joint_cumulant(m, letters, coeffs).norm(), 1e-12) << "k=" << k;
  }
}

TEST(JointCumulant, MomentCumulantRoundTrip) {
  std::mt19937_64 rng(13);
  for (int n : {1, 2}) {
    MatrixModel m(BaseAlgebra::full(n), 3,
                  {{"x", fpsub::testing::random_self_adjoint(3 * n, 1.0, rng)},
                   {"a", fpsub::testing::random_matrix(3 * n, rng) * 0.5}});
    for (int k = 1; k <= 6; ++k) {
      std::vector<std::string> letters;
      std::vector<CMatrix> coeffs;
      for (int i = 0; i < k; ++i) {
        letters.push_back(rng() % 2 ? "x" : "a");
        if (i > 0) coeffs.push_back(fpsub::testing::random_matrix(n, rng));
      }
      CMatrix total = CMatrix::Zero(n, n);
      for (const auto& pi : enumerate_nc(k)) total += kappa_pi(m, letters, coeffs, pi);
      CMatrix direct = word_expectation(m, letters, coeffs);
      EXPECT_LT(dist(total, direct), 1e-11 * (1 + spectral_norm(direct))) << "n=" << n << " k=" << k;
    }
  }
}

TEST(JointCumulant, CapAndErrors) {
  MatrixModel m = bernoulli_model();
  std::vector<std::string> long_word(13, "x");
  std::vector<CMatrix> c(12, identity(1));
  EXPECT_THROW(joint_cumulant(m, long_word, c), CapExceeded);
  std::vector<std::string> unknown{"q"};
  EXPECT_THROW(joint_cumulant(m, unknown, {}), UnknownElement);
}

TEST(FreeMixedMoment, SingleClassIsExactExpectation) {
  std::mt19937_64 rng(14);
  FreePair pair = random_pair(2, 3, 2, rng);
  Word w;
  std::vector<std::string> names{"x1", "y", "x1", "x1"};
  std::vector<CMatrix> coeffs;
  for (int i = 0; i < 4; ++i) {
    w.letters.push_back(Letter{1, names[i]});
    if (i > 0) coeffs.push_back(fpsub::testing::random_matrix(2, rng));
  }
  w.coeffs = coeffs;
  EXPECT_LT(dist(free_mixed_moment(pair, w), word_expectation(pair.model(1), names, coeffs)), 1e-13);
}

TEST(FreeMixedMoment, BernoulliPair) {
  FreePair pair(bernoulli_model("x1"), bernoulli_model("x2"));
  Word nested = make_word({{1, "x1"}, {2, "x2"}, {2, "x2"}, {1, "x1"}});
  Word alternating = make_word({{1, "x1"}, {2, "x2"}, {1, "x1"}, {2, "x2"}});
  EXPECT_NEAR(std::abs(free_mixed_moment(pair, nested)(0, 0) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(free_mixed_moment(pair, alternating)(0, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(free_mixed_moment_oracle(pair, nested)(0, 0) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(free_mixed_moment_oracle(pair, alternating)(0, 0)), 0.0, 1e-14);
  // x1 x2 x1 x2 x1 x2: sum of two free arcsine-type terms; tau((x1 x2)^3) = 0
  Word six = make_word({{1, "x1"}, {2, "x2"}, {1, "x1"}, {2, "x2"}, {1, "x1"}, {2, "x2"}});
  EXPECT_NEAR(std::abs(free_mixed_moment(pair, six)(0, 0)), 0.0, 1e-14);
}

TEST(FreeMixedMoment, SumOfBernoullisGivesArcsineMoments) {
  // tau((x1 + x2)^{2m}) = binom(2m, m) for the arcsine law on [-2, 2].
  FreePair pair(bernoulli_model("x1"), bernoulli_model("x2"));
  for (int len : {2, 4, 6, 8}) {
    Scalar total = 0.0;
    for (int mask = 0; mask < (1 << len); ++mask) {
      std::vector<Letter> letters;
      for (int i = 0; i < len; ++i)
        letters.push_back((mask >> i) & 1 ? Letter{2, "x2"} : Letter{1, "x1"});
      total += free_mixed_moment(pair, make_word(letters))(0, 0);
    }
    double binom = 1.0;
    for (int i = 1; i <= len / 2; ++i) binom = binom * (len / 2 + i) / i;
    EXPECT_NEAR(std::abs(total - binom), 0.0, 1e-10) << "len=" << len;
  }
}

TEST(FreeMixedMoment, OracleAgreesOnRandomWords) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 4; ++trial) {
    FreePair pair = random_pair(1 + trial % 2, 2 + trial % 2, 3 - trial % 2, rng);
    for (int len = 1; len <= 6; ++len) {
      for (int rep = 0; rep < 5; ++rep) {
        Word w = random_word(pair, len, rng);
        CMatrix a = free_mixed_moment(pair, w);
        CMatrix b = free_mixed_moment_oracle(pair, w);
        EXPECT_LT(dist(a, b), 1e-10) << "len=" << len;
      }
    }
  }
}

TEST(FreeMixedMoment, CoefficientLinearity) {
  std::mt19937_64 rng(16);
  FreePair pair = random_pair(2, 2, 2, rng);
  Word w = random_word(pair, 5, rng);
  const Scalar lambda(0.5, -1.25);
  CMatrix base = free_mixed_moment(pair, w);
  for (std::size_t i = 0; i < w.coeffs.size(); ++i) {
    Word scaled = w;
    scaled.coeffs[i] *= lambda;
    EXPECT_LT(dist(free_mixed_moment(pair, scaled), lambda * base), 1e-12);
  }
}

TEST(FreeMixedMoment, CentredAlternatingWordsVanish) {
  std::mt19937_64 rng(17);
  FreePair pair = random_pair(2, 3, 3, rng);
  const MatrixModel& m1 = pair.model(1);
  const MatrixModel& m2 = pair.model(2);
  FreePair centred =
      pair.with_element(1, "u", m1.element("x1") - embed(expect(m1.element("x1"), m1), m1))
          .with_element(2, "v", m2.element("x2") - embed(expect(m2.element("x2"), m2), m2));
  Word w;
  for (int i = 0; i < 6; ++i) {
    w.letters.push_back(i % 2 == 0 ? Letter{1, "u"} : Letter{2, "v"});
    if (i > 0) w.coeffs.push_back(fpsub::testing::random_matrix(2, rng));
  }
  EXPECT_LT(free_mixed_moment(centred, w).norm(), 1e-12);
  EXPECT_LT(free_mixed_moment_oracle(centred, w).norm(), 1e-12);
}

TEST(FreeMixedMoment, CapsAndErrors) {
  FreePair pair(bernoulli_model("x1"), bernoulli_model("x2"));
  std::vector<Letter> eleven(11, Letter{1, "x1"});
  EXPECT_THROW(free_mixed_moment(pair, make_word(eleven)), CapExceeded);
  std::vector<Letter> nine(9, Letter{2, "x2"});
  EXPECT_THROW(free_mixed_moment_oracle(pair, make_word(nine)), CapExceeded);
  EXPECT_THROW(free_mixed_moment(pair, make_word({{1, "x2"}})), UnknownElement);
  Word bad = make_word({{1, "x1"}, {2, "x2"}});
  bad.coeffs.clear();
  EXPECT_THROW(free_mixed_moment(pair, bad), DimensionError);
  EXPECT_THROW(FreePair(bernoulli_model(), MatrixModel(BaseAlgebra::full(2), 1)), DimensionError);
}
