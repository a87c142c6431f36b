#include <gtest/gtest.h>

#include "fpsub/transforms.hpp"
#include "test_util.hpp"

using namespace fpsub;
using fpsub::testing::dist;

namespace {

const Scalar I(0.0, 1.0);

CMatrix scalar(Scalar z) { return CMatrix::Constant(1, 1, z); }

MatrixModel bernoulli_model(const std::string& name) {
  return MatrixModel(BaseAlgebra::full(1), 2, {{name, fpsub::testing::bernoulli(1, 2)}});
}

// Closed forms for the symmetric Bernoulli variable.
Scalar bern_G(Scalar z) { return z / (z * z - 1.0); }
Scalar bern_K(Scalar w) { return (-1.0 + std::sqrt(1.0 + 4.0 * w * w)) / (2.0 * w); }
Scalar bern_R(Scalar z) { return (std::sqrt(1.0 + 4.0 * z * z) - 1.0) / (2.0 * z); }
// Arcsine law on [-2, 2]: G(z) = 1/sqrt(z^2 - 4), branch with G ~ 1/z.
Scalar arcsine_G(Scalar z) { return 1.0 / (z * std::sqrt(1.0 - 4.0 / (z * z))); }

// Same free pair, mixed moments from the centred-word oracle.
class OracleMoments : public JointMoments {
 public:
  explicit OracleMoments(const FreePair& p) : pair_(p) {}
  const BaseAlgebra& base() const override { return pair_.base(); }
  const MatrixModel& model(int cls) const override { return pair_.model(cls); }
  CMatrix moment(const Word& w) const override { return free_mixed_moment_oracle(pair_, w); }
  const EvalLimits& limits() const override { return pair_.limits(); }

 private:
  const FreePair& pair_;
};

FreePair random_pair(int n, int N1, int N2, std::mt19937_64& rng) {
  using fpsub::testing::random_self_adjoint;
  MatrixModel m1(BaseAlgebra::full(n), N1,
                 {{"x1", random_self_adjoint(n * N1, 1.0, rng)},
                  {"y", fpsub::testing::random_matrix(n * N1, rng) * 0.3}});
  MatrixModel m2(BaseAlgebra::full(n), N2, {{"x2", random_self_adjoint(n * N2, 0.7, rng)}});
  return FreePair(m1, m2);
}

}  // namespace

TEST(CauchyG, ClosedForms) {
  MatrixModel zero(BaseAlgebra::full(2), 2, {{"x", CMatrix::Zero(4, 4)}});
  CMatrix b = I * 2.0 * identity(2);
  b(0, 1) = 0.3;
  EXPECT_LT(dist(cauchy_G(zero, "x", b), inverse(b)), 1e-15);
  EXPECT_LT(dist(F_transform(zero, "x", b), b), 1e-14);

  MatrixModel bern = bernoulli_model("x");
  EXPECT_LT(std::abs(cauchy_G(bern, "x", scalar(3.0 * I))(0, 0) - (-0.3 * I)), 1e-15);
  // (z^2 - 1) / z = 10i / 3
  EXPECT_LT(std::abs(F_transform(bern, "x", scalar(3.0 * I))(0, 0) - 10.0 * I / 3.0), 1e-14);
  EXPECT_LT(std::abs(1.0 / bern_G(3.0 * I) - 10.0 * I / 3.0), 1e-14);
}

TEST(CauchyG, LargeArgumentAsymptotics) {
  std::mt19937_64 rng(20);
  MatrixModel m(BaseAlgebra::full(2), 3, {{"x", fpsub::testing::random_self_adjoint(6, 1.0, rng)}});
  double prev = 0.0;
  for (double t : {1e2, 1e3}) {
    CMatrix b = I * t * identity(2);
    const double err = dist(cauchy_G(m, "x", b), inverse(b));
    EXPECT_LE(err, 2.0 / (t * t));
    if (prev > 0.0) EXPECT_LT(err, prev / 50.0);
    prev = err;
  }
}

TEST(CauchyG, HalfPlaneInequalities) {
  std::mt19937_64 rng(21);
  MatrixModel m(BaseAlgebra::full(2), 3, {{"x", fpsub::testing::random_self_adjoint(6, 1.0, rng)}});
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix b = fpsub::testing::random_self_adjoint(2, 1.0, rng) +
                I * (0.1 * identity(2) + fpsub::testing::random_self_adjoint(2, 0.05, rng));
    ASSERT_GT(min_imag_eigenvalue(b), 0.0);
    CMatrix g = cauchy_G(m, "x", b);
    EXPECT_LE(-min_imag_eigenvalue(CMatrix(-g)), 1e-12);
    EXPECT_GE(min_imag_eigenvalue(CMatrix(F_transform(m, "x", b) - b)), -1e-10);
  }
}

TEST(GTilde, TrivialCasesAndRoutes) {
  std::mt19937_64 rng(22);
  MatrixModel m(BaseAlgebra::full(2), 3,
                {{"x", fpsub::testing::random_self_adjoint(6, 1.0, rng)}, {"z", CMatrix::Zero(6, 6)}});
  EXPECT_EQ(G_tilde(m, "x", CMatrix::Zero(2, 2)).norm(), 0.0);
  CMatrix b = fpsub::testing::random_scaled(2, 0.3, rng);
  EXPECT_LT(dist(G_tilde(m, "z", b), b), 1e-15);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix c = fpsub::testing::random_scaled(2, 0.05 + 0.04 * trial, rng);
    SeriesResult s = G_tilde_series(m, "x", c);
    EXPECT_LE(dist(s.value, G_tilde(m, "x", c)), s.tail_bound + 1e-15);
    EXPECT_LE(s.tail_bound, 1e-10 * spectral_norm(c));
  }
  // derivative at 0 is the identity map
  CMatrix h = fpsub::testing::random_matrix(2, rng);
  const double eps = 1e-6;
  EXPECT_LT(dist(G_tilde(m, "x", eps * h) / eps, h), 1e-5);
  EXPECT_THROW(G_tilde_series(m, "x", fpsub::testing::random_scaled(2, 0.9, rng)), DomainError);
}

TEST(GTilde, InvertsG) {
  MatrixModel bern = bernoulli_model("x");
  const Scalar z(0.4, 5.0);
  EXPECT_LT(std::abs(G_tilde(bern, "x", scalar(1.0 / z))(0, 0) - bern_G(z)), 1e-15);
}

TEST(KTilde, RoundTripsAndClosedForm) {
  std::mt19937_64 rng(23);
  MatrixModel m(BaseAlgebra::full(2), 3,
                {{"x", fpsub::testing::random_self_adjoint(6, 1.0, rng)}, {"z", CMatrix::Zero(6, 6)}});
  CMatrix w0 = fpsub::testing::random_scaled(2, 0.1, rng);
  EXPECT_LT(dist(K_tilde(m, "z", w0), w0), 1e-15);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix w = fpsub::testing::random_scaled(2, 0.02 + 0.02 * trial, rng);
    EXPECT_LT(dist(G_tilde(m, "x", K_tilde(m, "x", w)), w), 1e-9);
    EXPECT_LT(dist(K_tilde(m, "x", G_tilde(m, "x", w)), w), 1e-9);
  }
  MatrixModel bern = bernoulli_model("x");
  const CMatrix k = K_tilde(bern, "x", scalar(0.1));
  EXPECT_NEAR(std::abs(k(0, 0) - 0.0990195135927848), 0.0, 1e-12);
  EXPECT_LT(std::abs(k(0, 0) - bern_K(0.1)), 1e-14);
  EXPECT_LT(std::abs(G_tilde(bern, "x", k)(0, 0) - 0.1), 1e-14);
  EXPECT_THROW(K_tilde(bern, "x", scalar(0.3)), DomainError);
}

TEST(RTransform, ClosedForms) {
  MatrixModel bern = bernoulli_model("x");
  EXPECT_NEAR(std::abs(R_transform(bern, "x", scalar(0.1))(0, 0) - 0.0990195135927848), 0.0, 1e-10);
  for (Scalar z : {Scalar(0.05), Scalar(0.1, 0.1), Scalar(0.0, -0.2)})
    EXPECT_LT(std::abs(R_transform(bern, "x", scalar(z))(0, 0) - bern_R(z)), 1e-9);

  std::mt19937_64 rng(24);
  MatrixModel base(BaseAlgebra::full(2), 2);
  const CMatrix c = Scalar(0.4, 0.0) * identity(2);
  MatrixModel constant = base.with_element("c", embed(c, base)).with_element("z", CMatrix::Zero(4, 4));
  for (int trial = 0; trial < 5; ++trial) {
    CMatrix b = fpsub::testing::random_scaled(2, 0.2, rng) + 0.3 * identity(2);
    b *= 0.5;
    EXPECT_LT(dist(R_transform(constant, "c", b), c), 1e-10);
    EXPECT_LT(R_transform(constant, "z", b).norm(), 1e-10);
  }
}

TEST(FreeSumSeries, DegeneratesToOneModel) {
  std::mt19937_64 rng(25);
  MatrixModel m1(BaseAlgebra::full(2), 3,
                 {{"x1", fpsub::testing::random_self_adjoint(6, 1.0, rng)},
                  {"y", fpsub::testing::random_matrix(6, rng)}});
  MatrixModel m2(BaseAlgebra::full(2), 2, {{"x2", CMatrix::Zero(4, 4)}});
  FreePair pair(m1, m2);
  FreeSum sum = make_free_sum(pair);
  EXPECT_EQ(sum.rho2, 0.0);
  CMatrix b = I * 12.0 * identity(2) + fpsub::testing::random_scaled(2, 0.5, rng);
  const CMatrix res = inverse(embed(b, m1) - m1.element("x1"));
  const CMatrix& y = m1.element("y");
  EXPECT_LT(dist(sum_G_series(sum, "y", b, Side::kLeft).value, expect(y * res, m1)), 1e-10);
  EXPECT_LT(dist(sum_G_series(sum, "y", b, Side::kRight).value, expect(res * y, m1)), 1e-10);
  EXPECT_LT(dist(sum_G_series(sum, std::nullopt, b).value, expect(res, m1)), 1e-11);
}

TEST(FreeSumSeries, ArcsineClosedForm) {
  FreePair pair(bernoulli_model("x1"), bernoulli_model("x2"));
  FreeSum sum = make_free_sum(pair);
  EXPECT_DOUBLE_EQ(sum.rho(), 2.0);
  for (Scalar z : {Scalar(0.0, 40.0), Scalar(5.0, 30.0), Scalar(0.0, -25.0)}) {
    SeriesResult g = sum_G_series(sum, std::nullopt, scalar(z));
    EXPECT_LT(std::abs(g.value(0, 0) - arcsine_G(z)), 1e-11) << z;
    EXPECT_LE(g.order_used, 10);
    // E[x1 (z - x)^{-1}] = (z G(z) - 1) / 2 by the x1 <-> x2 symmetry
    const Scalar want = 0.5 * (z * arcsine_G(z) - 1.0);
    EXPECT_LT(std::abs(sum_G_series(sum, "x1", scalar(z), Side::kLeft).value(0, 0) - want), 1e-11);
    EXPECT_LT(std::abs(sum_G_series(sum, "x1", scalar(z), Side::kRight).value(0, 0) - want), 1e-11);
  }
}

TEST(FreeSumSeries, OracleBackendAgrees) {
  std::mt19937_64 rng(26);
  FreePair pair = random_pair(2, 2, 3, rng);
  EvalLimits lim;
  FreePair capped = pair.with_limits(lim);
  OracleMoments oracle(capped);
  FreeSum fast = make_free_sum(capped);
  FreeSum slow = make_free_sum(oracle);
  TransformOptions opts;
  opts.tol = 1e-7;  // keeps every word within the oracle's length cap
  CMatrix b = I * 40.0 * identity(2) + fpsub::testing::random_scaled(2, 1.0, rng);
  for (Side side : {Side::kLeft, Side::kRight}) {
    SeriesResult a = sum_G_series(fast, "y", b, side, opts);
    SeriesResult c = sum_G_series(slow, "y", b, side, opts);
    EXPECT_EQ(a.order_used, c.order_used);
    EXPECT_LT(dist(a.value, c.value), 1e-12);
  }
}

TEST(FreeSumSeries, DomainCapAndMonitor) {
  FreePair pair(bernoulli_model("x1"), bernoulli_model("x2"));
  FreeSum sum = make_free_sum(pair);
  EXPECT_THROW(sum_G_series(sum, std::nullopt, scalar(3.0 * I)), DomainError);
  // q = 0.4 needs far more than 10 letters at 1e-10
  EXPECT_THROW(sum_G_series(sum, std::nullopt, scalar(5.0 * I)), CapExceeded);
  FreeSum lying = sum;
  lying.rho1 = lying.rho2 = 0.1;
  EXPECT_THROW(sum_G_series(lying, std::nullopt, scalar(2.0 * I)), ConvergenceError);
}

TEST(RAdditivity, Residuals) {
  FreePair bern(bernoulli_model("x1"), bernoulli_model("x2"));
  FreeSum bsum = make_free_sum(bern);
  const CMatrix z = scalar(0.05);
  EXPECT_LE(r_additivity_residual(bsum, z), 1e-9);
  EXPECT_LT(std::abs(sum_R_transform(bsum, z)(0, 0) - 2.0 * bern_R(0.05)), 1e-9);

  std::mt19937_64 rng(27);
  FreePair pair = random_pair(2, 3, 3, rng);
  FreeSum sum = make_free_sum(pair);
  for (int trial = 0; trial < 3; ++trial) {
    CMatrix b = fpsub::testing::random_scaled(2, 0.02 / sum.rho(), rng);
    EXPECT_LE(r_additivity_residual(sum, b), 1e-8);
  }

  MatrixModel m1 = pair.model(1);
  FreePair degenerate(m1, MatrixModel(BaseAlgebra::full(2), 1, {{"x2", CMatrix::Zero(2, 2)}}));
  FreeSum dsum = make_free_sum(degenerate);
  EXPECT_LE(r_additivity_residual(dsum, fpsub::testing::random_scaled(2, 0.03, rng)), 1e-10);
}
