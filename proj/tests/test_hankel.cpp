#include "wfared/hankel.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "wfared/aak.hpp"
#include "wfared/errors.hpp"
#include "wfared/random.hpp"

namespace wfared {
namespace {

Wfa example1() {
  Wfa w;
  w.A = Matrix(2, 2);
  w.A << 0.0, 0.5, 0.5, 0.0;
  w.alpha = Vector(2);
  w.alpha << std::sqrt(3.0) / 2.0, 0.0;
  w.beta = w.alpha;
  return w;
}

SvaWfa example1_sva() {
  SvaWfa s;
  s.wfa = example1();
  s.singular_numbers = Vector(2);
  s.singular_numbers << 0.8, 0.2;
  s.sign_vector = Eigen::VectorXi::Ones(2);
  return s;
}

Vector sorted_abs_eigenvalues(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  Vector s = es.eigenvalues().cwiseAbs();
  std::sort(s.data(), s.data() + s.size(), std::greater<double>());
  return s;
}

TEST(TruncatedHankel, Example1Section) {
  const TruncatedHankel t = truncated_hankel(example1(), 3);
  Matrix expected(3, 3);
  expected << 3.0 / 4, 0, 3.0 / 16, 0, 3.0 / 16, 0, 3.0 / 16, 0, 3.0 / 64;
  EXPECT_LT((t.H - expected).norm(), 1e-14);
}

TEST(TruncatedHankel, ZeroAutomaton) {
  const TruncatedHankel t = truncated_hankel(zero_wfa(), 5);
  EXPECT_EQ(t.H.norm(), 0.0);
  EXPECT_EQ(t.tail_bound, 0.0);
}

TEST(TruncatedHankel, GeometricSeries) {
  Wfa w;
  w.A = Matrix::Constant(1, 1, 0.5);
  w.alpha = Vector::Constant(1, 1.0);
  w.beta = Vector::Constant(1, 1.0);
  const TruncatedHankel t = truncated_hankel(w, 2);
  Matrix expected(2, 2);
  expected << 1.0, 0.5, 0.5, 0.25;
  EXPECT_LT((t.H - expected).norm(), 1e-14);
}

TEST(TruncatedHankel, ExactHankelSymmetry) {
  Rng rng(31);
  const Wfa w = random_wfa(rng, 4, 0.8);
  const TruncatedHankel t = truncated_hankel(w, 16);
  for (Index i = 0; i < 16; ++i)
    for (Index j = 0; j < 16; ++j)
      EXPECT_EQ(t.H(i, j), t.H(j, i));  // bitwise, entries shared per anti-diagonal
}

TEST(TruncatedHankel, RejectsUnstable) {
  Wfa w;
  w.A = Matrix::Constant(1, 1, 1.2);
  w.alpha = Vector::Constant(1, 1.0);
  w.beta = Vector::Constant(1, 1.0);
  EXPECT_THROW(truncated_hankel(w, 4), Error);
}

TEST(TruncatedHankel, SingularValuesConvergeWithinTail) {
  Rng rng(37);
  for (int t = 0; t < 15; ++t) {
    SvaGenOptions gen;
    gen.n = rng.uniform_index(2, 5);
    const SvaWfa s = random_sva(rng, gen);
    const Index N = 32;
    const TruncatedHankel a = truncated_hankel(s.wfa, N);
    const TruncatedHankel b = truncated_hankel(s.wfa, 2 * N);
    const Vector sa = sorted_abs_eigenvalues(a.H);
    const Vector sb = sorted_abs_eigenvalues(b.H);
    for (Index i = 0; i < std::min<Index>(sa.size(), 6); ++i)
      EXPECT_LE(std::abs(sa(i) - sb(i)), a.tail_bound + 1e-12);
  }
}

TEST(HankelSingularNumbers, GramianRouteMatchesTruncatedSvd) {
  Rng rng(41);
  for (int t = 0; t < 15; ++t) {
    SvaGenOptions gen;
    gen.n = rng.uniform_index(2, 6);
    const SvaWfa s = random_sva(rng, gen);
    const Vector d = hankel_singular_numbers(s);
    const Index N = auto_hankel_size(s.wfa, 1e-8 * d(0));
    const Vector sv = sorted_abs_eigenvalues(truncated_hankel(s.wfa, N).H);
    for (Index i = 0; i < d.size(); ++i)
      EXPECT_NEAR(d(i), sv(i), 1e-6 * d(0));
  }
}

TEST(SpectralError, IdenticalInputsGiveZero) {
  const SpectralError e = spectral_error(example1(), example1(), 8);
  EXPECT_NEAR(e.value, 0.0, 1e-14);
}

TEST(SpectralError, Example1AgainstZero) {
  // || H - 0 || = sigma_0 = 4/5
  const SpectralError e = spectral_error(example1(), zero_wfa(), 64);
  EXPECT_NEAR(e.value, 0.8, 1e-6);
}

TEST(SpectralError, Example1AgainstOptimalReduction) {
  // the rank-1 optimum: f(0) = 4/5, zero elsewhere
  Wfa r;
  r.A = Matrix::Zero(1, 1);
  r.alpha = Vector::Constant(1, 2.0 * std::sqrt(3.0) / 5.0);
  r.beta = Vector::Constant(1, 2.0 / std::sqrt(3.0));
  const SpectralError e = spectral_error(example1(), r, 64);
  EXPECT_NEAR(e.value, 0.2, 1e-6);
}

TEST(SvdTruncation, Example1RankOneError) {
  const TruncatedHankel t = truncated_hankel(example1(), 64);
  const auto [R, err] = svd_truncation_baseline(t, 1);
  EXPECT_NEAR(err, 0.2, 1e-6);
  // truncated SVD is not Hankel: compare two entries of one anti-diagonal
  EXPECT_GT(std::abs(R(0, 2) - R(1, 1)), 1e-6);
  EXPECT_LT((t.H - R).cwiseAbs().maxCoeff(), 0.2 + 1e-6);
}

TEST(SvdTruncation, FullRankIsExact) {
  const TruncatedHankel t = truncated_hankel(example1(), 8);
  const auto [R, err] = svd_truncation_baseline(t, 8);
  EXPECT_NEAR(err, 0.0, 1e-12);
  EXPECT_LT((R - t.H).norm(), 1e-10);
}

TEST(SvdTruncation, RankOneInputExact) {
  Wfa w;
  w.A = Matrix::Constant(1, 1, 0.4);
  w.alpha = Vector::Constant(1, 1.0);
  w.beta = Vector::Constant(1, 1.0);
  const TruncatedHankel t = truncated_hankel(w, 16);
  const auto [R, err] = svd_truncation_baseline(t, 1);
  EXPECT_NEAR(err, 0.0, 1e-12);
}

TEST(SvaTruncation, Example1KeepsLeadingBlock) {
  const Wfa trunc = sva_truncation_baseline(example1_sva(), 1);
  ASSERT_EQ(trunc.states(), 1);
  EXPECT_NEAR(evaluate(trunc, 0), 0.75, 1e-12);
  EXPECT_NEAR(evaluate(trunc, 1), 0.0, 1e-12);
  const SpectralError e = spectral_error(example1(), trunc, 64);
  EXPECT_GE(e.value, 0.2 - 1e-9);
}

TEST(SvaTruncation, FullRankIsIdentity) {
  const Wfa t = sva_truncation_baseline(example1_sva(), 2);
  EXPECT_LT((t.A - example1().A).norm(), 1e-15);
}

TEST(SvaTruncation, EckartYoungFloor) {
  Rng rng(47);
  for (int t = 0; t < 10; ++t) {
    SvaGenOptions gen;
    gen.n = 4;
    const SvaWfa s = random_sva(rng, gen);
    const Wfa trunc = sva_truncation_baseline(s, 2);
    const Index N = auto_hankel_size(s.wfa, 1e-8 * s.singular_numbers(0));
    const SpectralError e = spectral_error(s.wfa, trunc, N);
    EXPECT_GE(e.value, s.singular_numbers(2) - 1e-8);
  }
}

TEST(PolynomialMethod, Example1RankOne) {
  const SvaWfa s = example1_sva();
  const PolynomialMethodResult r =
      polynomial_method(s, 1, 32, DivisionPolicy::long_division);
  EXPECT_TRUE(r.division_stable);
  EXPECT_NEAR(r.G(0, 0), 0.8, 1e-6);
  Matrix G = r.G;
  G(0, 0) = 0.0;
  EXPECT_LT(G.cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(r.rank_gap, 1e-8);
}

TEST(PolynomialMethod, BoundaryRankRejected) {
  Wfa w;
  w.A = Matrix::Constant(1, 1, 0.4);
  w.alpha = Vector::Constant(1, 1.0);
  w.beta = Vector::Constant(1, 1.0);
  const SvaWfa s = to_sva(w);
  EXPECT_THROW(polynomial_method(s, 1, 16), Error);  // k must be < n
}

TEST(PolynomialMethod, MatchesReducedAutomatonHankel) {
  Rng rng(53);
  for (int t = 0; t < 10; ++t) {
    SvaGenOptions gen;
    gen.n = 3;
    const SvaWfa s = random_sva(rng, gen);
    ReduceOptions opt;
    const ReductionReport rep = aak_reduce(s, 1, opt);
    ASSERT_TRUE(rep.certified);
    const Index N = 32;
    const PolynomialMethodResult pm = polynomial_method(s, 1, N);
    const Vector fhat = coefficients(rep.reduced, 2 * N - 1);
    for (Index m = 0; m < N / 2; ++m)
      EXPECT_NEAR(pm.G(0, m), fhat(m), 1e-5);
  }
}

TEST(AutoHankelSize, ShrinksWithLooserTolerance) {
  const Wfa w = example1();
  const Index tight = auto_hankel_size(w, 1e-12);
  const Index loose = auto_hankel_size(w, 1e-4);
  EXPECT_LE(loose, tight);
  bool capped = false;
  auto_hankel_size(w, 1e-300, 64, &capped);
  EXPECT_TRUE(capped);
}

}  // namespace
}  // namespace wfared
