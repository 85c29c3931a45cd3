#include "wfared/aak.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "wfared/errors.hpp"
#include "wfared/hankel.hpp"
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

TEST(GroupMultiplicity, SimpleSingleton) {
  Vector D(2);
  D << 0.8, 0.2;
  const MultiplicityGroup g = group_multiplicity(D, 1, 1e-9);
  EXPECT_EQ(g.r, 1);
  EXPECT_EQ(g.first, 1);
  for (Index i = 0; i < 2; ++i) EXPECT_EQ(g.permutation[i], i);
}

TEST(GroupMultiplicity, TiedPairMovedLast) {
  Vector D(4);
  D << 3.0, 2.0, 2.0, 1.0;
  const MultiplicityGroup g = group_multiplicity(D, 1, 1e-9);
  EXPECT_EQ(g.r, 2);
  const std::vector<Index> expected{0, 3, 1, 2};
  EXPECT_EQ(g.permutation, expected);
}

TEST(GroupMultiplicity, FullyTiedRejected) {
  Vector D(2);
  D << 1.0, 1.0;
  EXPECT_THROW(group_multiplicity(D, 0, 1e-9), Error);
  EXPECT_THROW(group_multiplicity(D, 1, 1e-9), Error);
}

TEST(GroupMultiplicity, InsideGroupRejected) {
  Vector D(3);
  D << 3.0, 2.0, 2.0;
  EXPECT_THROW(group_multiplicity(D, 2, 1e-9), Error);
  EXPECT_EQ(group_multiplicity(D, 1, 1e-9).r, 2);
}

TEST(Partition, Example1Blocks) {
  const PartitionBlocks pb = partition(example1_sva(), 1);
  EXPECT_EQ(pb.r, 1);
  ASSERT_EQ(pb.retained.size(), 1);
  EXPECT_NEAR(pb.retained(0), 0.8, 1e-12);
  EXPECT_NEAR(pb.sigma_k, 0.2, 1e-12);
  EXPECT_NEAR(pb.A11(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(pb.A12(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(pb.A22(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(pb.alpha1(0), std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_NEAR(pb.alpha2(0), 0.0, 1e-15);
  EXPECT_NEAR(pb.R(0), -0.6, 1e-12);  // 1/25 - 16/25
}

TEST(Partition, EmptyRetainedRejected) {
  SvaWfa s = example1_sva();
  s.singular_numbers << 0.5, 0.5;  // fully tied
  EXPECT_THROW(partition(s, 1), Error);
}

TEST(Partition, ReassemblyIdentity) {
  Rng rng(101);
  SvaGenOptions gen;
  gen.n = 3;
  const SvaWfa s = random_sva(rng, gen);
  const PartitionBlocks pb = partition(s, 1);
  EXPECT_EQ(pb.A11.rows(), 2);
  EXPECT_EQ(pb.A22.rows(), 1);

  // Reassembling the permuted quantities must reproduce the diagonal
  // Gramian equation with the permuted diag(Sigma, sigma_k).
  const Matrix A = pb.assemble_A();
  const Vector beta = pb.assemble_beta();
  Vector d(3);
  d.head(2) = pb.retained;
  d.tail(1).setConstant(pb.sigma_k);
  const Matrix D = d.asDiagonal();
  EXPECT_LT((D - A * D * A.transpose() - beta * beta.transpose()).norm(),
            1e-9 * D.norm());
}

TEST(SolveAuxiliary, Example1ZeroBranchClosedForm) {
  const PartitionBlocks pb = partition(example1_sva(), 1);
  const AuxiliaryWfa aux = solve_auxiliary(pb);
  EXPECT_EQ(aux.branch, Branch::alpha2_zero);
  ASSERT_EQ(aux.A_hat.rows(), 1);
  EXPECT_NEAR(aux.A_hat(0, 0), 0.0, 1e-14);
  EXPECT_NEAR(aux.beta_hat(0), 2.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(aux.alpha_hat(0), 2.0 * std::sqrt(3.0) / 5.0, 1e-12);
  bool degenerate = false;
  for (const auto& w : aux.warnings)
    if (w.find("DegenerateCase") != std::string::npos) degenerate = true;
  EXPECT_TRUE(degenerate);
}

TEST(SolveAuxiliary, NonzeroBranchFixedPointIdentities) {
  Rng rng(107);
  for (int t = 0; t < 12; ++t) {
    SvaGenOptions gen;
    gen.n = 4;
    const SvaWfa s = random_sva(rng, gen);
    const Index k = rng.uniform_index(1, 3);
    const PartitionBlocks pb = partition(s, k);
    const AuxiliaryWfa aux = solve_auxiliary(pb);
    ASSERT_EQ(aux.branch, Branch::alpha2_nonzero);

    const Matrix Rd = pb.R.asDiagonal();
    const Index m = pb.n - pb.r;
    const Matrix I = Matrix::Identity(m, m);
    // defining identities of the construction
    EXPECT_LT((I - pb.A11 * aux.A_hat.transpose() -
               pb.beta1 * aux.beta_hat.transpose())
                  .norm(),
              1e-9);
    EXPECT_LT((aux.A_hat.transpose() * Rd * pb.A12 -
               aux.alpha_hat * pb.alpha2.transpose())
                  .norm(),
              1e-9);
    // equations not used by the construction, implied by the theory
    EXPECT_LT((Rd - pb.A11.transpose() * Rd * aux.A_hat +
               pb.alpha1 * aux.alpha_hat.transpose())
                  .norm(),
              1e-8 * (1.0 + Rd.norm()));
    const Vector sri = pb.retained.cwiseQuotient(pb.R);
    EXPECT_LT((Matrix((-sri).asDiagonal()) +
               aux.A_hat * sri.asDiagonal() * aux.A_hat.transpose() -
               aux.beta_hat * aux.beta_hat.transpose())
                  .norm(),
              1e-8 * (1.0 + sri.cwiseAbs().maxCoeff()));
    const Vector sr = pb.retained.cwiseProduct(pb.R);
    EXPECT_LT((Matrix((-sr).asDiagonal()) +
               aux.A_hat.transpose() * sr.asDiagonal() * aux.A_hat -
               aux.alpha_hat * aux.alpha_hat.transpose())
                  .norm(),
              1e-8 * (1.0 + sr.cwiseAbs().maxCoeff()));
  }
}

TEST(SolveAuxiliary, VacuousNullConstraintUsesMinimumNorm) {
  // Synthetic blocks with A12 = A21 = 0 and alpha2 = 0: the null-space
  // condition is vacuous and the solver returns the minimum-Frobenius-norm
  // solution of the alignment constraints.
  PartitionBlocks pb;
  pb.n = 3;
  pb.k = 2;
  pb.r = 1;
  pb.sigma_k = 0.3;
  pb.retained = Vector(2);
  pb.retained << 1.0, 0.6;
  pb.A11 = Matrix(2, 2);
  pb.A11 << 0.2, 0.1, 0.1, -0.3;
  pb.A12 = Matrix::Zero(2, 1);
  pb.A21 = Matrix::Zero(1, 2);
  pb.A22 = Matrix::Zero(1, 1);
  pb.alpha1 = Vector(2);
  pb.alpha1 << 0.9, -0.4;
  pb.alpha2 = Vector::Zero(1);
  pb.beta1 = pb.alpha1;
  pb.beta2 = Vector::Zero(1);
  pb.R = Vector(2);
  pb.R << 0.09 - 1.0, 0.09 - 0.36;
  pb.permutation = {0, 1, 2};

  const AuxiliaryWfa aux = solve_auxiliary(pb);
  EXPECT_EQ(aux.branch, Branch::alpha2_zero);
  // alignment constraints hold
  const Matrix I = Matrix::Identity(2, 2);
  const Matrix proj_b =
      I - pb.beta1 * pb.beta1.transpose() / pb.beta1.squaredNorm();
  EXPECT_LT(((I - aux.A_hat * pb.A11.transpose()) * proj_b).norm(), 1e-8);
  const Matrix Rd = pb.R.asDiagonal();
  const Matrix proj_a =
      I - pb.alpha1 * pb.alpha1.transpose() / pb.alpha1.squaredNorm();
  EXPECT_LT(((Rd - aux.A_hat.transpose() * Rd * pb.A11) * proj_a).norm(),
            1e-8);
  // any admissible solution plus a null-direction increment has larger norm
  EXPECT_GT(aux.A_hat.norm(), 0.0);
}

TEST(BuildErrorWfa, Example1Assembly) {
  const PartitionBlocks pb = partition(example1_sva(), 1);
  const AuxiliaryWfa aux = solve_auxiliary(pb);
  const ErrorWfa e = build_error_wfa(pb, aux);
  ASSERT_EQ(e.wfa.states(), 3);
  Matrix expected_A = Matrix::Zero(3, 3);
  expected_A.topLeftCorner(2, 2) = example1().A;
  EXPECT_LT((e.wfa.A - expected_A).norm(), 1e-14);
  EXPECT_NEAR(e.wfa.alpha(0), std::sqrt(3.0) / 2.0, 1e-14);
  EXPECT_NEAR(e.wfa.alpha(2), -2.0 * std::sqrt(3.0) / 5.0, 1e-12);
  EXPECT_NEAR(e.wfa.beta(2), 2.0 / std::sqrt(3.0), 1e-12);
}

TEST(BuildErrorWfa, MinimalOnGenericInputs) {
  Rng rng(109);
  SvaGenOptions gen;
  gen.n = 4;
  const SvaWfa s = random_sva(rng, gen);
  const PartitionBlocks pb = partition(s, 2);
  const AuxiliaryWfa aux = solve_auxiliary(pb);
  const ErrorWfa e = build_error_wfa(pb, aux);
  const Wfa m = minimize(e.wfa);
  EXPECT_EQ(m.states(), e.wfa.states());
}

TEST(VerifyAllpass, Example1ExactResiduals) {
  const PartitionBlocks pb = partition(example1_sva(), 1);
  const AuxiliaryWfa aux = solve_auxiliary(pb);
  const ErrorWfa e = build_error_wfa(pb, aux);
  const AllpassResiduals r = verify_allpass(e, pb);
  EXPECT_LE(r.a, 1e-10);
  EXPECT_LE(r.b, 1e-10);
  EXPECT_LE(r.c, 1e-10);
}

TEST(VerifyAllpass, ScaleInvariance) {
  // scaling all weights by c scales sigma by c^2; the relative residuals
  // stay put
  const double c = 37.0;
  SvaWfa s = example1_sva();
  s.wfa.alpha *= c;
  s.wfa.beta *= c;
  s.singular_numbers *= c * c;
  const PartitionBlocks pb = partition(s, 1);
  const AuxiliaryWfa aux = solve_auxiliary(pb);
  const ErrorWfa e = build_error_wfa(pb, aux);
  const AllpassResiduals r = verify_allpass(e, pb);
  EXPECT_LE(r.a, 1e-10);
  EXPECT_LE(r.b, 1e-10);
  EXPECT_LE(r.c, 1e-10);
}

TEST(VerifyAllpass, DetectsPerturbedSolution) {
  const PartitionBlocks pb = partition(example1_sva(), 1);
  AuxiliaryWfa aux = solve_auxiliary(pb);
  aux.beta_hat(0) += 1e-3;
  const ErrorWfa e = build_error_wfa(pb, aux);
  const AllpassResiduals r = verify_allpass(e, pb);
  EXPECT_GT(r.a, 1e-4);
}

TEST(BlockDiagonalize, TrivialScalar) {
  AuxiliaryWfa aux;
  aux.A_hat = Matrix::Zero(1, 1);
  aux.alpha_hat = Vector::Constant(1, 2.0 * std::sqrt(3.0) / 5.0);
  aux.beta_hat = Vector::Constant(1, 2.0 / std::sqrt(3.0));
  const auto [stable, unstable] = block_diagonalize(aux);
  EXPECT_EQ(stable.states(), 1);
  EXPECT_EQ(unstable.states(), 0);
  EXPECT_NEAR(evaluate(stable, 0), 0.8, 1e-12);
}

TEST(BlockDiagonalize, AlreadyBlockDiagonal) {
  AuxiliaryWfa aux;
  aux.A_hat = Matrix::Zero(2, 2);
  aux.A_hat(0, 0) = 0.5;
  aux.A_hat(1, 1) = 2.0;
  aux.alpha_hat = Vector::Ones(2);
  aux.beta_hat = Vector::Ones(2);
  const auto [stable, unstable] = block_diagonalize(aux);
  ASSERT_EQ(stable.states(), 1);
  ASSERT_EQ(unstable.states(), 1);
  EXPECT_NEAR(stable.A(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(unstable.A(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(evaluate(stable, 3), 0.125, 1e-12);
  EXPECT_NEAR(evaluate(unstable, 3), 8.0, 1e-12);
}

TEST(BlockDiagonalize, CoupledTriangularCase) {
  AuxiliaryWfa aux;
  aux.A_hat = Matrix(2, 2);
  aux.A_hat << 0.5, 1.0, 0.0, 2.0;
  aux.alpha_hat = Vector(2);
  aux.alpha_hat << 1.0, 0.0;
  aux.beta_hat = aux.alpha_hat;
  const auto [stable, unstable] = block_diagonalize(aux);
  ASSERT_EQ(stable.states(), 1);
  ASSERT_EQ(unstable.states(), 1);
  // symbol equality at sample points: the parts sum to the original
  Wfa original;
  original.A = aux.A_hat;
  original.alpha = aux.alpha_hat;
  original.beta = aux.beta_hat;
  for (Index k = 0; k < 10; ++k) {
    const double whole = evaluate(original, k);
    const double parts = evaluate(stable, k) + evaluate(unstable, k);
    EXPECT_NEAR(whole, parts, 1e-10 * std::max(1.0, std::abs(whole)));
  }
}

TEST(AakReduce, Example1RankOne) {
  const ReductionReport rep = aak_reduce(example1_sva(), 1);
  ASSERT_EQ(rep.reduced.states(), 1);
  EXPECT_EQ(rep.branch, Branch::alpha2_zero);
  EXPECT_NEAR(rep.sigma_k, 0.2, 1e-12);
  EXPECT_NEAR(rep.reduced.A(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(evaluate(rep.reduced, 0), 0.8, 1e-9);
  for (Index j = 1; j <= 6; ++j)
    EXPECT_NEAR(evaluate(rep.reduced, j), 0.0, 1e-12);
  EXPECT_TRUE(rep.verified);
  EXPECT_TRUE(rep.certified) << "failures: "
                             << (rep.failures.empty() ? "" : rep.failures[0]);
  EXPECT_NEAR(rep.achieved_error, 0.2, 1e-6);
  EXPECT_LE(rep.l2_bound_check, 0.04 + 1e-8);
}

TEST(AakReduce, LastRankEqualsSmallestSigma) {
  Rng rng(113);
  SvaGenOptions gen;
  gen.n = 3;
  const SvaWfa s = random_sva(rng, gen);
  const ReductionReport rep = aak_reduce(s, 2);
  EXPECT_TRUE(rep.certified);
  EXPECT_NEAR(rep.achieved_error, s.singular_numbers(2),
              1e-6 * s.singular_numbers(2));
}

TEST(AakReduce, ErrorMonotoneInRank) {
  Rng rng(127);
  SvaGenOptions gen;
  gen.n = 5;
  const SvaWfa s = random_sva(rng, gen);
  double prev = 1e300;
  for (Index k = 1; k < 5; ++k) {
    const ReductionReport rep = aak_reduce(s, k);
    EXPECT_TRUE(rep.certified);
    EXPECT_LE(rep.achieved_error, prev + 1e-9);
    EXPECT_GE(rep.achieved_error, rep.sigma_k - 1e-8);
    EXPECT_LE(rep.achieved_error,
              rep.baselines.at("sva_truncation") + 1e-9);
    prev = rep.achieved_error;
  }
}

TEST(AakReduce, MixedSignSpectraCertify) {
  // to_sva of a generic automaton has mixed Hankel eigenvalue signs; the
  // block equations are implemented transpose-explicit, so the pipeline
  // still certifies.
  Rng rng(131);
  int done = 0;
  for (int t = 0; t < 30 && done < 8; ++t) {
    const Index n = rng.uniform_index(2, 5);
    const Wfa w = minimize(random_wfa(rng, n, rng.uniform(0.4, 0.85)));
    if (w.states() < 2) continue;
    SvaWfa s;
    try {
      s = to_sva(w);
    } catch (const Error&) {
      continue;
    }
    // need a sign flip somewhere plus comfortable conditioning: clear gaps
    // and no tiny trailing singular number
    bool mixed = false;
    for (Index i = 0; i < s.sign_vector.size(); ++i)
      if (s.sign_vector(i) < 0) mixed = true;
    bool conditioned =
        s.singular_numbers(s.singular_numbers.size() - 1) >=
        1e-2 * s.singular_numbers(0);
    for (Index i = 0; i + 1 < s.singular_numbers.size(); ++i)
      if ((s.singular_numbers(i) - s.singular_numbers(i + 1)) /
              s.singular_numbers(0) <
          1e-2)
        conditioned = false;
    if (!mixed || !conditioned) continue;
    ++done;
    const ReductionReport rep = aak_reduce(s, 1);
    EXPECT_TRUE(rep.certified)
        << "n=" << s.wfa.states()
        << " failures: " << (rep.failures.empty() ? "" : rep.failures[0]);
  }
  EXPECT_GE(done, 4);
}

TEST(AakReduce, DegenerateZeroCoreMismatchSurfaces) {
  // Synthetic not-quite-SVA where the zero branch forces A_hat = 0 while the
  // rank target disagrees with the stable count; the defensive inertia
  // check must fire rather than return a wrong-size automaton.
  SvaWfa s;
  s.singular_numbers = Vector(4);
  s.singular_numbers << 1.0, 0.5, 0.5, 0.2;
  s.wfa.alpha = Vector(4);
  s.wfa.alpha << 0.9, 0.0, 0.0, 0.3;
  s.wfa.beta = s.wfa.alpha;
  s.wfa.A = Matrix::Zero(4, 4);
  // couple the tied pair to both retained states with full rank
  s.wfa.A(0, 1) = 0.4;
  s.wfa.A(1, 0) = 0.4;
  s.wfa.A(3, 2) = 0.3;
  s.wfa.A(2, 3) = 0.3;
  s.sign_vector = Eigen::VectorXi::Ones(4);
  try {
    const ReductionReport rep = aak_reduce(s, 1);
    // if it got through, it must at least have failed certification
    EXPECT_FALSE(rep.certified);
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::inertia_mismatch ||
                e.code() == ErrorCode::eigenvalue_on_circle ||
                e.code() == ErrorCode::singular_core);
  }
}

TEST(AakReduce, RejectsBadRank) {
  EXPECT_THROW(aak_reduce(example1_sva(), 0), Error);
  EXPECT_THROW(aak_reduce(example1_sva(), 2), Error);
}

}  // namespace
}  // namespace wfared
