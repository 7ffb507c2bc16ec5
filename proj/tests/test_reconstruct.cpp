#include <gtest/gtest.h>

#include "aqst/error.hpp"
#include "aqst/reconstruct.hpp"

using namespace aqst;

namespace {

std::vector<ObservedSubmatrix> noiseless(const DensityMatrix& rho, int rank, int step) {
  return sample_submatrices(rho, overlapping_block_pattern(static_cast<int>(rho.dim()), rank, step),
                            NoiseSpec::noiseless());
}

ObservedSubmatrix block_of(const DensityMatrix& rho, const IndexSet& idx) {
  const auto n = static_cast<Index>(idx.size());
  CMatrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = rho(idx[i] - 1, idx[j] - 1);
  return {idx, m};
}

AlgebraicOptions with(ReconstructionMethod method, SubspaceSolver solver = SubspaceSolver::automatic) {
  AlgebraicOptions o;
  o.method = method;
  o.solver = solver;
  return o;
}

}  // namespace

TEST(CollectObservations, AveragesRepeats) {
  CMatrix a = CMatrix::Constant(2, 2, 1.0);
  CMatrix b = CMatrix::Constant(2, 2, 3.0);
  const std::vector<ObservedSubmatrix> subs{{IndexSet({1, 2}), a}, {IndexSet({2, 3}), b}};
  const ObservedEntries obs = collect_observations(subs, 3);
  EXPECT_EQ(obs.values(1, 1), Complex(2.0, 0.0));
  EXPECT_EQ(obs.values(0, 1), Complex(1.0, 0.0));
  EXPECT_FALSE(obs.observed(0, 2));
  EXPECT_EQ(obs.counts[4], 2);
}

TEST(CompleteColumns, NoiselessExact) {
  const DensityMatrix rho = ginibre_random_state(32, 2, 1);
  const auto subs = noiseless(rho, 2, 1);
  const CMatrix u = dominant_eigenspace(rho.matrix(), 2);
  double residual = -1.0;
  const CMatrix est = complete_columns(u, subs, 1e8, &residual);
  EXPECT_LE((est - rho.matrix()).norm(), 1e-12);
  EXPECT_LE(residual, 1e-12);
}

TEST(CompleteColumns, FullyObservedColumn) {
  const DensityMatrix rho = ginibre_random_state(8, 3, 2);
  const CMatrix u = dominant_eigenspace(rho.matrix(), 3);
  const std::vector<ObservedSubmatrix> subs{block_of(rho, IndexSet::range(1, 8))};
  const CMatrix est = complete_columns(u, subs);
  EXPECT_LE((est.col(4) - rho.matrix().col(4)).norm(), 1e-12);
}

TEST(CompleteColumns, UnderdeterminedColumnIsNamed) {
  const DensityMatrix rho = ginibre_random_state(8, 2, 3);
  const CMatrix u = dominant_eigenspace(rho.matrix(), 2);
  const std::vector<ObservedSubmatrix> subs{block_of(rho, IndexSet({1, 2, 3, 4})), block_of(rho, IndexSet({5})),
                                            block_of(rho, IndexSet({6, 7, 8}))};
  try {
    complete_columns(u, subs);
    FAIL();
  } catch (const ColumnError& e) {
    EXPECT_EQ(e.code(), ErrorCode::underdetermined_column);
    EXPECT_EQ(e.column(), 5);
  }
}

TEST(CompleteColumns, IllConditionedColumn) {
  CMatrix u = CMatrix::Zero(4, 2);
  u(0, 0) = 1.0;
  u(1, 1) = 1.0;
  const std::vector<ObservedSubmatrix> subs{{IndexSet({1, 2}), CMatrix::Identity(2, 2) * 0.5},
                                            {IndexSet({3, 4}), CMatrix::Zero(2, 2)}};
  try {
    complete_columns(u, subs);
    FAIL();
  } catch (const ColumnError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ill_conditioned_column);
    EXPECT_EQ(e.column(), 3);
  }
}

TEST(EstimateEigenvalues, MatchesTrueSpectrum) {
  for (int rank = 1; rank <= 4; ++rank) {
    const DensityMatrix rho = ginibre_random_state(16, rank, 40 + rank);
    const CMatrix u = dominant_eigenspace(rho.matrix(), rank);
    const EigenvalueEstimate e = estimate_eigenvalues(u, noiseless(rho, rank, 2));
    const RVector truth = hermitian_eigenvalues_desc(rho.matrix()).head(rank);
    EXPECT_LE((e.values - truth).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(e.values.sum(), 1.0, 1e-10);
    EXPECT_NEAR(e.trace_residual, 0.0, 1e-8);
    const CMatrix rebuilt = e.basis * e.values.asDiagonal() * e.basis.adjoint();
    EXPECT_LE((rebuilt - rebuilt.adjoint()).norm(), 1e-12);
    EXPECT_LE((rebuilt - rho.matrix()).norm(), 1e-8);
  }
}

TEST(EstimateEigenvalues, RotatedBasis) {
  // Any orthonormal basis of col(rho) works: the core absorbs the rotation.
  const DensityMatrix rho = ginibre_random_state(16, 3, 9);
  const CMatrix g = dominant_eigenspace(ginibre_random_state(3, 3, 10).matrix() * Complex(0.3, 0.7) +
                                            ginibre_random_state(3, 3, 11).matrix(),
                                        3);
  const CMatrix u = dominant_eigenspace(rho.matrix(), 3) * g;
  const EigenvalueEstimate e = estimate_eigenvalues(u, noiseless(rho, 3, 1));
  EXPECT_LE((e.values - hermitian_eigenvalues_desc(rho.matrix()).head(3)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(EstimateEigenvalues, PureState) {
  const DensityMatrix rho = ginibre_random_state(8, 1, 5);
  const CMatrix u = dominant_eigenspace(rho.matrix(), 1);
  const EigenvalueEstimate e = estimate_eigenvalues(u, noiseless(rho, 1, 1));
  ASSERT_EQ(e.values.size(), 1);
  EXPECT_NEAR(e.values(0), 1.0, 1e-12);
}

TEST(EstimateEigenvalues, ClipIsOptional) {
  const DensityMatrix rho = ginibre_random_state(8, 2, 6);
  const auto subs = sample_submatrices(rho, overlapping_block_pattern(8, 2, 1), NoiseSpec::gaussian(5.0, 2));
  const CMatrix u = dominant_eigenspace(rho.matrix(), 2);
  const EigenvalueEstimate raw = estimate_eigenvalues(u, subs, false);
  EXPECT_EQ(raw.values, raw.raw_values);
  const EigenvalueEstimate clipped = estimate_eigenvalues(u, subs, true);
  EXPECT_NEAR(clipped.values.sum(), 1.0, 1e-12);
  EXPECT_GE(clipped.values.minCoeff(), 0.0);
}

TEST(EstimateEigenvalues, DegenerateSystem) {
  CMatrix u = CMatrix::Zero(4, 2);
  u(0, 0) = 1.0;
  u(3, 1) = 1.0;
  // Only cells on rows/columns {1, 2}: the second basis vector is never seen.
  const std::vector<ObservedSubmatrix> subs{{IndexSet({1, 2}), CMatrix::Identity(2, 2) * 0.5}};
  try {
    estimate_eigenvalues(u, subs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_eigvalue_system);
  }
}

TEST(AlgebraicQst, NoiselessRecovery) {
  const DensityMatrix rho = ginibre_random_state(32, 2, 2025);
  for (auto method : {ReconstructionMethod::columnwise, ReconstructionMethod::eigenvalue}) {
    const ReconstructionResult r = algebraic_qst(noiseless(rho, 2, 1), 2, with(method));
    EXPECT_LE((r.rho_hat.matrix() - rho.matrix()).norm(), 1e-8);
    EXPECT_GE(fidelity(r.rho_hat, rho), 1.0 - 1e-8);
    EXPECT_EQ(r.method, to_string(method));
    EXPECT_EQ(r.diagnostics.subspace_solver, "dense");
    EXPECT_GT(r.diagnostics.delta_estimate, 0.0);
    EXPECT_EQ(r.diagnostics.block_deltas.size(), 30u);
  }
}

TEST(AlgebraicQst, ExactRecoveryGrid) {
  std::uint64_t seed = 100;
  for (int dim : {8, 20, 32, 64})
    for (int rank = 1; rank <= 4; ++rank)
      for (int s = 0; s < 3; ++s) {
        const DensityMatrix rho = ginibre_random_state(dim, rank, ++seed);
        const auto subs = noiseless(rho, rank, 1);
        const CMatrix a = algebraic_qst(subs, rank, with(ReconstructionMethod::columnwise)).rho_hat.matrix();
        const CMatrix b = algebraic_qst(subs, rank, with(ReconstructionMethod::eigenvalue)).rho_hat.matrix();
        EXPECT_LE((a - rho.matrix()).norm(), 1e-8) << dim << " " << rank;
        EXPECT_LE((b - rho.matrix()).norm(), 1e-8) << dim << " " << rank;
        EXPECT_LE((a - b).norm(), 1e-7);
      }
}

TEST(AlgebraicQst, MatrixFreeSolverPath) {
  const DensityMatrix rho = ginibre_random_state(32, 3, 77);
  const auto subs = noiseless(rho, 3, 2);
  const ReconstructionResult r =
      algebraic_qst(subs, 3, with(ReconstructionMethod::columnwise, SubspaceSolver::matrix_free));
  EXPECT_EQ(r.diagnostics.subspace_solver, "matrix_free");
  EXPECT_GT(r.diagnostics.solver_iterations, 0);
  EXPECT_LE((r.rho_hat.matrix() - rho.matrix()).norm(), 1e-8);
}

TEST(AlgebraicQst, NoisyOutputIsPhysical) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DensityMatrix rho = ginibre_random_state(32, 2, seed);
    const auto subs = sample_submatrices(rho, overlapping_block_pattern(32, 2, 1 + static_cast<int>(seed % 6)),
                                         NoiseSpec::gaussian(10.0, seed));
    for (auto method : {ReconstructionMethod::columnwise, ReconstructionMethod::eigenvalue}) {
      const ReconstructionResult r = algebraic_qst(subs, 2, with(method));
      EXPECT_TRUE(physicality(r.rho_hat.matrix()).ok({}));
    }
  }
}

TEST(AlgebraicQst, ErrorsNameTheirStage) {
  const DensityMatrix rho = ginibre_random_state(8, 2, 1);
  const std::vector<ObservedSubmatrix> small{block_of(rho, IndexSet({1})), block_of(rho, IndexSet::range(2, 8))};
  try {
    algebraic_qst(small, 2);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "local_eigendecomposition");
    EXPECT_EQ(e.code(), ErrorCode::insufficient_block_size);
  }
  // Declared dimension 9 leaves column 9 unobserved.
  AlgebraicOptions opt = with(ReconstructionMethod::columnwise);
  opt.dim = 9;
  try {
    algebraic_qst(noiseless(rho, 2, 1), 2, opt);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "reconstruction");
    EXPECT_EQ(e.code(), ErrorCode::underdetermined_column);
    EXPECT_NE(std::string(e.what()).find("column 9"), std::string::npos) << e.what();
  }
  try {
    algebraic_qst({}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
}
