#include "aqst/reconstruct.hpp"

#include <algorithm>
#include <cmath>

namespace aqst {

const char* to_string(ReconstructionMethod m) {
  return m == ReconstructionMethod::columnwise ? "columnwise" : "eigenvalue";
}

const char* to_string(SubspaceSolver s) {
  switch (s) {
    case SubspaceSolver::automatic: return "automatic";
    case SubspaceSolver::dense: return "dense";
    case SubspaceSolver::matrix_free: return "matrix_free";
  }
  return "unknown";
}

ObservedEntries collect_observations(std::span<const ObservedSubmatrix> subs, int dim) {
  ObservedEntries obs;
  obs.dim = dim;
  obs.values = CMatrix::Zero(dim, dim);
  obs.counts.assign(static_cast<std::size_t>(dim) * dim, 0);
  for (const ObservedSubmatrix& sub : subs) {
    if (!sub.indices.within(dim) || static_cast<std::size_t>(sub.data.rows()) != sub.indices.size() ||
        sub.data.rows() != sub.data.cols())
      throw Error(ErrorCode::shape, "observed block does not fit a " + std::to_string(dim) + "-dimensional state");
    const std::size_t n = sub.indices.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const int r = sub.indices[i] - 1;
        const int c = sub.indices[j] - 1;
        obs.values(r, c) += sub.data(static_cast<Index>(i), static_cast<Index>(j));
        ++obs.counts[static_cast<std::size_t>(r) * dim + c];
      }
    }
  }
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const int k = obs.counts[static_cast<std::size_t>(r) * dim + c];
      if (k > 1) obs.values(r, c) /= static_cast<double>(k);
    }
  return obs;
}

CMatrix complete_columns(const CMatrix& basis, std::span<const ObservedSubmatrix> subs, double max_condition,
                         double* ls_residual) {
  const int dim = static_cast<int>(basis.rows());
  const Index rank = basis.cols();
  const ObservedEntries obs = collect_observations(subs, dim);
  CMatrix out(dim, dim);
  double residual_sq = 0.0;
  // Coverage is checked for every column before any solve, so a missing
  // column is reported as such rather than as a bad basis elsewhere.
  for (int c = 0; c < dim; ++c) {
    Index seen = 0;
    for (int r = 0; r < dim; ++r) seen += obs.observed(r, c) ? 1 : 0;
    if (seen < rank)
      throw ColumnError(ErrorCode::underdetermined_column, c + 1,
                        "column " + std::to_string(c + 1) + " has " + std::to_string(seen) +
                            " observed entries, fewer than rank " + std::to_string(rank));
  }
  std::vector<int> rows;
  for (int c = 0; c < dim; ++c) {
    rows.clear();
    for (int r = 0; r < dim; ++r)
      if (obs.observed(r, c)) rows.push_back(r);
    const auto k = static_cast<Index>(rows.size());
    CMatrix restricted(k, rank);
    CVector rhs(k);
    for (Index i = 0; i < k; ++i) {
      restricted.row(i) = basis.row(rows[i]);
      rhs(i) = obs.values(rows[i], c);
    }
    const RVector sv = Eigen::JacobiSVD<CMatrix>(restricted).singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || sv(0) / smin > max_condition)
      throw ColumnError(ErrorCode::ill_conditioned_column, c + 1,
                        "column " + std::to_string(c + 1) + ": restricted basis is rank deficient (condition " +
                            std::to_string(smin > 0.0 ? sv(0) / smin : INFINITY) + ")");
    const CVector x = restricted.colPivHouseholderQr().solve(rhs);
    residual_sq += (restricted * x - rhs).squaredNorm();
    out.col(c) = basis * x;
  }
  if (ls_residual) *ls_residual = std::sqrt(residual_sq);
  return out;
}

EigenvalueEstimate estimate_eigenvalues(const CMatrix& basis, std::span<const ObservedSubmatrix> subs,
                                        bool clip_and_normalize) {
  const int dim = static_cast<int>(basis.rows());
  const Index rank = basis.cols();
  const ObservedEntries obs = collect_observations(subs, dim);
  std::vector<std::pair<int, int>> cells;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (obs.observed(r, c)) cells.emplace_back(r, c);

  // U is only known up to a rotation, so fit a Hermitian core W with
  // rho(r,c) = U(r,:) W U(c,:)^H and diagonalize it afterwards. Unknowns:
  // R real diagonal entries, then Re/Im of each strictly-upper entry.
  const Index unknowns = rank * rank;
  if (static_cast<Index>(2 * cells.size()) < unknowns)
    throw Error(ErrorCode::degenerate_eigvalue_system, "estimate_eigenvalues: too few observed cells for rank");
  const auto n = static_cast<Index>(cells.size());
  RMatrix design(2 * n, unknowns);
  RVector rhs(2 * n);
  const Complex i1(0.0, 1.0);
  for (Index e = 0; e < n; ++e) {
    const auto [r, c] = cells[static_cast<std::size_t>(e)];
    Index col = 0;
    auto put = [&](Complex coef) {
      design(e, col) = coef.real();
      design(n + e, col) = coef.imag();
      ++col;
    };
    for (Index k = 0; k < rank; ++k) put(basis(r, k) * std::conj(basis(c, k)));
    for (Index k = 0; k < rank; ++k)
      for (Index j = k + 1; j < rank; ++j) {
        const Complex kj = basis(r, k) * std::conj(basis(c, j));
        const Complex jk = basis(r, j) * std::conj(basis(c, k));
        put(kj + jk);
        put(i1 * (kj - jk));
      }
    rhs(e) = obs.values(r, c).real();
    rhs(n + e) = obs.values(r, c).imag();
  }
  Eigen::ColPivHouseholderQR<RMatrix> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < unknowns)
    throw Error(ErrorCode::degenerate_eigvalue_system, "estimate_eigenvalues: design matrix rank " +
                                                           std::to_string(qr.rank()) + " < " +
                                                           std::to_string(unknowns));
  const RVector w = qr.solve(rhs);

  CMatrix core(rank, rank);
  Index col = rank;
  for (Index k = 0; k < rank; ++k) core(k, k) = w(k);
  for (Index k = 0; k < rank; ++k)
    for (Index j = k + 1; j < rank; ++j) {
      core(k, j) = Complex(w(col), w(col + 1));
      core(j, k) = std::conj(core(k, j));
      col += 2;
    }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(core);

  EigenvalueEstimate est;
  est.raw_values = eig.eigenvalues().reverse();
  est.basis = basis * eig.eigenvectors().rowwise().reverse();
  est.ls_residual = (design * w - rhs).norm();
  est.trace_residual = est.raw_values.sum() - 1.0;
  est.values = est.raw_values;
  if (clip_and_normalize) {
    est.values = est.values.cwiseMax(0.0);
    const double total = est.values.sum();
    if (!(total > 0.0))
      throw Error(ErrorCode::degenerate_eigvalue_system, "estimate_eigenvalues: no positive eigenvalue survives");
    est.values /= total;
  }
  return est;
}

namespace {

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

}  // namespace

ReconstructionResult algebraic_qst(std::span<const ObservedSubmatrix> subs, int rank, const AlgebraicOptions& options) {
  if (subs.empty()) throw StageError("input", Error(ErrorCode::invalid_argument, "no observed submatrices"));
  int dim = options.dim;
  if (dim == 0)
    for (const ObservedSubmatrix& s : subs)
      if (!s.indices.empty()) dim = std::max(dim, s.indices.values().back());

  ReconstructionDiagnostics diag;
  std::vector<RVector> eigvals;
  const std::vector<PaddedBasis> bases =
      in_stage("local_eigendecomposition", [&] { return padded_bases_from(subs, rank, dim, &eigvals); });
  diag.delta_estimate = std::numeric_limits<double>::infinity();
  for (const RVector& ev : eigvals) {
    diag.block_deltas.push_back(ev(rank - 1));
    diag.block_gaps.push_back(ev.size() > rank ? ev(rank - 1) - ev(rank) : ev(rank - 1));
    diag.delta_estimate = std::min(diag.delta_estimate, ev(rank - 1));
  }

  const bool use_dense = options.solver == SubspaceSolver::dense ||
                         (options.solver == SubspaceSolver::automatic && dim < options.matrix_free_threshold);
  SubspaceEstimate subspace = in_stage("global_subspace", [&] {
    return use_dense ? global_subspace_dense(bases, rank) : global_subspace_matfree(bases, rank, options.matrix_free);
  });
  subspace.block_eigvals = std::move(eigvals);
  diag.subspace_solver = use_dense ? "dense" : "matrix_free";
  diag.solver_iterations = subspace.iterations;
  if (subspace.ambiguous) diag.warnings.emplace_back("tie at the R-th singular value of Q_tot; subspace not unique");

  CMatrix raw = in_stage("reconstruction", [&]() -> CMatrix {
    if (options.method == ReconstructionMethod::columnwise)
      return complete_columns(subspace.basis, subs, options.max_condition, &diag.ls_residual);
    const EigenvalueEstimate lam = estimate_eigenvalues(subspace.basis, subs, options.clip_eigenvalues);
    diag.ls_residual = lam.ls_residual;
    diag.trace_residual = lam.trace_residual;
    diag.eigenvalues = lam.values;
    return lam.basis * lam.values.asDiagonal() * lam.basis.adjoint();
  });

  DensityMatrix rho_hat = in_stage("projection", [&] { return project_to_physical(raw); });
  return ReconstructionResult{std::move(rho_hat), std::move(raw), to_string(options.method), std::move(diag)};
}

}  // namespace aqst
