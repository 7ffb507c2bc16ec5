#include "aqst/subspace.hpp"

#include <algorithm>
#include <cmath>

#include "aqst/rng.hpp"

namespace aqst {
namespace {

void check_bases(std::span<const PaddedBasis> bases, int rank, const char* what) {
  if (bases.empty()) throw Error(ErrorCode::invalid_argument, std::string(what) + ": no bases given");
  if (rank < 1) throw Error(ErrorCode::invalid_rank, std::string(what) + ": rank must be >= 1");
  const int dim = bases.front().ambient_dim();
  for (const PaddedBasis& b : bases) {
    if (b.ambient_dim() != dim)
      throw Error(ErrorCode::shape, std::string(what) + ": inconsistent ambient dimensions");
  }
  if (rank > dim) throw Error(ErrorCode::invalid_rank, std::string(what) + ": rank exceeds dimension");
}

CMatrix orthonormalize(const CMatrix& x) {
  Eigen::HouseholderQR<CMatrix> qr(x);
  return qr.householderQ() * CMatrix::Identity(x.rows(), x.cols());
}

// Scaled Chebyshev filter: damps the spectrum in [lower, upper_damped] and
// normalizes the polynomial to 1 at `reference`.
CMatrix chebyshev_filter(const AggregateProjector& op, const CMatrix& x, int degree, double lower,
                         double upper_damped, double reference) {
  const double e = 0.5 * (upper_damped - lower);
  const double c = 0.5 * (upper_damped + lower);
  const double tau = (reference - c) / e;
  CMatrix prev = x;
  CMatrix cur = (op.apply(x) - c * x) / (e * tau);
  double ratio = 1.0 / tau;
  for (int k = 1; k < degree; ++k) {
    const double denom = 2.0 * tau - ratio;
    CMatrix next = (2.0 / e * (op.apply(cur) - c * cur) - ratio * prev) / denom;
    ratio = 1.0 / denom;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

LocalEigenbasis block_top_eigvecs(const ObservedSubmatrix& sub, int rank) {
  const Index n = sub.data.rows();
  if (sub.data.cols() != n || static_cast<std::size_t>(n) != sub.indices.size())
    throw Error(ErrorCode::shape, "block_top_eigvecs: data shape does not match its index set");
  if (rank < 1) throw Error(ErrorCode::invalid_rank, "block_top_eigvecs: rank must be >= 1");
  if (n < rank)
    throw Error(ErrorCode::insufficient_block_size, "block_top_eigvecs: block of size " + std::to_string(n) +
                                                        " is smaller than rank " + std::to_string(rank));
  const CMatrix herm = (sub.data + sub.data.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
  LocalEigenbasis out;
  out.eigenvalues = eig.eigenvalues().reverse();
  out.basis = eig.eigenvectors().rowwise().reverse().leftCols(rank);
  return out;
}

PaddedBasis::PaddedBasis(CMatrix local_basis, IndexSet block_indices, int ambient_dim)
    : local_(std::move(local_basis)), block_(std::move(block_indices)), dim_(ambient_dim) {
  if (!block_.within(dim_) || dim_ < 1)
    throw Error(ErrorCode::shape, "padded_basis: block index outside [1, " + std::to_string(dim_) + "]");
  if (static_cast<std::size_t>(local_.rows()) != block_.size())
    throw Error(ErrorCode::shape, "padded_basis: local basis rows do not match the block size");
  const CMatrix gram = local_.adjoint() * local_ - CMatrix::Identity(local_.cols(), local_.cols());
  if (gram.size() > 0 && gram.cwiseAbs().maxCoeff() > 1e-10)
    throw Error(ErrorCode::invalid_basis, "padded_basis: local basis columns are not orthonormal");
  complement_ = complement(block_, dim_);
}

CMatrix PaddedBasis::dense() const {
  const Index r = local_.cols();
  CMatrix q = CMatrix::Zero(dim_, r + static_cast<Index>(complement_.size()));
  for (std::size_t i = 0; i < block_.size(); ++i) q.row(block_[i] - 1).head(r) = local_.row(static_cast<Index>(i));
  for (std::size_t j = 0; j < complement_.size(); ++j) q(complement_[j] - 1, r + static_cast<Index>(j)) = 1.0;
  return q;
}

CMatrix PaddedBasis::projector() const {
  const CMatrix q = dense();
  return q * q.adjoint();
}

void PaddedBasis::accumulate_projection(const CMatrix& v, CMatrix& out) const {
  const auto n = static_cast<Index>(block_.size());
  CMatrix gathered(n, v.cols());
  for (Index i = 0; i < n; ++i) gathered.row(i) = v.row(block_[i] - 1);
  const CMatrix local = local_ * (local_.adjoint() * gathered);
  for (Index i = 0; i < n; ++i) out.row(block_[i] - 1) += local.row(i);
  for (int j : complement_) out.row(j - 1) += v.row(j - 1);
}

PaddedBasis padded_basis(const CMatrix& local_basis, const IndexSet& block_indices, int ambient_dim) {
  return PaddedBasis(local_basis, block_indices, ambient_dim);
}

AggregateProjector::AggregateProjector(std::vector<PaddedBasis> bases) : bases_(std::move(bases)) {
  check_bases(bases_, 1, "AggregateProjector");
  dim_ = bases_.front().ambient_dim();
  complement_multiplicity_ = RVector::Constant(dim_, static_cast<double>(bases_.size()));
  for (const PaddedBasis& b : bases_)
    for (int i : b.block_indices()) complement_multiplicity_(i - 1) -= 1.0;
}

CMatrix AggregateProjector::apply(const CMatrix& v) const {
  if (v.rows() != dim_) throw Error(ErrorCode::shape, "AggregateProjector::apply: wrong vector length");
  CMatrix out = complement_multiplicity_.asDiagonal() * v;
  for (const PaddedBasis& b : bases_) {
    const IndexSet& rows = b.block_indices();
    const auto n = static_cast<Index>(rows.size());
    CMatrix gathered(n, v.cols());
    for (Index i = 0; i < n; ++i) gathered.row(i) = v.row(rows[i] - 1);
    const CMatrix local = b.local_basis() * (b.local_basis().adjoint() * gathered);
    for (Index i = 0; i < n; ++i) out.row(rows[i] - 1) += local.row(i);
  }
  return out;
}

CMatrix AggregateProjector::dense() const {
  CMatrix p = CMatrix::Zero(dim_, dim_);
  for (const PaddedBasis& b : bases_) p += b.projector();
  return p;
}

SubspaceEstimate global_subspace_dense(std::span<const PaddedBasis> bases, int rank) {
  check_bases(bases, rank, "global_subspace_dense");
  const int dim = bases.front().ambient_dim();
  const auto blocks = static_cast<double>(bases.size());
  // Q_tot Q_tot^H = P_tot = L I - K with K = sum_l S_l (I - u u^H) S_l^T, so
  // the top-R left singular vectors of Q_tot are the bottom-R eigenvectors
  // of K. K is assembled directly: its small eigenvalues are then resolved
  // to machine precision instead of being differences of values near L,
  // which matters when the gap is tiny (noiseless d=1 has gaps ~1e-6).
  CMatrix k = CMatrix::Zero(dim, dim);
  for (const PaddedBasis& b : bases) {
    const IndexSet& rows = b.block_indices();
    const auto n = static_cast<Index>(rows.size());
    const CMatrix local = CMatrix::Identity(n, n) - b.local_basis() * b.local_basis().adjoint();
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) k(rows[i] - 1, rows[j] - 1) += local(i, j);
  }
  k = (k + k.adjoint()).eval() * 0.5;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(k);
  SubspaceEstimate est;
  est.basis = eig.eigenvectors().leftCols(rank);
  const Index keep = std::min<Index>(dim, rank + 1);
  est.leading_values = (blocks - eig.eigenvalues().head(keep).array()).matrix();
  if (dim > rank) {
    const double s_r = std::sqrt(std::max(0.0, est.leading_values(rank - 1)));
    const double s_next = std::sqrt(std::max(0.0, est.leading_values(rank)));
    if (s_r - s_next <= 1e-10) est.ambiguous = true;
  }
  return est;
}

SubspaceEstimate global_subspace_matfree(std::span<const PaddedBasis> bases, int rank,
                                         const MatrixFreeOptions& options) {
  check_bases(bases, rank, "global_subspace_matfree");
  if (!(options.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "global_subspace_matfree: tol must be > 0");
  if (options.max_iter < 1 || options.filter_degree < 1)
    throw Error(ErrorCode::invalid_argument, "global_subspace_matfree: max_iter and filter_degree must be >= 1");

  const AggregateProjector op(std::vector<PaddedBasis>(bases.begin(), bases.end()));
  const int dim = op.dim();
  // ||P_tot|| <= number of projectors summed.
  const double spectral_upper = static_cast<double>(bases.size());
  const Index block = std::min<Index>(dim, rank + std::max(1, options.guard_vectors));

  Rng rng(options.seed);
  CMatrix x(dim, block);
  for (Index c = 0; c < block; ++c)
    for (Index r = 0; r < dim; ++r) x(r, c) = Complex(rng.normal(), rng.normal());
  x = orthonormalize(x);

  CMatrix locked(dim, 0);
  std::vector<double> locked_values;
  std::vector<double> locked_residuals;
  SubspaceEstimate est;
  RVector active_theta;
  RVector active_res;

  for (int it = 1; it <= options.max_iter; ++it) {
    est.iterations = it;
    CMatrix w = op.apply(x);
    est.matvecs += static_cast<int>(x.cols());
    CMatrix h = x.adjoint() * w;
    h = (h + h.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> ritz(h);
    const CMatrix v = ritz.eigenvectors().rowwise().reverse();
    active_theta = ritz.eigenvalues().reverse();
    x = x * v;
    w = w * v;

    const Index active = x.cols();
    active_res.resize(active);
    for (Index i = 0; i < active; ++i) active_res(i) = (w.col(i) - active_theta(i) * x.col(i)).norm();

    const Index need = rank - locked.cols();
    Index converged = 0;
    while (converged < need && active_res(converged) <= options.tol) ++converged;
    if (converged > 0) {
      CMatrix grown(dim, locked.cols() + converged);
      grown.leftCols(locked.cols()) = locked;
      grown.rightCols(converged) = x.leftCols(converged);
      locked = std::move(grown);
      for (Index i = 0; i < converged; ++i) {
        locked_values.push_back(active_theta(i));
        locked_residuals.push_back(active_res(i));
      }
      x = x.rightCols(active - converged).eval();
      active_theta = active_theta.tail(active - converged).eval();
      active_res = active_res.tail(active - converged).eval();
    }
    if (locked.cols() == rank) {
      est.basis = locked;
      est.residuals = Eigen::Map<RVector>(locked_residuals.data(), rank);
      est.leading_values.resize(rank + (active_theta.size() > 0 ? 1 : 0));
      for (int i = 0; i < rank; ++i) est.leading_values(i) = locked_values[i];
      if (active_theta.size() > 0) est.leading_values(rank) = active_theta(0);
      if (active_theta.size() > 0 && locked_values[rank - 1] - active_theta(0) <= 1e-10) est.ambiguous = true;
      return est;
    }

    const double damp_upper = active_theta(active_theta.size() - 1);
    if (damp_upper > 0.0 && active_theta(0) - damp_upper > 1e-14 * spectral_upper) {
      x = chebyshev_filter(op, x, options.filter_degree, 0.0, damp_upper, std::max(spectral_upper, active_theta(0)));
      est.matvecs += options.filter_degree * static_cast<int>(x.cols());
    } else {
      x = op.apply(x);
      est.matvecs += static_cast<int>(x.cols());
    }
    if (locked.cols() > 0) {
      for (int pass = 0; pass < 2; ++pass) x -= locked * (locked.adjoint() * x);
    }
    x = orthonormalize(x);
  }

  const Index need = rank - locked.cols();
  CMatrix best(dim, rank);
  best.leftCols(locked.cols()) = locked;
  best.rightCols(need) = x.leftCols(need);
  RVector res(rank);
  for (Index i = 0; i < locked.cols(); ++i) res(i) = locked_residuals[i];
  for (Index i = 0; i < need; ++i) res(locked.cols() + i) = active_res(i);
  const std::string message = "global_subspace_matfree: no convergence after " +
                              std::to_string(options.max_iter) + " iterations (max residual " +
                              std::to_string(res.maxCoeff()) + ")";
  throw NonConvergedError(message,
                          std::move(best), std::move(res));
}

double chordal_distance(const CMatrix& x, const CMatrix& y) {
  if (x.rows() != y.rows()) throw Error(ErrorCode::shape, "chordal_distance: ambient dimensions differ");
  auto check = [](const CMatrix& m, const char* name) {
    const CMatrix gram = m.adjoint() * m - CMatrix::Identity(m.cols(), m.cols());
    if (gram.size() > 0 && gram.cwiseAbs().maxCoeff() > 1e-8)
      throw Error(ErrorCode::invalid_basis, std::string("chordal_distance: ") + name + " is not orthonormal");
  };
  check(x, "X");
  check(y, "Y");
  const CMatrix diff = x * x.adjoint() - y * y.adjoint();
  return diff.norm() / std::sqrt(2.0);
}

CMatrix dominant_eigenspace(const CMatrix& hermitian, int rank) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig((hermitian + hermitian.adjoint()) * 0.5);
  return eig.eigenvectors().rowwise().reverse().leftCols(rank);
}

double subspace_error_bound(const ErrorBudget& budget) {
  if (!(budget.epsilon >= 0.0) || !(budget.delta > budget.epsilon) || !(budget.sigma_min_ptot > 0.0))
    throw Error(ErrorCode::bound_inapplicable,
                "subspace_error_bound: requires delta > epsilon >= 0 and sigma_min > 0 (epsilon=" +
                    std::to_string(budget.epsilon) + ", delta=" + std::to_string(budget.delta) +
                    ", sigma_min=" + std::to_string(budget.sigma_min_ptot) + ")");
  double total = 0.0;
  for (int s : budget.block_sizes) total += s;
  return budget.epsilon * std::sqrt(2.0 * total) / (budget.delta * budget.sigma_min_ptot);
}

double block_subspace_bound(double epsilon, double delta, int block_size) {
  if (!(epsilon >= 0.0) || !(delta > epsilon))
    throw Error(ErrorCode::bound_inapplicable, "block_subspace_bound: requires delta > epsilon >= 0");
  return epsilon * std::sqrt(2.0 * block_size) / delta;
}

double perblock_projector_bound(double epsilon_fro, double pinv_norm) {
  return std::sqrt(2.0) * pinv_norm * epsilon_fro;
}

CMatrix rank_truncate(const CMatrix& hermitian, int rank) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig((hermitian + hermitian.adjoint()) * 0.5);
  const Index n = hermitian.rows();
  const Index k = std::min<Index>(rank, n);
  const CMatrix u = eig.eigenvectors().rightCols(k);
  const RVector lam = eig.eigenvalues().tail(k);
  return u * lam.asDiagonal() * u.adjoint();
}

std::vector<PaddedBasis> padded_bases_from(std::span<const ObservedSubmatrix> subs, int rank, int ambient_dim,
                                           std::vector<RVector>* block_eigvals) {
  std::vector<PaddedBasis> bases;
  bases.reserve(subs.size());
  for (const ObservedSubmatrix& sub : subs) {
    LocalEigenbasis local = block_top_eigvecs(sub, rank);
    if (block_eigvals) block_eigvals->push_back(local.eigenvalues);
    bases.emplace_back(std::move(local.basis), sub.indices, ambient_dim);
  }
  return bases;
}

ErrorBudget measure_error_budget(std::span<const ObservedSubmatrix> noisy, std::span<const ObservedSubmatrix> exact,
                                 int rank, int ambient_dim) {
  if (noisy.size() != exact.size() || noisy.empty())
    throw Error(ErrorCode::shape, "measure_error_budget: block lists differ in length or are empty");
  ErrorBudget budget;
  budget.delta = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < noisy.size(); ++l) {
    if (!(noisy[l].indices == exact[l].indices))
      throw Error(ErrorCode::shape, "measure_error_budget: block index sets differ");
    const CMatrix residual = rank_truncate(noisy[l].data, rank) - exact[l].data;
    const RVector ev = hermitian_eigenvalues_desc(residual);
    budget.epsilon = std::max(budget.epsilon, ev.cwiseAbs().maxCoeff());
    const RVector noisy_ev = hermitian_eigenvalues_desc(noisy[l].data);
    budget.delta = std::min(budget.delta, noisy_ev(rank - 1));
    budget.block_sizes.push_back(static_cast<int>(noisy[l].indices.size()));
  }
  const AggregateProjector ptot(padded_bases_from(noisy, rank, ambient_dim));
  budget.sigma_min_ptot = hermitian_eigenvalues_desc(ptot.dense())(rank - 1);
  return budget;
}

}  // namespace aqst
