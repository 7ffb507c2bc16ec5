#include "aqst/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aqst/rng.hpp"

namespace aqst {
namespace {

double real_inner(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

CMatrix project_frobenius_ball(CMatrix a) {
  const double n = a.norm();
  if (n > 1.0) a /= n;
  return a;
}

struct FistaOutcome {
  CMatrix estimate;
  std::vector<double> history;
  bool converged = false;
  int iterations = 0;
};

double operator_norm_sq(const MeasurementOperator& op) {
  // Power iteration on rho -> M^*(M(rho)) restricted to Hermitian matrices.
  Rng rng(0x0b5e55ed);
  const int dim = op.dim();
  CMatrix x(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) x(r, c) = Complex(rng.normal(), rng.normal());
  x = (x + x.adjoint()).eval() * 0.5;
  x /= x.norm();
  double estimate = 0.0;
  for (int it = 0; it < 100; ++it) {
    CMatrix next = op.adjoint(op.apply(x));
    next = (next + next.adjoint()).eval() * 0.5;
    const double n = next.norm();
    if (!(n > 0.0)) return 0.0;
    const double prev = estimate;
    estimate = n;
    x = next / n;
    if (it > 5 && std::abs(estimate - prev) <= 1e-10 * estimate) break;
  }
  return estimate;
}

FistaOutcome run_fista(const MeasurementOperator& op, const RVector& y, double mu, const NuclearConfig& cfg,
                       double lipschitz) {
  const int dim = op.dim();
  const double step = 1.0 / lipschitz;
  FistaOutcome out;
  CMatrix x = CMatrix::Zero(dim, dim);
  CMatrix z = x;
  double t = 1.0;
  auto objective = [&](const CMatrix& m) {
    return (op.apply(m) - y).squaredNorm() + mu * nuclear_norm_hermitian(m);
  };
  double f_prev = objective(x);
  out.history.push_back(f_prev);
  for (int it = 1; it <= cfg.max_iter; ++it) {
    out.iterations = it;
    const CMatrix grad = 2.0 * op.adjoint(op.apply(z) - y);
    CMatrix next = eigenvalue_soft_threshold(z - step * grad, step * mu);
    const double f = objective(next);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (f > f_prev) {
      // Momentum restart keeps the objective sequence monotone.
      next = eigenvalue_soft_threshold(x - step * 2.0 * op.adjoint(op.apply(x) - y), step * mu);
      const double fr = objective(next);
      z = next;
      t = 1.0;
      const double rel = std::abs(f_prev - fr) / std::max(std::abs(f_prev), 1e-300);
      x = std::move(next);
      out.history.push_back(fr);
      f_prev = fr;
      if (rel < cfg.obj_tol) {
        out.converged = true;
        break;
      }
      continue;
    }
    z = next + ((t - 1.0) / t_next) * (next - x);
    t = t_next;
    const double rel = std::abs(f_prev - f) / std::max(std::abs(f_prev), 1e-300);
    x = std::move(next);
    out.history.push_back(f);
    f_prev = f;
    if (rel < cfg.obj_tol && it > 1) {
      out.converged = true;
      break;
    }
  }
  out.estimate = std::move(x);
  return out;
}

}  // namespace

MeasurementOperator::MeasurementOperator(std::span<const HermitianObservable> observables) {
  if (observables.empty()) throw Error(ErrorCode::invalid_argument, "MeasurementOperator: no observables");
  dim_ = static_cast<int>(observables.front().dim());
  const Index n = static_cast<Index>(dim_) * dim_;
  coeffs_.resize(static_cast<Index>(observables.size()), n);
  for (std::size_t m = 0; m < observables.size(); ++m) {
    if (observables[m].dim() != dim_)
      throw Error(ErrorCode::shape, "MeasurementOperator: observables do not share one dimension");
    const CMatrix t = observables[m].matrix().transpose();
    coeffs_.row(static_cast<Index>(m)) = Eigen::Map<const CVector>(t.data(), n).transpose();
  }
}

RVector MeasurementOperator::apply(const CMatrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) throw Error(ErrorCode::shape, "MeasurementOperator::apply: wrong shape");
  const Eigen::Map<const CVector> v(rho.data(), rho.size());
  return (coeffs_ * v).real();
}

CMatrix MeasurementOperator::adjoint(const RVector& weights) const {
  if (weights.size() != coeffs_.rows()) throw Error(ErrorCode::shape, "MeasurementOperator::adjoint: wrong length");
  const CVector v = coeffs_.transpose() * weights.cast<Complex>();
  return Eigen::Map<const CMatrix>(v.data(), dim_, dim_).transpose();
}

MeasurementOperator MeasurementOperator::subset(std::span<const Index> rows) const {
  MeasurementOperator out;
  out.dim_ = dim_;
  out.coeffs_.resize(static_cast<Index>(rows.size()), coeffs_.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.coeffs_.row(static_cast<Index>(k)) = coeffs_.row(rows[k]);
  return out;
}

double bm_objective(const MeasurementOperator& op, const RVector& y, const CMatrix& factor) {
  return (op.apply(factor * factor.adjoint()) - y).squaredNorm();
}

CMatrix bm_gradient(const MeasurementOperator& op, const RVector& y, const CMatrix& factor) {
  const RVector residual = op.apply(factor * factor.adjoint()) - y;
  return 4.0 * op.adjoint(residual) * factor;
}

ReconstructionResult bm_qst(const MeasurementRecord& record, const BMConfig& config) {
  if (config.rank < 1) throw Error(ErrorCode::invalid_rank, "bm_qst: rank must be >= 1");
  if (!(config.grad_tol > 0.0) || config.max_iter < 1)
    throw Error(ErrorCode::invalid_argument, "bm_qst: grad_tol and max_iter must be positive");
  if (record.outcomes.size() != static_cast<Index>(record.observables.size()))
    throw Error(ErrorCode::shape, "bm_qst: outcome count does not match observable count");
  const MeasurementOperator op(record.observables);
  const RVector& y = record.outcomes;
  const int dim = op.dim();

  Rng rng(config.seed);
  CMatrix a(dim, config.rank);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < config.rank; ++c) a(r, c) = Complex(rng.normal(), rng.normal());
  a /= a.norm();

  ReconstructionDiagnostics diag;
  double f = bm_objective(op, y, a);
  diag.objective_history.push_back(f);
  diag.converged = false;
  double eta = config.step.eta;
  for (int it = 1; it <= config.max_iter; ++it) {
    diag.iterations = it;
    const CMatrix g = bm_gradient(op, y, a);
    // Gradient mapping at unit scale; equals ||G|| when the ball is inactive.
    if ((a - project_frobenius_ball(a - g)).norm() <= config.grad_tol) {
      diag.converged = true;
      break;
    }
    CMatrix next;
    double f_next = 0.0;
    if (config.step.kind == StepRule::Kind::fixed) {
      next = project_frobenius_ball(a - eta * g);
      f_next = bm_objective(op, y, next);
    } else {
      for (int trial = 0; trial < 60; ++trial) {
        next = project_frobenius_ball(a - eta * g);
        f_next = bm_objective(op, y, next);
        if (!std::isfinite(f_next)) {
          eta *= config.step.beta;
          continue;
        }
        if (f_next <= f + config.step.c * real_inner(g, next - a)) break;
        eta *= config.step.beta;
      }
      if (!(f_next <= f)) {
        // Line search exhausted: the iterate is stationary to machine precision.
        diag.converged = true;
        break;
      }
    }
    if (!std::isfinite(f_next))
      throw Error(ErrorCode::step_size, "bm_qst: objective became non-finite at iteration " + std::to_string(it) +
                                            "; use a smaller fixed step or backtracking");
    a = std::move(next);
    f = f_next;
    diag.objective_history.push_back(f);
    if (config.step.kind == StepRule::Kind::backtracking) eta /= std::sqrt(config.step.beta);
  }

  CMatrix raw = a * a.adjoint();
  DensityMatrix rho_hat = project_to_physical(raw);
  return ReconstructionResult{std::move(rho_hat), std::move(raw), "bm", std::move(diag)};
}

CMatrix eigenvalue_soft_threshold(const CMatrix& hermitian, double threshold) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig((hermitian + hermitian.adjoint()) * 0.5);
  RVector lam = eig.eigenvalues();
  for (Index k = 0; k < lam.size(); ++k) {
    const double mag = std::max(std::abs(lam(k)) - threshold, 0.0);
    lam(k) = lam(k) < 0.0 ? -mag : mag;
  }
  CMatrix out = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint();
  return (out + out.adjoint()) * 0.5;
}

double nuclear_norm_hermitian(const CMatrix& hermitian) {
  return hermitian_eigenvalues_desc(hermitian).cwiseAbs().sum();
}

ReconstructionResult nuclear_qst(const MeasurementRecord& record, const NuclearConfig& config) {
  if (record.outcomes.size() != static_cast<Index>(record.observables.size()))
    throw Error(ErrorCode::shape, "nuclear_qst: outcome count does not match observable count");
  if (config.mu && !(*config.mu > 0.0)) throw Error(ErrorCode::invalid_argument, "nuclear_qst: mu must be > 0");
  const MeasurementOperator op(record.observables);
  const RVector& y = record.outcomes;

  double mu = config.mu.value_or(0.0);
  if (!config.mu) {
    const Index m = op.size();
    std::vector<Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Index{0});
    Rng rng(config.seed);
    for (Index k = m - 1; k > 0; --k)
      std::swap(order[static_cast<std::size_t>(k)], order[rng.below(static_cast<std::uint64_t>(k) + 1)]);
    const Index held = std::clamp<Index>(static_cast<Index>(std::ceil(config.holdout_fraction * m)), 1, m - 1);
    std::vector<Index> test(order.begin(), order.begin() + held);
    std::vector<Index> train(order.begin() + held, order.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    const MeasurementOperator op_train = op.subset(train);
    const MeasurementOperator op_test = op.subset(test);
    RVector y_train(static_cast<Index>(train.size()));
    RVector y_test(static_cast<Index>(test.size()));
    for (std::size_t k = 0; k < train.size(); ++k) y_train(static_cast<Index>(k)) = y(train[k]);
    for (std::size_t k = 0; k < test.size(); ++k) y_test(static_cast<Index>(k)) = y(test[k]);

    const double scale = hermitian_eigenvalues_desc(op.adjoint(y)).cwiseAbs().maxCoeff();
    const double lip = 2.0 * operator_norm_sq(op_train);
    double best = std::numeric_limits<double>::infinity();
    for (double factor : config.mu_grid) {
      const double candidate = factor * scale;
      const FistaOutcome fit = run_fista(op_train, y_train, candidate, config, lip);
      const double err = (op_test.apply(fit.estimate) - y_test).squaredNorm();
      if (err < best) {
        best = err;
        mu = candidate;
      }
    }
    if (!(mu > 0.0)) mu = config.mu_grid.front() * std::max(scale, 1e-12);
  }

  const FistaOutcome fit = run_fista(op, y, mu, config, 2.0 * operator_norm_sq(op));
  ReconstructionDiagnostics diag;
  diag.regularization = mu;
  diag.objective_history = fit.history;
  diag.converged = fit.converged;
  diag.iterations = fit.iterations;
  if (!fit.converged) diag.warnings.emplace_back("nuclear_qst: max_iter reached before obj_tol");
  DensityMatrix rho_hat = project_to_physical(fit.estimate);
  return ReconstructionResult{std::move(rho_hat), fit.estimate, "nuclear", std::move(diag)};
}

std::int64_t matched_budget(int dim, const SelectionPattern& pattern) {
  return 2 * unique_upper_cells(pattern) + dim;
}

}  // namespace aqst
