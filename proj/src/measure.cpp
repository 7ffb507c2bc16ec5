#include "aqst/measure.hpp"

#include <cmath>

#include "aqst/error.hpp"
#include "aqst/rng.hpp"

namespace aqst {

void add_calibrated_noise(std::span<double> params, const NoiseSpec& noise) {
  if (!noise.active() || params.empty()) return;
  const double factor = std::pow(10.0, -noise.snr_db / 20.0);
  Rng rng(noise.seed);
  if (noise.reference == SnrReference::aggregate) {
    double power = 0.0;
    for (double x : params) power += x * x;
    const double sigma = std::sqrt(power / static_cast<double>(params.size())) * factor;
    for (double& x : params) x += sigma * rng.normal();
  } else {
    for (double& x : params) x += std::abs(x) * factor * rng.normal();
  }
}

double empirical_snr_db(std::span<const double> clean, std::span<const double> noisy) {
  if (clean.size() != noisy.size()) throw Error(ErrorCode::shape, "empirical_snr_db: length mismatch");
  double signal = 0.0;
  double error = 0.0;
  for (std::size_t k = 0; k < clean.size(); ++k) {
    signal += clean[k] * clean[k];
    error += (noisy[k] - clean[k]) * (noisy[k] - clean[k]);
  }
  return 10.0 * std::log10(signal / error);
}

std::vector<ObservedSubmatrix> sample_submatrices(const DensityMatrix& rho, const SelectionPattern& pattern,
                                                  const NoiseSpec& noise) {
  const int dim = static_cast<int>(rho.dim());
  if (pattern.dim != dim)
    throw Error(ErrorCode::shape, "sample_submatrices: pattern dimension " + std::to_string(pattern.dim) +
                                      " does not match state dimension " + std::to_string(dim));
  for (const IndexSet& b : pattern.blocks)
    if (!b.within(dim)) throw Error(ErrorCode::shape, "sample_submatrices: block index out of range");

  CMatrix measured = rho.matrix();
  if (noise.active()) {
    // Distinct upper-triangle cells in row-major order, each read once.
    const std::vector<char> mask = observed_cell_mask(pattern);
    std::vector<double> params;
    for (int r = 0; r < dim; ++r) {
      for (int c = r; c < dim; ++c) {
        if (!mask[r * dim + c]) continue;
        params.push_back(measured(r, c).real());
        if (r != c) params.push_back(measured(r, c).imag());
      }
    }
    add_calibrated_noise(params, noise);
    std::size_t k = 0;
    for (int r = 0; r < dim; ++r) {
      for (int c = r; c < dim; ++c) {
        if (!mask[r * dim + c]) continue;
        if (r == c) {
          measured(r, r) = Complex(params[k++], 0.0);
        } else {
          const Complex v(params[k], params[k + 1]);
          k += 2;
          measured(r, c) = v;
          measured(c, r) = std::conj(v);
        }
      }
    }
  }

  std::vector<ObservedSubmatrix> out;
  out.reserve(pattern.blocks.size());
  for (const IndexSet& block : pattern.blocks) {
    const auto n = static_cast<Index>(block.size());
    CMatrix sub(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) sub(i, j) = measured(block[i] - 1, block[j] - 1);
    out.push_back({block, std::move(sub)});
  }
  return out;
}

MeasurementRecord pauli_expectations(const DensityMatrix& rho, std::span<const HermitianObservable> observables,
                                     const NoiseSpec& noise) {
  std::vector<double> y;
  y.reserve(observables.size());
  for (const HermitianObservable& e : observables) {
    if (e.dim() != rho.dim())
      throw Error(ErrorCode::shape, "pauli_expectations: observable dimension " + std::to_string(e.dim()) +
                                        " does not match state dimension " + std::to_string(rho.dim()));
    // Tr(E rho) = sum_ij E(i,j) rho(j,i)
    y.push_back((e.matrix().transpose().cwiseProduct(rho.matrix())).sum().real());
  }
  add_calibrated_noise(y, noise);
  MeasurementRecord rec;
  rec.observables.assign(observables.begin(), observables.end());
  rec.outcomes = Eigen::Map<RVector>(y.data(), static_cast<Index>(y.size()));
  return rec;
}

std::vector<std::string> random_pauli_labels(int qubits, int count, std::uint64_t seed) {
  if (qubits < 1) throw Error(ErrorCode::invalid_argument, "random_pauli_labels: need at least one qubit");
  if (count < 1) throw Error(ErrorCode::invalid_argument, "random_pauli_labels: need at least one operator");
  static constexpr char symbols[] = {'I', 'X', 'Y', 'Z'};
  Rng rng(seed);
  std::vector<std::string> out;
  out.reserve(count);
  bool identity_used = false;
  const std::string identity(qubits, 'I');
  while (static_cast<int>(out.size()) < count) {
    std::string s(qubits, 'I');
    for (char& ch : s) ch = symbols[rng.below(4)];
    if (s == identity) {
      if (identity_used) continue;
      identity_used = true;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<HermitianObservable> random_pauli_set(int qubits, int count, std::uint64_t seed) {
  std::vector<HermitianObservable> out;
  out.reserve(count);
  for (const std::string& label : random_pauli_labels(qubits, count, seed)) {
    const std::vector<Pauli> p = parse_pauli_labels(label);
    out.push_back(pauli_observable(p));
  }
  return out;
}

}  // namespace aqst
