#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aqst/patterns.hpp"
#include "aqst/qcore.hpp"

namespace aqst {

enum class NoiseKind { none, gaussian_snr };

/// Reference power used to turn an SNR into a noise standard deviation.
enum class SnrReference {
  aggregate,      // sigma = rms(all independent real parameters) * 10^(-snr/20)
  per_parameter,  // sigma_k = |x_k| * 10^(-snr/20)
};

struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  SnrReference reference = SnrReference::aggregate;

  static NoiseSpec noiseless() { return {}; }
  static NoiseSpec gaussian(double snr_db, std::uint64_t seed,
                            SnrReference reference = SnrReference::aggregate) {
    return {NoiseKind::gaussian_snr, snr_db, seed, reference};
  }
  /// True when noise is actually added (an infinite SNR counts as noiseless).
  bool active() const { return kind == NoiseKind::gaussian_snr && std::isfinite(snr_db); }
};

/// Principal submatrix rho(r_l, r_l) as measured.
struct ObservedSubmatrix {
  IndexSet indices;
  CMatrix data;
};

struct MeasurementRecord {
  std::vector<HermitianObservable> observables;
  RVector outcomes;
};

/// Extracts rho(r_l, r_l) for every block. Under gaussian_snr each distinct
/// matrix cell is measured once: its independent real parameters (diagonal
/// real part, upper-triangle real and imaginary parts) get i.i.d. Gaussian
/// noise, and every block reads the same noisy value, mirrored to stay
/// Hermitian.
std::vector<ObservedSubmatrix> sample_submatrices(const DensityMatrix& rho, const SelectionPattern& pattern,
                                                  const NoiseSpec& noise);

/// y_m = Re Tr(E_m rho) plus noise calibrated on the noiseless y.
MeasurementRecord pauli_expectations(const DensityMatrix& rho, std::span<const HermitianObservable> observables,
                                     const NoiseSpec& noise);

/// M label strings drawn i.i.d. uniformly from {I,X,Y,Z}^N. The all-identity
/// string is kept at most once; repeats of it are redrawn.
std::vector<std::string> random_pauli_labels(int qubits, int count, std::uint64_t seed);

std::vector<HermitianObservable> random_pauli_set(int qubits, int count, std::uint64_t seed);

/// Adds calibrated Gaussian noise to `params` in place.
void add_calibrated_noise(std::span<double> params, const NoiseSpec& noise);

/// Empirical SNR in dB of `noisy` against `clean`.
double empirical_snr_db(std::span<const double> clean, std::span<const double> noisy);

}  // namespace aqst
