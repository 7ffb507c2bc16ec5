#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "aqst/error.hpp"
#include "aqst/measure.hpp"

using namespace aqst;

namespace {

CMatrix basis_state(int dim, int k) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return m;
}

}  // namespace

TEST(SampleSubmatrices, NoiselessIsExactCopy) {
  const DensityMatrix rho = ginibre_random_state(32, 2, 11);
  const SelectionPattern p = overlapping_block_pattern(32, 2, 3);
  const auto subs = sample_submatrices(rho, p, NoiseSpec::noiseless());
  ASSERT_EQ(subs.size(), p.blocks.size());
  for (std::size_t l = 0; l < subs.size(); ++l) {
    EXPECT_EQ(subs[l].indices, p.blocks[l]);
    for (Index i = 0; i < subs[l].data.rows(); ++i)
      for (Index j = 0; j < subs[l].data.cols(); ++j)
        EXPECT_EQ(subs[l].data(i, j), rho(subs[l].indices[i] - 1, subs[l].indices[j] - 1));
  }
}

TEST(SampleSubmatrices, InfiniteSnrIsNoiseless) {
  const DensityMatrix rho = ginibre_random_state(8, 2, 1);
  const SelectionPattern p = overlapping_block_pattern(8, 2, 1);
  const auto a = sample_submatrices(rho, p, NoiseSpec::gaussian(INFINITY, 5));
  const auto b = sample_submatrices(rho, p, NoiseSpec::noiseless());
  for (std::size_t l = 0; l < a.size(); ++l) EXPECT_EQ(a[l].data, b[l].data);
}

TEST(SampleSubmatrices, NoisyBlocksAreHermitianAndConsistent) {
  const DensityMatrix rho = ginibre_random_state(16, 2, 7);
  const SelectionPattern p = overlapping_block_pattern(16, 2, 2);
  const auto subs = sample_submatrices(rho, p, NoiseSpec::gaussian(20.0, 99));
  for (const auto& s : subs) {
    EXPECT_EQ((s.data - s.data.adjoint()).cwiseAbs().maxCoeff(), 0.0);
  }
  // Overlapping blocks read the same noisy cell.
  const auto& b0 = subs[0];
  const auto& b1 = subs[1];
  for (Index i = 0; i < b0.data.rows(); ++i)
    for (Index j = 0; j < b0.data.cols(); ++j) {
      const int r = b0.indices[i];
      const int c = b0.indices[j];
      if (!b1.indices.contains(r) || !b1.indices.contains(c)) continue;
      const auto pos = [&](int v) {
        const auto& vals = b1.indices.values();
        return static_cast<Index>(std::find(vals.begin(), vals.end(), v) - vals.begin());
      };
      EXPECT_EQ(b0.data(i, j), b1.data(pos(r), pos(c)));
    }
}

TEST(SampleSubmatrices, NoiseIsDeterministicAndSeeded) {
  const DensityMatrix rho = ginibre_random_state(8, 1, 3);
  const SelectionPattern p = overlapping_block_pattern(8, 1, 2);
  const auto a = sample_submatrices(rho, p, NoiseSpec::gaussian(30.0, 42));
  const auto b = sample_submatrices(rho, p, NoiseSpec::gaussian(30.0, 42));
  const auto c = sample_submatrices(rho, p, NoiseSpec::gaussian(30.0, 43));
  bool differs = false;
  for (std::size_t l = 0; l < a.size(); ++l) {
    EXPECT_EQ(a[l].data, b[l].data);
    differs = differs || a[l].data != c[l].data;
  }
  EXPECT_TRUE(differs);
}

TEST(SampleSubmatrices, DimensionMismatch) {
  const DensityMatrix rho = ginibre_random_state(8, 1, 3);
  try {
    sample_submatrices(rho, overlapping_block_pattern(16, 1, 1), NoiseSpec::noiseless());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::shape);
  }
}

TEST(SampleSubmatrices, BlocksOfLowRankStateKeepRank) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DensityMatrix rho = ginibre_random_state(32, 3, seed);
    for (const auto& s : sample_submatrices(rho, overlapping_block_pattern(32, 3, 2), NoiseSpec::noiseless()))
      EXPECT_EQ(numerical_rank(s.data, 1e-10), 3);
  }
}

TEST(Noise, ThirtyDbCalibration) {
  // Mean empirical SNR over 1000 draws of the 1024 real parameters of a
  // full 32 x 32 state.
  const DensityMatrix rho = ginibre_random_state(32, 2, 5);
  std::vector<double> clean;
  for (int r = 0; r < 32; ++r)
    for (int c = r; c < 32; ++c) {
      clean.push_back(rho(r, c).real());
      if (r != c) clean.push_back(rho(r, c).imag());
    }
  double mean_snr = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    std::vector<double> noisy = clean;
    add_calibrated_noise(noisy, NoiseSpec::gaussian(30.0, seed));
    mean_snr += empirical_snr_db(clean, noisy) / 1000.0;
  }
  EXPECT_NEAR(mean_snr, 30.0, 1.0);
}

TEST(Noise, PerParameterCalibration) {
  std::vector<double> clean(4096, 0.25);
  std::vector<double> noisy = clean;
  add_calibrated_noise(noisy, NoiseSpec::gaussian(20.0, 8, SnrReference::per_parameter));
  EXPECT_NEAR(empirical_snr_db(clean, noisy), 20.0, 0.5);
}

TEST(EntryObservables, AgreeWithSampledBlocks) {
  const int dim = 16;
  const DensityMatrix rho = ginibre_random_state(dim, 2, 21);
  const SelectionPattern p = overlapping_block_pattern(dim, 2, 2);
  const auto subs = sample_submatrices(rho, p, NoiseSpec::noiseless());
  for (const auto& s : subs) {
    for (Index i = 0; i < s.data.rows(); ++i)
      for (Index j = 0; j < s.data.cols(); ++j) {
        const int r = s.indices[i];
        const int c = s.indices[j];
        const auto obs = entry_observables(r, c, dim);
        const MeasurementRecord rec = pauli_expectations(rho, obs, NoiseSpec::noiseless());
        const Complex value = r == c ? Complex(rec.outcomes(0), 0.0) : Complex(rec.outcomes(0), rec.outcomes(1));
        EXPECT_LE(std::abs(value - s.data(i, j)), 1e-14);
      }
  }
}

TEST(PauliExpectations, Examples) {
  const DensityMatrix mixed = DensityMatrix::from_matrix(CMatrix::Identity(2, 2) / 2.0);
  const DensityMatrix zero = DensityMatrix::from_matrix(basis_state(2, 0));
  const std::vector<HermitianObservable> obs{pauli_observable(parse_pauli_labels("I")),
                                             pauli_observable(parse_pauli_labels("Z")),
                                             pauli_observable(parse_pauli_labels("X"))};
  const MeasurementRecord a = pauli_expectations(zero, obs, NoiseSpec::noiseless());
  EXPECT_DOUBLE_EQ(a.outcomes(0), 1.0);
  EXPECT_DOUBLE_EQ(a.outcomes(1), 1.0);
  EXPECT_DOUBLE_EQ(a.outcomes(2), 0.0);
  const MeasurementRecord b = pauli_expectations(mixed, obs, NoiseSpec::noiseless());
  EXPECT_DOUBLE_EQ(b.outcomes(0), 1.0);
  EXPECT_DOUBLE_EQ(b.outcomes(1), 0.0);
  EXPECT_DOUBLE_EQ(b.outcomes(2), 0.0);
}

TEST(PauliExpectations, DimensionMismatch) {
  const DensityMatrix rho = ginibre_random_state(4, 1, 0);
  const std::vector<HermitianObservable> obs{pauli_observable(parse_pauli_labels("X"))};
  EXPECT_THROW(pauli_expectations(rho, obs, NoiseSpec::noiseless()), Error);
}

TEST(RandomPauli, DeterministicAndWellFormed) {
  const auto a = random_pauli_labels(3, 200, 17);
  EXPECT_EQ(a, random_pauli_labels(3, 200, 17));
  EXPECT_NE(a, random_pauli_labels(3, 200, 18));
  std::set<char> seen;
  int identities = 0;
  for (const auto& s : a) {
    ASSERT_EQ(s.size(), 3u);
    for (char ch : s) {
      EXPECT_NE(std::string("IXYZ").find(ch), std::string::npos);
      seen.insert(ch);
    }
    identities += s == "III";
  }
  EXPECT_EQ(seen.size(), 4u);
  EXPECT_LE(identities, 1);
  const auto set = random_pauli_set(3, 5, 2);
  ASSERT_EQ(set.size(), 5u);
  EXPECT_EQ(set[0].dim(), 8);
  EXPECT_THROW(random_pauli_labels(0, 1, 0), Error);
}
