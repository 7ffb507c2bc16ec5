#include <gtest/gtest.h>

#include <filesystem>

#include "aqst/error.hpp"
#include "aqst/io.hpp"

using namespace aqst;

TEST(Io, MatrixRoundTripIsBitExact) {
  const DensityMatrix rho = ginibre_random_state(8, 3, 1);
  const nlohmann::json j = io::density_to_json(rho);
  EXPECT_EQ(j["dim"], 8);
  EXPECT_EQ(j["data"].size(), 64u);
  const DensityMatrix back = io::density_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.matrix(), rho.matrix());
}

TEST(Io, BasisRoundTrip) {
  const CMatrix u = dominant_eigenspace(ginibre_random_state(6, 2, 3).matrix(), 2);
  const nlohmann::json j = io::basis_to_json(u);
  EXPECT_EQ(j["cols"], 2);
  EXPECT_EQ(io::basis_from_json(nlohmann::json::parse(j.dump())), u);
}

TEST(Io, PatternAndSubmatrixRoundTrip) {
  const SelectionPattern p = overlapping_block_pattern(9, 2, 2);
  const SelectionPattern back = io::pattern_from_json(io::pattern_to_json(p));
  EXPECT_EQ(back.dim, 9);
  EXPECT_EQ(back.blocks.size(), p.blocks.size());
  for (std::size_t l = 0; l < p.blocks.size(); ++l) EXPECT_EQ(back.blocks[l], p.blocks[l]);

  const auto subs = sample_submatrices(ginibre_random_state(9, 2, 4), p, NoiseSpec::gaussian(20.0, 1));
  const nlohmann::json j = io::submatrix_to_json(subs[1]);
  EXPECT_EQ(j["indices"], nlohmann::json(subs[1].indices.values()));
  const ObservedSubmatrix s = io::submatrix_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(s.indices, subs[1].indices);
  EXPECT_EQ(s.data, subs[1].data);
}

TEST(Io, RejectsMalformedInput) {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::invalid_argument;  // sentinel never produced by these calls below
  };
  EXPECT_EQ(code_of([] { io::matrix_from_json(nlohmann::json{{"dim", 2}, {"data", {{1, 0}}}}); }), ErrorCode::parse);
  EXPECT_EQ(code_of([] { io::matrix_from_json(nlohmann::json{{"dim", "x"}}); }), ErrorCode::parse);
  // Hermitian but not PSD.
  nlohmann::json bad = io::matrix_to_json(CMatrix::Identity(2, 2));
  bad["data"][0] = {2.0, 0.0};
  bad["data"][3] = {-1.0, 0.0};
  EXPECT_THROW(io::density_from_json(bad), Error);
  EXPECT_EQ(code_of([] { io::read_json_file("/nonexistent/aqst/file.json"); }), ErrorCode::io);
}

TEST(Io, ReadWriteFiles) {
  const auto path = std::filesystem::temp_directory_path() / "aqst_test_io.json";
  io::write_text_file(path, "{\"a\": [1, 2]}\n");
  EXPECT_EQ(io::read_json_file(path)["a"][1], 2);
  io::write_text_file(path, "{not json");
  try {
    io::read_json_file(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse);
  }
  std::filesystem::remove(path);
}

TEST(Io, MeasurementCsv) {
  const std::vector<HermitianObservable> obs{pauli_observable(parse_pauli_labels("Z")),
                                             pauli_observable(parse_pauli_labels("X"))};
  CMatrix zero = CMatrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  const MeasurementRecord rec = pauli_expectations(DensityMatrix::from_matrix(zero), obs, NoiseSpec::noiseless());
  EXPECT_EQ(io::measurement_csv(rec), "observable_id,outcome\nZ,1\nX,0\n");
}

TEST(Io, DiagnosticsJson) {
  ReconstructionDiagnostics d;
  d.block_deltas = {0.1, 0.2};
  d.warnings = {"w"};
  d.eigenvalues = RVector::Constant(2, 0.5);
  const nlohmann::json j = io::diagnostics_to_json(d);
  EXPECT_EQ(j["block_deltas"].size(), 2u);
  EXPECT_EQ(j["warnings"][0], "w");
  EXPECT_EQ(j["eigenvalues"][1], 0.5);
}

TEST(Io, ReportJson) {
  const nlohmann::json j = io::report_to_json(validate_pattern(overlapping_block_pattern(6, 2, 1), 2));
  EXPECT_EQ(j["settings_count"], 24);
  EXPECT_EQ(j["all_ok"], true);
}
