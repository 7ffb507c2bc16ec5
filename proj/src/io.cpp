#include "aqst/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "aqst/error.hpp"

namespace aqst::io {
namespace {

json entries_row_major(const CMatrix& m) {
  json data = json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
  return data;
}

CMatrix entries_from(const json& data, Index rows, Index cols) {
  if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols)
    throw Error(ErrorCode::parse, "expected " + std::to_string(rows * cols) + " entries in \"data\"");
  CMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const json& e = data[static_cast<std::size_t>(r * cols + c)];
      if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::parse, "entries must be [re, im] pairs");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, e.what());
  }
}

}  // namespace

json matrix_to_json(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::shape, "matrix_to_json: matrix must be square");
  return {{"dim", m.rows()}, {"data", entries_row_major(m)}};
}

CMatrix matrix_from_json(const json& j) {
  return guarded([&] {
    const Index dim = j.at("dim").get<Index>();
    if (dim < 1) throw Error(ErrorCode::parse, "\"dim\" must be >= 1");
    return entries_from(j.at("data"), dim, dim);
  });
}

json density_to_json(const DensityMatrix& rho) { return matrix_to_json(rho.matrix()); }

DensityMatrix density_from_json(const json& j) {
  return DensityMatrix::from_matrix(matrix_from_json(j), {1e-6, 1e-6, 1e-6});
}

json basis_to_json(const CMatrix& basis) {
  return {{"dim", basis.rows()}, {"cols", basis.cols()}, {"data", entries_row_major(basis)}};
}

CMatrix basis_from_json(const json& j) {
  return guarded([&] { return entries_from(j.at("data"), j.at("dim").get<Index>(), j.at("cols").get<Index>()); });
}

json pattern_to_json(const SelectionPattern& p) {
  json blocks = json::array();
  for (const IndexSet& b : p.blocks) blocks.push_back(b.values());
  return {{"dim", p.dim}, {"rank_hint", p.rank_hint}, {"blocks", blocks}};
}

SelectionPattern pattern_from_json(const json& j) {
  return guarded([&] {
    SelectionPattern p;
    p.dim = j.at("dim").get<int>();
    p.rank_hint = j.value("rank_hint", 0);
    for (const json& b : j.at("blocks")) {
      std::vector<int> idx = b.get<std::vector<int>>();
      p.blocks.emplace_back(std::move(idx));
    }
    return p;
  });
}

json submatrix_to_json(const ObservedSubmatrix& sub) {
  json j = matrix_to_json(sub.data);
  j["indices"] = sub.indices.values();
  return j;
}

ObservedSubmatrix submatrix_from_json(const json& j) {
  return guarded([&] {
    ObservedSubmatrix sub{IndexSet(j.at("indices").get<std::vector<int>>()), matrix_from_json(j)};
    if (static_cast<std::size_t>(sub.data.rows()) != sub.indices.size())
      throw Error(ErrorCode::parse, "\"indices\" length does not match \"dim\"");
    return sub;
  });
}

json report_to_json(const PatternReport& report) {
  return {{"covers_all_rows", report.covers_all_rows},
          {"chain_overlap_ok", report.chain_overlap_ok},
          {"column_coverage_ok", report.column_coverage_ok},
          {"necessary_count_ok", report.necessary_count_ok},
          {"settings_count", report.settings_count},
          {"uncovered_rows", report.uncovered_rows},
          {"weak_columns", report.weak_columns},
          {"all_ok", report.all_ok()}};
}

json diagnostics_to_json(const ReconstructionDiagnostics& diag) {
  json j = {{"block_deltas", diag.block_deltas},
            {"block_gaps", diag.block_gaps},
            {"delta_estimate", diag.block_deltas.empty() ? 0.0 : diag.delta_estimate},
            {"ls_residual", diag.ls_residual},
            {"trace_residual", diag.trace_residual},
            {"subspace_solver", diag.subspace_solver},
            {"solver_iterations", diag.solver_iterations},
            {"regularization", diag.regularization},
            {"converged", diag.converged},
            {"iterations", diag.iterations},
            {"warnings", diag.warnings}};
  j["eigenvalues"] = std::vector<double>(diag.eigenvalues.data(), diag.eigenvalues.data() + diag.eigenvalues.size());
  if (!diag.objective_history.empty()) {
    j["objective_initial"] = diag.objective_history.front();
    j["objective_final"] = diag.objective_history.back();
  }
  return j;
}

std::string measurement_csv(const MeasurementRecord& record) {
  std::ostringstream out;
  out << "observable_id,outcome\n";
  char buf[64];
  for (std::size_t m = 0; m < record.observables.size(); ++m) {
    const std::string& label = record.observables[m].label();
    std::snprintf(buf, sizeof buf, "%.17g", record.outcomes(static_cast<Index>(m)));
    out << (label.empty() ? std::to_string(m) : label) << ',' << buf << '\n';
  }
  return out.str();
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return guarded([&] { return json::parse(in); });
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

}  // namespace aqst::io
