#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "aqst/measure.hpp"
#include "aqst/patterns.hpp"
#include "aqst/qcore.hpp"
#include "aqst/reconstruct.hpp"

namespace aqst::io {

using nlohmann::json;

/// {"dim": D, "data": [[re, im], ...]} with D*D row-major entries.
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

json density_to_json(const DensityMatrix& rho);
/// Accepts states within 1e-6 of the density-matrix constraints.
DensityMatrix density_from_json(const json& j);

/// Rectangular variant {"dim": D, "cols": k, "data": [...]}, row-major.
json basis_to_json(const CMatrix& basis);
CMatrix basis_from_json(const json& j);

/// {"dim": D, "rank_hint": R, "blocks": [[i, ...], ...]}, 1-based.
json pattern_to_json(const SelectionPattern& p);
SelectionPattern pattern_from_json(const json& j);

/// Density-matrix layout of the block data plus an "indices" field.
json submatrix_to_json(const ObservedSubmatrix& sub);
ObservedSubmatrix submatrix_from_json(const json& j);

json report_to_json(const PatternReport& report);
json diagnostics_to_json(const ReconstructionDiagnostics& diag);

/// CSV with header "observable_id,outcome"; the id is the label when set.
std::string measurement_csv(const MeasurementRecord& record);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace aqst::io
