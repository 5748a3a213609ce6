#pragma once

#include "curvemesh/analysis.hpp"
#include "curvemesh/disparity.hpp"
#include "curvemesh/geometry.hpp"
#include "curvemesh/mesh.hpp"
#include "curvemesh/optimizer.hpp"
#include "curvemesh/parallel.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace curvemesh::io {

/// Shortest round-trip decimal form, '.' separator, locale independent.
std::string format_double(double v);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string content_hash(std::string_view text);

/// Curve-spec document: either a JSON array of curve objects or an object with
/// a "curves" array. Fields: name, kind, params?, domain?, control_points?,
/// knots?, degree?. Errors name the line (syntax) or the curve and field.
std::vector<CurveSpec> parse_curve_specs(std::string_view text);
std::vector<CurveSpec> load_curve_specs(const std::string& path);

nlohmann::json to_json(const CurveSpec& spec);
nlohmann::json to_json(const Config& config);
nlohmann::json to_json(const OptimizeReport& report);
nlohmann::json to_json(const ParallelReport& report);

/// Columns: curve, element, node_index, s, x, y[, z]. Physical and parametric
/// nodes are listed per element at their own local indices.
void write_mesh_csv(std::ostream& out, const std::string& curve, const PhysicalMesh& x, const ParametricMesh& s);

/// Columns: xi_global, abs_e, e_t, e_n[, e_b].
void write_error_csv(std::ostream& out, const ErrorDecomposition& err);

/// Columns: curve, layout, iterations, line_searches, converged, E_initial, E_final, seconds.
void write_table_header(std::ostream& out);
void write_table_row(std::ostream& out, const std::string& curve, Layout layout, const OptimizeReport& report);

/// Columns: curve, p, q, layout, R, disparity_initial, disparity_opt.
void write_study_csv(std::ostream& out, const ConvergenceStudy& study);

}  // namespace curvemesh::io
