#pragma once

#include <string>

#include "tpns/wellbore.hpp"

namespace tpns {

/// Header of convergence tables, one column per error and its rate.
extern const char* const kErrorCsvHeader;
extern const char* const kRateCsvHeader;

/// Six significant digits; undefined rates become empty cells. Throws IoError.
std::string error_table_csv(const ErrorTable& table);
void write_csv(const ErrorTable& table, const std::string& path);
std::string rate_curve_csv(const RateCurve& curve);
void write_csv(const RateCurve& curve, const std::string& path);

/// Reads the errors back from a table written by write_csv (rates are recomputed).
ErrorTable read_error_csv(const std::string& path);

/// Legacy ASCII VTK of the vertex values: p_F, p_f, p_m on porous vertices, p and u_c on
/// conduit vertices, zero elsewhere. Bubbles are left out. Throws IoError.
std::string vtk_text(const State& s, const Mesh& mesh);
void write_vtk(const State& s, const Mesh& mesh, const std::string& path);
/// Composite fields, each vertex taken from the owner of its lowest-index cell.
void write_vtk(const CompositeSolution& s, const std::string& path);

} // namespace tpns
