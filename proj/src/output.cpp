#include "tpns/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tpns/error.hpp"

namespace tpns {

const char* const kErrorCsvHeader =
    "h,H,dt,uc_h1,uc_rate,pF_h1,pF_rate,pf_l2,pf_l2_rate,pf_h1,pf_h1_rate,pm_l2,pm_l2_rate,pm_h1,pm_h1_rate,cpu_s";
const char* const kRateCsvHeader = "k_F,Q,algorithm,wall_s";

namespace {

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("write to " + path + " failed");
}

} // namespace

std::string error_table_csv(const ErrorTable& table) {
  std::string out = std::string(kErrorCsvHeader) + "\n";
  double ErrorRow::*const cols[] = {&ErrorRow::uc_h1, &ErrorRow::pF_h1, &ErrorRow::pf_l2,
                                     &ErrorRow::pf_h1, &ErrorRow::pm_l2, &ErrorRow::pm_h1};
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const ErrorRow& r = table.rows[i];
    out += g6(r.h) + "," + g6(r.H) + "," + g6(r.dt);
    for (auto m : cols) {
      const auto rate = table.rate(i, m);
      out += "," + g6(r.*m) + "," + (rate ? g6(*rate) : std::string());
    }
    out += "," + g6(r.cpu_s) + "\n";
  }
  return out;
}

void write_csv(const ErrorTable& table, const std::string& path) { write_text(error_table_csv(table), path); }

std::string rate_curve_csv(const RateCurve& curve) {
  std::string out = std::string(kRateCsvHeader) + "\n";
  for (const auto& p : curve.points)
    out += g6(p.k_F) + "," + g6(p.Q) + "," + to_string(p.algorithm) + "," + g6(p.wall_s) + "\n";
  return out;
}

void write_csv(const RateCurve& curve, const std::string& path) { write_text(rate_curve_csv(curve), path); }

ErrorTable read_error_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path);
  std::string line;
  if (!std::getline(f, line) || line != kErrorCsvHeader) throw IoError(path + ": unexpected header");
  ErrorTable t;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream in(line);
    std::string c;
    while (std::getline(in, c, ',')) cells.push_back(c);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != 16) throw IoError(path + ": expected 16 columns");
    const auto at = [&](int i) {
      try {
        return std::stod(cells[i]);
      } catch (const std::exception&) {
        throw IoError(path + ": bad number '" + cells[i] + "'");
      }
    };
    t.rows.push_back({at(0), at(1), at(2), at(3), at(5), at(7), at(9), at(11), at(13), at(15)});
  }
  return t;
}

std::string vtk_text(const State& s, const Mesh& mesh) {
  std::ostringstream out;
  out.precision(10);
  const int nv = mesh.n_vertices();
  out << "# vtk DataFile Version 2.0\ntriple porosity state t=" << s.t << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << " 0\n";
  out << "CELLS " << mesh.n_cells() << " " << 4 * mesh.n_cells() << "\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.n_cells() << "\n";
  for (int c = 0; c < mesh.n_cells(); ++c) out << "5\n";
  out << "POINT_DATA " << nv << "\n";
  const auto scalar = [&](const char* name, const FieldVector& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < nv; ++v) {
      const int d = f.dofs ? f.dofs->vertex_dof(v) : -1;
      out << (d >= 0 ? f.values[d] : 0.0) << "\n";
    }
  };
  scalar("p_F", s.p_F);
  scalar("p_f", s.p_f);
  scalar("p_m", s.p_m);
  scalar("p", s.p);
  out << "VECTORS u_c double\n";
  for (int v = 0; v < nv; ++v) {
    const int dx = s.u_c.dofs ? s.u_c.dofs->vertex_dof(v, 0) : -1;
    const int dy = s.u_c.dofs ? s.u_c.dofs->vertex_dof(v, 1) : -1;
    out << (dx >= 0 ? s.u_c.values[dx] : 0.0) << " " << (dy >= 0 ? s.u_c.values[dy] : 0.0) << " 0\n";
  }
  return out.str();
}

void write_vtk(const State& s, const Mesh& mesh, const std::string& path) { write_text(vtk_text(s, mesh), path); }

void write_vtk(const CompositeSolution& s, const std::string& path) {
  write_vtk(s.vertex_state(), s.fine->mesh(), path);
}

} // namespace tpns
