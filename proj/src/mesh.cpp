#include "tpns/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/LU>

#include "tpns/error.hpp"

namespace tpns {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey make_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

int steps_for(double length, double h, const char* what) {
  const double ratio = length / h;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-12 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "step " << h << " does not tile " << what << " of length " << length;
    throw NonDivisibleStep(os.str());
  }
  return static_cast<int>(n);
}

// Cells adjacent to each edge of the mesh, in ascending cell order.
std::map<EdgeKey, std::vector<int>> edge_cells(const Mesh& m) {
  std::map<EdgeKey, std::vector<int>> out;
  for (int c = 0; c < m.n_cells(); ++c) {
    const auto& t = m.triangles[c];
    for (int k = 0; k < 3; ++k) out[make_key(t[k], t[(k + 1) % 3])].push_back(c);
  }
  return out;
}

void attach_cells(Mesh& m, const std::map<EdgeKey, std::vector<int>>& adjacency) {
  for (auto& e : m.edges) {
    e.porous_cell = -1;
    e.conduit_cell = -1;
    const auto it = adjacency.find(make_key(e.v[0], e.v[1]));
    if (it == adjacency.end()) continue;
    for (int c : it->second) {
      if (m.cell_region[c] == Region::Porous)
        e.porous_cell = c;
      else
        e.conduit_cell = c;
    }
  }
}

} // namespace

const char* to_string(Region r) { return r == Region::Porous ? "porous" : "conduit"; }

const char* to_string(EdgeTag t) {
  switch (t) {
  case EdgeTag::OuterP: return "outer_p";
  case EdgeTag::OuterC: return "outer_c";
  case EdgeTag::Interface: return "interface";
  case EdgeTag::Outlet: return "outlet";
  case EdgeTag::Cased: return "cased";
  }
  return "?";
}

void RectDomain::validate() const {
  if (dimension != 2) throw DegenerateDomain("only dimension 2 is supported");
  for (const Rect* r : {&porous_rect, &conduit_rect})
    if (!(r->width() > 0.0 && r->height() > 0.0)) throw DegenerateDomain("rectangle with non-positive area");
  const Rect& p = porous_rect;
  const Rect& c = conduit_rect;
  const double ix = std::min(p.x1, c.x1) - std::max(p.x0, c.x0);
  const double iy = std::min(p.y1, c.y1) - std::max(p.y0, c.y0);
  const double tol = 1e-12 * std::max({p.width(), p.height(), c.width(), c.height()});
  if (ix > tol && iy > tol) throw DegenerateDomain("porous and conduit rectangles overlap");
  const auto same = [tol](double a, double b) { return std::abs(a - b) <= tol; };
  const bool horizontal = same(p.x0, c.x0) && same(p.x1, c.x1) && (same(p.y1, c.y0) || same(c.y1, p.y0));
  const bool vertical = same(p.y0, c.y0) && same(p.y1, c.y1) && (same(p.x1, c.x0) || same(c.x1, p.x0));
  if (!horizontal && !vertical) throw DegenerateDomain("rectangles do not share one full edge");
}

double Mesh::area(int cell) const {
  const auto& t = triangles[cell];
  const Vec2 a = vertices[t[1]] - vertices[t[0]];
  const Vec2 b = vertices[t[2]] - vertices[t[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

Vec2 Mesh::centroid(int cell) const {
  const auto& t = triangles[cell];
  return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

std::vector<int> Mesh::cells_in(Region r) const {
  std::vector<int> out;
  for (int c = 0; c < n_cells(); ++c)
    if (cell_region[c] == r) out.push_back(c);
  return out;
}

Rect Mesh::region_box(Region r) const {
  Rect box{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (int c = 0; c < n_cells(); ++c) {
    if (cell_region[c] != r) continue;
    for (int v : triangles[c]) {
      box.x0 = std::min(box.x0, vertices[v].x());
      box.y0 = std::min(box.y0, vertices[v].y());
      box.x1 = std::max(box.x1, vertices[v].x());
      box.y1 = std::max(box.y1, vertices[v].y());
    }
  }
  return box;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int c = 0; c < n_cells(); ++c) a += area(c);
  return a;
}

Mesh build_structured_mesh(const Rect& box, double h, const CellClassifier& classify,
                           const CrossingClassifier& crossing) {
  if (!(h > 0.0)) throw NonDivisibleStep("mesh step must be positive");
  const int nx = steps_for(box.width(), h, "box width");
  const int ny = steps_for(box.height(), h, "box height");

  std::vector<std::optional<Region>> square(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      square[j * nx + i] = classify(Vec2(box.x0 + (i + 0.5) * h, box.y0 + (j + 0.5) * h));

  // Lattice vertices touched by at least one kept square.
  std::vector<int> vid(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (square[j * nx + i])
        for (int dj = 0; dj < 2; ++dj)
          for (int di = 0; di < 2; ++di) vid[(j + dj) * (nx + 1) + i + di] = 0;

  Mesh m;
  m.h = h;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      int& id = vid[j * (nx + 1) + i];
      if (id < 0) continue;
      id = m.n_vertices();
      m.vertices.emplace_back(box.x0 + i * h, box.y0 + j * h);
    }
  if (m.vertices.empty()) throw DegenerateDomain("classifier selected no cells");

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const auto& region = square[j * nx + i];
      if (!region) continue;
      const int v00 = vid[j * (nx + 1) + i];
      const int v10 = vid[j * (nx + 1) + i + 1];
      const int v11 = vid[(j + 1) * (nx + 1) + i + 1];
      const int v01 = vid[(j + 1) * (nx + 1) + i];
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
      m.cell_region.push_back(*region);
      m.cell_region.push_back(*region);
    }

  const auto adjacency = edge_cells(m);
  for (const auto& [key, cells] : adjacency) {
    if (cells.size() == 1) {
      const Region r = m.cell_region[cells[0]];
      m.edges.push_back({{key.first, key.second}, r == Region::Porous ? EdgeTag::OuterP : EdgeTag::OuterC});
    } else if (m.cell_region[cells[0]] != m.cell_region[cells[1]]) {
      const EdgeTag tag = crossing ? crossing(m.vertices[key.first], m.vertices[key.second]) : EdgeTag::Interface;
      m.edges.push_back({{key.first, key.second}, tag});
    }
  }
  attach_cells(m, adjacency);
  return m;
}

Mesh build_rect_mesh(const RectDomain& domain, double h) {
  domain.validate();
  const Rect& p = domain.porous_rect;
  const Rect& c = domain.conduit_rect;
  steps_for(p.width(), h, "porous width");
  steps_for(p.height(), h, "porous height");
  steps_for(c.width(), h, "conduit width");
  steps_for(c.height(), h, "conduit height");
  const Rect box{std::min(p.x0, c.x0), std::min(p.y0, c.y0), std::max(p.x1, c.x1), std::max(p.y1, c.y1)};
  return build_structured_mesh(box, h, [&](const Vec2& x) -> std::optional<Region> {
    if (p.contains(x)) return Region::Porous;
    if (c.contains(x)) return Region::Conduit;
    return std::nullopt;
  });
}

Mesh refine_uniform(const Mesh& mesh, int levels) {
  if (levels < 1) throw DegenerateDomain("refinement levels must be >= 1");
  Mesh coarse = mesh;
  std::vector<int> ancestor(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) ancestor[c] = c;

  for (int level = 0; level < levels; ++level) {
    Mesh fine;
    fine.h = coarse.h / 2.0;
    fine.vertices = coarse.vertices;
    std::map<EdgeKey, int> midpoint;
    const auto mid = [&](int a, int b) {
      const auto [it, inserted] = midpoint.try_emplace(make_key(a, b), fine.n_vertices());
      if (inserted) fine.vertices.push_back(0.5 * (coarse.vertices[a] + coarse.vertices[b]));
      return it->second;
    };
    std::vector<int> next_ancestor;
    next_ancestor.reserve(4 * coarse.triangles.size());
    for (int c = 0; c < coarse.n_cells(); ++c) {
      const auto [a, b, d] = coarse.triangles[c];
      const int ab = mid(a, b), bd = mid(b, d), da = mid(d, a);
      for (const std::array<int, 3> t : {std::array{a, ab, da}, std::array{ab, b, bd},
                                         std::array{da, bd, d}, std::array{ab, bd, da}}) {
        fine.triangles.push_back(t);
        fine.cell_region.push_back(coarse.cell_region[c]);
        next_ancestor.push_back(ancestor[c]);
      }
    }
    for (const auto& e : coarse.edges) {
      const int m = midpoint.at(make_key(e.v[0], e.v[1]));
      fine.edges.push_back({{e.v[0], m}, e.tag});
      fine.edges.push_back({{m, e.v[1]}, e.tag});
    }
    attach_cells(fine, edge_cells(fine));
    ancestor = std::move(next_ancestor);
    coarse = std::move(fine);
  }
  coarse.parent = std::move(ancestor);
  return coarse;
}

Mesh nest_identity(const Mesh& mesh) {
  Mesh out = mesh;
  out.parent.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) out.parent[c] = c;
  return out;
}

Mesh nest_in(const Mesh& coarse, Mesh fine) {
  fine.parent.assign(fine.n_cells(), -1);
  for (int c = 0; c < fine.n_cells(); ++c) {
    for (int k = 0; k < coarse.n_cells(); ++k) {
      const auto& t = coarse.triangles[k];
      const Vec2 a = coarse.vertices[t[0]], b = coarse.vertices[t[1]], d = coarse.vertices[t[2]];
      Mat2 J;
      J << b - a, d - a;
      const Mat2 Jinv = J.inverse();
      const auto inside = [&](const Vec2& x) {
        const Vec2 l = Jinv * (x - a);
        return l.x() >= -1e-12 && l.y() >= -1e-12 && l.x() + l.y() <= 1.0 + 1e-12;
      };
      if (!inside(fine.centroid(c))) continue;
      for (int v : fine.triangles[c])
        if (!inside(fine.vertices[v])) throw NotNested("fine cell straddles a coarse edge");
      if (coarse.cell_region[k] != fine.cell_region[c]) throw NotNested("cell region differs from its parent");
      fine.parent[c] = k;
      break;
    }
    if (fine.parent[c] < 0) throw NotNested("fine cell outside the coarse mesh");
  }
  return fine;
}

std::vector<int> Decomposition::indices_of(Region r) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(subdomains.size()); ++i)
    if (subdomains[i].region == r) out.push_back(i);
  return out;
}

namespace {

bool on_mesh_line(const std::set<double>& lines, double coord, double tol) {
  const auto it = lines.lower_bound(coord - tol);
  return it != lines.end() && std::abs(*it - coord) <= tol;
}

} // namespace

Decomposition partition_subdomains(const Mesh& mesh, const SubdomainLayout& layout) {
  if (layout.porous_nx < 1 || layout.porous_ny < 1 || layout.conduit_nx < 1 || layout.conduit_ny < 1)
    throw MisalignedLayout("subdomain counts must be >= 1");
  if (layout.overlap < 0.0) throw MisalignedLayout("overlap must be >= 0");

  std::set<double> xs, ys;
  for (const auto& v : mesh.vertices) {
    xs.insert(v.x());
    ys.insert(v.y());
  }
  const double tol = 1e-9 * mesh.h;

  Decomposition d;
  d.owner.assign(mesh.n_cells(), -1);
  for (const Region region : {Region::Porous, Region::Conduit}) {
    const auto cells = mesh.cells_in(region);
    if (cells.empty()) continue;
    const Rect box = mesh.region_box(region);
    const int nx = region == Region::Porous ? layout.porous_nx : layout.conduit_nx;
    const int ny = region == Region::Porous ? layout.porous_ny : layout.conduit_ny;
    const auto check = [&](double coord, const std::set<double>& lines, const char* axis) {
      if (!on_mesh_line(lines, coord, tol)) {
        std::ostringstream os;
        os << to_string(region) << " subdomain boundary " << axis << "=" << coord << " is not a mesh line";
        throw MisalignedLayout(os.str());
      }
    };
    const int first = static_cast<int>(d.subdomains.size());
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        Subdomain s;
        s.region = region;
        s.disjoint = {box.x0 + box.width() * i / nx, box.y0 + box.height() * j / ny,
                      box.x0 + box.width() * (i + 1) / nx, box.y0 + box.height() * (j + 1) / ny};
        if (i + 1 == nx) s.disjoint.x1 = box.x1;
        if (j + 1 == ny) s.disjoint.y1 = box.y1;
        s.extended = {std::max(box.x0, s.disjoint.x0 - layout.overlap), std::max(box.y0, s.disjoint.y0 - layout.overlap),
                      std::min(box.x1, s.disjoint.x1 + layout.overlap), std::min(box.y1, s.disjoint.y1 + layout.overlap)};
        for (const Rect* r : {&s.disjoint, &s.extended}) {
          check(r->x0, xs, "x");
          check(r->x1, xs, "x");
          check(r->y0, ys, "y");
          check(r->y1, ys, "y");
        }
        d.subdomains.push_back(std::move(s));
      }
    const int last = static_cast<int>(d.subdomains.size());
    for (int c : cells) {
      const Vec2 x = mesh.centroid(c);
      for (int k = first; k < last; ++k) {
        Subdomain& s = d.subdomains[k];
        if (s.extended.contains(x)) s.cells.push_back(c);
        if (d.owner[c] < 0 && s.disjoint.contains(x)) {
          d.owner[c] = k;
          s.owned_cells.push_back(c);
        }
      }
    }
    for (int k = first; k < last; ++k) {
      Subdomain& s = d.subdomains[k];
      std::vector<char> in(mesh.n_cells(), 0);
      for (int c : s.cells) in[c] = 1;
      for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e) {
        const auto& edge = mesh.edges[e];
        if (edge.tag != EdgeTag::Interface) continue;
        const int c = region == Region::Porous ? edge.porous_cell : edge.conduit_cell;
        if (c >= 0 && in[c]) s.interface_edges.push_back(e);
      }
    }
  }
  return d;
}

} // namespace tpns
