#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace tpns {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Vec2& p, double tol = 0.0) const {
    return p.x() >= x0 - tol && p.x() <= x1 + tol && p.y() >= y0 - tol && p.y() <= y1 + tol;
  }
  bool operator==(const Rect&) const = default;
};

/// Porous rectangle and conduit rectangle sharing one full edge.
struct RectDomain {
  Rect porous_rect;
  Rect conduit_rect;
  int dimension = 2;

  /// Throws DegenerateDomain if the rectangles are empty, overlap, or do not share a full edge.
  void validate() const;
};

enum class Region : std::uint8_t { Porous, Conduit };

enum class EdgeTag : std::uint8_t {
  OuterP,    // porous boundary off the interface
  OuterC,    // conduit boundary off the interface
  Interface, // Gamma
  Outlet,    // stress-free conduit outflow
  Cased      // sealed wellbore wall
};

const char* to_string(Region r);
const char* to_string(EdgeTag t);

/// Tagged mesh edge. Interior region-crossing edges carry both adjacent cells.
struct TaggedEdge {
  std::array<int, 2> v{};
  EdgeTag tag = EdgeTag::OuterP;
  int porous_cell = -1;
  int conduit_cell = -1;
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles; // CCW
  std::vector<Region> cell_region;
  std::vector<TaggedEdge> edges;
  double h = 0.0;
  /// Per-cell index into the mesh this one was refined from; empty for a root mesh.
  std::vector<int> parent;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(triangles.size()); }
  double area(int cell) const;
  Vec2 centroid(int cell) const;
  std::vector<int> cells_in(Region r) const;
  /// Bounding box of the cells of one region.
  Rect region_box(Region r) const;
  double total_area() const;
};

/// Cell classifier for structured meshing: returns the region of the cell whose center
/// is given, or nullopt to leave it out.
using CellClassifier = std::function<std::optional<Region>(const Vec2& center)>;
/// Tag for an edge separating a porous cell from a conduit cell.
using CrossingClassifier = std::function<EdgeTag(const Vec2& a, const Vec2& b)>;

/// Structured triangulation of `box` with step h; each square split along its
/// lower-left to upper-right diagonal.
Mesh build_structured_mesh(const Rect& box, double h, const CellClassifier& classify,
                           const CrossingClassifier& crossing = {});

Mesh build_rect_mesh(const RectDomain& domain, double h);

/// Red refinement: every triangle split into four congruent children per level.
/// `parent` of the result indexes cells of `mesh`.
Mesh refine_uniform(const Mesh& mesh, int levels);

/// Copy of `mesh` nested in itself (identity parent map), used when H equals h.
Mesh nest_identity(const Mesh& mesh);

/// `fine` with its parent map located in `coarse` by cell centroids; throws NotNested.
/// Covers nestings that are not powers of two, e.g. structured meshes with H/h = 3.
Mesh nest_in(const Mesh& coarse, Mesh fine);

struct SubdomainLayout {
  int porous_nx = 1, porous_ny = 1;
  int conduit_nx = 1, conduit_ny = 1;
  double overlap = 0.0;

  bool operator==(const SubdomainLayout&) const = default;
};

struct Subdomain {
  Region region = Region::Porous;
  Rect disjoint;
  Rect extended;
  std::vector<int> cells;           // cells with centroid in `extended`, ascending
  std::vector<int> owned_cells;     // cells with centroid in `disjoint`, ascending
  std::vector<int> interface_edges; // indices into Mesh::edges
};

struct Decomposition {
  std::vector<Subdomain> subdomains; // porous first, then conduit; row-major within a region
  std::vector<int> owner;            // per mesh cell: index into `subdomains`

  std::vector<int> indices_of(Region r) const;
};

Decomposition partition_subdomains(const Mesh& mesh, const SubdomainLayout& layout);

} // namespace tpns
