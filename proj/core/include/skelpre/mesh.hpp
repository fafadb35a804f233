#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "skelpre/linalg.hpp"

namespace skelpre {

struct Point
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

enum class DomainTag
{
    square,
    crack,
    graded
};

/// Domain family plus its piecewise-constant diffusion coefficient.
///
/// The graded family carries the four-quadrant coefficient
/// a = 1, 7, 17, 3 (third, fourth, first, second quadrant); the other
/// families use a = 1.
struct DomainKind
{
    DomainTag tag = DomainTag::square;

    static DomainKind square() { return {DomainTag::square}; }
    static DomainKind crack() { return {DomainTag::crack}; }
    static DomainKind graded() { return {DomainTag::graded}; }

    double coefficient(const Point& p) const;
};

std::string to_string(DomainTag tag);
DomainTag domain_tag_from_string(const std::string& s);

struct Face
{
    // Endpoints with v[0] < v[1]; this is also the face orientation.
    std::array<Index, 2> v;
    // Adjacent triangles; tri[1] == -1 on the boundary.
    std::array<Index, 2> tri;
    bool boundary = false;
};

// Axis-aligned square cell of the graded family.
struct GradedCell
{
    Point center;
    double side = 1.0;
};

/// Conforming triangulation.
///
/// Triangles are counter-clockwise. Local face i of a triangle is the edge
/// opposite its local vertex i. Faces are sorted lexicographically by their
/// (sorted) endpoint indices.
class Mesh
{
  public:
    Mesh() = default;
    Mesh(std::vector<Point> vertices, std::vector<std::array<Index, 3>> triangles, DomainKind kind, int level = 0);

    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    const std::vector<std::array<Index, 3>>& triangles() const noexcept { return triangles_; }
    const std::vector<Face>& faces() const noexcept { return faces_; }
    // Face indices of each triangle, local face i opposite local vertex i.
    const std::vector<std::array<Index, 3>>& triangle_faces() const noexcept { return tri_faces_; }
    const std::vector<double>& diameters() const noexcept { return diam_; }

    Index num_vertices() const noexcept { return static_cast<Index>(vertices_.size()); }
    Index num_triangles() const noexcept { return static_cast<Index>(triangles_.size()); }
    Index num_faces() const noexcept { return static_cast<Index>(faces_.size()); }
    Index num_boundary_faces() const;
    Index num_interior_faces() const { return num_faces() - num_boundary_faces(); }

    const DomainKind& kind() const noexcept { return kind_; }
    int level() const noexcept { return level_; }
    double h_max() const noexcept { return h_max_; }

    std::array<Point, 3> triangle_points(Index t) const;
    double area(Index t) const;
    Point centroid(Index t) const;
    double min_angle_degrees() const;

    // Vertex lies on a boundary face.
    const std::vector<bool>& boundary_vertices() const noexcept { return boundary_vertex_; }

    // Cell layout; only populated for the graded family.
    const std::vector<GradedCell>& graded_cells() const noexcept { return cells_; }
    void set_graded_cells(std::vector<GradedCell> cells) { cells_ = std::move(cells); }

  private:
    void build_faces();

    std::vector<Point> vertices_;
    std::vector<std::array<Index, 3>> triangles_;
    std::vector<Face> faces_;
    std::vector<std::array<Index, 3>> tri_faces_;
    std::vector<double> diam_;
    std::vector<bool> boundary_vertex_;
    std::vector<GradedCell> cells_;
    DomainKind kind_;
    int level_ = 0;
    double h_max_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Nested sequence T_0 ⊂ T_1 ⊂ ... ⊂ T_J.
struct MeshHierarchy
{
    std::vector<MeshPtr> levels;
    // parents[j][t]: triangle of level j containing triangle t of level j+1.
    std::vector<std::vector<Index>> parents;
    // embeddings[j][v]: index on level j+1 of vertex v of level j.
    std::vector<std::vector<Index>> embeddings;

    int finest_level() const { return static_cast<int>(levels.size()) - 1; }
    const Mesh& finest() const { return *levels.back(); }
    // Prefix T_0 .. T_j.
    MeshHierarchy truncated(int j) const;
};

// Criss-cross unit square (4 triangles), slit square (5 triangles, slit
// along [0, 0.5] x {0.5}), or graded (-1, 1)^2 built from four unit cells.
Mesh initial_mesh(DomainKind kind);

struct Refinement
{
    Mesh mesh;
    std::vector<Index> parent;    // fine triangle -> coarse triangle
    std::vector<Index> embedding; // coarse vertex -> fine vertex
};

// Red refinement: every triangle split into four by its edge midpoints.
Refinement refine_uniform_with_genealogy(const Mesh& m);
Mesh refine_uniform(const Mesh& m);

// Graded step: the four cells touching the origin are replaced by sixteen
// cells of half the side. Throws DomainError for non-graded meshes.
Refinement refine_graded_step_with_genealogy(const Mesh& m);
Mesh refine_graded_step(const Mesh& m);

MeshHierarchy build_hierarchy(DomainKind kind, int levels);

// Conforming P1 prolongation restricted to interior vertices (homogeneous
// Dirichlet): rows over interior fine vertices, columns over interior coarse
// vertices. `parent` maps fine triangles to coarse triangles.
SparseMatrix p1_prolongation(const Mesh& coarse, const Mesh& fine, const std::vector<Index>& parent);

// Interior vertex numbering (by increasing vertex index); -1 on the boundary.
std::vector<Index> interior_vertex_numbering(const Mesh& m);

// Interior faces in face order (lexicographic by endpoint indices).
std::vector<Index> skeleton_faces(const Mesh& m);

// Plain-text dump: "V T F", then V lines "x y", T lines "a b c",
// F lines "a b boundary".
void write_mesh(std::ostream& os, const Mesh& m);

// Barycentric coordinates of p in triangle t.
std::array<double, 3> barycentric(const Mesh& m, Index t, const Point& p);

} // namespace skelpre
