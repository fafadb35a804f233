#include <algorithm>
#include <cmath>
#include <map>

#include "skelpre/mesh.hpp"

namespace skelpre {

namespace {

using PointKey = std::pair<double, double>;

struct FanResult
{
    std::vector<std::array<Index, 3>> triangles;
    std::vector<Index> first_triangle; // per cell, plus end sentinel
};

// Triangulates every cell by joining its centre to the corners and to any
// vertex sitting on an edge midpoint (hanging node of a finer neighbour).
// All coordinates are dyadic, so exact lookup by value is safe.
FanResult
fan_triangulate(const std::vector<GradedCell>& cells, const std::map<PointKey, Index>& lookup)
{
    FanResult r;
    r.first_triangle.reserve(cells.size() + 1);
    for (const auto& c : cells) {
        r.first_triangle.push_back(static_cast<Index>(r.triangles.size()));
        const double h = 0.5 * c.side;
        const double x = c.center.x, y = c.center.y;
        // Counter-clockwise ring starting at the lower-left corner.
        const PointKey ring[8] = {{x - h, y - h}, {x, y - h}, {x + h, y - h}, {x + h, y},
                                  {x + h, y + h}, {x, y + h}, {x - h, y + h}, {x - h, y}};
        std::vector<Index> boundary;
        for (int i = 0; i < 8; ++i) {
            auto it = lookup.find(ring[i]);
            if (it != lookup.end())
                boundary.push_back(it->second);
            else if (i % 2 == 0)
                throw StructuralError("graded mesh: missing cell corner");
        }
        const Index centre = lookup.at({x, y});
        for (std::size_t i = 0; i < boundary.size(); ++i)
            r.triangles.push_back({centre, boundary[i], boundary[(i + 1) % boundary.size()]});
    }
    r.first_triangle.push_back(static_cast<Index>(r.triangles.size()));
    return r;
}

std::map<PointKey, Index>
vertex_lookup(const std::vector<Point>& verts)
{
    std::map<PointKey, Index> lookup;
    for (std::size_t i = 0; i < verts.size(); ++i)
        lookup.emplace(PointKey{verts[i].x, verts[i].y}, static_cast<Index>(i));
    return lookup;
}

Index
add_vertex(std::vector<Point>& verts, std::map<PointKey, Index>& lookup, double x, double y)
{
    auto [it, inserted] = lookup.emplace(PointKey{x, y}, static_cast<Index>(verts.size()));
    if (inserted)
        verts.push_back({x, y});
    return it->second;
}

void
add_cell_points(std::vector<Point>& verts, std::map<PointKey, Index>& lookup, const GradedCell& c)
{
    const double h = 0.5 * c.side;
    for (double dy : {-h, h})
        for (double dx : {-h, h})
            add_vertex(verts, lookup, c.center.x + dx, c.center.y + dy);
    add_vertex(verts, lookup, c.center.x, c.center.y);
}

bool
touches_origin(const GradedCell& c)
{
    const double h = 0.5 * c.side;
    return std::abs(c.center.x) == h && std::abs(c.center.y) == h;
}

} // namespace

Mesh
graded_initial_mesh()
{
    std::vector<GradedCell> cells{{{-0.5, -0.5}, 1.0}, {{0.5, -0.5}, 1.0}, {{0.5, 0.5}, 1.0}, {{-0.5, 0.5}, 1.0}};
    std::vector<Point> verts;
    std::map<PointKey, Index> lookup;
    for (const auto& c : cells)
        add_cell_points(verts, lookup, c);
    auto fan = fan_triangulate(cells, lookup);
    Mesh m(std::move(verts), std::move(fan.triangles), DomainKind::graded(), 0);
    m.set_graded_cells(std::move(cells));
    return m;
}

Refinement
refine_graded_step_with_genealogy(const Mesh& m)
{
    if (m.kind().tag != DomainTag::graded || m.graded_cells().empty())
        throw DomainError("refine_graded_step: mesh is not from the graded family");

    const auto& old_cells = m.graded_cells();
    std::vector<Point> verts = m.vertices();
    auto lookup = vertex_lookup(verts);
    const auto coarse_fan = fan_triangulate(old_cells, lookup);

    std::vector<GradedCell> cells;
    std::vector<Index> cell_parent;
    for (std::size_t ci = 0; ci < old_cells.size(); ++ci) {
        const auto& c = old_cells[ci];
        if (!touches_origin(c)) {
            cells.push_back(c);
            cell_parent.push_back(static_cast<Index>(ci));
            continue;
        }
        const double q = 0.25 * c.side;
        const GradedCell kids[4] = {{{c.center.x - q, c.center.y - q}, 0.5 * c.side},
                                    {{c.center.x + q, c.center.y - q}, 0.5 * c.side},
                                    {{c.center.x + q, c.center.y + q}, 0.5 * c.side},
                                    {{c.center.x - q, c.center.y + q}, 0.5 * c.side}};
        for (const auto& k : kids) {
            add_cell_points(verts, lookup, k);
            cells.push_back(k);
            cell_parent.push_back(static_cast<Index>(ci));
        }
    }

    auto fan = fan_triangulate(cells, lookup);
    std::vector<Index> parent(fan.triangles.size(), -1);
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const Index pc = cell_parent[ci];
        for (Index t = fan.first_triangle[ci]; t < fan.first_triangle[ci + 1]; ++t) {
            const auto& tri = fan.triangles[t];
            const Point g{(verts[tri[0]].x + verts[tri[1]].x + verts[tri[2]].x) / 3.0,
                          (verts[tri[0]].y + verts[tri[1]].y + verts[tri[2]].y) / 3.0};
            for (Index ct = coarse_fan.first_triangle[pc]; ct < coarse_fan.first_triangle[pc + 1]; ++ct) {
                const auto lam = barycentric(m, ct, g);
                if (std::min({lam[0], lam[1], lam[2]}) > 0.0) {
                    parent[t] = ct;
                    break;
                }
            }
            if (parent[t] < 0)
                throw StructuralError("refine_graded_step: fine triangle without a parent");
        }
    }

    Refinement r{Mesh(std::move(verts), std::move(fan.triangles), m.kind(), m.level() + 1), std::move(parent), {}};
    r.mesh.set_graded_cells(std::move(cells));
    r.embedding.resize(static_cast<std::size_t>(m.num_vertices()));
    for (Index i = 0; i < m.num_vertices(); ++i)
        r.embedding[i] = i;
    return r;
}

Mesh
refine_graded_step(const Mesh& m)
{
    return refine_graded_step_with_genealogy(m).mesh;
}

} // namespace skelpre
