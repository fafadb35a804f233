#include "skelpre/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>

namespace skelpre {

double
DomainKind::coefficient(const Point& p) const
{
    if (tag != DomainTag::graded)
        return 1.0;
    if (p.x < 0.0)
        return p.y < 0.0 ? 1.0 : 3.0;
    return p.y < 0.0 ? 7.0 : 17.0;
}

std::string
to_string(DomainTag tag)
{
    switch (tag) {
    case DomainTag::square:
        return "square";
    case DomainTag::crack:
        return "crack";
    case DomainTag::graded:
        return "graded";
    }
    return "unknown";
}

DomainTag
domain_tag_from_string(const std::string& s)
{
    if (s == "square")
        return DomainTag::square;
    if (s == "crack")
        return DomainTag::crack;
    if (s == "graded")
        return DomainTag::graded;
    throw Error("unknown domain '" + s + "'");
}

namespace {

double
dist(const Point& a, const Point& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

double
signed_area(const Point& a, const Point& b, const Point& c)
{
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

} // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<Index, 3>> triangles, DomainKind kind, int level)
  : vertices_(std::move(vertices)), triangles_(std::move(triangles)), kind_(kind), level_(level)
{
    for (auto& t : triangles_) {
        if (signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]) < 0.0)
            std::swap(t[1], t[2]);
    }
    diam_.resize(triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto p = triangle_points(static_cast<Index>(t));
        diam_[t] = std::max({dist(p[0], p[1]), dist(p[1], p[2]), dist(p[2], p[0])});
        h_max_ = std::max(h_max_, diam_[t]);
    }
    build_faces();
}

void
Mesh::build_faces()
{
    std::map<std::pair<Index, Index>, std::vector<std::pair<Index, int>>> edges;
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int i = 0; i < 3; ++i) {
            Index a = tri[(i + 1) % 3], b = tri[(i + 2) % 3];
            if (a > b)
                std::swap(a, b);
            edges[{a, b}].emplace_back(static_cast<Index>(t), i);
        }
    }
    faces_.clear();
    faces_.reserve(edges.size());
    tri_faces_.assign(triangles_.size(), {-1, -1, -1});
    for (const auto& [key, adj] : edges) {
        if (adj.size() > 2)
            throw StructuralError("non-manifold edge (" + std::to_string(key.first) + ", " +
                                  std::to_string(key.second) + ")");
        Face f;
        f.v = {key.first, key.second};
        f.tri = {adj[0].first, adj.size() == 2 ? adj[1].first : -1};
        f.boundary = adj.size() == 1;
        const auto id = static_cast<Index>(faces_.size());
        for (const auto& [t, i] : adj)
            tri_faces_[t][i] = id;
        faces_.push_back(f);
    }
    boundary_vertex_.assign(vertices_.size(), false);
    for (const auto& f : faces_)
        if (f.boundary)
            boundary_vertex_[f.v[0]] = boundary_vertex_[f.v[1]] = true;
}

Index
Mesh::num_boundary_faces() const
{
    return std::count_if(faces_.begin(), faces_.end(), [](const Face& f) { return f.boundary; });
}

std::array<Point, 3>
Mesh::triangle_points(Index t) const
{
    const auto& tri = triangles_[t];
    return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double
Mesh::area(Index t) const
{
    const auto p = triangle_points(t);
    return signed_area(p[0], p[1], p[2]);
}

Point
Mesh::centroid(Index t) const
{
    const auto p = triangle_points(t);
    return {(p[0].x + p[1].x + p[2].x) / 3.0, (p[0].y + p[1].y + p[2].y) / 3.0};
}

double
Mesh::min_angle_degrees() const
{
    double m = 180.0;
    for (Index t = 0; t < num_triangles(); ++t) {
        const auto p = triangle_points(t);
        for (int i = 0; i < 3; ++i) {
            const Point& o = p[i];
            const Point& a = p[(i + 1) % 3];
            const Point& b = p[(i + 2) % 3];
            const double c = ((a.x - o.x) * (b.x - o.x) + (a.y - o.y) * (b.y - o.y)) / (dist(o, a) * dist(o, b));
            m = std::min(m, std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi);
        }
    }
    return m;
}

MeshHierarchy
MeshHierarchy::truncated(int j) const
{
    if (j < 0 || j > finest_level())
        throw StructuralError("MeshHierarchy::truncated: level out of range");
    MeshHierarchy h;
    h.levels.assign(levels.begin(), levels.begin() + j + 1);
    h.parents.assign(parents.begin(), parents.begin() + j);
    h.embeddings.assign(embeddings.begin(), embeddings.begin() + j);
    return h;
}

Mesh graded_initial_mesh();

Mesh
initial_mesh(DomainKind kind)
{
    switch (kind.tag) {
    case DomainTag::square: {
        std::vector<Point> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
        std::vector<std::array<Index, 3>> t{{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
        return Mesh(std::move(v), std::move(t), kind, 0);
    }
    case DomainTag::crack: {
        // Vertices 4 and 5 are the two copies of the slit mouth (0, 0.5):
        // 4 belongs to the lower side, 5 to the upper side. 6 is the tip.
        std::vector<Point> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0.5}, {0, 0.5}, {0.5, 0.5}};
        std::vector<std::array<Index, 3>> t{{0, 1, 6}, {1, 2, 6}, {2, 3, 6}, {3, 5, 6}, {4, 0, 6}};
        return Mesh(std::move(v), std::move(t), kind, 0);
    }
    case DomainTag::graded:
        return graded_initial_mesh();
    }
    throw DomainError("initial_mesh: unknown domain");
}

Refinement
refine_uniform_with_genealogy(const Mesh& m)
{
    std::vector<Point> verts = m.vertices();
    const Index nv = m.num_vertices();
    for (const auto& f : m.faces()) {
        const Point& a = m.vertices()[f.v[0]];
        const Point& b = m.vertices()[f.v[1]];
        verts.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
    }
    std::vector<std::array<Index, 3>> tris;
    std::vector<Index> parent;
    tris.reserve(4 * m.triangles().size());
    parent.reserve(4 * m.triangles().size());
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const auto& v = m.triangles()[t];
        const auto& f = m.triangle_faces()[t];
        // mid[i] is the midpoint of the edge opposite vertex i.
        const Index mid[3] = {nv + f[0], nv + f[1], nv + f[2]};
        tris.push_back({v[0], mid[2], mid[1]});
        tris.push_back({mid[2], v[1], mid[0]});
        tris.push_back({mid[1], mid[0], v[2]});
        tris.push_back({mid[0], mid[1], mid[2]});
        parent.insert(parent.end(), 4, t);
    }
    Refinement r{Mesh(std::move(verts), std::move(tris), m.kind(), m.level() + 1), std::move(parent), {}};
    r.embedding.resize(static_cast<std::size_t>(nv));
    for (Index i = 0; i < nv; ++i)
        r.embedding[i] = i;
    return r;
}

Mesh
refine_uniform(const Mesh& m)
{
    return refine_uniform_with_genealogy(m).mesh;
}

MeshHierarchy
build_hierarchy(DomainKind kind, int levels)
{
    if (levels < 0)
        throw Error("build_hierarchy: negative level count");
    MeshHierarchy h;
    h.levels.push_back(std::make_shared<const Mesh>(initial_mesh(kind)));
    for (int j = 0; j < levels; ++j) {
        Refinement r = kind.tag == DomainTag::graded ? refine_graded_step_with_genealogy(*h.levels.back())
                                                     : refine_uniform_with_genealogy(*h.levels.back());
        h.levels.push_back(std::make_shared<const Mesh>(std::move(r.mesh)));
        h.parents.push_back(std::move(r.parent));
        h.embeddings.push_back(std::move(r.embedding));
    }
    return h;
}

std::array<double, 3>
barycentric(const Mesh& m, Index t, const Point& p)
{
    const auto v = m.triangle_points(t);
    const double area = signed_area(v[0], v[1], v[2]);
    return {signed_area(p, v[1], v[2]) / area, signed_area(v[0], p, v[2]) / area, signed_area(v[0], v[1], p) / area};
}

std::vector<Index>
interior_vertex_numbering(const Mesh& m)
{
    std::vector<Index> num(static_cast<std::size_t>(m.num_vertices()), -1);
    Index n = 0;
    for (Index v = 0; v < m.num_vertices(); ++v)
        if (!m.boundary_vertices()[v])
            num[v] = n++;
    return num;
}

SparseMatrix
p1_prolongation(const Mesh& coarse, const Mesh& fine, const std::vector<Index>& parent)
{
    if (static_cast<Index>(parent.size()) != fine.num_triangles())
        throw StructuralError("p1_prolongation: parent map does not match the fine mesh");
    const auto cnum = interior_vertex_numbering(coarse);
    const auto fnum = interior_vertex_numbering(fine);
    const Index nc = std::count_if(cnum.begin(), cnum.end(), [](Index i) { return i >= 0; });
    const Index nf = std::count_if(fnum.begin(), fnum.end(), [](Index i) { return i >= 0; });

    constexpr double tol = 1e-12;
    std::vector<bool> done(static_cast<std::size_t>(fine.num_vertices()), false);
    std::vector<Triplet> trips;
    for (Index t = 0; t < fine.num_triangles(); ++t) {
        const Index pt = parent[t];
        if (pt < 0 || pt >= coarse.num_triangles())
            throw StructuralError("p1_prolongation: parent index out of range");
        for (Index fv : fine.triangles()[t]) {
            const auto lam = barycentric(coarse, pt, fine.vertices()[fv]);
            if (*std::min_element(lam.begin(), lam.end()) < -tol)
                throw StructuralError("p1_prolongation: fine vertex outside its parent triangle (meshes not nested)");
            if (done[fv] || fnum[fv] < 0)
                continue;
            done[fv] = true;
            for (int i = 0; i < 3; ++i) {
                const Index cv = cnum[coarse.triangles()[pt][i]];
                if (cv >= 0 && std::abs(lam[i]) > tol)
                    trips.push_back({fnum[fv], cv, lam[i]});
            }
        }
    }
    return csr_from_triplets(nf, nc, trips);
}

std::vector<Index>
skeleton_faces(const Mesh& m)
{
    std::vector<Index> out;
    for (Index f = 0; f < m.num_faces(); ++f)
        if (!m.faces()[f].boundary)
            out.push_back(f);
    return out;
}

void
write_mesh(std::ostream& os, const Mesh& m)
{
    os << m.num_vertices() << " " << m.num_triangles() << " " << m.num_faces() << "\n";
    char buf[96];
    for (const auto& p : m.vertices()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g", p.x, p.y);
        os << buf << "\n";
    }
    for (const auto& t : m.triangles())
        os << t[0] << " " << t[1] << " " << t[2] << "\n";
    for (const auto& f : m.faces())
        os << f.v[0] << " " << f.v[1] << " " << (f.boundary ? 1 : 0) << "\n";
}

} // namespace skelpre
