#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "skelpre/mesh.hpp"

using namespace skelpre;

namespace {

double
dist_to_square_boundary(const Point& p)
{
    return std::min({p.x, 1.0 - p.x, p.y, 1.0 - p.y});
}

double
min_cell_side(const Mesh& m)
{
    double s = 1e300;
    for (const auto& c : m.graded_cells())
        s = std::min(s, c.side);
    return s;
}

} // namespace

TEST(Mesh, SquareInitialCounts)
{
    const Mesh m = initial_mesh(DomainKind::square());
    EXPECT_EQ(m.num_vertices(), 5);
    EXPECT_EQ(m.num_triangles(), 4);
    EXPECT_EQ(m.num_boundary_faces(), 4);
    EXPECT_EQ(m.num_interior_faces(), 4);
    EXPECT_EQ(skeleton_faces(m).size(), 4u);
}

TEST(Mesh, UniformRefinementCounts)
{
    Mesh m = initial_mesh(DomainKind::square());
    m = refine_uniform(m);
    EXPECT_EQ(m.num_triangles(), 16);
    EXPECT_EQ(m.num_vertices(), 13);
    for (int j = 2; j <= 5; ++j)
        m = refine_uniform(m);
    EXPECT_EQ(m.num_triangles(), 4096);
    EXPECT_EQ(m.num_vertices(), 2113);
    EXPECT_EQ(m.num_interior_faces(), 6080);
    EXPECT_EQ(m.num_interior_faces(), (3 * 4096 - 128) / 2);
    EXPECT_EQ(skeleton_faces(m).size(), 6080u);
}

TEST(Mesh, ChildDiameterHalves)
{
    const Mesh m = refine_uniform(initial_mesh(DomainKind::square()));
    const Refinement r = refine_uniform_with_genealogy(m);
    for (Index t = 0; t < r.mesh.num_triangles(); ++t)
        EXPECT_NEAR(r.mesh.diameters()[t], 0.5 * m.diameters()[r.parent[t]], 1e-15);
}

TEST(Mesh, GenealogyAreas)
{
    const Mesh m = initial_mesh(DomainKind::crack());
    const Refinement r = refine_uniform_with_genealogy(refine_uniform(m));
    const Mesh coarse = refine_uniform(m);
    std::vector<double> sum(coarse.num_triangles(), 0.0);
    for (Index t = 0; t < r.mesh.num_triangles(); ++t)
        sum[r.parent[t]] += r.mesh.area(t);
    for (Index t = 0; t < coarse.num_triangles(); ++t)
        EXPECT_NEAR(sum[t], coarse.area(t), 1e-14 * coarse.area(t));
}

TEST(Mesh, EulerRelation)
{
    Mesh m = initial_mesh(DomainKind::square());
    for (int j = 0; j <= 4; ++j) {
        EXPECT_EQ(m.num_vertices() - m.num_faces() + m.num_triangles(), 1);
        m = refine_uniform(m);
    }
}

TEST(Mesh, MinAngle)
{
    for (DomainKind kind : {DomainKind::square(), DomainKind::crack(), DomainKind::graded()}) {
        const MeshHierarchy h = build_hierarchy(kind, 3);
        for (const auto& m : h.levels)
            EXPECT_GE(m->min_angle_degrees(), 20.0);
    }
}

TEST(Mesh, CrackSlit)
{
    const Mesh m = initial_mesh(DomainKind::crack());
    EXPECT_EQ(m.num_triangles(), 5);
    EXPECT_EQ(m.num_boundary_faces(), 7);
    const Mesh fine = refine_uniform(refine_uniform(m));
    for (const Face& f : fine.faces()) {
        const Point a = fine.vertices()[f.v[0]], b = fine.vertices()[f.v[1]];
        if (a.y == 0.5 && b.y == 0.5 && std::max(a.x, b.x) <= 0.5)
            EXPECT_TRUE(f.boundary);
    }
    int mouth = 0, tip = 0;
    for (const Point& p : fine.vertices()) {
        mouth += p == Point{0.0, 0.5};
        tip += p == Point{0.5, 0.5};
    }
    EXPECT_EQ(mouth, 2);
    EXPECT_EQ(tip, 1);
    EXPECT_EQ(build_hierarchy(DomainKind::crack(), 5).finest().num_interior_faces(), 7568);
}

TEST(Mesh, CrackHierarchyQuadruples)
{
    const MeshHierarchy h = build_hierarchy(DomainKind::crack(), 1);
    EXPECT_EQ(h.levels[1]->num_triangles(), 4 * h.levels[0]->num_triangles());
}

TEST(Mesh, SquareHierarchy)
{
    const MeshHierarchy h = build_hierarchy(DomainKind::square(), 2);
    ASSERT_EQ(h.levels.size(), 3u);
    EXPECT_EQ(h.levels[0]->num_triangles(), 4);
    EXPECT_EQ(h.levels[1]->num_triangles(), 16);
    EXPECT_EQ(h.levels[2]->num_triangles(), 64);
    const MeshHierarchy t = h.truncated(1);
    EXPECT_EQ(t.finest_level(), 1);
    EXPECT_EQ(t.levels[1].get(), h.levels[1].get());
}

TEST(Mesh, GradedFamily)
{
    const MeshHierarchy h = build_hierarchy(DomainKind::graded(), 25);
    ASSERT_EQ(h.levels.size(), 26u);
    for (int j = 0; j < 25; ++j)
        EXPECT_DOUBLE_EQ(min_cell_side(*h.levels[j + 1]), 0.5 * min_cell_side(*h.levels[j]));
    EXPECT_DOUBLE_EQ(min_cell_side(h.finest()), std::ldexp(1.0, -25));

    // Conforming: boundary faces only on the outer boundary of (-1, 1)^2.
    for (const auto& m : h.levels)
        for (const Face& f : m->faces())
            if (f.boundary) {
                const Point a = m->vertices()[f.v[0]], b = m->vertices()[f.v[1]];
                const bool outer = (std::abs(a.x) == 1.0 && a.x == b.x) || (std::abs(a.y) == 1.0 && a.y == b.y);
                EXPECT_TRUE(outer);
            }

    std::set<Index> increments;
    for (int j = 2; j <= 10; ++j)
        increments.insert(h.levels[j]->num_triangles() - h.levels[j - 1]->num_triangles());
    EXPECT_EQ(increments.size(), 1u);
}

TEST(Mesh, GradedRefinementRejectsOtherFamilies)
{
    EXPECT_THROW(refine_graded_step(initial_mesh(DomainKind::square())), DomainError);
}

TEST(Mesh, DomainStrings)
{
    for (DomainTag t : {DomainTag::square, DomainTag::crack, DomainTag::graded})
        EXPECT_EQ(domain_tag_from_string(to_string(t)), t);
    EXPECT_THROW(domain_tag_from_string("disk"), Error);
}

TEST(Prolongation, NodalStructure)
{
    const Mesh coarse = refine_uniform(initial_mesh(DomainKind::square()));
    const Refinement r = refine_uniform_with_genealogy(coarse);
    const SparseMatrix p = p1_prolongation(coarse, r.mesh, r.parent);
    const auto cnum = interior_vertex_numbering(coarse);
    const auto fnum = interior_vertex_numbering(r.mesh);
    for (Index v = 0; v < coarse.num_vertices(); ++v) {
        if (cnum[v] < 0)
            continue;
        const Index row = fnum[r.embedding[v]];
        EXPECT_EQ(p.coeff(row, cnum[v]), 1.0);
        Vector e = Vector::Zero(p.cols());
        e[cnum[v]] = 1.0;
        EXPECT_EQ((p * e)[row], 1.0);
    }
    // Midpoints of coarse edges with two interior endpoints.
    for (const Face& f : coarse.faces()) {
        const Index a = cnum[f.v[0]], b = cnum[f.v[1]];
        if (a < 0 || b < 0)
            continue;
        const Point pa = coarse.vertices()[f.v[0]], pb = coarse.vertices()[f.v[1]];
        const Point mid{0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)};
        const auto it = std::find(r.mesh.vertices().begin(), r.mesh.vertices().end(), mid);
        ASSERT_NE(it, r.mesh.vertices().end());
        const Index row = fnum[it - r.mesh.vertices().begin()];
        EXPECT_EQ(p.coeff(row, a), 0.5);
        EXPECT_EQ(p.coeff(row, b), 0.5);
    }
}

TEST(Prolongation, RowSumsAwayFromBoundary)
{
    const MeshHierarchy h = build_hierarchy(DomainKind::square(), 3);
    const Mesh& coarse = *h.levels[2];
    const Mesh& fine = *h.levels[3];
    const SparseMatrix p = p1_prolongation(coarse, fine, h.parents[2]);
    const Vector s = p * Vector::Ones(p.cols());
    const auto fnum = interior_vertex_numbering(fine);
    for (Index v = 0; v < fine.num_vertices(); ++v)
        if (fnum[v] >= 0 && dist_to_square_boundary(fine.vertices()[v]) >= coarse.h_max())
            EXPECT_EQ(s[fnum[v]], 1.0);
}

TEST(Prolongation, PointwiseEvaluation)
{
    for (DomainKind kind : {DomainKind::square(), DomainKind::crack(), DomainKind::graded()}) {
        const MeshHierarchy h = build_hierarchy(kind, 2);
        const Mesh& coarse = *h.levels[1];
        const Mesh& fine = *h.levels[2];
        const SparseMatrix p = p1_prolongation(coarse, fine, h.parents[1]);
        const auto cnum = interior_vertex_numbering(coarse);
        const auto fnum = interior_vertex_numbering(fine);
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Vector vc(p.cols());
        for (Index i = 0; i < vc.size(); ++i)
            vc[i] = u(rng);
        const Vector vf = p * vc;
        auto value = [](const Mesh& m, const std::vector<Index>& num, const Vector& v, Index t, const Point& x) {
            const auto lam = barycentric(m, t, x);
            double s = 0.0;
            for (int i = 0; i < 3; ++i) {
                const Index n = num[m.triangles()[t][i]];
                if (n >= 0)
                    s += lam[i] * v[n];
            }
            return s;
        };
        std::uniform_int_distribution<Index> pick(0, fine.num_triangles() - 1);
        for (int trial = 0; trial < 100; ++trial) {
            const Index t = pick(rng);
            double l0 = u(rng), l1 = u(rng);
            if (l0 + l1 > 1.0) {
                l0 = 1.0 - l0;
                l1 = 1.0 - l1;
            }
            const auto v = fine.triangle_points(t);
            const Point x{v[0].x + l0 * (v[1].x - v[0].x) + l1 * (v[2].x - v[0].x),
                          v[0].y + l0 * (v[1].y - v[0].y) + l1 * (v[2].y - v[0].y)};
            EXPECT_NEAR(value(fine, fnum, vf, t, x), value(coarse, cnum, vc, h.parents[1][t], x), 1e-13);
        }
    }
}

TEST(Prolongation, NotNestedThrows)
{
    const Mesh coarse = initial_mesh(DomainKind::square());
    const Refinement r = refine_uniform_with_genealogy(coarse);
    std::vector<Index> wrong(r.parent.size(), 0);
    EXPECT_THROW(p1_prolongation(coarse, r.mesh, wrong), StructuralError);
}

TEST(Mesh, GoldenDump)
{
    const Mesh m = refine_uniform(initial_mesh(DomainKind::square()));
    std::ostringstream os;
    write_mesh(os, m);
    std::ifstream in(SKELPRE_TEST_DATA "/square_level1.mesh");
    ASSERT_TRUE(in);
    std::stringstream golden;
    golden << in.rdbuf();
    EXPECT_EQ(os.str(), golden.str());
}
