#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "skelpre/experiment.hpp"
#include "skelpre/polybasis.hpp"
#include "skelpre/precond.hpp"

using namespace skelpre;

namespace {

MeshHierarchy
square(int level)
{
    return build_hierarchy(DomainKind::square(), level);
}

Vector
random_vector(Index n, std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i)
        v[i] = u(rng);
    return v;
}

// Legendre moments of a P1 function (coarse nodal vector on level j of hier)
// on every interior face of the finest level, by pointwise evaluation.
Vector
project_coarse_interpolant(const MeshHierarchy& hier, int j, const Vector& v, const SkeletonSpace& s,
                           ProlongationKind kind)
{
    const Mesh& fine = hier.finest();
    const Mesh& coarse = *hier.levels[j];
    const auto num = interior_vertex_numbering(coarse);
    const ElementBasis leg = edge_basis(s.degree());
    const QuadratureRule r = quadrature(QuadDomain::edge, 4);
    Vector out = Vector::Zero(s.dof_count());
    for (Index f : s.interior_faces()) {
        Index t = fine.faces()[f].tri[0];
        for (int l = hier.finest_level(); l > j; --l)
            t = hier.parents[l - 1][t];
        const Point a = fine.vertices()[fine.faces()[f].v[0]], b = fine.vertices()[fine.faces()[f].v[1]];
        for (std::size_t q = 0; q < r.size(); ++q) {
            const double x = r.points[q][0];
            const Point p{a.x + x * (b.x - a.x), a.y + x * (b.y - a.y)};
            const auto lam = barycentric(coarse, t, p);
            double val = 0.0;
            for (int i = 0; i < 3; ++i) {
                const Index n = num[coarse.triangles()[t][i]];
                if (n >= 0)
                    val += lam[i] * v[n];
            }
            const Vector l = leg.edge_values(x);
            const Index modes = kind == ProlongationKind::face_mean ? 1 : s.modes();
            for (Index m = 0; m < modes; ++m)
                out[s.face_offset(f) + m] += r.weights[q] * val * l[m];
        }
    }
    return out;
}

double
max_quotient(const DenseMatrix& a, const DenseMatrix& b)
{
    return dense_eig_extents(a, &b).lambda_max;
}

} // namespace

TEST(Pi, FaceRows)
{
    const MeshHierarchy h = square(2);
    const Mesh& m = h.finest();
    const auto num = interior_vertex_numbering(m);
    const SkeletonSpace s0(h.levels.back(), 0), s1(h.levels.back(), 1);
    const SparseMatrix p0 = build_pi(s0, ProlongationKind::face_l2);
    const SparseMatrix l2 = build_pi(s1, ProlongationKind::face_l2);
    const SparseMatrix mean = build_pi(s1, ProlongationKind::face_mean);
    int checked = 0;
    for (Index f : s0.interior_faces()) {
        const Index a = num[m.faces()[f].v[0]], b = num[m.faces()[f].v[1]];
        if (a < 0 || b < 0)
            continue;
        ++checked;
        EXPECT_EQ(p0.coeff(s0.face_offset(f), a), 0.5);
        EXPECT_EQ(p0.coeff(s0.face_offset(f), b), 0.5);
        // Hat at the lower endpoint a restricted to the face is 1 - t.
        const Index o = s1.face_offset(f);
        EXPECT_EQ(l2.coeff(o, a), 0.5);
        EXPECT_NEAR(l2.coeff(o + 1, a), -std::sqrt(3.0) / 6.0, 1e-15);
        EXPECT_NEAR(l2.coeff(o + 1, b), std::sqrt(3.0) / 6.0, 1e-15);
        EXPECT_EQ(mean.coeff(o, a), 0.5);
        EXPECT_EQ(mean.coeff(o + 1, a), 0.0);
    }
    EXPECT_GT(checked, 0);
}

TEST(Pi, KZeroKindsCoincide)
{
    for (DomainKind kind : {DomainKind::square(), DomainKind::crack(), DomainKind::graded()}) {
        const SkeletonSpace s(build_hierarchy(kind, 2).levels.back(), 0);
        EXPECT_EQ(build_pi(s, ProlongationKind::face_mean).to_dense(), build_pi(s, ProlongationKind::face_l2).to_dense());
    }
}

TEST(Pi, AdjointIdentity)
{
    std::mt19937 rng(21);
    for (int k : {0, 1}) {
        const SkeletonSpace s(square(3).levels.back(), k);
        const SparseMatrix pi = build_pi(s, ProlongationKind::face_l2);
        const SparseMatrix g = skeleton_mass(s);
        const SparseMatrix m1 = p1_mass(s.mesh());
        const Vector mu = random_vector(s.dof_count(), rng), v = random_vector(pi.cols(), rng);
        Vector r;
        pi.multiply_transpose(g * mu, r);
        const Vector pit = sparse_cholesky_solve(m1, r);
        EXPECT_NEAR(mu.dot(g * (pi * v)), pit.dot(m1 * v), 1e-12 * std::abs(mu.dot(g * (pi * v))));
    }
}

TEST(LevelMaps, ChainMatchesDirectEvaluation)
{
    const MeshHierarchy h = square(3);
    for (int k : {0, 1})
        for (ProlongationKind kind : {ProlongationKind::face_mean, ProlongationKind::face_l2}) {
            const SkeletonSpace s(h.levels.back(), k);
            const LevelMaps maps = build_level_maps(h, s, kind);
            EXPECT_EQ(maps.finest_level(), 3);
            std::mt19937 rng(5);
            for (int j = 0; j <= 3; ++j) {
                const Index n = static_cast<Index>(maps.finest_level() == j ? maps.pi.cols()
                                                                             : maps.prolong[j].cols());
                const Vector v = random_vector(n, rng);
                const Vector direct = project_coarse_interpolant(h, j, v, s, kind);
                EXPECT_LE((maps.apply(j, v) - direct).cwiseAbs().maxCoeff(), 1e-12);
            }
        }
}

TEST(LevelMaps, TransposeIsAdjoint)
{
    const MeshHierarchy h = square(3);
    const SkeletonSpace s(h.levels.back(), 1);
    const LevelMaps maps = build_level_maps(h, s, ProlongationKind::face_l2);
    std::mt19937 rng(6);
    for (int j = 0; j <= 3; ++j) {
        const Vector x = random_vector(s.dof_count(), rng);
        const Vector t = maps.apply_transpose(j, x);
        const Vector v = random_vector(t.size(), rng);
        EXPECT_NEAR(x.dot(maps.apply(j, v)), t.dot(v), 1e-12 * std::max(1.0, std::abs(t.dot(v))));
    }
}

TEST(LevelMaps, CoarseColumnLocality)
{
    const MeshHierarchy h = square(3);
    const SkeletonSpace s(h.levels.back(), 0);
    const LevelMaps maps = build_level_maps(h, s, ProlongationKind::face_l2);
    const Mesh& c = *h.levels[0];
    const Mesh& f = h.finest();
    // Only interior vertex of T_0 is the centre; its patch is the whole square,
    // so check level 1 instead: faces touched lie within distance h_1 of the node.
    const Mesh& c1 = *h.levels[1];
    const auto num = interior_vertex_numbering(c1);
    for (Index v = 0; v < c1.num_vertices(); ++v) {
        if (num[v] < 0)
            continue;
        Vector e = Vector::Zero(maps.prolong[1].cols());
        e[num[v]] = 1.0;
        const Vector col = maps.apply(1, e);
        const Point p = c1.vertices()[v];
        for (Index face : s.interior_faces()) {
            if (col[s.face_offset(face)] == 0.0)
                continue;
            for (Index w : f.faces()[face].v) {
                const Point q = f.vertices()[w];
                EXPECT_LE(std::max(std::abs(q.x - p.x), std::abs(q.y - p.y)), c1.h_max() + 1e-14);
            }
        }
    }
    EXPECT_EQ(c.num_vertices(), 5);
}

TEST(LevelMaps, RequiresFinestSpace)
{
    const MeshHierarchy h = square(2);
    const SkeletonSpace s(h.levels[1], 0);
    EXPECT_THROW(build_level_maps(h, s, ProlongationKind::face_l2), StructuralError);
}

TEST(NodalGram, Blocks)
{
    const MeshHierarchy h = square(1);
    const SkeletonSpace s0(h.levels.back(), 0), s1(h.levels.back(), 1), s2(h.levels.back(), 2);
    EXPECT_EQ(nodal_gram(s0).to_dense(), DenseMatrix::Identity(s0.dof_count(), s0.dof_count()));
    const DenseMatrix g1 = nodal_gram(s1).to_dense();
    const Index o = s1.face_offset(s1.interior_faces()[0]);
    EXPECT_NEAR(g1(o, o), 0.5, 1e-15);
    EXPECT_NEAR(g1(o + 1, o + 1), 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(g1(o, o + 1), 0.0, 1e-15);
    const SparseMatrix g2 = nodal_gram(s2);
    EXPECT_TRUE(g2.symmetric());
    EXPECT_GT(dense_eig_extents(g2).lambda_min, 0.0);
}

TEST(Bpx, SingleLevelDense)
{
    const MeshHierarchy h = square(0);
    const SkeletonSpace s(h.levels.back(), 0);
    const BpxPreconditioner b = make_bpx(h, s, ProlongationKind::face_l2);
    const DenseMatrix pi = build_pi(s, ProlongationKind::face_l2).to_dense();
    const DenseMatrix expect = DenseMatrix::Identity(4, 4) + pi * pi.transpose();
    EXPECT_LE((b.as_operator().to_dense() - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Bpx, MultilevelDense)
{
    const MeshHierarchy h = square(2);
    const SkeletonSpace s(h.levels.back(), 1);
    const LevelMaps maps = build_level_maps(h, s, ProlongationKind::face_l2);
    DenseMatrix expect = nodal_gram(s).to_dense();
    const DenseMatrix pi = maps.pi.to_dense();
    DenseMatrix chain = pi;
    expect += chain * chain.transpose();
    for (int j = 1; j >= 0; --j) {
        chain = chain * maps.prolong[j].to_dense();
        expect += chain * chain.transpose();
    }
    const DenseMatrix b = make_bpx(h, s, ProlongationKind::face_l2).as_operator().to_dense();
    EXPECT_LE((b - expect).cwiseAbs().maxCoeff(), 1e-13);
    const DenseMatrix legendre =
        make_bpx(h, s, ProlongationKind::face_l2, DiagonalTerm::legendre).as_operator().to_dense();
    EXPECT_LE((legendre - (expect - nodal_gram(s).to_dense() + DenseMatrix::Identity(b.rows(), b.cols())))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-13);
}

TEST(Bpx, SymmetryProbe)
{
    const MeshHierarchy h = square(3);
    const SkeletonSpace s(h.levels.back(), 1);
    const BpxPreconditioner b = make_bpx(h, s, ProlongationKind::face_l2);
    std::mt19937 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector x = random_vector(s.dof_count(), rng), y = random_vector(s.dof_count(), rng);
        const double xy = x.dot(apply_bpx(b, y)), yx = y.dot(apply_bpx(b, x));
        EXPECT_NEAR(xy, yx, 1e-12 * std::abs(xy));
    }
}

TEST(Bpx, ConditionBounded)
{
    const MethodSpec spec = MethodSpec::make(MethodFamily::hdg3, 0);
    std::vector<double> kappa;
    for (int level = 1; level <= 4; ++level) {
        const MeshHierarchy h = square(level);
        const SkeletonSpace s(h.levels.back(), 0);
        const SparseMatrix d = assemble_schur(s, spec).d;
        kappa.push_back(dense_preconditioned_extents(make_bpx(h, s, ProlongationKind::face_l2).as_operator(), d).cond());
    }
    EXPECT_LE(kappa[3], 1.25 * kappa[2]);
    EXPECT_LT(kappa[3], 20.0);
}

TEST(Smoother, JacobiOnIdentity)
{
    const Vector x = Vector::LinSpaced(5, 1.0, 5.0);
    EXPECT_EQ(smoother_apply(SmootherKind::jacobi, identity_matrix(5), x), x);
    EXPECT_EQ(smoother_apply(SmootherKind::richardson, identity_matrix(5), x), x);
}

TEST(Smoother, SgsMatchesDenseFormula)
{
    const SkeletonSpace s(square(2).levels.back(), 1);
    const SparseMatrix d = assemble_schur(s, MethodSpec::make(MethodFamily::hdg3, 1)).d;
    const DenseMatrix a = d.to_dense();
    const DenseMatrix ld = a.triangularView<Eigen::Lower>();
    const DenseMatrix delta = a.diagonal().asDiagonal();
    const DenseMatrix expect = ld.inverse() * delta * ld.transpose().inverse();
    std::mt19937 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        const Vector x = random_vector(s.dof_count(), rng);
        EXPECT_LE((smoother_apply(SmootherKind::sgs, d, x) - expect * x).norm(), 1e-12 * (expect * x).norm());
    }
    const LinearOperator op(d.rows(), [&](const Vector& x, Vector& y) { y = smoother_apply(SmootherKind::sgs, d, x); });
    const DenseMatrix sd = op.to_dense();
    EXPECT_LE((sd - sd.transpose()).cwiseAbs().maxCoeff(), 1e-12 * sd.cwiseAbs().maxCoeff());
}

TEST(Smoother, RejectsNonPositiveDiagonal)
{
    const SparseMatrix d = diagonal_matrix((Vector(2) << 1.0, 0.0).finished());
    EXPECT_THROW(smoother_apply(SmootherKind::jacobi, d, Vector::Ones(2)), NotSpdError);
    EXPECT_THROW(smoother_apply(SmootherKind::sgs, d, Vector::Ones(2)), NotSpdError);
}

TEST(Smoother, RichardsonBand)
{
    for (int k : {0, 1}) {
        std::vector<EigExtents> band;
        for (int level = 2; level <= 4; ++level) {
            const SkeletonSpace s(square(level).levels.back(), k);
            const double h = s.mesh().h_max();
            const DenseMatrix sinv = nodal_gram(s).to_dense().inverse();
            const DenseMatrix gh = gram_matrices(s).g_h.to_dense() / (h * h);
            band.push_back(dense_eig_extents(sinv, &gh));
        }
        for (std::size_t i = 1; i < band.size(); ++i) {
            EXPECT_NEAR(band[i].lambda_min / band[i - 1].lambda_min, 1.0, 0.1) << "k=" << k;
            EXPECT_NEAR(band[i].lambda_max / band[i - 1].lambda_max, 1.0, 0.1) << "k=" << k;
        }
    }
}

TEST(Aux, ZeroTransferLeavesSmoother)
{
    const MeshHierarchy h = square(2);
    const SkeletonSpace s(h.levels.back(), 0);
    auto d = std::make_shared<const SparseMatrix>(assemble_schur(s, MethodSpec::make(MethodFamily::hdg3, 0)).d);
    const SparseMatrix a = p1_stiffness(s.mesh(), {});
    const SparseMatrix zero(s.dof_count(), a.rows());
    const AuxPreconditioner p(d, SmootherKind::sgs, zero, CoarseKind::exact, a);
    std::mt19937 rng(2);
    const Vector x = random_vector(s.dof_count(), rng);
    EXPECT_LE((apply_aux(p, x) - smoother_apply(SmootherKind::sgs, *d, x)).norm(), 1e-14 * x.norm());
}

TEST(Aux, SymmetricPositive)
{
    const MeshHierarchy h = build_hierarchy(DomainKind::graded(), 3);
    const SkeletonSpace s(h.levels.back(), 1);
    const MethodSpec spec = MethodSpec::make(MethodFamily::hdg3, 1, DomainKind::graded());
    auto d = std::make_shared<const SparseMatrix>(assemble_schur(s, spec).d);
    for (CoarseKind coarse : {CoarseKind::exact, CoarseKind::bpx}) {
        ExperimentConfig cfg;
        cfg.domain = DomainKind::graded();
        cfg.k = 1;
        cfg.preconditioner = PreconditionerKind::aux;
        cfg.smoother = SmootherKind::sgs;
        cfg.coarse = coarse;
        const DenseMatrix b = build_preconditioner(cfg, h, s, d).to_dense();
        EXPECT_LE((b - b.transpose()).cwiseAbs().maxCoeff(), 1e-12 * b.cwiseAbs().maxCoeff());
        EXPECT_GT(Eigen::SelfAdjointEigenSolver<DenseMatrix>(b).eigenvalues().minCoeff(), 0.0);
    }
}

TEST(Aux, GradedIterations)
{
    const auto rows = run_experiment(
        parse_config("domain=graded method=hdg3 k=0 levels=5 preconditioner=aux smoother=sgs coarse=exact"));
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].iterations, 14, 6);
}

TEST(Ph, ConstantReproducedAwayFromBoundary)
{
    const SkeletonSpace s(square(3).levels.back(), 1);
    const Mesh& m = s.mesh();
    Vector mu = Vector::Zero(s.dof_count());
    for (Index f : s.interior_faces())
        mu[s.face_offset(f)] = 2.0;
    const Vector v = build_ph(s) * mu;
    const auto num = interior_vertex_numbering(m);
    for (Index i = 0; i < m.num_vertices(); ++i) {
        const Point p = m.vertices()[i];
        if (num[i] >= 0 && std::min({p.x, 1 - p.x, p.y, 1 - p.y}) > m.h_max())
            EXPECT_NEAR(v[num[i]], 2.0, 1e-14);
    }
}

TEST(Ph, Locality)
{
    const SkeletonSpace s(square(3).levels.back(), 0);
    const Mesh& m = s.mesh();
    const SparseMatrix ph = build_ph(s);
    const auto num = interior_vertex_numbering(m);
    const Index t = 20;
    Vector mu = Vector::Zero(s.dof_count());
    for (const TraceDof& d : s.element_dofs(t))
        if (d.index >= 0)
            mu[d.index] = 1.0;
    const Vector v = ph * mu;
    // Nonzeros only at vertices of triangles sharing a face with t (or t itself).
    std::vector<bool> allowed(m.num_vertices(), false);
    for (Index f : m.triangle_faces()[t])
        for (Index tt : m.faces()[f].tri)
            if (tt >= 0)
                for (Index w : m.triangles()[tt])
                    allowed[w] = true;
    for (Index i = 0; i < m.num_vertices(); ++i)
        if (num[i] >= 0 && v[num[i]] != 0.0)
            EXPECT_TRUE(allowed[i]);
}

TEST(Ph, Stability)
{
    std::vector<double> h1, rest;
    for (int level = 1; level <= 3; ++level) {
        const SkeletonSpace s(square(level).levels.back(), 0);
        const DenseMatrix ph = build_ph(s).to_dense();
        const DenseMatrix gt = gram_matrices(s).g_triple.to_dense();
        const DenseMatrix a = p1_stiffness(s.mesh(), {}).to_dense();
        h1.push_back(max_quotient(ph.transpose() * a * ph, gt));
    }
    EXPECT_LE(h1[2], 1.10 * h1[1]);
}
