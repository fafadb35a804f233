#include "skelpre/precond.hpp"

#include <cmath>

#include "skelpre/polybasis.hpp"

namespace skelpre {

std::string
to_string(ProlongationKind k)
{
    return k == ProlongationKind::face_mean ? "face_mean" : "face_l2";
}

ProlongationKind
prolongation_from_string(const std::string& s)
{
    if (s == "face_mean" || s == "p1")
        return ProlongationKind::face_mean;
    if (s == "face_l2" || s == "p2")
        return ProlongationKind::face_l2;
    throw Error("unknown prolongation '" + s + "'");
}

std::string
to_string(SmootherKind k)
{
    switch (k) {
    case SmootherKind::jacobi:
        return "jacobi";
    case SmootherKind::sgs:
        return "sgs";
    case SmootherKind::richardson:
        return "richardson";
    }
    return "unknown";
}

SmootherKind
smoother_from_string(const std::string& s)
{
    for (auto k : {SmootherKind::jacobi, SmootherKind::sgs, SmootherKind::richardson})
        if (to_string(k) == s)
            return k;
    throw Error("unknown smoother '" + s + "'");
}

std::string
to_string(CoarseKind k)
{
    return k == CoarseKind::exact ? "exact" : "bpx";
}

CoarseKind
coarse_from_string(const std::string& s)
{
    if (s == "exact")
        return CoarseKind::exact;
    if (s == "bpx")
        return CoarseKind::bpx;
    throw Error("unknown coarse solver '" + s + "'");
}

SparseMatrix
build_pi(const SkeletonSpace& s, ProlongationKind kind)
{
    const Mesh& m = s.mesh();
    const auto num = interior_vertex_numbering(m);
    Index nv = 0;
    for (Index i : num)
        nv += i >= 0;
    const double slope = std::sqrt(3.0) / 6.0;
    std::vector<Triplet> trips;
    for (Index f : s.interior_faces()) {
        const Index a = num[m.faces()[f].v[0]];
        const Index b = num[m.faces()[f].v[1]];
        const Index off = s.face_offset(f);
        if (a >= 0)
            trips.push_back({off, a, 0.5});
        if (b >= 0)
            trips.push_back({off, b, 0.5});
        if (kind == ProlongationKind::face_l2 && s.degree() >= 1) {
            if (a >= 0)
                trips.push_back({off + 1, a, -slope});
            if (b >= 0)
                trips.push_back({off + 1, b, slope});
        }
    }
    return csr_from_triplets(s.dof_count(), nv, trips);
}

Vector
LevelMaps::apply(int j, const Vector& v) const
{
    Vector w = v;
    for (int l = j; l < finest_level(); ++l)
        w = prolong[l] * w;
    return pi * w;
}

Vector
LevelMaps::apply_transpose(int j, const Vector& x) const
{
    Vector w;
    pi.multiply_transpose(x, w);
    for (int l = finest_level() - 1; l >= j; --l) {
        Vector c;
        prolong[l].multiply_transpose(w, c);
        w = std::move(c);
    }
    return w;
}

LevelMaps
build_level_maps(const MeshHierarchy& hier, const SkeletonSpace& s, ProlongationKind kind)
{
    if (hier.levels.empty() || hier.levels.back().get() != s.mesh_ptr().get())
        throw StructuralError("build_level_maps: skeleton space is not on the finest hierarchy level");
    LevelMaps maps;
    maps.pi = build_pi(s, kind);
    for (int j = 0; j < hier.finest_level(); ++j)
        maps.prolong.push_back(p1_prolongation(*hier.levels[j], *hier.levels[j + 1], hier.parents[j]));
    for (const auto& m : hier.levels)
        maps.h.push_back(m->h_max());
    return maps;
}

SparseMatrix
nodal_gram(const SkeletonSpace& s)
{
    const int k = s.degree();
    const Index nm = s.modes();
    // T(n, a) = int_0^1 L_n phi_a for Lagrange phi_a at t_a = a / k.
    DenseMatrix t = DenseMatrix::Ones(1, 1);
    if (k > 0) {
        const QuadratureRule rule = quadrature(QuadDomain::edge, 2 * k);
        const ElementBasis leg = edge_basis(k);
        t = DenseMatrix::Zero(nm, nm);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double x = rule.points[q][0];
            const Vector l = leg.edge_values(x);
            for (int a = 0; a <= k; ++a) {
                double phi = 1.0;
                for (int b = 0; b <= k; ++b)
                    if (b != a)
                        phi *= (x - double(b) / k) / (double(a - b) / k);
                t.col(a) += rule.weights[q] * phi * l;
            }
        }
    }
    const DenseMatrix g = t * t.transpose();
    std::vector<Triplet> trips;
    for (Index f : s.interior_faces())
        for (Index i = 0; i < nm; ++i)
            for (Index j = 0; j < nm; ++j)
                if (g(i, j) != 0.0)
                    trips.push_back({s.face_offset(f) + i, s.face_offset(f) + j, g(i, j)});
    return csr_from_triplets(s.dof_count(), s.dof_count(), trips);
}

BpxPreconditioner::BpxPreconditioner(std::shared_ptr<const LevelMaps> maps, SparseMatrix diagonal)
  : maps_(std::move(maps)), diag_(std::make_shared<const SparseMatrix>(std::move(diagonal)))
{
    if (diag_->rows() != maps_->pi.rows())
        throw StructuralError("BpxPreconditioner: diagonal term does not match the skeleton dimension");
}

BpxPreconditioner::BpxPreconditioner(std::shared_ptr<const LevelMaps> maps)
  : BpxPreconditioner(maps, identity_matrix(maps->pi.rows()))
{}

BpxPreconditioner
make_bpx(const MeshHierarchy& hier, const SkeletonSpace& s, ProlongationKind kind, DiagonalTerm term)
{
    auto maps = std::make_shared<const LevelMaps>(build_level_maps(hier, s, kind));
    if (term == DiagonalTerm::legendre)
        return BpxPreconditioner(std::move(maps));
    return BpxPreconditioner(std::move(maps), nodal_gram(s));
}

void
BpxPreconditioner::apply_p1(const std::vector<SparseMatrix>& prolong, const Vector& x, Vector& y)
{
    // r_J = x, r_j = P_j^T r_{j+1}; then z_0 = r_0, z_{j+1} = P_j z_j + r_{j+1}.
    const int levels = static_cast<int>(prolong.size());
    std::vector<Vector> r(static_cast<std::size_t>(levels) + 1);
    r[levels] = x;
    for (int j = levels - 1; j >= 0; --j)
        prolong[j].multiply_transpose(r[j + 1], r[j]);
    Vector z = r[0];
    for (int j = 0; j < levels; ++j) {
        Vector up;
        prolong[j].multiply(z, up);
        z = up + r[j + 1];
    }
    y = std::move(z);
}

void
BpxPreconditioner::apply(const Vector& x, Vector& y) const
{
    Vector r;
    maps_->pi.multiply_transpose(x, r);
    Vector z;
    apply_p1(maps_->prolong, r, z);
    maps_->pi.multiply(z, y);
    y += *diag_ * x;
}

LinearOperator
BpxPreconditioner::as_operator() const
{
    auto self = std::make_shared<BpxPreconditioner>(*this);
    return LinearOperator(dimension(), [self](const Vector& x, Vector& y) { self->apply(x, y); });
}

Vector
apply_bpx(const BpxPreconditioner& b, const Vector& x)
{
    Vector y;
    b.apply(x, y);
    return y;
}

Vector
smoother_apply(SmootherKind kind, const SparseMatrix& d, const Vector& x, const SparseMatrix* gram)
{
    if (kind == SmootherKind::richardson)
        return gram ? Vector(*gram * x) : x;
    const Vector diag = d.diagonal();
    for (Index i = 0; i < diag.size(); ++i)
        if (!(diag[i] > 0.0))
            throw NotSpdError("smoother: non-positive diagonal entry at row " + std::to_string(i));
    if (kind == SmootherKind::jacobi)
        return x.cwiseQuotient(diag);

    const auto rp = d.row_ptr();
    const auto ci = d.col_idx();
    const auto va = d.values();
    const Index n = d.rows();
    // (L + Delta)^T z = x: backward sweep using the upper triangle (D symmetric).
    Vector z = x;
    for (Index i = n - 1; i >= 0; --i) {
        double s = z[i];
        for (Index p = rp[i]; p < rp[i + 1]; ++p)
            if (ci[p] > i)
                s -= va[p] * z[ci[p]];
        z[i] = s / diag[i];
    }
    z = z.cwiseProduct(diag);
    // (L + Delta) y = Delta z: forward sweep.
    for (Index i = 0; i < n; ++i) {
        double s = z[i];
        for (Index p = rp[i]; p < rp[i + 1]; ++p)
            if (ci[p] < i)
                s -= va[p] * z[ci[p]];
        z[i] = s / diag[i];
    }
    return z;
}

namespace {

template <typename Kernel>
SparseMatrix
p1_assemble(const Mesh& m, Kernel&& kernel)
{
    const auto num = interior_vertex_numbering(m);
    Index nv = 0;
    for (Index i : num)
        nv += i >= 0;
    std::vector<Triplet> trips;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const Eigen::Matrix3d local = kernel(t);
        const auto& tri = m.triangles()[t];
        for (int i = 0; i < 3; ++i) {
            if (num[tri[i]] < 0)
                continue;
            for (int j = 0; j < 3; ++j)
                if (num[tri[j]] >= 0)
                    trips.push_back({num[tri[i]], num[tri[j]], local(i, j)});
        }
    }
    return csr_from_triplets(nv, nv, trips);
}

} // namespace

SparseMatrix
p1_stiffness(const Mesh& m, const DiffusionFn& a)
{
    return p1_assemble(m, [&](Index t) {
        const auto p = m.triangle_points(t);
        const double area = m.area(t);
        // Gradients of the barycentric coordinates: rotated opposite edges.
        Eigen::Matrix<double, 2, 3> g;
        for (int i = 0; i < 3; ++i) {
            const Point& b = p[(i + 1) % 3];
            const Point& c = p[(i + 2) % 3];
            g.col(i) << (b.y - c.y) / (2.0 * area), (c.x - b.x) / (2.0 * area);
        }
        const Tensor2 at = a ? a(m.centroid(t)) : Tensor2::Identity();
        return Eigen::Matrix3d(area * g.transpose() * at * g);
    });
}

SparseMatrix
p1_mass(const Mesh& m)
{
    return p1_assemble(m, [&](Index t) {
        Eigen::Matrix3d local = Eigen::Matrix3d::Constant(1.0);
        local.diagonal().setConstant(2.0);
        return Eigen::Matrix3d(local * m.area(t) / 12.0);
    });
}

SparseMatrix
skeleton_mass(const SkeletonSpace& s)
{
    const Mesh& m = s.mesh();
    Vector d(s.dof_count());
    for (Index f : s.interior_faces()) {
        const auto& face = m.faces()[f];
        const Point& a = m.vertices()[face.v[0]];
        const Point& b = m.vertices()[face.v[1]];
        d.segment(s.face_offset(f), s.modes()).setConstant(std::hypot(b.x - a.x, b.y - a.y));
    }
    return diagonal_matrix(d);
}

SparseMatrix
build_ph(const SkeletonSpace& s)
{
    const Mesh& m = s.mesh();
    const auto num = interior_vertex_numbering(m);
    Index nv = 0;
    for (Index i : num)
        nv += i >= 0;
    std::vector<Index> patch(static_cast<std::size_t>(m.num_vertices()), 0);
    for (const auto& tri : m.triangles())
        for (Index v : tri)
            ++patch[v];
    std::vector<Triplet> trips;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles()[t];
        for (Index v : tri) {
            if (num[v] < 0)
                continue;
            for (int i = 0; i < 3; ++i) {
                const Index off = s.face_offset(m.triangle_faces()[t][i]);
                if (off >= 0)
                    trips.push_back({num[v], off, 1.0 / (3.0 * patch[v])});
            }
        }
    }
    return csr_from_triplets(nv, s.dof_count(), trips);
}

AuxPreconditioner::AuxPreconditioner(std::shared_ptr<const SparseMatrix> d, SmootherKind smoother, SparseMatrix pi,
                                     CoarseKind coarse, const SparseMatrix& p1_matrix,
                                     std::vector<SparseMatrix> p1_prolong, std::optional<SparseMatrix> richardson_gram)
  : d_(std::move(d)), smoother_(smoother), pi_(std::move(pi)), coarse_(coarse), prolong_(std::move(p1_prolong)),
    gram_(std::move(richardson_gram))
{
    if (pi_.rows() != d_->rows())
        throw StructuralError("AuxPreconditioner: Pi_h rows differ from the skeleton dimension");
    if (coarse_ == CoarseKind::exact && pi_.cols() > 0)
        chol_ = std::make_shared<const SparseCholesky>(p1_matrix);
}

void
AuxPreconditioner::apply(const Vector& x, Vector& y) const
{
    y = smoother_apply(smoother_, *d_, x, gram_ ? &*gram_ : nullptr);
    if (pi_.cols() == 0)
        return;
    Vector r;
    pi_.multiply_transpose(x, r);
    Vector z;
    if (coarse_ == CoarseKind::exact)
        z = chol_->solve(r);
    else
        BpxPreconditioner::apply_p1(prolong_, r, z);
    Vector up;
    pi_.multiply(z, up);
    y += up;
}

LinearOperator
AuxPreconditioner::as_operator() const
{
    auto self = std::make_shared<AuxPreconditioner>(*this);
    return LinearOperator(dimension(), [self](const Vector& x, Vector& y) { self->apply(x, y); });
}

Vector
apply_aux(const AuxPreconditioner& p, const Vector& x)
{
    Vector y;
    p.apply(x, y);
    return y;
}

} // namespace skelpre
