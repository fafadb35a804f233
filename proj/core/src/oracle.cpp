#include "skelpre/oracle.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SparseLU>

#include "skelpre/polybasis.hpp"
#include "skelpre/precond.hpp"

namespace skelpre {

namespace {

double
legendre(int n, double t)
{
    switch (n) {
    case 0:
        return 1.0;
    case 1:
        return std::sqrt(3.0) * (2.0 * t - 1.0);
    case 2:
        return std::sqrt(5.0) * (6.0 * t * t - 6.0 * t + 1.0);
    }
    throw UnsupportedDegreeError("oracle: edge degree above 2");
}

double
ipow(double x, int n)
{
    double r = 1.0;
    for (int i = 0; i < n; ++i)
        r *= x;
    return r;
}

// Scaled monomial spaces on one physical triangle.
struct LocalSpaces
{
    Point c;
    double h;
    std::vector<std::array<int, 2>> v_exp; // V = P_m
    std::vector<std::array<int, 2>> w_exp; // [P_k]^2 components
    std::vector<std::array<int, 2>> rt_exp; // homogeneous degree k for x * p

    Index nv() const { return static_cast<Index>(v_exp.size()); }
    Index nw() const { return static_cast<Index>(2 * w_exp.size() + rt_exp.size()); }

    double v(Index j, const Point& p) const
    {
        const double xi = (p.x - c.x) / h, eta = (p.y - c.y) / h;
        return ipow(xi, v_exp[j][0]) * ipow(eta, v_exp[j][1]);
    }

    Eigen::Vector2d w(Index i, const Point& p) const
    {
        const double xi = (p.x - c.x) / h, eta = (p.y - c.y) / h;
        const Index nw2 = static_cast<Index>(w_exp.size());
        if (i < 2 * nw2) {
            const auto& e = w_exp[i % nw2];
            const double val = ipow(xi, e[0]) * ipow(eta, e[1]);
            return i < nw2 ? Eigen::Vector2d(val, 0.0) : Eigen::Vector2d(0.0, val);
        }
        const auto& e = rt_exp[i - 2 * nw2];
        const double val = ipow(xi, e[0]) * ipow(eta, e[1]);
        return Eigen::Vector2d(xi * val, eta * val);
    }

    double div_w(Index i, const Point& p) const
    {
        const double xi = (p.x - c.x) / h, eta = (p.y - c.y) / h;
        const Index nw2 = static_cast<Index>(w_exp.size());
        if (i < 2 * nw2) {
            const auto& e = w_exp[i % nw2];
            const int a = e[0], b = e[1];
            if (i < nw2)
                return a > 0 ? a * ipow(xi, a - 1) * ipow(eta, b) / h : 0.0;
            return b > 0 ? b * ipow(xi, a) * ipow(eta, b - 1) / h : 0.0;
        }
        const auto& e = rt_exp[i - 2 * nw2];
        return (e[0] + e[1] + 2) * ipow(xi, e[0]) * ipow(eta, e[1]) / h;
    }
};

std::vector<std::array<int, 2>>
exps_upto(int n)
{
    std::vector<std::array<int, 2>> e;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; a + b <= n; ++b)
            e.push_back({a, b});
    return e;
}

LocalSpaces
local_spaces(const Mesh& m, Index t, const MethodSpec& spec)
{
    LocalSpaces ls;
    ls.c = m.centroid(t);
    ls.h = m.diameters()[t];
    const int k = spec.k;
    int vdeg = k;
    bool rt = false;
    switch (spec.family) {
    case MethodFamily::hdg1:
        rt = true;
        break;
    case MethodFamily::hdg2:
        vdeg = k - 1;
        break;
    case MethodFamily::hdg3:
        break;
    case MethodFamily::hdg4:
        vdeg = k + 1;
        break;
    default:
        throw IncompatibleMethodError("monolithic_hdg: " + to_string(spec.family) + " is not an HDG family");
    }
    ls.v_exp = exps_upto(vdeg);
    ls.w_exp = exps_upto(k);
    if (rt)
        for (int a = 0; a <= k; ++a)
            ls.rt_exp.push_back({a, k - a});
    return ls;
}

Point
map_point(const std::array<Point, 3>& v, double x, double y)
{
    return {v[0].x + (v[1].x - v[0].x) * x + (v[2].x - v[0].x) * y,
            v[0].y + (v[1].y - v[0].y) * x + (v[2].y - v[0].y) * y};
}

} // namespace

MonolithicResult
monolithic_hdg(const SkeletonSpace& s, const MethodSpec& spec, const SourceFn& f)
{
    const Mesh& m = s.mesh();
    if (m.num_triangles() > monolithic_element_cap)
        throw SizeCapError("monolithic_hdg: more than " + std::to_string(monolithic_element_cap) + " elements");
    if (spec.k > 2)
        throw UnsupportedDegreeError("monolithic_hdg: k above 2");
    spec.validate();
    const int k = spec.k;
    const Index modes = k + 1;

    std::vector<LocalSpaces> spaces;
    std::vector<Index> base;
    Index ni = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        spaces.push_back(local_spaces(m, t, spec));
        base.push_back(ni);
        ni += spaces.back().nw() + spaces.back().nv();
    }
    const Index nl = s.dof_count();
    const Index n = ni + nl;

    const QuadratureRule tri = quadrature(QuadDomain::triangle, std::min(max_quadrature_degree, 2 * k + 6));
    const QuadratureRule edge = quadrature(QuadDomain::edge, std::min(max_quadrature_degree, 2 * k + 6));
    const QuadratureRule load = quadrature(QuadDomain::triangle, max_quadrature_degree);

    std::vector<Triplet> trips;
    Vector g = Vector::Zero(n);
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const LocalSpaces& ls = spaces[t];
        const Index nw = ls.nw(), nv = ls.nv();
        const Index bs = base[t], bu = base[t] + nw;
        const auto v = m.triangle_points(t);
        const double det = 2.0 * m.area(t);
        const Tensor2 cinv = spec.tensor_at(m.centroid(t)).inverse();
        const double alpha = spec.penalty.value(m.diameters()[t]);

        DenseMatrix a = DenseMatrix::Zero(nw, nw), b = DenseMatrix::Zero(nw, nv);
        for (std::size_t q = 0; q < tri.size(); ++q) {
            const Point p = map_point(v, tri.points[q][0], tri.points[q][1]);
            const double w = tri.weights[q] * det;
            for (Index i = 0; i < nw; ++i) {
                const Eigen::Vector2d ti = ls.w(i, p);
                const double di = ls.div_w(i, p);
                for (Index j = 0; j < nw; ++j)
                    a(i, j) += w * ti.dot(cinv * ls.w(j, p));
                for (Index j = 0; j < nv; ++j)
                    b(i, j) += w * di * ls.v(j, p);
            }
        }
        DenseMatrix sp = DenseMatrix::Zero(nv, nv);
        for (const Index fi : m.triangle_faces()[t]) {
            const auto& face = m.faces()[fi];
            const Point pa = m.vertices()[face.v[0]], pb = m.vertices()[face.v[1]];
            const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
            Eigen::Vector2d nrm((pb.y - pa.y) / len, -(pb.x - pa.x) / len);
            const Point c = m.centroid(t);
            if (nrm.dot(Eigen::Vector2d(pa.x - c.x, pa.y - c.y)) < 0.0)
                nrm = -nrm;
            const Index off = s.face_offset(fi);
            DenseMatrix kf = DenseMatrix::Zero(modes, nv); // <v_j, L_n>_F
            DenseMatrix ef = DenseMatrix::Zero(nw, modes); // <L_n, tau_i . n>_F
            for (std::size_t q = 0; q < edge.size(); ++q) {
                const double tq = edge.points[q][0];
                const Point p{pa.x + tq * (pb.x - pa.x), pa.y + tq * (pb.y - pa.y)};
                const double w = edge.weights[q] * len;
                for (Index nn = 0; nn < modes; ++nn) {
                    const double l = legendre(static_cast<int>(nn), tq);
                    for (Index j = 0; j < nv; ++j)
                        kf(nn, j) += w * l * ls.v(j, p);
                    for (Index i = 0; i < nw; ++i)
                        ef(i, nn) += w * l * ls.w(i, p).dot(nrm);
                }
            }
            sp += alpha * kf.transpose() * kf / len;
            if (off < 0)
                continue;
            for (Index nn = 0; nn < modes; ++nn) {
                const Index col = ni + off + nn;
                for (Index i = 0; i < nw; ++i) {
                    trips.push_back({bs + i, col, -ef(i, nn)});
                    trips.push_back({col, bs + i, -ef(i, nn)});
                }
                for (Index j = 0; j < nv; ++j) {
                    trips.push_back({bu + j, col, alpha * kf(nn, j)});
                    trips.push_back({col, bu + j, alpha * kf(nn, j)});
                }
                trips.push_back({col, col, -alpha * len});
            }
        }
        for (Index i = 0; i < nw; ++i) {
            for (Index j = 0; j < nw; ++j)
                trips.push_back({bs + i, bs + j, a(i, j)});
            for (Index j = 0; j < nv; ++j) {
                trips.push_back({bs + i, bu + j, b(i, j)});
                trips.push_back({bu + j, bs + i, b(i, j)});
            }
        }
        for (Index i = 0; i < nv; ++i)
            for (Index j = 0; j < nv; ++j)
                trips.push_back({bu + i, bu + j, -sp(i, j)});
        if (f)
            for (std::size_t q = 0; q < load.size(); ++q) {
                const Point p = map_point(v, load.points[q][0], load.points[q][1]);
                const double w = load.weights[q] * det * f(p);
                for (Index j = 0; j < nv; ++j)
                    g[bu + j] -= w * ls.v(j, p);
            }
    }

    MonolithicResult res;
    res.full = csr_from_triplets(n, n, trips);

    const Eigen::SparseMatrix<double> full = res.full.to_eigen();
    const Eigen::SparseMatrix<double> mii = full.topLeftCorner(ni, ni);
    const DenseMatrix nil = DenseMatrix(full.block(0, ni, ni, nl));
    const DenseMatrix q = DenseMatrix(full.bottomRightCorner(nl, nl));
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(mii);
    if (lu.info() != Eigen::Success)
        throw IncompatibleMethodError("monolithic_hdg: singular interior block");
    const DenseMatrix x = lu.solve(nil);
    res.schur = -(q - nil.transpose() * x);
    res.schur = 0.5 * (res.schur + res.schur.transpose()).eval();
    const Vector xg = lu.solve(g.head(ni));
    res.rhs = nil.transpose() * xg;
    return res;
}

CrAssembly
cr_shape_assembly(const Mesh& m, const DiffusionFn& a, const SourceFn& f)
{
    std::vector<Index> dof(static_cast<std::size_t>(m.num_faces()), -1);
    Index n = 0;
    for (Index fi = 0; fi < m.num_faces(); ++fi)
        if (!m.faces()[fi].boundary)
            dof[fi] = n++;
    const QuadratureRule rule = quadrature(QuadDomain::triangle, 10);
    std::vector<Triplet> trips;
    Vector rhs = Vector::Zero(n);
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const auto v = m.triangle_points(t);
        const double area = m.area(t);
        // grad lambda_i = rot(v_{i+2} - v_{i+1}) / (2|T|), inward.
        Eigen::Matrix<double, 2, 3> gl;
        for (int i = 0; i < 3; ++i) {
            const Point& p = v[(i + 1) % 3];
            const Point& q = v[(i + 2) % 3];
            gl.col(i) << (p.y - q.y) / (2.0 * area), (q.x - p.x) / (2.0 * area);
        }
        const Tensor2 at = a ? a(m.centroid(t)) : Tensor2::Identity();
        const Eigen::Matrix3d local = 4.0 * area * gl.transpose() * at * gl;
        const auto& tf = m.triangle_faces()[t];
        for (int i = 0; i < 3; ++i) {
            if (dof[tf[i]] < 0)
                continue;
            for (int j = 0; j < 3; ++j)
                if (dof[tf[j]] >= 0)
                    trips.push_back({dof[tf[i]], dof[tf[j]], local(i, j)});
            if (f)
                for (std::size_t q = 0; q < rule.size(); ++q) {
                    const double x = rule.points[q][0], y = rule.points[q][1];
                    const double lam[3] = {1.0 - x - y, x, y};
                    rhs[dof[tf[i]]] += rule.weights[q] * 2.0 * area * f(map_point(v, x, y)) * (1.0 - 2.0 * lam[i]);
                }
        }
    }
    return {csr_from_triplets(n, n, trips), rhs};
}

ManufacturedCase
sine_case()
{
    using std::numbers::pi;
    return {"sin(pi x) sin(pi y)",
            [](const Point& p) { return std::sin(pi * p.x) * std::sin(pi * p.y); },
            [](const Point& p) { return 2.0 * pi * pi * std::sin(pi * p.x) * std::sin(pi * p.y); }};
}

ManufacturedCase
zero_case()
{
    return {"zero", [](const Point&) { return 0.0; }, [](const Point&) { return 0.0; }};
}

double
l2_error(const Mesh& m, const MethodSpec& spec, const InteriorSolution& sol,
         const std::function<double(const Point&)>& exact)
{
    const QuadratureRule rule = quadrature(QuadDomain::triangle, max_quadrature_degree);
    const bool cr = spec.family == MethodFamily::cr;
    const ElementBasis basis = triangle_basis(cr ? 0 : spec.interior_degree());
    std::vector<Vector> table;
    for (std::size_t q = 0; q < rule.size(); ++q)
        table.push_back(basis.values(rule.points[q][0], rule.points[q][1]));
    double sum = 0.0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const auto v = m.triangle_points(t);
        const double det = 2.0 * m.area(t);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double x = rule.points[q][0], y = rule.points[q][1];
            double uh;
            if (cr) {
                const double lam[3] = {1.0 - x - y, x, y};
                uh = 0.0;
                for (int i = 0; i < 3; ++i)
                    uh += sol.u[t][i] * (1.0 - 2.0 * lam[i]);
            } else
                uh = table[q].dot(sol.u[t]);
            const double e = uh - exact(map_point(v, x, y));
            sum += rule.weights[q] * det * e * e;
        }
    }
    return std::sqrt(sum);
}

std::vector<ConvergencePoint>
convergence_study(const ManufacturedCase& c, const MethodSpec& spec, const std::vector<int>& levels)
{
    std::vector<ConvergencePoint> out;
    for (int level : levels) {
        if (level < 0 || level > 6)
            throw Error("convergence_study: levels must lie in [0, 6]");
        const MeshHierarchy hier = build_hierarchy(DomainKind::square(), level);
        const SkeletonSpace s(hier.levels.back(), spec.k);
        const SchurSystem sys = assemble_schur(s, spec, c.f);
        const BpxPreconditioner bpx = make_bpx(hier, s, ProlongationKind::face_l2);
        PcgOptions opt;
        opt.reduction = 1e-10;
        const PcgResult r = pcg(LinearOperator::from_matrix(sys.d), bpx.as_operator(), sys.b,
                                Vector::Zero(s.dof_count()), opt);
        const InteriorSolution sol = recover_interior(s, spec, r.x, c.f);
        out.push_back({level, hier.finest().h_max(), l2_error(hier.finest(), spec, sol, c.u), r.report.iterations});
    }
    return out;
}

double
observed_rate(const std::vector<ConvergencePoint>& pts)
{
    const double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        const double x = std::log(p.h), y = std::log(p.l2_error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace skelpre
