#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "skelpre/methods.hpp"
#include "skelpre/polybasis.hpp"

namespace skelpre {

namespace {

constexpr double ref_vertex[3][2] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};

// Reference-element tables of V(T), W(T) and the edge basis at the
// quadrature points of one method/degree pair.
struct RefTables
{
    Index nv = 0, nw = 0, np = 0, modes = 0;
    bool rt = false;
    QuadratureRule tri, edge, load;

    DenseMatrix v_val;                // points x nV
    std::vector<DenseMatrix> rt_val;  // per point, nW x 2
    DenseMatrix rt_div;               // points x nW
    DenseMatrix p_val;                // points x nP
    std::vector<DenseMatrix> p_grad;  // per point, nP x 2
    std::array<DenseMatrix, 3> f_v;   // per face: edge points x nV
    std::array<std::vector<DenseMatrix>, 3> f_rt;
    std::array<DenseMatrix, 3> f_p;
    DenseMatrix f_eta;                // edge points x modes
    DenseMatrix load_v;               // load points x nV
};

RefTables
build_tables(const MethodSpec& spec)
{
    RefTables t;
    const int k = spec.k;
    const int vdeg = spec.interior_degree();
    t.rt = spec.uses_rt();
    t.modes = k + 1;
    const int exact = 2 * k + 3;
    t.tri = quadrature(QuadDomain::triangle, exact);
    t.edge = quadrature(QuadDomain::edge, exact);
    t.load = quadrature(QuadDomain::triangle, std::min(max_quadrature_degree, 2 * k + 8));

    const ElementBasis vb = triangle_basis(vdeg);
    const ElementBasis eb = edge_basis(k);
    std::unique_ptr<ElementBasis> wb = t.rt ? std::make_unique<ElementBasis>(rt_basis(k))
                                            : std::make_unique<ElementBasis>(triangle_basis(k));
    t.nv = vb.dimension();
    t.np = t.rt ? 0 : wb->dimension();
    t.nw = t.rt ? wb->dimension() : 2 * wb->dimension();

    auto fill_w = [&](double x, double y, std::vector<DenseMatrix>& rt_vals, DenseMatrix& p_vals, Index row,
                      std::vector<DenseMatrix>* grads) {
        if (t.rt)
            rt_vals.push_back(wb->vector_values(x, y));
        else {
            p_vals.row(row) = wb->values(x, y).transpose();
            if (grads)
                grads->push_back(wb->gradients(x, y));
        }
    };

    const Index nq = static_cast<Index>(t.tri.size());
    t.v_val.resize(nq, t.nv);
    t.rt_div.resize(t.rt ? nq : 0, t.nw);
    t.p_val.resize(t.rt ? 0 : nq, t.np);
    for (Index q = 0; q < nq; ++q) {
        const double x = t.tri.points[q][0], y = t.tri.points[q][1];
        t.v_val.row(q) = vb.values(x, y).transpose();
        fill_w(x, y, t.rt_val, t.p_val, q, &t.p_grad);
        if (t.rt)
            t.rt_div.row(q) = wb->divergences(x, y).transpose();
    }

    const Index ne = static_cast<Index>(t.edge.size());
    t.f_eta.resize(ne, t.modes);
    for (Index q = 0; q < ne; ++q)
        t.f_eta.row(q) = eb.edge_values(t.edge.points[q][0]).transpose();
    for (int i = 0; i < 3; ++i) {
        const double* a = ref_vertex[(i + 1) % 3];
        const double* b = ref_vertex[(i + 2) % 3];
        t.f_v[i].resize(ne, t.nv);
        t.f_p[i].resize(t.rt ? 0 : ne, t.np);
        for (Index q = 0; q < ne; ++q) {
            const double s = t.edge.points[q][0];
            const double x = a[0] + s * (b[0] - a[0]), y = a[1] + s * (b[1] - a[1]);
            t.f_v[i].row(q) = vb.values(x, y).transpose();
            fill_w(x, y, t.f_rt[i], t.f_p[i], q, nullptr);
        }
    }

    const Index nl = static_cast<Index>(t.load.size());
    t.load_v.resize(nl, t.nv);
    for (Index q = 0; q < nl; ++q)
        t.load_v.row(q) = vb.values(t.load.points[q][0], t.load.points[q][1]).transpose();
    return t;
}

const RefTables&
tables_for(const MethodSpec& spec)
{
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<RefTables>> cache;
    const std::pair<int, int> key{static_cast<int>(spec.family), spec.k};
    std::lock_guard lock(mutex);
    auto& slot = cache[key];
    if (!slot)
        slot = std::make_unique<RefTables>(build_tables(spec));
    return *slot;
}

// Physical W values (nW x 2) and divergences at one reference point.
void
physical_w(const RefTables& t, const ElementGeometry& g, const Eigen::Matrix2d& jinv, const DenseMatrix* rt_val,
           const Vector* rt_div, const Eigen::RowVectorXd* p_val, const DenseMatrix* p_grad, DenseMatrix& wv,
           Vector* wd)
{
    if (t.rt) {
        wv = (*rt_val) * g.jac.transpose() / g.det;
        if (wd)
            *wd = *rt_div / g.det;
        return;
    }
    wv.setZero(t.nw, 2);
    wv.block(0, 0, t.np, 1) = p_val->transpose();
    wv.block(t.np, 1, t.np, 1) = p_val->transpose();
    if (wd) {
        const DenseMatrix grad = (*p_grad) * jinv;
        wd->resize(t.nw);
        wd->head(t.np) = grad.col(0);
        wd->tail(t.np) = grad.col(1);
    }
}

struct Blocks
{
    DenseMatrix aw;   // (weight sigma, tau)
    DenseMatrix mass; // (sigma, tau)
    DenseMatrix b;    // (v_j, div tau_i)
    DenseMatrix e;    // <eta_m, tau_i . n>
    DenseMatrix kmat; // <v_j, eta_m>
    Vector hdiag;     // <eta_m, eta_m>
};

Blocks
element_blocks(const RefTables& t, const ElementGeometry& g, const Tensor2& weight)
{
    const Index nl = 3 * t.modes;
    Blocks bl;
    bl.aw = DenseMatrix::Zero(t.nw, t.nw);
    bl.mass = DenseMatrix::Zero(t.nw, t.nw);
    bl.b = DenseMatrix::Zero(t.nw, t.nv);
    bl.e = DenseMatrix::Zero(t.nw, nl);
    bl.kmat = DenseMatrix::Zero(nl, t.nv);
    bl.hdiag = Vector::Zero(nl);
    const Eigen::Matrix2d jinv = g.jac.inverse();

    DenseMatrix wv;
    Vector wd;
    for (std::size_t q = 0; q < t.tri.size(); ++q) {
        const double w = t.tri.weights[q] * g.det;
        Vector rd;
        Eigen::RowVectorXd pv;
        if (t.rt)
            rd = t.rt_div.row(q).transpose();
        else
            pv = t.p_val.row(q);
        physical_w(t, g, jinv, t.rt ? &t.rt_val[q] : nullptr, &rd, &pv, t.rt ? nullptr : &t.p_grad[q], wv, &wd);
        bl.aw.noalias() += w * wv * weight * wv.transpose();
        bl.mass.noalias() += w * wv * wv.transpose();
        bl.b.noalias() += w * wd * t.v_val.row(q);
    }
    for (int i = 0; i < 3; ++i) {
        const double len = g.face_length[i];
        for (std::size_t q = 0; q < t.edge.size(); ++q) {
            const double w = t.edge.weights[q] * len;
            Eigen::RowVectorXd pv;
            if (!t.rt)
                pv = t.f_p[i].row(q);
            physical_w(t, g, jinv, t.rt ? &t.f_rt[i][q] : nullptr, nullptr, &pv, nullptr, wv, nullptr);
            const Vector wn = wv * g.normal[i];
            const Eigen::RowVectorXd eta = t.f_eta.row(q);
            bl.e.middleCols(i * t.modes, t.modes).noalias() += w * wn * eta;
            bl.kmat.middleRows(i * t.modes, t.modes).noalias() += w * eta.transpose() * t.f_v[i].row(q);
        }
        bl.hdiag.segment(i * t.modes, t.modes).setConstant(len);
    }
    return bl;
}

Vector
load_moments(const RefTables& t, const ElementGeometry& g, const SourceFn& f)
{
    Vector fm = Vector::Zero(t.nv);
    if (!f)
        return fm;
    for (std::size_t q = 0; q < t.load.size(); ++q) {
        const double x = t.load.points[q][0], y = t.load.points[q][1];
        const Point p{g.v[0].x + g.jac(0, 0) * x + g.jac(0, 1) * y, g.v[0].y + g.jac(1, 0) * x + g.jac(1, 1) * y};
        fm += (t.load.weights[q] * g.det * f(p)) * t.load_v.row(q).transpose();
    }
    return fm;
}

Eigen::PartialPivLU<DenseMatrix>
factor_checked(const DenseMatrix& m, const MethodSpec& spec)
{
    Eigen::PartialPivLU<DenseMatrix> lu(m);
    if (!(lu.rcond() > 1e-13))
        throw IncompatibleMethodError("singular local problem for " + to_string(spec.family) +
                                      " with k = " + std::to_string(spec.k));
    return lu;
}

// Penalty part alpha (P u - lambda, P u - mu) with P u = H^{-1} K U.
DenseMatrix
penalty_schur(const Blocks& bl, const DenseMatrix& u, double alpha)
{
    if (alpha == 0.0)
        return DenseMatrix::Zero(bl.kmat.rows(), bl.kmat.rows());
    DenseMatrix r = bl.hdiag.cwiseInverse().asDiagonal() * (bl.kmat * u);
    r -= DenseMatrix::Identity(r.rows(), r.cols());
    return alpha * r.transpose() * bl.hdiag.asDiagonal() * r;
}

struct HdgSystem
{
    Blocks bl;
    double alpha;
    Eigen::PartialPivLU<DenseMatrix> lu;
};

HdgSystem
hdg_system(const ElementGeometry& g, const MethodSpec& spec, const Tensor2& a)
{
    if (!spec.is_hdg())
        throw IncompatibleMethodError("local_lift_hdg: " + to_string(spec.family) + " is not an HDG family");
    spec.validate();
    const RefTables& t = tables_for(spec);
    Blocks bl = element_blocks(t, g, a.inverse());
    const double alpha = spec.penalty.value(g.h);
    const Index n = t.nw + t.nv;
    DenseMatrix m(n, n);
    m.topLeftCorner(t.nw, t.nw) = bl.aw;
    m.topRightCorner(t.nw, t.nv) = bl.b;
    m.bottomLeftCorner(t.nv, t.nw) = bl.b.transpose();
    m.bottomRightCorner(t.nv, t.nv) = -alpha * bl.kmat.transpose() * bl.hdiag.cwiseInverse().asDiagonal() * bl.kmat;
    auto lu = factor_checked(m, spec);
    return {std::move(bl), alpha, std::move(lu)};
}

struct WgSystem
{
    Blocks bl;
    double alpha;
    DenseMatrix ri, rb;
    Eigen::PartialPivLU<DenseMatrix> lu;
};

WgSystem
wg_system(const ElementGeometry& g, const MethodSpec& spec, const Tensor2& a)
{
    if (!spec.is_wg())
        throw IncompatibleMethodError("local_lift_wg: " + to_string(spec.family) + " is not a WG family");
    spec.validate();
    const RefTables& t = tables_for(spec);
    Blocks bl = element_blocks(t, g, a);
    const double alpha = spec.penalty.value(g.h);
    Eigen::LLT<DenseMatrix> mass(bl.mass);
    DenseMatrix ri = mass.solve(-bl.b);
    DenseMatrix rb = mass.solve(bl.e);
    DenseMatrix m = ri.transpose() * bl.aw * ri;
    if (alpha != 0.0)
        m += alpha * bl.kmat.transpose() * bl.hdiag.cwiseInverse().asDiagonal() * bl.kmat;
    auto lu = factor_checked(m, spec);
    return {std::move(bl), alpha, std::move(ri), std::move(rb), std::move(lu)};
}

DenseMatrix
symmetrized(const DenseMatrix& s)
{
    return 0.5 * (s + s.transpose());
}

} // namespace

ElementGeometry
element_geometry(const Mesh& m, Index t)
{
    ElementGeometry g;
    g.v = m.triangle_points(t);
    g.jac << g.v[1].x - g.v[0].x, g.v[2].x - g.v[0].x, g.v[1].y - g.v[0].y, g.v[2].y - g.v[0].y;
    g.det = g.jac.determinant();
    if (!(g.det > 0.0))
        throw StructuralError("degenerate or clockwise element " + std::to_string(t));
    g.area = 0.5 * g.det;
    g.h = m.diameters()[t];
    for (int i = 0; i < 3; ++i) {
        const Point& a = g.v[(i + 1) % 3];
        const Point& b = g.v[(i + 2) % 3];
        const double ex = b.x - a.x, ey = b.y - a.y;
        g.face_length[i] = std::hypot(ex, ey);
        g.normal[i] = Eigen::Vector2d(ey, -ex) / g.face_length[i];
    }
    return g;
}

LocalOperator
local_lift_hdg(const ElementGeometry& g, const MethodSpec& spec, const Tensor2& a)
{
    const HdgSystem sys = hdg_system(g, spec, a);
    const Blocks& bl = sys.bl;
    const Index nw = bl.aw.rows(), nv = bl.b.cols(), nl = bl.e.cols();
    DenseMatrix rhs(nw + nv, nl);
    rhs.topRows(nw) = bl.e;
    rhs.bottomRows(nv) = -sys.alpha * bl.kmat.transpose();
    const DenseMatrix sol = sys.lu.solve(rhs);
    LocalOperator op;
    op.lift_sigma = sol.topRows(nw);
    op.lift_u = sol.bottomRows(nv);
    op.schur = symmetrized(op.lift_sigma.transpose() * bl.aw * op.lift_sigma + penalty_schur(bl, op.lift_u, sys.alpha));
    return op;
}

LocalLoad
local_load_hdg(const ElementGeometry& g, const MethodSpec& spec, const Tensor2& a, const SourceFn& f)
{
    const HdgSystem sys = hdg_system(g, spec, a);
    const Blocks& bl = sys.bl;
    const Index nw = bl.aw.rows(), nv = bl.b.cols(), nl = bl.e.cols();
    const Vector fm = load_moments(tables_for(spec), g, f);
    Vector rhs = Vector::Zero(nw + nv);
    rhs.tail(nv) = -fm;
    const Vector sol = sys.lu.solve(rhs);
    LocalLoad ld;
    ld.sigma = sol.head(nw);
    ld.u = sol.tail(nv);
    DenseMatrix lrhs(nw + nv, nl);
    lrhs.topRows(nw) = bl.e;
    lrhs.bottomRows(nv) = -sys.alpha * bl.kmat.transpose();
    const DenseMatrix lift_u = sys.lu.solve(lrhs).bottomRows(nv);
    ld.rhs = lift_u.transpose() * fm;
    return ld;
}

WeakGradientOps
weak_gradient_ops(const ElementGeometry& g, const MethodSpec& spec)
{
    if (!spec.is_wg())
        throw IncompatibleMethodError("weak_gradient_ops: " + to_string(spec.family) + " is not a WG family");
    spec.validate();
    const Blocks bl = element_blocks(tables_for(spec), g, Tensor2::Identity());
    Eigen::LLT<DenseMatrix> mass(bl.mass);
    if (mass.info() != Eigen::Success)
        throw StructuralError("weak_gradient_ops: degenerate element");
    return {mass.solve(-bl.b), mass.solve(bl.e), bl.mass};
}

LocalOperator
local_lift_wg(const ElementGeometry& g, const MethodSpec& spec, const Tensor2& a)
{
    const WgSystem sys = wg_system(g, spec, a);
    const Blocks& bl = sys.bl;
    DenseMatrix rhs = -sys.ri.transpose() * bl.aw * sys.rb;
    if (sys.alpha != 0.0)
        rhs += sys.alpha * bl.kmat.transpose();
    LocalOperator op;
    op.lift_u = sys.lu.solve(rhs);
    const DenseMatrix grad = sys.ri * op.lift_u + sys.rb;
    op.schur = symmetrized(grad.transpose() * bl.aw * grad + penalty_schur(bl, op.lift_u, sys.alpha));
    return op;
}

LocalLoad
local_load_wg(const ElementGeometry& g, const MethodSpec& spec, const Tensor2& a, const SourceFn& f)
{
    const WgSystem sys = wg_system(g, spec, a);
    const Blocks& bl = sys.bl;
    const Vector fm = load_moments(tables_for(spec), g, f);
    LocalLoad ld;
    ld.u = sys.lu.solve(fm);
    DenseMatrix rhs = -sys.ri.transpose() * bl.aw * sys.rb;
    if (sys.alpha != 0.0)
        rhs += sys.alpha * bl.kmat.transpose();
    ld.rhs = sys.lu.solve(rhs).transpose() * fm;
    return ld;
}

DenseMatrix
cr_element_matrix(const ElementGeometry& g, const Tensor2& a)
{
    // Linear functions c0 + c1 x + c2 y; row j evaluates the mean over local
    // face j, i.e. the value at its midpoint.
    Eigen::Matrix3d mid;
    for (int j = 0; j < 3; ++j) {
        const Point& p = g.v[(j + 1) % 3];
        const Point& q = g.v[(j + 2) % 3];
        mid.row(j) << 1.0, 0.5 * (p.x + q.x), 0.5 * (p.y + q.y);
    }
    const Eigen::Matrix3d coef = mid.inverse();
    const Eigen::Matrix<double, 2, 3> grad = coef.bottomRows<2>();
    return g.area * grad.transpose() * a * grad;
}

double
evaluate_interior(const Mesh& m, Index t, const MethodSpec& spec, const Vector& coeffs, const Point& p)
{
    const ElementGeometry g = element_geometry(m, t);
    const Eigen::Vector2d ref = g.jac.inverse() * Eigen::Vector2d(p.x - g.v[0].x, p.y - g.v[0].y);
    if (spec.family == MethodFamily::cr) {
        // Face-mean shape functions 1 - 2 lambda_i.
        const double lam[3] = {1.0 - ref[0] - ref[1], ref[0], ref[1]};
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            s += coeffs[i] * (1.0 - 2.0 * lam[i]);
        return s;
    }
    return triangle_basis(spec.interior_degree()).values(ref[0], ref[1]).dot(coeffs);
}

} // namespace skelpre
