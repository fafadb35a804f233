#include "skelpre/methods.hpp"

#include "skelpre/parallel.hpp"
#include "skelpre/polybasis.hpp"

namespace skelpre {

std::string
to_string(MethodFamily f)
{
    switch (f) {
    case MethodFamily::hdg1:
        return "hdg1";
    case MethodFamily::hdg2:
        return "hdg2";
    case MethodFamily::hdg3:
        return "hdg3";
    case MethodFamily::hdg4:
        return "hdg4";
    case MethodFamily::wg1:
        return "wg1";
    case MethodFamily::wg2:
        return "wg2";
    case MethodFamily::cr:
        return "cr";
    }
    return "unknown";
}

MethodFamily
method_family_from_string(const std::string& s)
{
    for (auto f : {MethodFamily::hdg1, MethodFamily::hdg2, MethodFamily::hdg3, MethodFamily::hdg4, MethodFamily::wg1,
                   MethodFamily::wg2, MethodFamily::cr})
        if (to_string(f) == s)
            return f;
    throw Error("unknown method '" + s + "'");
}

MethodSpec
MethodSpec::make(MethodFamily family, int k, DomainKind domain)
{
    MethodSpec s;
    s.family = family;
    s.k = k;
    if (family == MethodFamily::hdg3)
        s.penalty = {PenaltyLaw::constant, 1.0};
    else if (family == MethodFamily::hdg4)
        s.penalty = {PenaltyLaw::inverse_h, 1.0};
    if (domain.tag == DomainTag::graded)
        s.diffusion = [domain](const Point& p) -> Tensor2 { return domain.coefficient(p) * Tensor2::Identity(); };
    s.validate();
    return s;
}

bool
MethodSpec::is_hdg() const
{
    return family == MethodFamily::hdg1 || family == MethodFamily::hdg2 || family == MethodFamily::hdg3 ||
           family == MethodFamily::hdg4;
}

bool
MethodSpec::is_wg() const
{
    return family == MethodFamily::wg1 || family == MethodFamily::wg2;
}

int
MethodSpec::interior_degree() const
{
    switch (family) {
    case MethodFamily::hdg2:
    case MethodFamily::wg2:
        return k - 1;
    case MethodFamily::hdg4:
        return k + 1;
    case MethodFamily::cr:
        return 1;
    default:
        return k;
    }
}

bool
MethodSpec::uses_rt() const
{
    return family == MethodFamily::hdg1 || family == MethodFamily::wg1;
}

void
MethodSpec::validate() const
{
    if (k < 0)
        throw UnsupportedDegreeError("degree must be non-negative");
    if ((family == MethodFamily::hdg2 || family == MethodFamily::wg2) && k == 0)
        throw IncompatibleMethodError(to_string(family) + " requires k >= 1 (V = P_{k-1})");
    if (family == MethodFamily::cr && k != 0)
        throw IncompatibleMethodError("cr requires k = 0");
    if (uses_rt() && k > max_rt_degree)
        throw UnsupportedDegreeError("RT degree " + std::to_string(k) + " not supported");
    if (interior_degree() > max_scalar_degree || k > max_scalar_degree)
        throw UnsupportedDegreeError("degree " + std::to_string(k) + " not supported for " + to_string(family));
    if (2 * k + 3 > max_quadrature_degree)
        throw UnsupportedDegreeError("degree " + std::to_string(k) + " exceeds the quadrature cap");
}

Vector
gather_trace(const SkeletonSpace& s, Index t, const Vector& lambda)
{
    const auto dofs = s.element_dofs(t);
    Vector out = Vector::Zero(static_cast<Index>(dofs.size()));
    for (std::size_t i = 0; i < dofs.size(); ++i)
        if (dofs[i].index >= 0)
            out[i] = dofs[i].sign * lambda[dofs[i].index];
    return out;
}

namespace {

SchurSystem
scatter_all(const SkeletonSpace& s, const std::vector<DenseMatrix>& blocks, const std::vector<Vector>& loads)
{
    std::vector<Triplet> trips;
    Vector b = Vector::Zero(s.dof_count());
    for (Index t = 0; t < s.mesh().num_triangles(); ++t) {
        const auto dofs = s.element_dofs(t);
        scatter_block(dofs, blocks[t], trips);
        if (!loads.empty())
            for (std::size_t i = 0; i < dofs.size(); ++i)
                if (dofs[i].index >= 0)
                    b[dofs[i].index] += dofs[i].sign * loads[t][i];
    }
    return {csr_from_triplets(s.dof_count(), s.dof_count(), trips), std::move(b)};
}

} // namespace

SchurSystem
assemble_schur(const SkeletonSpace& s, const MethodSpec& spec, const SourceFn& f)
{
    spec.validate();
    if (spec.k != s.degree())
        throw StructuralError("assemble_schur: method degree differs from the skeleton degree");
    if (spec.family == MethodFamily::cr)
        return assemble_cr(s, spec.diffusion, f);
    const Mesh& m = s.mesh();
    const auto n = static_cast<std::size_t>(m.num_triangles());
    std::vector<DenseMatrix> blocks(n);
    std::vector<Vector> loads(f ? n : 0);
    parallel_for(n, [&](std::size_t t) {
        const auto ti = static_cast<Index>(t);
        const ElementGeometry g = element_geometry(m, ti);
        const Tensor2 a = spec.tensor_at(m.centroid(ti));
        if (spec.is_hdg()) {
            blocks[t] = local_lift_hdg(g, spec, a).schur;
            if (f)
                loads[t] = local_load_hdg(g, spec, a, f).rhs;
        } else {
            blocks[t] = local_lift_wg(g, spec, a).schur;
            if (f)
                loads[t] = local_load_wg(g, spec, a, f).rhs;
        }
    });
    return scatter_all(s, blocks, loads);
}

SchurSystem
assemble_cr(const SkeletonSpace& s, const DiffusionFn& a, const SourceFn& f)
{
    if (s.degree() != 0)
        throw IncompatibleMethodError("assemble_cr: the CR element needs k = 0");
    const Mesh& m = s.mesh();
    const auto n = static_cast<std::size_t>(m.num_triangles());
    std::vector<DenseMatrix> blocks(n);
    std::vector<Vector> loads(f ? n : 0);
    const QuadratureRule rule = quadrature(QuadDomain::triangle, 8);
    parallel_for(n, [&](std::size_t t) {
        const auto ti = static_cast<Index>(t);
        const ElementGeometry g = element_geometry(m, ti);
        blocks[t] = cr_element_matrix(g, a ? a(m.centroid(ti)) : Tensor2::Identity());
        if (f) {
            Vector l = Vector::Zero(3);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double x = rule.points[q][0], y = rule.points[q][1];
                const Point p{g.v[0].x + g.jac(0, 0) * x + g.jac(0, 1) * y,
                              g.v[0].y + g.jac(1, 0) * x + g.jac(1, 1) * y};
                const double lam[3] = {1.0 - x - y, x, y};
                const double w = rule.weights[q] * g.det * f(p);
                for (int i = 0; i < 3; ++i)
                    l[i] += w * (1.0 - 2.0 * lam[i]);
            }
            loads[t] = l;
        }
    });
    return scatter_all(s, blocks, loads);
}

InteriorSolution
recover_interior(const SkeletonSpace& s, const MethodSpec& spec, const Vector& lambda, const SourceFn& f)
{
    const Mesh& m = s.mesh();
    const auto n = static_cast<std::size_t>(m.num_triangles());
    InteriorSolution sol;
    sol.u.resize(n);
    if (spec.is_hdg())
        sol.sigma.resize(n);
    parallel_for(n, [&](std::size_t t) {
        const auto ti = static_cast<Index>(t);
        const Vector lam = gather_trace(s, ti, lambda);
        if (spec.family == MethodFamily::cr) {
            sol.u[t] = lam;
            return;
        }
        const ElementGeometry g = element_geometry(m, ti);
        const Tensor2 a = spec.tensor_at(m.centroid(ti));
        if (spec.is_hdg()) {
            const LocalOperator op = local_lift_hdg(g, spec, a);
            sol.u[t] = op.lift_u * lam;
            sol.sigma[t] = op.lift_sigma * lam;
            if (f) {
                const LocalLoad ld = local_load_hdg(g, spec, a, f);
                sol.u[t] += ld.u;
                sol.sigma[t] += ld.sigma;
            }
        } else {
            sol.u[t] = local_lift_wg(g, spec, a).lift_u * lam;
            if (f)
                sol.u[t] += local_load_wg(g, spec, a, f).u;
        }
    });
    return sol;
}

} // namespace skelpre
