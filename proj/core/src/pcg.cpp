#include "skelpre/linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace skelpre {

std::pair<double, double>
tridiagonal_extents(const Vector& diag, const Vector& offdiag)
{
    if (diag.size() == 1)
        return {diag[0], diag[0]};
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es;
    es.computeFromTridiagonal(diag, offdiag, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

namespace {

// Lanczos tridiagonal from CG step lengths alpha_j and ratios beta_j:
// T_jj = 1/alpha_j + beta_{j-1}/alpha_{j-1}, T_j,j+1 = sqrt(beta_j)/alpha_j.
void
fill_ritz(PcgReport& report, const std::vector<double>& alpha, const std::vector<double>& beta)
{
    const auto m = static_cast<Index>(alpha.size());
    if (m == 0)
        return;
    Vector d(m), e(std::max<Index>(m - 1, 0));
    for (Index j = 0; j < m; ++j) {
        d[j] = 1.0 / alpha[j];
        if (j > 0)
            d[j] += beta[j - 1] / alpha[j - 1];
        if (j + 1 < m)
            e[j] = std::sqrt(beta[j]) / alpha[j];
    }
    auto [lo, hi] = tridiagonal_extents(d, e);
    report.ritz_min = lo;
    report.ritz_max = hi;
    report.ritz_cond = hi / lo;
}

} // namespace

PcgResult
pcg(const LinearOperator& a, const LinearOperator& b_prec, const Vector& rhs, const Vector& x0,
    const PcgOptions& options)
{
    const Index n = a.dimension();
    if (b_prec.dimension() != n || rhs.size() != n || x0.size() != n)
        throw StructuralError("pcg: dimension mismatch");
    if (!(options.reduction > 0.0 && options.reduction < 1.0))
        throw Error("pcg: reduction must lie in (0, 1)");

    const bool homogeneous = rhs.isZero(0.0);

    PcgResult result;
    PcgReport& report = result.report;
    Vector& x = result.x;
    x = x0;

    Vector r(n), z(n), p(n), q(n);
    a.apply(x, q);
    r = rhs - q;
    b_prec.apply(r, z);
    double rz = r.dot(z);

    // For b = 0 the residual is -A x, so x' A x = -x' r.
    auto monitor = [&]() {
        const double v = homogeneous ? -x.dot(r) : rz;
        return std::sqrt(std::max(v, 0.0));
    };

    if (homogeneous && x.dot(r) > 0.0)
        throw DivergenceError("pcg: x0' A x0 < 0, operator is not positive definite", report);
    report.initial_energy = monitor();
    if (!std::isfinite(report.initial_energy))
        throw DivergenceError("pcg: non-finite initial energy", report);
    if (report.initial_energy == 0.0) {
        report.converged = true;
        return result;
    }
    const double target = options.reduction * report.initial_energy;

    std::vector<double> alphas, betas;
    p = z;
    for (int it = 1; it <= options.max_iterations; ++it) {
        a.apply(p, q);
        const double pq = p.dot(q);
        if (!std::isfinite(pq) || pq <= 0.0) {
            fill_ritz(report, alphas, betas);
            throw DivergenceError("pcg: breakdown, p'Ap = " + std::to_string(pq), report);
        }
        const double alpha = rz / pq;
        x += alpha * p;
        r -= alpha * q;
        b_prec.apply(r, z);
        const double rz_new = r.dot(z);
        const double beta = rz_new / rz;
        rz = rz_new;
        alphas.push_back(alpha);
        betas.push_back(beta);

        const double e = monitor();
        report.iterations = it;
        report.history.push_back(e);
        if (!std::isfinite(e) || !std::isfinite(rz)) {
            fill_ritz(report, alphas, betas);
            throw DivergenceError("pcg: non-finite values at iteration " + std::to_string(it), report);
        }
        if (e <= target || rz <= 0.0) {
            report.converged = true;
            fill_ritz(report, alphas, betas);
            return result;
        }
        p = z + beta * p;
    }
    fill_ritz(report, alphas, betas);
    throw NoConvergenceError("pcg: no convergence within " + std::to_string(options.max_iterations) +
                                 " iterations",
                             report);
}

} // namespace skelpre
