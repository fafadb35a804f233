#include <cmath>

#include "skelpre/polybasis.hpp"

namespace skelpre {

namespace {

using LD = long double;

LD
factorial(int n)
{
    LD f = 1;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

LD
monomial_integral_ld(int a, int b)
{
    return factorial(a) * factorial(b) / factorial(a + b + 2);
}

// Orthonormalizes functions given as monomial coefficients, with `ncomp`
// components stacked in each row. Two passes of modified Gram-Schmidt in
// extended precision.
std::vector<std::vector<LD>>
orthonormalize(std::vector<std::vector<LD>> f, int ncomp, int poly_degree)
{
    const auto exps = monomial_exponents(poly_degree);
    const std::size_t nm = exps.size();
    std::vector<LD> g(nm * nm);
    for (std::size_t i = 0; i < nm; ++i)
        for (std::size_t j = 0; j < nm; ++j)
            g[i * nm + j] = monomial_integral_ld(exps[i][0] + exps[j][0], exps[i][1] + exps[j][1]);
    auto inner = [&](const std::vector<LD>& u, const std::vector<LD>& v) {
        LD s = 0;
        for (int c = 0; c < ncomp; ++c)
            for (std::size_t i = 0; i < nm; ++i) {
                if (u[c * nm + i] == 0)
                    continue;
                for (std::size_t j = 0; j < nm; ++j)
                    s += u[c * nm + i] * g[i * nm + j] * v[c * nm + j];
            }
        return s;
    };
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t j = 0; j < i; ++j) {
                const LD r = inner(f[i], f[j]);
                for (std::size_t p = 0; p < f[i].size(); ++p)
                    f[i][p] -= r * f[j][p];
            }
        const LD n = std::sqrt(inner(f[i], f[i]));
        for (auto& v : f[i])
            v /= n;
    }
    return f;
}

void
monomial_values(int n, double x, double y, Vector& v, Vector& dx, Vector& dy)
{
    const auto exps = monomial_exponents(n);
    v.resize(exps.size());
    dx.resize(exps.size());
    dy.resize(exps.size());
    for (std::size_t i = 0; i < exps.size(); ++i) {
        const int a = exps[i][0], b = exps[i][1];
        v[i] = std::pow(x, a) * std::pow(y, b);
        dx[i] = a > 0 ? a * std::pow(x, a - 1) * std::pow(y, b) : 0.0;
        dy[i] = b > 0 ? b * std::pow(x, a) * std::pow(y, b - 1) : 0.0;
    }
}

} // namespace

std::vector<std::array<int, 2>>
monomial_exponents(int n)
{
    std::vector<std::array<int, 2>> e;
    for (int d = 0; d <= n; ++d)
        for (int b = 0; b <= d; ++b)
            e.push_back({d - b, b});
    return e;
}

double
reference_monomial_integral(int a, int b)
{
    return static_cast<double>(monomial_integral_ld(a, b));
}

ElementBasis::ElementBasis(SpaceTag tag, int degree) : tag_(tag), degree_(degree)
{
    const int cap = tag == SpaceTag::rt_triangle ? max_rt_degree : max_scalar_degree;
    if (degree < 0 || degree > cap)
        throw UnsupportedDegreeError("basis degree " + std::to_string(degree) + " outside [0, " +
                                     std::to_string(cap) + "]");
    switch (tag) {
    case SpaceTag::pk_edge:
        dim_ = degree + 1;
        return;
    case SpaceTag::pk_triangle: {
        poly_degree_ = degree;
        const std::size_t nm = monomial_exponents(degree).size();
        std::vector<std::vector<LD>> f(nm, std::vector<LD>(nm, 0));
        for (std::size_t i = 0; i < nm; ++i)
            f[i][i] = 1;
        f = orthonormalize(std::move(f), 1, degree);
        dim_ = static_cast<Index>(nm);
        coef_[0].resize(dim_, static_cast<Index>(nm));
        for (Index i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < nm; ++j)
                coef_[0](i, j) = static_cast<double>(f[i][j]);
        return;
    }
    case SpaceTag::rt_triangle: {
        poly_degree_ = degree + 1;
        const auto exps = monomial_exponents(poly_degree_);
        const std::size_t nm = exps.size();
        const std::size_t nk = monomial_exponents(degree).size();
        std::vector<std::vector<LD>> f;
        // [P_k]^2
        for (int c = 0; c < 2; ++c)
            for (std::size_t i = 0; i < nk; ++i) {
                std::vector<LD> v(2 * nm, 0);
                v[c * nm + i] = 1;
                f.push_back(std::move(v));
            }
        // x * (homogeneous degree-k monomials)
        auto index_of = [&](int a, int b) {
            for (std::size_t i = 0; i < nm; ++i)
                if (exps[i][0] == a && exps[i][1] == b)
                    return i;
            return nm;
        };
        for (int b = 0; b <= degree; ++b) {
            const int a = degree - b;
            std::vector<LD> v(2 * nm, 0);
            v[index_of(a + 1, b)] = 1;
            v[nm + index_of(a, b + 1)] = 1;
            f.push_back(std::move(v));
        }
        f = orthonormalize(std::move(f), 2, poly_degree_);
        dim_ = static_cast<Index>(f.size());
        for (int c = 0; c < 2; ++c) {
            coef_[c].resize(dim_, static_cast<Index>(nm));
            for (Index i = 0; i < dim_; ++i)
                for (std::size_t j = 0; j < nm; ++j)
                    coef_[c](i, j) = static_cast<double>(f[i][c * nm + j]);
        }
        return;
    }
    }
}

Vector
ElementBasis::values(double x, double y) const
{
    Vector v, dx, dy;
    monomial_values(poly_degree_, x, y, v, dx, dy);
    return coef_[0] * v;
}

DenseMatrix
ElementBasis::gradients(double x, double y) const
{
    Vector v, dx, dy;
    monomial_values(poly_degree_, x, y, v, dx, dy);
    DenseMatrix g(dim_, 2);
    g.col(0) = coef_[0] * dx;
    g.col(1) = coef_[0] * dy;
    return g;
}

DenseMatrix
ElementBasis::vector_values(double x, double y) const
{
    Vector v, dx, dy;
    monomial_values(poly_degree_, x, y, v, dx, dy);
    DenseMatrix out(dim_, 2);
    out.col(0) = coef_[0] * v;
    out.col(1) = coef_[1] * v;
    return out;
}

Vector
ElementBasis::divergences(double x, double y) const
{
    Vector v, dx, dy;
    monomial_values(poly_degree_, x, y, v, dx, dy);
    return coef_[0] * dx + coef_[1] * dy;
}

Vector
ElementBasis::edge_values(double t) const
{
    Vector out(dim_);
    const double z = 2.0 * t - 1.0;
    double p0 = 1.0, p1 = z;
    for (Index n = 0; n < dim_; ++n) {
        double pn;
        if (n == 0)
            pn = 1.0;
        else if (n == 1)
            pn = z;
        else {
            pn = ((2 * n - 1) * z * p1 - (n - 1) * p0) / static_cast<double>(n);
            p0 = p1;
            p1 = pn;
        }
        out[n] = std::sqrt(2.0 * n + 1.0) * pn;
    }
    return out;
}

ElementBasis
triangle_basis(int k)
{
    return ElementBasis(SpaceTag::pk_triangle, k);
}

ElementBasis
rt_basis(int k)
{
    return ElementBasis(SpaceTag::rt_triangle, k);
}

ElementBasis
edge_basis(int k)
{
    return ElementBasis(SpaceTag::pk_edge, k);
}

} // namespace skelpre
