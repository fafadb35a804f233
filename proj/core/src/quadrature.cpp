#include <algorithm>
#include <cmath>
#include <numbers>

#include "skelpre/polybasis.hpp"

namespace skelpre {

namespace {

// n-point Gauss-Legendre on [-1, 1] by Newton iteration on P_n.
void
gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * z * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        double p0 = 1.0, p1 = z;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2 * j - 1) * z * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

QuadratureRule
edge_rule(int degree)
{
    const int n = std::max(1, (degree + 2) / 2);
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    QuadratureRule r;
    r.degree = 2 * n - 1;
    for (int i = n - 1; i >= 0; --i) {
        r.points.push_back({0.5 * (x[i] + 1.0), 0.0});
        r.weights.push_back(0.5 * w[i]);
    }
    return r;
}

QuadratureRule
collapsed_triangle_rule(int degree)
{
    // x = u, y = v (1 - u) turns x^a y^b into a polynomial of degree
    // a + b + 1 in u, so n points per direction suffice for 2n - 1 >= degree + 1.
    const int n = (degree + 3) / 2;
    std::vector<double> g, w;
    gauss_legendre(n, g, w);
    std::vector<std::array<double, 3>> bary;
    std::vector<double> weights;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double u = 0.5 * (g[i] + 1.0);
            const double v = 0.5 * (g[j] + 1.0);
            const double x = u, y = v * (1.0 - u);
            const double wt = 0.25 * w[i] * w[j] * (1.0 - u);
            static constexpr int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
            const double l[3] = {1.0 - x - y, x, y};
            for (const auto& p : perm) {
                std::array<double, 3> b{l[p[0]], l[p[1]], l[p[2]]};
                auto it = std::find_if(bary.begin(), bary.end(), [&](const auto& q) {
                    return std::abs(q[0] - b[0]) < 1e-14 && std::abs(q[1] - b[1]) < 1e-14;
                });
                if (it != bary.end())
                    weights[static_cast<std::size_t>(it - bary.begin())] += wt / 6.0;
                else {
                    bary.push_back(b);
                    weights.push_back(wt / 6.0);
                }
            }
        }
    QuadratureRule r;
    r.degree = 2 * n - 2;
    for (std::size_t i = 0; i < bary.size(); ++i) {
        r.points.push_back({bary[i][1], bary[i][2]});
        r.weights.push_back(weights[i]);
    }
    return r;
}

} // namespace

QuadratureRule
quadrature(QuadDomain domain, int degree)
{
    if (degree < 0 || degree > max_quadrature_degree)
        throw UnsupportedDegreeError("quadrature: degree " + std::to_string(degree) + " outside [0, " +
                                     std::to_string(max_quadrature_degree) + "]");
    if (domain == QuadDomain::edge)
        return edge_rule(degree);
    if (degree <= 1)
        return {{{1.0 / 3.0, 1.0 / 3.0}}, {0.5}, 1};
    if (degree == 2)
        return {{{0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}}, {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0}, 2};
    return collapsed_triangle_rule(degree);
}

} // namespace skelpre
