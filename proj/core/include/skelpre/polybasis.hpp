#pragma once

#include <array>
#include <vector>

#include "skelpre/linalg.hpp"

namespace skelpre {

inline constexpr int max_scalar_degree = 4;
inline constexpr int max_rt_degree = 3;
inline constexpr int max_quadrature_degree = 12;

enum class QuadDomain
{
    triangle,
    edge
};

/// Quadrature on the reference triangle (0,0),(1,0),(0,1) or on [0,1].
///
/// Edge rules store the abscissa in points[i][0]; weights sum to the
/// reference measure (1/2 or 1).
struct QuadratureRule
{
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const noexcept { return weights.size(); }
};

// Gauss-Legendre on edges; on triangles the centroid rule (degree 1), the
// edge-midpoint rule (degree 2), otherwise a collapsed Gauss rule averaged
// over the six vertex permutations.
QuadratureRule quadrature(QuadDomain domain, int degree);

enum class SpaceTag
{
    pk_triangle,
    rt_triangle,
    pk_edge
};

/// Polynomial basis on a reference element.
///
/// pk_triangle: L2-orthonormal on the reference triangle, ordered by
/// increasing total degree. rt_triangle: [P_k]^2 + x P_k, also
/// L2-orthonormal. pk_edge: Legendre polynomials sqrt(2n+1) P_n(2t-1).
class ElementBasis
{
  public:
    ElementBasis(SpaceTag tag, int degree);

    SpaceTag tag() const noexcept { return tag_; }
    int degree() const noexcept { return degree_; }
    Index dimension() const noexcept { return dim_; }

    // Scalar triangle values (dim) and gradients (dim x 2).
    Vector values(double x, double y) const;
    DenseMatrix gradients(double x, double y) const;
    // Vector-valued RT members (dim x 2) and their divergences.
    DenseMatrix vector_values(double x, double y) const;
    Vector divergences(double x, double y) const;
    // Edge basis at t in [0,1].
    Vector edge_values(double t) const;

  private:
    SpaceTag tag_;
    int degree_;
    Index dim_;
    // Monomial coefficients x^a y^b per basis function (and per component
    // for RT); monomials listed in monomial_exponents(max degree) order.
    DenseMatrix coef_[2];
    int poly_degree_ = 0;
};

ElementBasis triangle_basis(int k);
ElementBasis rt_basis(int k);
ElementBasis edge_basis(int k);

// Exponent pairs (a, b) of x^a y^b with a + b <= n, by total degree.
std::vector<std::array<int, 2>> monomial_exponents(int n);

// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
double reference_monomial_integral(int a, int b);

} // namespace skelpre
