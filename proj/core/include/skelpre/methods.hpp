#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "skelpre/linalg.hpp"
#include "skelpre/mesh.hpp"
#include "skelpre/skeleton.hpp"

namespace skelpre {

enum class MethodFamily
{
    hdg1,
    hdg2,
    hdg3,
    hdg4,
    wg1,
    wg2,
    cr
};

std::string to_string(MethodFamily f);
MethodFamily method_family_from_string(const std::string& s);

enum class PenaltyLaw
{
    zero,
    constant,
    inverse_h
};

struct Penalty
{
    PenaltyLaw law = PenaltyLaw::zero;
    double c = 0.0;

    double value(double h) const
    {
        switch (law) {
        case PenaltyLaw::zero:
            return 0.0;
        case PenaltyLaw::constant:
            return c;
        case PenaltyLaw::inverse_h:
            return c / h;
        }
        return 0.0;
    }
};

using Tensor2 = Eigen::Matrix2d;
using DiffusionFn = std::function<Tensor2(const Point&)>;
using SourceFn = std::function<double(const Point&)>;

/// Discretization choice.
///
/// Spaces per family:
///   HDG1, WG1: V = P_k,     W = RT_k,   alpha = 0
///   HDG2, WG2: V = P_{k-1}, W = [P_k]^2, alpha = 0 (k >= 1)
///   HDG3:      V = P_k,     W = [P_k]^2, alpha = 1
///   HDG4:      V = P_{k+1}, W = [P_k]^2, alpha = 1/h_T
///   CR:        k = 0
/// The diffusion tensor is evaluated once per element at its centroid.
struct MethodSpec
{
    MethodFamily family = MethodFamily::hdg3;
    int k = 0;
    Penalty penalty;
    DiffusionFn diffusion;

    // Family defaults for the penalty and A = a(x) I from the domain.
    static MethodSpec make(MethodFamily family, int k, DomainKind domain = DomainKind::square());

    // Throws IncompatibleMethodError for HDG2/WG2 with k = 0 or CR with k != 0,
    // UnsupportedDegreeError when a required basis is out of range.
    void validate() const;

    Tensor2 tensor_at(const Point& p) const { return diffusion ? diffusion(p) : Tensor2::Identity(); }
    bool is_hdg() const;
    bool is_wg() const;
    // Degree of V(T) (-1 for an empty space) and whether W(T) is RT_k.
    int interior_degree() const;
    bool uses_rt() const;
};

struct ElementGeometry
{
    std::array<Point, 3> v;
    Eigen::Matrix2d jac; // columns v1 - v0, v2 - v0
    double det = 0.0;
    double area = 0.0;
    double h = 0.0;
    std::array<double, 3> face_length{};
    std::array<Eigen::Vector2d, 3> normal; // outward unit normal of local face i
};

ElementGeometry element_geometry(const Mesh& m, Index t);

/// Element-local static condensation data.
///
/// Trace coefficients are ordered as in SkeletonSpace::element_dofs, in the
/// local edge orientation.
struct LocalOperator
{
    DenseMatrix lift_u;     // V coefficients per unit trace coefficient
    DenseMatrix lift_sigma; // W coefficients (empty for WG)
    DenseMatrix schur;      // element contribution to d_h
};

struct LocalLoad
{
    Vector u;
    Vector sigma;
    Vector rhs; // b_h(eta) = (f, u_eta) per trace basis function
};

LocalOperator local_lift_hdg(const ElementGeometry& g, const MethodSpec& spec, const Tensor2& a);
LocalLoad local_load_hdg(const ElementGeometry& g, const MethodSpec& spec, const Tensor2& a, const SourceFn& f);

/// Discrete weak gradient operators into W(T) coefficients.
struct WeakGradientOps
{
    DenseMatrix interior; // (grad_w^i v, q) = -(v, div q)
    DenseMatrix trace;    // (grad_w^b mu, q) = <mu, q.n>
    DenseMatrix mass;     // L2 mass of W(T)
};

WeakGradientOps weak_gradient_ops(const ElementGeometry& g, const MethodSpec& spec);
LocalOperator local_lift_wg(const ElementGeometry& g, const MethodSpec& spec, const Tensor2& a);
LocalLoad local_load_wg(const ElementGeometry& g, const MethodSpec& spec, const Tensor2& a, const SourceFn& f);

// Crouzeix-Raviart element stiffness and load in face-mean coordinates.
DenseMatrix cr_element_matrix(const ElementGeometry& g, const Tensor2& a);

struct SchurSystem
{
    SparseMatrix d;
    Vector b;
};

// Static condensation onto the skeleton; CR is routed to assemble_cr.
SchurSystem assemble_schur(const SkeletonSpace& s, const MethodSpec& spec, const SourceFn& f = {});
SchurSystem assemble_cr(const SkeletonSpace& s, const DiffusionFn& a, const SourceFn& f = {});

struct InteriorSolution
{
    std::vector<Vector> u;
    std::vector<Vector> sigma; // empty for WG and CR
};

InteriorSolution recover_interior(const SkeletonSpace& s, const MethodSpec& spec, const Vector& lambda,
                                  const SourceFn& f = {});

// Value of the interior field of element t at physical point p.
double evaluate_interior(const Mesh& m, Index t, const MethodSpec& spec, const Vector& coeffs, const Point& p);

// Trace coefficients of element t gathered from a global skeleton vector.
Vector gather_trace(const SkeletonSpace& s, Index t, const Vector& lambda);

} // namespace skelpre
