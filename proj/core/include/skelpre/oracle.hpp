#pragma once

#include <functional>
#include <string>
#include <vector>

#include "skelpre/linalg.hpp"
#include "skelpre/mesh.hpp"
#include "skelpre/methods.hpp"
#include "skelpre/skeleton.hpp"

namespace skelpre {

// Independent reference computations. Nothing here calls the element
// kernels of the methods module; bases, traces and face orientation are
// rebuilt from scratch (only quadrature rules are shared).

inline constexpr Index monolithic_element_cap = 1000;

struct MonolithicResult
{
    SparseMatrix full;   // symmetric (sigma, u, lambda) system
    DenseMatrix schur;   // lambda block after eliminating sigma and u
    Vector rhs;          // condensed load
};

// Assembles the coupled HDG system over the whole mesh and eliminates the
// interior unknowns with one global sparse LU. Skeleton DOFs follow
// SkeletonSpace numbering. Throws SizeCapError above the element cap.
MonolithicResult monolithic_hdg(const SkeletonSpace& s, const MethodSpec& spec, const SourceFn& f = {});

struct CrAssembly
{
    SparseMatrix matrix;
    Vector rhs;
};

// Crouzeix-Raviart stiffness with shape functions 1 - 2 lambda_i on
// interior faces, in skeleton face order.
CrAssembly cr_shape_assembly(const Mesh& m, const DiffusionFn& a, const SourceFn& f = {});

struct ManufacturedCase
{
    std::string name;
    std::function<double(const Point&)> u;
    SourceFn f;
};

// u = sin(pi x) sin(pi y), f = 2 pi^2 u (A = I, vanishes on the unit square).
ManufacturedCase sine_case();
// u = 0, f = 0.
ManufacturedCase zero_case();

struct ConvergencePoint
{
    int level = 0;
    double h = 0.0;
    double l2_error = 0.0;
    int iterations = 0;
};

// Solves the skeleton system by PCG (BPX, face_l2) to a 1e-10 reduction,
// recovers u_h and measures the L2 error, for each square level.
std::vector<ConvergencePoint> convergence_study(const ManufacturedCase& c, const MethodSpec& spec,
                                                const std::vector<int>& levels);

// Least-squares slope of log(error) against log(h).
double observed_rate(const std::vector<ConvergencePoint>& pts);

// L2 error of a recovered interior field against an exact solution.
double l2_error(const Mesh& m, const MethodSpec& spec, const InteriorSolution& sol,
                const std::function<double(const Point&)>& exact);

} // namespace skelpre
