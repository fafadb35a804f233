#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "skelpre/linalg.hpp"
#include "skelpre/mesh.hpp"
#include "skelpre/methods.hpp"
#include "skelpre/skeleton.hpp"

namespace skelpre {

enum class ProlongationKind
{
    face_mean, // Pi^1: face mean into mode 0
    face_l2    // Pi^2: L2 projection of the linear trace
};

std::string to_string(ProlongationKind k);
ProlongationKind prolongation_from_string(const std::string& s);

// Pi_h from interior P1 nodal values (interior_vertex_numbering) to
// skeleton coefficients.
SparseMatrix build_pi(const SkeletonSpace& s, ProlongationKind kind);

/// The chain realizing I_j = Pi_h P_{J-1} ... P_j.
struct LevelMaps
{
    SparseMatrix pi;                  // V_J -> M_h
    std::vector<SparseMatrix> prolong; // prolong[j]: V_j -> V_{j+1}
    std::vector<double> h;            // max diameter per level

    int finest_level() const { return static_cast<int>(prolong.size()); }
    // I_j v and I_j^T x applied through the chain.
    Vector apply(int j, const Vector& v) const;
    Vector apply_transpose(int j, const Vector& x) const;
};

LevelMaps build_level_maps(const MeshHierarchy& hier, const SkeletonSpace& s, ProlongationKind kind);

// Coordinates in which the diagonal term of BPX (and the Richardson
// smoother) is the identity: Lagrange values at equispaced nodes of each
// face, or the Legendre coefficients themselves. Both agree for k = 0.
enum class DiagonalTerm
{
    nodal,
    legendre
};

// Gram matrix T T^T of the nodal-to-Legendre map, block diagonal per face:
// the identity of nodal coordinates written in Legendre coordinates.
SparseMatrix nodal_gram(const SkeletonSpace& s);

/// Matrix-form BPX preconditioner y = h^{2-d} G x + sum_j h_j^{2-d} I_j I_j^T x
/// with d = 2, so every scale factor is 1. G is nodal_gram or the identity.
class BpxPreconditioner
{
  public:
    BpxPreconditioner(std::shared_ptr<const LevelMaps> maps, SparseMatrix diagonal);
    // Identity diagonal term.
    explicit BpxPreconditioner(std::shared_ptr<const LevelMaps> maps);

    Index dimension() const noexcept { return maps_->pi.rows(); }
    void apply(const Vector& x, Vector& y) const;
    LinearOperator as_operator() const;

    // Same sum over a P1 hierarchy alone (no Pi_h), used as the coarse
    // solver of the auxiliary-space preconditioner.
    static void apply_p1(const std::vector<SparseMatrix>& prolong, const Vector& x, Vector& y);

  private:
    std::shared_ptr<const LevelMaps> maps_;
    std::shared_ptr<const SparseMatrix> diag_;
};

BpxPreconditioner make_bpx(const MeshHierarchy& hier, const SkeletonSpace& s, ProlongationKind kind,
                           DiagonalTerm term = DiagonalTerm::nodal);

Vector apply_bpx(const BpxPreconditioner& b, const Vector& x);

enum class SmootherKind
{
    jacobi,
    sgs,
    richardson
};

std::string to_string(SmootherKind k);
SmootherKind smoother_from_string(const std::string& s);

// jacobi: diag(D)^{-1} x; sgs: (L + Delta)^{-1} Delta (L + Delta)^{-T} x
// (backward sweep, diagonal scaling, forward sweep); richardson: h^{2-d} G x
// with G = *gram when given, the identity otherwise.
// Throws NotSpdError on a non-positive diagonal entry.
Vector smoother_apply(SmootherKind kind, const SparseMatrix& d, const Vector& x, const SparseMatrix* gram = nullptr);

enum class CoarseKind
{
    exact, // sparse Cholesky of the P1 stiffness
    bpx    // P1 BPX sum
};

std::string to_string(CoarseKind k);
CoarseKind coarse_from_string(const std::string& s);

// P1 stiffness with coefficient a (per element, at the centroid) restricted
// to interior vertices.
SparseMatrix p1_stiffness(const Mesh& m, const DiffusionFn& a);

/// Auxiliary-space preconditioner y = S_h x + Pi_h Btilde Pi_h^T x.
class AuxPreconditioner
{
  public:
    AuxPreconditioner(std::shared_ptr<const SparseMatrix> d, SmootherKind smoother, SparseMatrix pi, CoarseKind coarse,
                      const SparseMatrix& p1_matrix, std::vector<SparseMatrix> p1_prolong = {},
                      std::optional<SparseMatrix> richardson_gram = std::nullopt);

    Index dimension() const noexcept { return d_->rows(); }
    void apply(const Vector& x, Vector& y) const;
    LinearOperator as_operator() const;

  private:
    std::shared_ptr<const SparseMatrix> d_;
    SmootherKind smoother_;
    SparseMatrix pi_;
    CoarseKind coarse_;
    std::shared_ptr<const SparseCholesky> chol_;
    std::vector<SparseMatrix> prolong_;
    std::optional<SparseMatrix> gram_;
};

Vector apply_aux(const AuxPreconditioner& p, const Vector& x);

// P_h: interior nodal value = average of m_T over the elements sharing the
// node, zero on the boundary.
SparseMatrix build_ph(const SkeletonSpace& s);

// P1 mass matrix on interior vertices (for adjoint identities).
SparseMatrix p1_mass(const Mesh& m);

// Skeleton mass <mu, eta> (block diagonal, |F| per mode).
SparseMatrix skeleton_mass(const SkeletonSpace& s);

} // namespace skelpre
