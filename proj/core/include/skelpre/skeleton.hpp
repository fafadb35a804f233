#pragma once

#include <vector>

#include "skelpre/linalg.hpp"
#include "skelpre/mesh.hpp"

namespace skelpre {

// Global DOF of a local trace coefficient and the sign relating the local
// edge parameter to the face orientation; index -1 on boundary faces.
struct TraceDof
{
    Index index = -1;
    double sign = 1.0;
};

/// Multiplier space M_{h,k}: degree-k polynomials on interior faces.
///
/// Each interior face owns k+1 consecutive DOFs, the coefficients in the
/// Legendre basis of the face parametrized from its lower to its higher
/// vertex index. Faces are numbered in skeleton_faces order.
class SkeletonSpace
{
  public:
    SkeletonSpace(MeshPtr mesh, int k);

    const Mesh& mesh() const noexcept { return *mesh_; }
    const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
    int degree() const noexcept { return k_; }
    Index modes() const noexcept { return k_ + 1; }
    Index dof_count() const noexcept { return dofs_; }
    // First DOF of face f, -1 for boundary faces.
    Index face_offset(Index f) const { return offset_[f]; }
    const std::vector<Index>& interior_faces() const noexcept { return faces_; }

    // Local trace coefficients of triangle t, ordered by local face i
    // (edge from local vertex i+1 to i+2) and then by mode.
    std::vector<TraceDof> element_dofs(Index t) const;

  private:
    MeshPtr mesh_;
    int k_;
    Index dofs_ = 0;
    std::vector<Index> offset_;
    std::vector<Index> faces_;
};

SkeletonSpace build_space(MeshPtr m, int k);

// sqrt(sum_T h_T ||v||^2_{dT}).
double norm_h(const SkeletonSpace& s, const Vector& v);
// sqrt(sum_T h_T^{-1} ||v - m_T(v)||^2_{dT}), m_T the mean of the face means.
double triple_norm_h(const SkeletonSpace& s, const Vector& v);

// Element block of the triple norm in local trace coordinates
// (3(k+1) x 3(k+1)), boundary faces included.
DenseMatrix element_triple_block(const Mesh& m, Index t, int k);

struct GramMatrices
{
    SparseMatrix g_h;
    SparseMatrix g_triple;
};

GramMatrices gram_matrices(const SkeletonSpace& s);

// Scatter-adds a local block into a triplet list using element_dofs.
void scatter_block(const std::vector<TraceDof>& dofs, const DenseMatrix& block, std::vector<Triplet>& out);

} // namespace skelpre
