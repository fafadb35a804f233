#include "skelpre/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace skelpre {

namespace {

void
check_cap(Index n)
{
    if (n > dense_oracle_cap)
        throw SizeCapError("dense eigensolve refused for dimension " + std::to_string(n) + " > " +
                           std::to_string(dense_oracle_cap) + "; use the PCG Ritz estimate instead");
}

} // namespace

EigExtents
dense_eig_extents(const DenseMatrix& a, const DenseMatrix* m)
{
    check_cap(a.rows());
    if (a.rows() == 0)
        throw StructuralError("dense_eig_extents: empty matrix");
    Vector ev;
    if (m == nullptr) {
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(a, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw Error("dense_eig_extents: eigensolver failed");
        ev = es.eigenvalues();
    } else {
        if (m->rows() != a.rows())
            throw StructuralError("dense_eig_extents: A and M differ in size");
        Eigen::LLT<DenseMatrix> llt(*m);
        if (llt.info() != Eigen::Success)
            throw NotSpdError("dense_eig_extents: M is not SPD");
        Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(a, *m, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
        if (es.info() != Eigen::Success)
            throw Error("dense_eig_extents: generalized eigensolver failed");
        ev = es.eigenvalues();
    }
    return {ev.minCoeff(), ev.maxCoeff()};
}

EigExtents
dense_eig_extents(const SparseMatrix& a, const SparseMatrix* m)
{
    check_cap(a.rows());
    if (m == nullptr)
        return dense_eig_extents(a.to_dense());
    DenseMatrix md = m->to_dense();
    return dense_eig_extents(a.to_dense(), &md);
}

EigExtents
dense_preconditioned_extents(const LinearOperator& b, const SparseMatrix& a)
{
    check_cap(a.rows());
    if (b.dimension() != a.rows())
        throw StructuralError("dense_preconditioned_extents: dimension mismatch");
    DenseMatrix bd = b.to_dense();
    bd = 0.5 * (bd + bd.transpose()).eval();
    Eigen::LLT<DenseMatrix> llt(bd);
    if (llt.info() != Eigen::Success)
        throw NotSpdError("dense_preconditioned_extents: preconditioner is not SPD");
    DenseMatrix l = llt.matrixL();
    DenseMatrix c = l.transpose() * a.to_dense() * l;
    return dense_eig_extents(c);
}

} // namespace skelpre
