#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "skelpre/error.hpp"

namespace skelpre {

using Index = std::int64_t;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

struct Triplet
{
    Index row;
    Index col;
    double value;
};

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row and no entry is
/// stored twice. Instances are immutable once built; use csr_from_triplets
/// to construct one.
class SparseMatrix
{
  public:
    SparseMatrix() = default;
    SparseMatrix(Index nrows, Index ncols);

    Index rows() const noexcept { return nrows_; }
    Index cols() const noexcept { return ncols_; }
    Index nnz() const noexcept { return static_cast<Index>(values_.size()); }

    std::span<const Index> row_ptr() const noexcept { return row_ptr_; }
    std::span<const Index> col_idx() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    // Entry (i, j), zero when not stored.
    double coeff(Index i, Index j) const;

    void multiply(const Vector& x, Vector& y) const;
    Vector operator*(const Vector& x) const;
    // y = A^T x without forming the transpose.
    void multiply_transpose(const Vector& x, Vector& y) const;

    SparseMatrix transpose() const;
    Vector diagonal() const;
    DenseMatrix to_dense() const;
    Eigen::SparseMatrix<double> to_eigen() const;

    double max_abs() const;
    // Largest |A_ij - A_ji| entrywise.
    double max_asymmetry() const;

    // Set when max|A - A^T| <= 1e-12 max|A| at construction.
    bool symmetric() const noexcept { return symmetric_; }

    friend SparseMatrix csr_from_triplets(Index, Index, std::span<const Triplet>);
    friend SparseMatrix csr_from_dense(const DenseMatrix&, double);
    friend SparseMatrix sparse_product(const SparseMatrix&, const SparseMatrix&);

  private:
    void certify_symmetry();

    Index nrows_ = 0;
    Index ncols_ = 0;
    std::vector<Index> row_ptr_{0};
    std::vector<Index> col_idx_;
    std::vector<double> values_;
    bool symmetric_ = false;
};

// Sums duplicates; throws StructuralError on out-of-range indices.
SparseMatrix csr_from_triplets(Index nrows, Index ncols, std::span<const Triplet> triplets);
SparseMatrix csr_from_dense(const DenseMatrix& a, double drop_tol = 0.0);
SparseMatrix sparse_product(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix identity_matrix(Index n);
SparseMatrix diagonal_matrix(const Vector& d);

// Writes "%%MatrixMarket matrix coordinate real symmetric" (lower triangle)
// when the matrix is symmetric, "general" otherwise.
void write_matrix_market(std::ostream& os, const SparseMatrix& a);

/// Square linear map given by its action. Used for matrix-free
/// preconditioners; apply must be linear.
class LinearOperator
{
  public:
    using ApplyFn = std::function<void(const Vector&, Vector&)>;

    LinearOperator() = default;
    LinearOperator(Index dim, ApplyFn fn) : dim_(dim), fn_(std::move(fn)) {}

    static LinearOperator from_matrix(std::shared_ptr<const SparseMatrix> a);
    static LinearOperator from_matrix(const SparseMatrix& a);
    static LinearOperator identity(Index n);

    Index dimension() const noexcept { return dim_; }
    void apply(const Vector& x, Vector& y) const { fn_(x, y); }
    Vector operator()(const Vector& x) const
    {
        Vector y(dim_);
        fn_(x, y);
        return y;
    }

    // Dense matrix of the operator, column by column. Caller bounds the size.
    DenseMatrix to_dense() const;

  private:
    Index dim_ = 0;
    ApplyFn fn_;
};

struct PcgReport
{
    int iterations = 0;
    // Monitored quantity at start: sqrt(x0' A x0) for b = 0, sqrt(r0' B r0) otherwise.
    double initial_energy = 0.0;
    // Monitored quantity after each iteration.
    std::vector<double> history;
    // lambda_max / lambda_min of the Lanczos tridiagonal built from the CG
    // coefficients; estimates cond(BA) from below.
    double ritz_cond = 1.0;
    double ritz_min = 1.0;
    double ritz_max = 1.0;
    bool converged = false;
};

struct PcgOptions
{
    double reduction = 1e-6;
    int max_iterations = 10000;
};

class DivergenceError : public Error
{
  public:
    DivergenceError(const std::string& what, PcgReport report)
      : Error(what), report_(std::move(report))
    {}
    const PcgReport& report() const noexcept { return report_; }

  private:
    PcgReport report_;
};

class NoConvergenceError : public Error
{
  public:
    NoConvergenceError(const std::string& what, PcgReport report)
      : Error(what), report_(std::move(report))
    {}
    const PcgReport& report() const noexcept { return report_; }

  private:
    PcgReport report_;
};

struct PcgResult
{
    Vector x;
    PcgReport report;
};

/// Preconditioned conjugate gradients for SPD A and SPD preconditioner B.
///
/// With b == 0 the iterate is the error, and iteration stops once
/// sqrt(x' A x) <= reduction * sqrt(x0' A x0). Otherwise the preconditioned
/// residual sqrt(r' B r) is monitored with the same reduction factor.
PcgResult pcg(const LinearOperator& a,
              const LinearOperator& b_prec,
              const Vector& rhs,
              const Vector& x0,
              const PcgOptions& options = {});

// Eigenvalue extremes of a symmetric tridiagonal matrix.
std::pair<double, double> tridiagonal_extents(const Vector& diag, const Vector& offdiag);

inline constexpr Index dense_oracle_cap = 5000;

struct EigExtents
{
    double lambda_min;
    double lambda_max;
    double cond() const { return lambda_max / lambda_min; }
};

// Extreme eigenvalues of symmetric A, or of A x = lambda M x when M is given
// (M SPD). Throws SizeCapError above dense_oracle_cap rows.
EigExtents dense_eig_extents(const SparseMatrix& a, const SparseMatrix* m = nullptr);
EigExtents dense_eig_extents(const DenseMatrix& a, const DenseMatrix* m = nullptr);

// Extreme eigenvalues of B A for SPD A and SPD operator B, computed as the
// spectrum of L' A L with B = L L'.
EigExtents dense_preconditioned_extents(const LinearOperator& b, const SparseMatrix& a);

/// Sparse Cholesky factorization, reusable across right-hand sides.
class SparseCholesky
{
  public:
    explicit SparseCholesky(const SparseMatrix& a);
    ~SparseCholesky();
    SparseCholesky(SparseCholesky&&) noexcept;
    SparseCholesky& operator=(SparseCholesky&&) noexcept;

    Vector solve(const Vector& b) const;
    Index dimension() const noexcept { return n_; }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    Index n_ = 0;
};

Vector sparse_cholesky_solve(const SparseMatrix& a, const Vector& b);

} // namespace skelpre
