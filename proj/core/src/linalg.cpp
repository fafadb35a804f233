#include "skelpre/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include <Eigen/SparseCholesky>

namespace skelpre {

SparseMatrix::SparseMatrix(Index nrows, Index ncols)
  : nrows_(nrows), ncols_(ncols), row_ptr_(static_cast<std::size_t>(nrows) + 1, 0)
{
    certify_symmetry();
}

double
SparseMatrix::coeff(Index i, Index j) const
{
    auto begin = col_idx_.begin() + row_ptr_[i];
    auto end = col_idx_.begin() + row_ptr_[i + 1];
    auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j)
        return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

void
SparseMatrix::multiply(const Vector& x, Vector& y) const
{
    y.resize(nrows_);
    for (Index i = 0; i < nrows_; ++i) {
        double s = 0.0;
        for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
            s += values_[p] * x[col_idx_[p]];
        y[i] = s;
    }
}

Vector
SparseMatrix::operator*(const Vector& x) const
{
    Vector y;
    multiply(x, y);
    return y;
}

void
SparseMatrix::multiply_transpose(const Vector& x, Vector& y) const
{
    y.setZero(ncols_);
    for (Index i = 0; i < nrows_; ++i) {
        const double xi = x[i];
        if (xi == 0.0)
            continue;
        for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
            y[col_idx_[p]] += values_[p] * xi;
    }
}

SparseMatrix
SparseMatrix::transpose() const
{
    SparseMatrix t(ncols_, nrows_);
    t.row_ptr_.assign(static_cast<std::size_t>(ncols_) + 1, 0);
    for (Index c : col_idx_)
        ++t.row_ptr_[c + 1];
    std::partial_sum(t.row_ptr_.begin(), t.row_ptr_.end(), t.row_ptr_.begin());
    t.col_idx_.resize(col_idx_.size());
    t.values_.resize(values_.size());
    std::vector<Index> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
    // Rows visited in increasing order keep the transposed columns sorted.
    for (Index i = 0; i < nrows_; ++i) {
        for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            Index dst = next[col_idx_[p]]++;
            t.col_idx_[dst] = i;
            t.values_[dst] = values_[p];
        }
    }
    t.certify_symmetry();
    return t;
}

Vector
SparseMatrix::diagonal() const
{
    Vector d = Vector::Zero(std::min(nrows_, ncols_));
    for (Index i = 0; i < d.size(); ++i)
        d[i] = coeff(i, i);
    return d;
}

DenseMatrix
SparseMatrix::to_dense() const
{
    DenseMatrix a = DenseMatrix::Zero(nrows_, ncols_);
    for (Index i = 0; i < nrows_; ++i)
        for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
            a(i, col_idx_[p]) = values_[p];
    return a;
}

Eigen::SparseMatrix<double>
SparseMatrix::to_eigen() const
{
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(values_.size());
    for (Index i = 0; i < nrows_; ++i)
        for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
            trips.emplace_back(static_cast<int>(i), static_cast<int>(col_idx_[p]), values_[p]);
    Eigen::SparseMatrix<double> m(nrows_, ncols_);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

double
SparseMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : values_)
        m = std::max(m, std::abs(v));
    return m;
}

double
SparseMatrix::max_asymmetry() const
{
    if (nrows_ != ncols_)
        return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (Index i = 0; i < nrows_; ++i)
        for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
            m = std::max(m, std::abs(values_[p] - coeff(col_idx_[p], i)));
    return m;
}

void
SparseMatrix::certify_symmetry()
{
    symmetric_ = nrows_ == ncols_ && max_asymmetry() <= 1e-12 * max_abs();
}

SparseMatrix
csr_from_triplets(Index nrows, Index ncols, std::span<const Triplet> triplets)
{
    SparseMatrix a(nrows, ncols);
    a.row_ptr_.assign(static_cast<std::size_t>(nrows) + 1, 0);
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
            throw StructuralError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                                  ") outside " + std::to_string(nrows) + "x" + std::to_string(ncols));
        ++a.row_ptr_[t.row + 1];
    }
    std::partial_sum(a.row_ptr_.begin(), a.row_ptr_.end(), a.row_ptr_.begin());

    // Bucket by row, then sort each row by column and merge duplicates.
    std::vector<std::pair<Index, double>> bucket(triplets.size());
    std::vector<Index> next(a.row_ptr_.begin(), a.row_ptr_.end() - 1);
    for (const auto& t : triplets)
        bucket[next[t.row]++] = {t.col, t.value};

    std::vector<Index> compressed_ptr(static_cast<std::size_t>(nrows) + 1, 0);
    a.col_idx_.reserve(triplets.size());
    a.values_.reserve(triplets.size());
    for (Index i = 0; i < nrows; ++i) {
        auto first = bucket.begin() + a.row_ptr_[i];
        auto last = bucket.begin() + a.row_ptr_[i + 1];
        std::stable_sort(first, last, [](const auto& l, const auto& r) { return l.first < r.first; });
        for (auto it = first; it != last; ++it) {
            if (!a.col_idx_.empty() && static_cast<Index>(a.col_idx_.size()) > compressed_ptr[i] &&
                a.col_idx_.back() == it->first)
                a.values_.back() += it->second;
            else {
                a.col_idx_.push_back(it->first);
                a.values_.push_back(it->second);
            }
        }
        compressed_ptr[i + 1] = static_cast<Index>(a.col_idx_.size());
    }
    a.row_ptr_ = std::move(compressed_ptr);
    a.certify_symmetry();
    return a;
}

SparseMatrix
csr_from_dense(const DenseMatrix& d, double drop_tol)
{
    std::vector<Triplet> trips;
    for (Index i = 0; i < d.rows(); ++i)
        for (Index j = 0; j < d.cols(); ++j)
            if (std::abs(d(i, j)) > drop_tol)
                trips.push_back({i, j, d(i, j)});
    return csr_from_triplets(d.rows(), d.cols(), trips);
}

SparseMatrix
sparse_product(const SparseMatrix& a, const SparseMatrix& b)
{
    if (a.cols() != b.rows())
        throw StructuralError("sparse_product: inner dimensions differ");
    std::vector<Triplet> trips;
    for (Index i = 0; i < a.rows(); ++i)
        for (Index p = a.row_ptr_[i]; p < a.row_ptr_[i + 1]; ++p) {
            const Index k = a.col_idx_[p];
            for (Index q = b.row_ptr_[k]; q < b.row_ptr_[k + 1]; ++q)
                trips.push_back({i, b.col_idx_[q], a.values_[p] * b.values_[q]});
        }
    return csr_from_triplets(a.rows(), b.cols(), trips);
}

SparseMatrix
identity_matrix(Index n)
{
    return diagonal_matrix(Vector::Ones(n));
}

SparseMatrix
diagonal_matrix(const Vector& d)
{
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(d.size()));
    for (Index i = 0; i < d.size(); ++i)
        trips.push_back({i, i, d[i]});
    return csr_from_triplets(d.size(), d.size(), trips);
}

void
write_matrix_market(std::ostream& os, const SparseMatrix& a)
{
    const bool sym = a.symmetric();
    os << "%%MatrixMarket matrix coordinate real " << (sym ? "symmetric" : "general") << "\n";
    Index count = 0;
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto va = a.values();
    for (Index i = 0; i < a.rows(); ++i)
        for (Index p = rp[i]; p < rp[i + 1]; ++p)
            if (!sym || ci[p] <= i)
                ++count;
    os << a.rows() << " " << a.cols() << " " << count << "\n";
    char buf[64];
    for (Index i = 0; i < a.rows(); ++i)
        for (Index p = rp[i]; p < rp[i + 1]; ++p)
            if (!sym || ci[p] <= i) {
                std::snprintf(buf, sizeof buf, "%.17g", va[p]);
                os << i + 1 << " " << ci[p] + 1 << " " << buf << "\n";
            }
}

LinearOperator
LinearOperator::from_matrix(std::shared_ptr<const SparseMatrix> a)
{
    if (a->rows() != a->cols())
        throw StructuralError("LinearOperator::from_matrix: matrix is not square");
    const Index n = a->rows();
    return LinearOperator(n, [a = std::move(a)](const Vector& x, Vector& y) { a->multiply(x, y); });
}

LinearOperator
LinearOperator::from_matrix(const SparseMatrix& a)
{
    return from_matrix(std::make_shared<const SparseMatrix>(a));
}

LinearOperator
LinearOperator::identity(Index n)
{
    return LinearOperator(n, [](const Vector& x, Vector& y) { y = x; });
}

DenseMatrix
LinearOperator::to_dense() const
{
    DenseMatrix d(dim_, dim_);
    Vector e = Vector::Zero(dim_);
    Vector col(dim_);
    for (Index j = 0; j < dim_; ++j) {
        e[j] = 1.0;
        apply(e, col);
        d.col(j) = col;
        e[j] = 0.0;
    }
    return d;
}

struct SparseCholesky::Impl
{
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
};

SparseCholesky::SparseCholesky(const SparseMatrix& a) : impl_(std::make_unique<Impl>()), n_(a.rows())
{
    if (a.rows() != a.cols())
        throw StructuralError("SparseCholesky: matrix is not square");
    impl_->llt.compute(a.to_eigen());
    if (impl_->llt.info() != Eigen::Success)
        throw NotSpdError("SparseCholesky: non-positive pivot, matrix is not SPD");
}

SparseCholesky::~SparseCholesky() = default;
SparseCholesky::SparseCholesky(SparseCholesky&&) noexcept = default;
SparseCholesky& SparseCholesky::operator=(SparseCholesky&&) noexcept = default;

Vector
SparseCholesky::solve(const Vector& b) const
{
    return impl_->llt.solve(b);
}

Vector
sparse_cholesky_solve(const SparseMatrix& a, const Vector& b)
{
    return SparseCholesky(a).solve(b);
}

} // namespace skelpre
