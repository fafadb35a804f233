#include <random>

#include <gtest/gtest.h>

#include "skelpre/linalg.hpp"
#include "skelpre/mesh.hpp"
#include "skelpre/precond.hpp"

using namespace skelpre;

namespace {

DenseMatrix
random_dense(Index n, std::mt19937& rng, double density = 0.3)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::bernoulli_distribution keep(density);
    DenseMatrix a = DenseMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (keep(rng))
                a(i, j) = u(rng);
    return a;
}

SparseMatrix
spd_matrix(Index n, std::mt19937& rng)
{
    const DenseMatrix a = random_dense(n, rng);
    return csr_from_dense(a * a.transpose() + double(n) * DenseMatrix::Identity(n, n));
}

} // namespace

TEST(Csr, DuplicatesAreSummed)
{
    const std::vector<Triplet> t = {{0, 0, 1.0}, {0, 0, 2.0}};
    const SparseMatrix a = csr_from_triplets(1, 1, t);
    EXPECT_EQ(a.nnz(), 1);
    EXPECT_EQ(a.coeff(0, 0), 3.0);
}

TEST(Csr, EmptyTriplets)
{
    const SparseMatrix a = csr_from_triplets(2, 2, {});
    EXPECT_EQ(a.nnz(), 0);
    EXPECT_EQ(a.to_dense(), DenseMatrix::Zero(2, 2));
}

TEST(Csr, OutOfRangeThrows)
{
    const std::vector<Triplet> t = {{2, 0, 1.0}};
    EXPECT_THROW(csr_from_triplets(2, 2, t), StructuralError);
}

TEST(Csr, ReferenceTriangleP1Stiffness)
{
    // grad phi = (-1,-1), (1,0), (0,1); area 1/2.
    const Eigen::Matrix<double, 3, 2> g{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    std::vector<Triplet> t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            t.push_back({i, j, 0.5 * g.row(i).dot(g.row(j))});
    const DenseMatrix a = csr_from_triplets(3, 3, t).to_dense();
    const Eigen::Matrix3d expect{{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    EXPECT_LE((a - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Csr, SpmvMatchesDense)
{
    std::mt19937 rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const DenseMatrix d = random_dense(50, rng);
        const SparseMatrix a = csr_from_dense(d);
        const Vector x = Vector::Random(50);
        const Vector ref = d * x;
        EXPECT_LE((a * x - ref).norm(), 1e-13 * std::max(1.0, ref.norm()));
        Vector yt;
        a.multiply_transpose(x, yt);
        EXPECT_LE((yt - d.transpose() * x).norm(), 1e-13 * std::max(1.0, yt.norm()));
        EXPECT_EQ(a.transpose().to_dense(), d.transpose());
    }
}

TEST(Csr, SparseProduct)
{
    std::mt19937 rng(2);
    const DenseMatrix a = random_dense(20, rng), b = random_dense(20, rng);
    const DenseMatrix c = sparse_product(csr_from_dense(a), csr_from_dense(b)).to_dense();
    EXPECT_LE((c - a * b).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Csr, SymmetryFlag)
{
    std::mt19937 rng(3);
    EXPECT_TRUE(spd_matrix(10, rng).symmetric());
    const std::vector<Triplet> t = {{0, 1, 1.0}};
    EXPECT_FALSE(csr_from_triplets(2, 2, t).symmetric());
}

TEST(Csr, MatrixMarketSymmetricHeader)
{
    std::ostringstream os;
    write_matrix_market(os, identity_matrix(3));
    EXPECT_EQ(os.str().rfind("%%MatrixMarket matrix coordinate real symmetric", 0), 0u);
}

TEST(Pcg, ExactPreconditionerOneIteration)
{
    const auto id = LinearOperator::identity(5);
    const PcgResult r = pcg(id, id, Vector::Zero(5), Vector::Ones(5));
    EXPECT_TRUE(r.report.converged);
    EXPECT_EQ(r.report.iterations, 1);
}

TEST(Pcg, DiagonalSystemAgainstDirectSolve)
{
    const Vector diag = (Vector(3) << 1.0, 10.0, 100.0).finished();
    const SparseMatrix a = diagonal_matrix(diag);
    const Vector b = (Vector(3) << 0.3, -1.2, 2.5).finished();
    const PcgResult r = pcg(LinearOperator::from_matrix(a), LinearOperator::identity(3), b, Vector::Zero(3));
    const Vector exact = b.cwiseQuotient(diag);
    const Vector e = r.x - exact;
    const double energy = std::sqrt(e.dot(a * e));
    const double initial = std::sqrt(exact.dot(a * exact));
    EXPECT_LE(energy, 1e-6 * initial);
}

TEST(Pcg, EnergyHistoryNonIncreasing)
{
    std::mt19937 rng(4);
    const SparseMatrix a = spd_matrix(60, rng);
    const PcgResult r =
        pcg(LinearOperator::from_matrix(a), LinearOperator::identity(60), Vector::Zero(60), Vector::Ones(60),
            {1e-10, 10000});
    ASSERT_FALSE(r.report.history.empty());
    double prev = r.report.initial_energy;
    for (double e : r.report.history) {
        EXPECT_LE(e, prev * (1.0 + 1e-12));
        prev = e;
    }
}

TEST(Pcg, RitzBelowDenseCondition)
{
    std::mt19937 rng(5);
    const SparseMatrix a = spd_matrix(200, rng);
    const PcgResult r = pcg(LinearOperator::from_matrix(a), LinearOperator::identity(200), Vector::Zero(200),
                            Vector::Random(200), {1e-12, 10000});
    const double dense = dense_eig_extents(a).cond();
    EXPECT_LE(r.report.ritz_cond, dense * 1.05);
    EXPECT_GE(r.report.ritz_cond, 0.9 * dense);
}

TEST(Pcg, IndefiniteOperatorReported)
{
    const Vector d = (Vector(2) << 1.0, -1.0).finished();
    const SparseMatrix a = diagonal_matrix(d);
    const Vector x0 = (Vector(2) << 1.0, 2.0).finished();
    EXPECT_THROW(pcg(LinearOperator::from_matrix(a), LinearOperator::identity(2), Vector::Zero(2), x0), DivergenceError);
}

TEST(DenseEig, Diagonal)
{
    const EigExtents e = dense_eig_extents(diagonal_matrix((Vector(2) << 2.0, 5.0).finished()));
    EXPECT_NEAR(e.lambda_min, 2.0, 1e-14);
    EXPECT_NEAR(e.lambda_max, 5.0, 1e-14);
}

TEST(DenseEig, GeneralizedAndPreconditioned)
{
    std::mt19937 rng(6);
    const SparseMatrix a = spd_matrix(30, rng), m = spd_matrix(30, rng);
    const EigExtents g = dense_eig_extents(a, &m);
    const DenseMatrix ma = m.to_dense().inverse() * a.to_dense();
    const Eigen::VectorXd ev = ma.eigenvalues().real();
    EXPECT_NEAR(g.lambda_min, ev.minCoeff(), 1e-10 * ev.maxCoeff());
    EXPECT_NEAR(g.lambda_max, ev.maxCoeff(), 1e-10 * ev.maxCoeff());

    // B = M^{-1}: spectrum of B A is that of the generalized problem.
    const DenseMatrix minv = m.to_dense().inverse();
    const LinearOperator b(30, [&](const Vector& x, Vector& y) { y = minv * x; });
    const EigExtents p = dense_preconditioned_extents(b, a);
    EXPECT_NEAR(p.cond(), g.cond(), 1e-8 * g.cond());
}

TEST(DenseEig, SizeCap)
{
    EXPECT_THROW(dense_eig_extents(identity_matrix(dense_oracle_cap + 1)), SizeCapError);
}

TEST(Cholesky, Identity)
{
    const Vector b = (Vector(4) << 1, 2, 3, 4).finished();
    EXPECT_EQ(sparse_cholesky_solve(identity_matrix(4), b), b);
}

TEST(Cholesky, TwoByTwo)
{
    const SparseMatrix a = csr_from_dense((DenseMatrix(2, 2) << 4, 1, 1, 3).finished());
    const Vector x = sparse_cholesky_solve(a, (Vector(2) << 1, 2).finished());
    EXPECT_NEAR(x[0], 1.0 / 11.0, 1e-15);
    EXPECT_NEAR(x[1], 7.0 / 11.0, 1e-15);
}

TEST(Cholesky, P1StiffnessResidual)
{
    const auto m = build_hierarchy(DomainKind::square(), 2).levels.back();
    const SparseMatrix a = p1_stiffness(*m, {});
    const SparseMatrix mass = p1_mass(*m);
    const Vector b = mass * Vector::Ones(a.rows());
    const Vector x = sparse_cholesky_solve(a, b);
    EXPECT_LE((a * x - b).norm(), 1e-10 * b.norm());
}

TEST(Cholesky, NotSpdThrows)
{
    const SparseMatrix a = diagonal_matrix((Vector(2) << 1.0, -1.0).finished());
    EXPECT_THROW(sparse_cholesky_solve(a, Vector::Ones(2)), NotSpdError);
}
