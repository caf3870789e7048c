#include "sll/assembly.hpp"
#include "sll/eigensolve.hpp"
#include "sll/error.hpp"
#include "sll/factorization.hpp"

#include <Eigen/QR>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sll;

namespace {

SparseSymMatrix random_spd(int n, std::uint64_t seed, double shift) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) g(i, j) = dist(rng);
    }
    Eigen::MatrixXd s = g * g.transpose() / n + shift * Eigen::MatrixXd::Identity(n, n);
    return SparseSymMatrix::from_dense(s);
}

SparseSymMatrix laplacian_1d(int n, double h) {
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.0 / (h * h));
        if (i + 1 < n) t.emplace_back(i + 1, i, -1.0 / (h * h));
    }
    return SparseSymMatrix::from_triplets(n, t);
}

void expect_rel(double a, double b, double tol) { EXPECT_LE(std::abs(a - b), tol * std::abs(b)) << a << " vs " << b; }

} // namespace

TEST(Factorization, InertiaOfDiagonal) {
    Eigen::MatrixXd d = Eigen::Vector3d(-1.0, 2.0, -3.0).asDiagonal();
    SymmetricFactorization f(SparseSymMatrix::from_dense(d).lower());
    EXPECT_EQ(f.negative_count(), 2);
    const Eigen::VectorXd x = f.solve(Eigen::Vector3d(1.0, 1.0, 1.0));
    EXPECT_NEAR(x(2), -1.0 / 3.0, 1e-15);
}

TEST(Factorization, ZeroPivotFallsBackToBunchKaufman) {
    Eigen::Matrix2d a;
    a << 0.0, 1.0, 1.0, 0.0;
    SymmetricFactorization f(SparseSymMatrix::from_dense(a).lower());
    EXPECT_TRUE(f.dense_fallback());
    EXPECT_EQ(f.negative_count(), 1);
    const Eigen::VectorXd x = f.solve(Eigen::Vector2d(2.0, 3.0));
    EXPECT_NEAR(x(0), 3.0, 1e-14);
    EXPECT_NEAR(x(1), 2.0, 1e-14);
}

TEST(Factorization, SingularThrows) {
    Eigen::Matrix2d a;
    a << 1.0, 1.0, 1.0, 1.0;
    EXPECT_THROW(SymmetricFactorization(SparseSymMatrix::from_dense(a).lower()), NumericalError);
}

TEST(Dense, DiagonalPencil) {
    Eigen::MatrixXd a = Eigen::Vector2d(3.0, 2.0).asDiagonal();
    const auto r = solve_dense_sym_generalized(SparseSymMatrix::from_dense(a), SparseSymMatrix::identity(2), 2);
    ASSERT_EQ(r.eigenvalues.size(), 2u);
    EXPECT_NEAR(r.eigenvalues[0], 2.0, 1e-14);
    EXPECT_NEAR(r.eigenvalues[1], 3.0, 1e-14);
}

TEST(Dense, IdentityPencil) {
    const SparseSymMatrix a = random_spd(12, 3, 0.5);
    const auto r = solve_dense_sym_generalized(a, a, 3);
    for (double v : r.eigenvalues) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Dense, NamesFailingPivot) {
    Eigen::MatrixXd m = Eigen::Vector3d(1.0, 2.0, -1.0).asDiagonal();
    try {
        solve_dense_sym_generalized(SparseSymMatrix::identity(3), SparseSymMatrix::from_dense(m), 1);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_EQ(e.pivot(), 2);
    }
}

TEST(Dense, TruncatesLargeK) {
    const auto r = solve_dense_sym_generalized(SparseSymMatrix::identity(4), SparseSymMatrix::identity(4), 9);
    EXPECT_TRUE(r.truncated);
    EXPECT_EQ(r.eigenvalues.size(), 4u);
}

TEST(Dense, MOrthonormalVectors) {
    const SparseSymMatrix a = random_spd(30, 5, 0.1);
    const SparseSymMatrix m = random_spd(30, 6, 1.0);
    const auto r = solve_dense_sym_generalized(a, m, 10);
    const Eigen::MatrixXd g = r.eigenvectors.transpose() * m.to_dense() * r.eigenvectors;
    EXPECT_LE((g - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-8);
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        EXPECT_LE(r.residual_norms[i], 1e-9 * (1 + std::abs(r.eigenvalues[i])));
    }
}

TEST(Lanczos, TridiagonalLaplacian) {
    const int n = 100;
    const double h = 1.0 / 101.0;
    const auto r = solve_shift_invert_lanczos(laplacian_1d(n, h), SparseSymMatrix::identity(n), 0.0, 3);
    ASSERT_EQ(r.eigenvalues.size(), 3u);
    EXPECT_FALSE(r.partial);
    for (int j = 1; j <= 3; ++j) {
        expect_rel(r.eigenvalues[j - 1], 2.0 / (h * h) * (1.0 - std::cos(j * std::numbers::pi * h)), 1e-9);
    }
}

TEST(Lanczos, ZeroKDoesNothing) {
    // A singular pencil would fail to factor; k = 0 must not try.
    const auto r = solve_shift_invert_lanczos(SparseSymMatrix(5), SparseSymMatrix::identity(5), 0.0, 0);
    EXPECT_TRUE(r.eigenvalues.empty());
    EXPECT_EQ(r.iterations, 0);
}

TEST(Lanczos, AgreesWithDenseOnRandomPencils) {
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 50 + 30 * trial;
        const SparseSymMatrix a = random_spd(n, 100 + trial, 0.05);
        const SparseSymMatrix m = random_spd(n, 200 + trial, 1.0);
        const auto d = solve_dense_sym_generalized(a, m, 8);
        const auto l = solve_shift_invert_lanczos(a, m, 0.0, 8);
        ASSERT_EQ(l.eigenvalues.size(), 8u);
        for (int i = 0; i < 8; ++i) expect_rel(l.eigenvalues[i], d.eigenvalues[i], 1e-9);
        const Eigen::MatrixXd g = l.eigenvectors.transpose() * m.to_dense() * l.eigenvectors;
        EXPECT_LE((g - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-8);
        for (int i = 0; i < 8; ++i) EXPECT_LE(l.residual_norms[i], 1e-9 * (1 + std::abs(l.eigenvalues[i])));
    }
}

TEST(Lanczos, FindsBothMembersOfDoubleEigenvalue) {
    const Mesh mesh = mesh_for_level(DomainSpec::unit_square(), 2);
    const auto red = reduce(assemble_scalar_laplace(mesh, 1.0, BoundaryCondition::dirichlet, ElementKind::P2));
    const auto dense = solve_dense_sym_generalized(red.stiffness, red.mass, 4);
    EXPECT_NEAR(dense.eigenvalues[1], dense.eigenvalues[2], 1e-9 * dense.eigenvalues[1]);
    // Shift between the simple first eigenvalue and the 5 pi^2 pair.
    const double sigma = 0.5 * (dense.eigenvalues[0] + dense.eigenvalues[1]);
    const auto l = solve_shift_invert_lanczos(red.stiffness, red.mass, sigma, 3);
    ASSERT_EQ(l.eigenvalues.size(), 3u);
    for (int i = 0; i < 3; ++i) expect_rel(l.eigenvalues[i], dense.eigenvalues[i], 1e-9);
    const auto pair = solve_shift_invert_lanczos(red.stiffness, red.mass, dense.eigenvalues[1] * (1 + 1e-3), 2);
    expect_rel(pair.eigenvalues[0], dense.eigenvalues[1], 1e-9);
    expect_rel(pair.eigenvalues[1], dense.eigenvalues[2], 1e-9);
}

TEST(Lanczos, ScalingInvariance) {
    const SparseSymMatrix a = random_spd(60, 9, 0.2);
    const SparseSymMatrix m = random_spd(60, 10, 1.0);
    const auto base = solve_shift_invert_lanczos(a, m, 0.0, 5);
    const auto both = solve_shift_invert_lanczos(7.3 * a, 7.3 * m, 0.0, 5);
    const auto only_a = solve_shift_invert_lanczos(7.3 * a, m, 0.0, 5);
    for (int i = 0; i < 5; ++i) {
        expect_rel(both.eigenvalues[i], base.eigenvalues[i], 1e-9);
        expect_rel(only_a.eigenvalues[i], 7.3 * base.eigenvalues[i], 1e-9);
    }
}

TEST(Lanczos, DeterministicForFixedSeed) {
    const SparseSymMatrix a = random_spd(40, 12, 0.2);
    const SparseSymMatrix m = SparseSymMatrix::identity(40);
    LanczosOptions opts;
    opts.seed = 1234;
    const auto r1 = solve_shift_invert_lanczos(a, m, 0.0, 4, opts);
    const auto r2 = solve_shift_invert_lanczos(a, m, 0.0, 4, opts);
    EXPECT_EQ(r1.eigenvalues, r2.eigenvalues);
}

TEST(Lanczos, ShiftRetryOnExactEigenvalue) {
    Eigen::MatrixXd a = Eigen::Vector4d(1.0, 2.0, 3.0, 4.0).asDiagonal();
    const auto r = solve_shift_invert_lanczos(SparseSymMatrix::from_dense(a), SparseSymMatrix::identity(4), 2.0, 2);
    EXPECT_GE(r.shift_retries, 1);
    EXPECT_NEAR(r.eigenvalues[0], 2.0, 1e-12);
}

TEST(Inertia, CountBelowAndShiftPlacement) {
    Eigen::MatrixXd a = Eigen::Vector4d(-5.0, -1.0, 3.0, 4.0).asDiagonal();
    const auto sa = SparseSymMatrix::from_dense(a);
    const auto m = SparseSymMatrix::identity(4);
    EXPECT_EQ(count_below(sa, std::nullopt, m, 0.0), 2);
    EXPECT_EQ(count_below(sa, std::nullopt, m, 3.5), 3);
    const double s = shift_below_spectrum(sa, std::nullopt, m, 0.0, 0.1);
    EXPECT_LT(s, -5.0);
    const auto r = solve_shift_invert_lanczos(sa, m, s, 2);
    EXPECT_NEAR(r.eigenvalues[0], -5.0, 1e-12);
    EXPECT_NEAR(r.eigenvalues[1], -1.0, 1e-12);
}

TEST(SaddlePoint, WithoutConstraintMatchesLanczos) {
    const Mesh mesh = mesh_for_level(DomainSpec::unit_square(), 1);
    const auto red = reduce(assemble_stokes_taylor_hood(mesh, 1.0, BoundaryCondition::dirichlet));
    const auto a = solve_saddle_point_eig(red.stiffness, std::nullopt, red.mass, 0.0, 4);
    const auto b = solve_shift_invert_lanczos(red.stiffness, red.mass, 0.0, 4);
    for (int i = 0; i < 4; ++i) expect_rel(a.eigenvalues[i], b.eigenvalues[i], 1e-10);
}

TEST(SaddlePoint, DiskDirichletFirstEigenvalue) {
    const Mesh mesh = mesh_for_level(DomainSpec::unit_disk(), 3);
    const auto red = reduce(assemble_stokes_taylor_hood(mesh, 1.0, BoundaryCondition::dirichlet));
    const auto r = solve_saddle_point_eig(red.stiffness, red.constraint, red.mass, 0.0, 3);
    ASSERT_EQ(r.eigenvalues.size(), 3u);
    EXPECT_NEAR(r.eigenvalues[0], 14.681970642123893, 0.01 * 14.68197);
    // m = 2 pair: j_{2,1}^2
    EXPECT_NEAR(r.eigenvalues[1], r.eigenvalues[2], 1e-8 * r.eigenvalues[1]);
    EXPECT_NEAR(r.eigenvalues[1], 26.374616427163, 0.01 * 26.3746);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(r.residual_norms[i], 1e-9 * (1 + r.eigenvalues[i]));
}

TEST(SaddlePoint, CauchyForceHasThreeRigidModes) {
    const Mesh mesh = mesh_for_level(DomainSpec::unit_square(), 2);
    const auto sys = assemble_stokes_taylor_hood(mesh, 1.0, BoundaryCondition::cauchy_force);
    const auto red = reduce(sys);
    const auto r = solve_saddle_point_eig(red.stiffness, red.constraint, red.mass, -0.1, 5);
    ASSERT_EQ(r.eigenvalues.size(), 5u);
    for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(r.eigenvalues[i]), 1e-8 * r.eigenvalues[3]);
    EXPECT_GT(r.eigenvalues[3], 1.0);
}

TEST(SaddlePoint, MatchesNullSpaceProjectedDense) {
    const Mesh mesh = mesh_for_level(DomainSpec::unit_disk(), 1);
    const auto red = reduce(assemble_stokes_taylor_hood(mesh, 1.0, BoundaryCondition::dirichlet));
    const Eigen::MatrixXd b = Eigen::MatrixXd(*red.constraint);
    // Orthonormal null-space basis of B from a full QR of B^T.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(b.transpose());
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    const Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd z = q.rightCols(b.cols() - rank);
    const Eigen::MatrixXd az = z.transpose() * red.stiffness.to_dense() * z;
    const Eigen::MatrixXd mz = z.transpose() * red.mass.to_dense() * z;
    const auto dense = solve_dense_sym_generalized(SparseSymMatrix::from_dense(az), SparseSymMatrix::from_dense(mz), 6);
    const auto sad = solve_saddle_point_eig(red.stiffness, red.constraint, red.mass, 0.0, 6);
    for (int i = 0; i < 6; ++i) expect_rel(sad.eigenvalues[i], dense.eigenvalues[i], 1e-6);
}
