#include "sll/error.hpp"
#include "sll/extrapolation.hpp"
#include "sll/lab.hpp"
#include "sll/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace sll;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

ProblemSpec spec_of(Operator op, DomainSpec domain, int level, int count, double lambda = 0.0, double mu = 1.0) {
    ProblemSpec s;
    s.op = op;
    s.domain = std::move(domain);
    s.refinement_level = level;
    s.count = count;
    s.lambda = lambda;
    s.mu = mu;
    return s;
}

} // namespace

TEST(Richardson, RecoversPowerLaw) {
    // f(h) = 3 + h^4 on h = 1, 1/2, 1/4.
    const auto e = richardson_triple(4.0, 3.0 + 1.0 / 16.0, 3.0 + 1.0 / 256.0);
    EXPECT_TRUE(e.extrapolated);
    EXPECT_NEAR(e.order, 4.0, 1e-12);
    EXPECT_NEAR(e.value, 3.0, 1e-12);
}

TEST(Richardson, IdenticalTriplePassesThrough) {
    const auto e = richardson_triple(2.5, 2.5, 2.5);
    EXPECT_FALSE(e.extrapolated);
    EXPECT_EQ(e.value, 2.5);
}

TEST(Richardson, NonMonotoneTriplePassesThrough) {
    const auto e = richardson_triple(2.0, 1.0, 1.5);
    EXPECT_FALSE(e.extrapolated);
    EXPECT_EQ(e.value, 1.5);
}

TEST(Richardson, OrderIsClamped) {
    // Ratio 1.2 gives p = 0.26, clamped to 1.
    const auto e = richardson_triple(1.0 + 1.2 * 1.2, 1.0 + 1.2, 2.0);
    EXPECT_TRUE(e.extrapolated);
    EXPECT_EQ(e.order, kMinOrder);
    EXPECT_NEAR(e.value, 2.0 - 0.2 / (2.0 - 1.0), 1e-12);
}

TEST(Richardson, LinearInEpsilonIsExact) {
    auto f = [](double eps) { return 7.0 - 3.0 * eps; };
    EXPECT_NEAR(extrapolate_linear_to_zero(0.1, f(0.1), 0.04, f(0.04)), 7.0, 1e-13);
    EXPECT_THROW(extrapolate_linear_to_zero(0.1, 1.0, 0.1, 2.0), InvalidArgument);
}

TEST(Lab, OperatorNamesRoundTrip) {
    for (Operator op : {Operator::lame_dirichlet, Operator::lame_traction, Operator::stokes_dirichlet,
                        Operator::stokes_cauchy, Operator::laplace_vec_dirichlet, Operator::laplace_vec_traction,
                        Operator::scalar_dirichlet, Operator::scalar_neumann, Operator::buckling_dirichlet,
                        Operator::clamped_plate}) {
        EXPECT_EQ(operator_from_name(operator_name(op)), op);
    }
    EXPECT_THROW(operator_from_name("bogus"), InvalidArgument);
}

TEST(Lab, MultiplicityGroupsAndZeroModes) {
    const auto g = multiplicity_groups({0.0, 1e-13, 2.0, 2.0 + 1e-9, 2.0, 5.0});
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g[0].size, 2);
    EXPECT_EQ(g[1].size, 3);
    EXPECT_EQ(g[1].first, 2);
    EXPECT_EQ(g[2].size, 1);
    EXPECT_EQ(count_zero_modes({-1e-12, 2e-13, 3e-12, 9.87, 9.87}), 3);
    EXPECT_EQ(count_zero_modes({9.87, 12.0}), 0);
}

TEST(Lab, ValidateRejectsBadSpecs) {
    auto s = spec_of(Operator::lame_dirichlet, DomainSpec::unit_square(), 1, 4, -2.5);
    EXPECT_THROW(validate(s), InvalidArgument);
    s.lambda = 0.0;
    s.mu = 0.0;
    EXPECT_THROW(validate(s), InvalidArgument);
}

TEST(Lab, ScalarDirichletSquare) {
    const auto r = compute_spectrum(spec_of(Operator::scalar_dirichlet, DomainSpec::unit_square(), 3, 4));
    const double ref[4] = {2 * kPi2, 5 * kPi2, 5 * kPi2, 8 * kPi2};
    ASSERT_EQ(r.eigenvalues.size(), 4u);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.eigenvalues[i] / ref[i], 1.0, 5e-3);
    EXPECT_EQ(r.multiplicity_groups.size(), 3u);
    EXPECT_GT(r.dofs, 0);
    EXPECT_GT(r.mesh_h, 0.0);
}

TEST(Lab, VectorLaplaceDuplicatesScalarModes) {
    const auto v = compute_spectrum(spec_of(Operator::laplace_vec_dirichlet, DomainSpec::unit_square(), 2, 2));
    const auto s = compute_spectrum(spec_of(Operator::scalar_dirichlet, DomainSpec::unit_square(), 2, 1));
    EXPECT_NEAR(v.eigenvalues[0] / s.eigenvalues[0], 1.0, 1e-10);
    EXPECT_NEAR(v.eigenvalues[1] / s.eigenvalues[0], 1.0, 1e-10);
    EXPECT_NEAR(v.eigenvalues[0] / (2 * kPi2), 1.0, 5e-3);
}

TEST(Lab, NeumannFirstEigenvalueIsZero) {
    for (const auto& d : {DomainSpec::unit_square(), DomainSpec::unit_disk(), DomainSpec::annulus(0.5)}) {
        const auto r = compute_spectrum(spec_of(Operator::scalar_neumann, d, 1, 2));
        EXPECT_LE(std::abs(r.eigenvalues[0]), 1e-8) << d.name();
        EXPECT_EQ(r.zero_modes, 1) << d.name();
    }
}

TEST(Lab, DiskBucklingMatchesBessel) {
    const auto ext = converged_spectrum(spec_of(Operator::buckling_dirichlet, DomainSpec::unit_disk(), 1, 1), 1);
    EXPECT_NEAR(ext.values[0] / 14.681970642123893, 1.0, 1e-2);
}

TEST(Lab, ObservedOrders) {
    std::vector<SpectrumResult> levels;
    const auto p2 = converged_spectrum(spec_of(Operator::scalar_dirichlet, DomainSpec::unit_square(), 1, 5), 1, {},
                                       &levels);
    ASSERT_EQ(levels.size(), 3u);
    const auto ref = square_laplace_spectrum(SquareBc::dirichlet, 1.0, 5);
    for (int i = 0; i < 5; ++i) {
        EXPECT_NEAR(p2.orders[i], 4.0, 0.5) << "k=" << i + 1;
        EXPECT_LT(std::abs(p2.values[i] - ref[i]), std::abs(p2.finest[i] - ref[i])) << "k=" << i + 1;
    }
    const auto sq = converged_spectrum(spec_of(Operator::buckling_dirichlet, DomainSpec::unit_square(), 2, 3), 2);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(sq.orders[i], 2.0, 0.5) << "k=" << i + 1;
    // On the disk the first mode mixes the element error with the boundary
    // approximation error; the pair behind it shows the clean rate.
    const auto dk = converged_spectrum(spec_of(Operator::buckling_dirichlet, DomainSpec::unit_disk(), 2, 3), 2);
    for (int i = 1; i < 3; ++i) EXPECT_NEAR(dk.orders[i], 2.0, 0.5) << "k=" << i + 1;
}

TEST(Lab, ExtrapolateMeshNeedsThreeLevels) {
    std::vector<SpectrumResult> two(2);
    EXPECT_THROW(extrapolate_mesh(two), InvalidArgument);
}

TEST(Lab, TruncatedWhenCountExceedsDimension) {
    const auto r = compute_spectrum(spec_of(Operator::scalar_dirichlet, DomainSpec::unit_square(), 0, 500));
    EXPECT_TRUE(r.truncated);
    EXPECT_LT(r.eigenvalues.size(), 500u);
}

TEST(Lab, DenseCheckAgreesWithLanczosOnStokes) {
    const auto spec = spec_of(Operator::stokes_dirichlet, DomainSpec::unit_disk(), 1, 6);
    SolveOptions lanczos;
    lanczos.dense_limit = 0;
    const auto sparse = compute_spectrum(spec, lanczos);
    const auto dense = brute_force_dense_check(spec);
    ASSERT_EQ(sparse.eigenvalues.size(), 6u);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(sparse.eigenvalues[i] / dense.eigenvalues[i], 1.0, 1e-6);
}

TEST(Lab, SweepIsMonotoneWithRigidKernel) {
    const std::vector<double> grid{-0.5, 0.0, 1.0, 10.0};
    const auto t = lambda_sweep(DomainSpec::unit_square(), 1.0, grid, 5, 1);
    for (const auto& row : check_monotone(t)) {
        EXPECT_TRUE(row.pass) << row.bc << " " << row.lambda_low << "->" << row.lambda_high << " k=" << row.index;
    }
    for (const auto& col : t.traction) EXPECT_EQ(count_zero_modes(col), 3);
}

TEST(Lab, SweepAtMinusMuEqualsVectorLaplace) {
    const auto t = lambda_sweep(DomainSpec::unit_square(), 1.0, {-1.0}, 5, 1, DivergenceMode::plain);
    const auto db = compute_spectrum(spec_of(Operator::laplace_vec_dirichlet, DomainSpec::unit_square(), 1, 5));
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(t.dirichlet[0][i], db.eigenvalues[i], 1e-10 * db.eigenvalues[i]);
}

TEST(Lab, CheckMonotoneFlagsDecrease) {
    SweepTable t;
    t.lambdas = {0.0, 1.0};
    t.dirichlet = {{10.0, 20.0}, {10.5, 19.0}};
    t.traction = {{0.0, 5.0}, {0.0, 5.0}};
    const auto rows = check_monotone(t);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_TRUE(rows[0].pass);
    EXPECT_FALSE(rows[1].pass);
    EXPECT_TRUE(rows[2].pass);
}

TEST(Lab, PenaltyApproachesStokes) {
    const auto pen = stokes_via_penalty(DomainSpec::unit_disk(), 1.0, 1e4, 1, true, 2);
    const auto morley =
        converged_spectrum(spec_of(Operator::buckling_dirichlet, DomainSpec::unit_disk(), 1, 1), 1);
    EXPECT_NEAR(pen.dirichlet.extrapolated[0] / morley.values[0], 1.0, 5e-3);
    EXPECT_LE(pen.dirichlet.raw[0], pen.dirichlet.doubled[0]);
    // Linear extrapolation in eps = 1/(lambda + mu): the step beyond the
    // doubled value is (1 + mu / lambda) times the raw gap.
    const double gap = pen.dirichlet.doubled[0] - pen.dirichlet.raw[0];
    EXPECT_NEAR(pen.dirichlet.extrapolated[0] - pen.dirichlet.doubled[0], (1.0 + 1e-4) * gap, 1e-9 * std::abs(gap) + 1e-12);
    EXPECT_THROW(stokes_via_penalty(DomainSpec::unit_disk(), 1.0, 5.0, 1, true, 1), InvalidArgument);
}

TEST(Lab, SandwichMargins) {
    const auto sq = DomainSpec::unit_square();
    const auto mid = verify_sandwich(sq, 1.0, {1.0}, 5, 1);
    EXPECT_TRUE(mid.pass);
    for (const auto& r : mid.rows) {
        EXPECT_GT(r.left_margin, 0.0);
        EXPECT_GT(r.right_margin, 0.0);
    }
    const auto low = verify_sandwich(sq, 1.0, {-0.999}, 3, 1);
    for (const auto& r : low.rows) EXPECT_LT(std::abs(r.left_margin), 1e-2);
    const auto high = verify_sandwich(sq, 1.0, {1e4}, 3, 1);
    for (const auto& r : high.rows) EXPECT_LT(std::abs(r.right_margin), 1e-2);
    EXPECT_THROW(verify_sandwich(sq, 1.0, {-1.0}, 3, 1), InvalidArgument);
}

TEST(Lab, BucklingStokesIdentity) {
    const auto id1 = verify_buckling_stokes_identity(DomainSpec::unit_square(), 1.0, 5, 2);
    EXPECT_LT(id1.max_gap, 5e-3);
    const auto id2 = verify_buckling_stokes_identity(DomainSpec::unit_square(), 2.0, 5, 2);
    for (int i = 0; i < 5; ++i) {
        EXPECT_NEAR(id2.buckling[i] / id1.buckling[i], 2.0, 2e-10);
        EXPECT_NEAR(id2.stokes[i] / id1.stokes[i], 2.0, 2e-10);
    }
}

TEST(Lab, ChainOnSquareAndDisk) {
    const auto sq = verify_chain_inequalities(DomainSpec::unit_square(), 1.0, 3, 1);
    EXPECT_TRUE(sq.pass);
    const auto dk = verify_chain_inequalities(DomainSpec::unit_disk(), 1.0, 1, 1);
    EXPECT_TRUE(dk.pass);
    EXPECT_LE(std::abs(dk.theta[0]), 1e-8);
    EXPECT_NEAR(dk.xi[0] / 5.783185962946784, 1.0, 1e-2);
    EXPECT_NEAR(dk.gamma[0] / 10.215799, 1.0, 1e-2);
    EXPECT_NEAR(dk.buckling[0] / 14.681970642123893, 1.0, 1e-2);
}

TEST(Lab, TractionLaplaceZeroCountsAreReported) {
    // mu [2 Def u : Def v - div u div v] = mu [(u1,1 - u2,2)^2 + (u1,2 + u2,1)^2] vanishes on
    // u1 - i u2 holomorphic; on straight-edged P2 meshes that is the real span of 1, z, z^2.
    const auto obs = traction_laplace_zero_counts(DomainSpec::unit_square(), 1.0, {1}, 10);
    ASSERT_EQ(obs.size(), 1u);
    EXPECT_EQ(obs[0].level, 1);
    EXPECT_GT(obs[0].dofs, 0);
    EXPECT_EQ(obs[0].zero_modes, 6);
}
