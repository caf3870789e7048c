#include "sll/error.hpp"
#include "sll/heat_trace.hpp"
#include "sll/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace sll;

namespace {

constexpr double kPi = std::numbers::pi;

GeometryInputs square_geom() { return GeometryInputs::from_domain(DomainSpec::unit_square()); }
GeometryInputs disk_geom() { return GeometryInputs::from_domain(DomainSpec::unit_disk()); }

} // namespace

TEST(HeatTrace, LameSquareCoefficients) {
    const auto m = theoretical_coefficients(TraceOperator::lame, TraceBc::dirichlet, 0.0, 1.0, 2, square_geom());
    EXPECT_NEAR(m.coefficient(0), 3.0 / (8.0 * kPi), 1e-14);
    EXPECT_NEAR(m.coefficient(1), -0.4815659, 1e-7);
    EXPECT_EQ(m.terms[0].power, -1.0);
    EXPECT_EQ(m.terms[1].power, -0.5);
    EXPECT_EQ(m.terms[2].power, 0.0);
    const auto t = theoretical_coefficients(TraceOperator::lame, TraceBc::traction_or_cauchy, 0.0, 1.0, 2, square_geom());
    EXPECT_NEAR(t.coefficient(1), 0.4815659, 1e-7);
}

TEST(HeatTrace, DiskBucklingCoefficients) {
    const auto m = theoretical_coefficients(TraceOperator::buckling_2d, TraceBc::dirichlet, 0.0, 1.0, 2, disk_geom());
    EXPECT_NEAR(m.coefficient(0), 1.0 / 4.0, 1e-14); // pi / (4 pi)
    EXPECT_NEAR(m.coefficient(1), -std::sqrt(kPi) / 4.0, 1e-12);
    EXPECT_NEAR(m.coefficient(2), -5.0 / 3.0, 1e-12);
}

TEST(HeatTrace, VectorLaplaceLeadingCoefficient) {
    for (double lambda : {-3.0, 0.0, 50.0}) {
        const auto m = theoretical_coefficients(TraceOperator::laplace_vec, TraceBc::dirichlet, lambda, 1.0, 2, square_geom());
        EXPECT_NEAR(m.coefficient(0), 1.0 / (2.0 * kPi), 1e-14);
    }
}

TEST(HeatTrace, LameAtMinusMuEqualsVectorLaplace) {
    for (int n : {2, 3, 4}) {
        for (auto bc : {TraceBc::dirichlet, TraceBc::traction_or_cauchy}) {
            GeometryInputs g = disk_geom();
            g.scalar_curvature_integral = 0.7; // exercise the curvature column
            const auto lame = theoretical_coefficients(TraceOperator::lame, bc, -1.3, 1.3, n, g);
            const auto lap = theoretical_coefficients(TraceOperator::laplace_vec, bc, 0.0, 1.3, n, g);
            for (int j = 0; j < 3; ++j) {
                EXPECT_NEAR(lame.coefficient(j), lap.coefficient(j), 1e-12 * std::max(1.0, std::abs(lap.coefficient(j))))
                    << "n=" << n << " j=" << j;
            }
        }
    }
}

TEST(HeatTrace, LargeLambdaApproachesStokes) {
    for (int n : {2, 3}) {
        const auto lame = theoretical_coefficients(TraceOperator::lame, TraceBc::dirichlet, 1e8, 1.0, n, square_geom());
        const auto st = theoretical_coefficients(TraceOperator::stokes, TraceBc::dirichlet, 0.0, 1.0, n, square_geom());
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(lame.coefficient(j) / st.coefficient(j), 1.0, 1e-3);
    }
}

TEST(HeatTrace, Homogeneity) {
    // Z_mu(t) = Z_1(mu t): coefficients scale as mu^power.
    for (double mu : {0.5, 3.0}) {
        const auto a = theoretical_coefficients(TraceOperator::lame, TraceBc::dirichlet, 2.0 * mu, mu, 2, square_geom());
        const auto b = theoretical_coefficients(TraceOperator::lame, TraceBc::dirichlet, 2.0, 1.0, 2, square_geom());
        for (int j = 0; j < 2; ++j) {
            EXPECT_NEAR(a.coefficient(j), b.coefficient(j) * std::pow(mu, b.terms[j].power), 1e-14);
        }
    }
}

TEST(HeatTrace, ScalarModelLeavesConstantUndetermined) {
    const auto m = theoretical_coefficients(TraceOperator::scalar_laplace_2d, TraceBc::dirichlet, 0.0, 1.0, 2, square_geom());
    EXPECT_FALSE(m.terms[2].determined);
    EXPECT_NEAR(m.coefficient(1), -4.0 / (4.0 * std::sqrt(4.0 * kPi)), 1e-14);
}

TEST(HeatTrace, RejectsInvalidParameters) {
    EXPECT_THROW(theoretical_coefficients(TraceOperator::lame, TraceBc::dirichlet, -3.0, 1.0, 2, square_geom()),
                 InvalidArgument);
    EXPECT_THROW(theoretical_coefficients(TraceOperator::stokes, TraceBc::dirichlet, 0.0, 0.0, 2, square_geom()),
                 InvalidArgument);
    EXPECT_THROW(theoretical_coefficients(TraceOperator::buckling_2d, TraceBc::dirichlet, 0.0, 1.0, 3, square_geom()),
                 InvalidArgument);
}

TEST(PartitionFunction, TwoValues) {
    const auto c = partition_function({1.0, 2.0}, {1.0});
    EXPECT_NEAR(c.z[0], std::exp(-1.0) + std::exp(-2.0), 1e-15);
    EXPECT_NEAR(c.z[0], 0.503215, 1e-6);
}

TEST(PartitionFunction, LargeTimeCountsZeroModes) {
    const auto c = partition_function({0.0, 0.0, 0.0, 4.0, 9.0}, {50.0});
    EXPECT_NEAR(c.z[0], 3.0, 1e-80);
}

TEST(PartitionFunction, AnalyticSquareMatchesModel) {
    const auto spectrum = square_laplace_spectrum(SquareBc::dirichlet, 1.0, 10000);
    const double t = 0.01;
    const auto c = partition_function(spectrum, {t});
    const double model = 1.0 / (4.0 * kPi * t) - 4.0 / (4.0 * std::sqrt(4.0 * kPi * t)) + 0.25;
    EXPECT_NEAR(c.z[0] / model, 1.0, 2e-3);
    EXPECT_LT(c.tail_bound[0], 1e-10 * c.z[0]);
}

TEST(PartitionFunction, RejectsBadInput) {
    EXPECT_THROW(partition_function({}, {1.0}), InvalidArgument);
    EXPECT_THROW(partition_function({2.0, 1.0}, {1.0}), InvalidArgument);
    EXPECT_THROW(partition_function({1.0}, {0.0}), InvalidArgument);
}

TEST(PartitionFunction, DecreasingAndLogConvex) {
    const auto spectrum = square_laplace_spectrum(SquareBc::neumann, 1.0, 2000);
    const auto c = partition_function(spectrum, log_grid(1e-3, 1.0, 60));
    const auto checks = check_curve(c);
    EXPECT_TRUE(checks.decreasing);
    EXPECT_TRUE(checks.log_convex);
}

TEST(Fit, InverseCrime) {
    AsymptoticModel truth;
    truth.terms = {AsymptoticTerm{-1.0, 0.3}, AsymptoticTerm{-0.5, -0.7}, AsymptoticTerm{0.0, 0.25}};
    PartitionCurve c;
    c.t = log_grid(1e-3, 1e-1, 40);
    for (double t : c.t) {
        c.z.push_back(truth.evaluate(t));
        c.tail_bound.push_back(0.0);
    }
    const auto fit = fit_asymptotics(c, 1e-3, 1e-1);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(fit.coefficient(j), truth.coefficient(j), 1e-10);
    EXPECT_EQ(fit.points, 40);
    EXPECT_LT(fit.fit_residual, 1e-12);
    const auto cmp = compare(fit, truth);
    for (const auto& r : cmp) EXPECT_LT(r.error, 1e-9);
    const auto same = compare(truth, truth);
    for (const auto& r : same) EXPECT_EQ(r.error, 0.0);
}

TEST(Fit, AnalyticSquareSpectrum) {
    const auto spectrum = square_laplace_spectrum(SquareBc::dirichlet, 1.0, 10000);
    const auto c = partition_function(spectrum, log_grid(0.002, 0.02, 41));
    const auto fit = fit_asymptotics(c, 0.002, 0.02);
    const auto theory = theoretical_coefficients(TraceOperator::scalar_laplace_2d, TraceBc::dirichlet, 0.0, 1.0, 2, square_geom());
    const auto cmp = compare(fit, theory);
    EXPECT_LT(cmp[0].error, 1e-2);
    EXPECT_LT(cmp[1].error, 3e-2);
    EXPECT_LT(fit.coefficient(1), 0.0);

    const auto neumann = square_laplace_spectrum(SquareBc::neumann, 1.0, 10000);
    const auto fn = fit_asymptotics(partition_function(neumann, log_grid(0.002, 0.02, 41)), 0.002, 0.02);
    EXPECT_GT(fn.coefficient(1), 0.0);
}

TEST(Fit, TooFewPointsOrIllConditioned) {
    PartitionCurve c;
    c.t = {0.01, 0.02};
    c.z = {10.0, 5.0};
    c.tail_bound = {0.0, 0.0};
    EXPECT_THROW(fit_asymptotics(c, 0.0, 1.0), NumericalError);

    PartitionCurve narrow;
    narrow.t = log_grid(0.01, 0.01 * (1.0 + 1e-7), 5);
    for (double t : narrow.t) {
        narrow.z.push_back(1.0 / t);
        narrow.tail_bound.push_back(0.0);
    }
    try {
        fit_asymptotics(narrow, 0.0, 1.0);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("condition"), std::string::npos);
    }
}

TEST(Fit, WindowRespectsTailAndConstantTerm) {
    const auto theory = theoretical_coefficients(TraceOperator::lame, TraceBc::dirichlet, 1.0, 1.0, 2, square_geom());
    const auto spectrum = square_laplace_spectrum(SquareBc::dirichlet, 1.0, 3000);
    const auto c = partition_function(spectrum, log_grid(1e-4, 1e-1, 101));
    const auto w = choose_window(c, theory);
    ASSERT_TRUE(w.valid);
    const double cap = std::pow(0.1 * std::abs(theory.coefficient(1)) / std::abs(theory.coefficient(2)), 2.0);
    EXPECT_LE(w.t_max, cap);
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        if (c.t[i] >= w.t_min && c.t[i] <= w.t_max) EXPECT_LT(c.tail_bound[i], 1e-3 * c.z[i]);
    }
}

TEST(Fit, CsvOutput) {
    const auto theory = theoretical_coefficients(TraceOperator::scalar_laplace_2d, TraceBc::dirichlet, 0.0, 1.0, 2, square_geom());
    std::ostringstream os;
    write_fit_csv(os, compare(theory, theory));
    const std::string s = os.str();
    EXPECT_EQ(s.rfind("power,fitted,theoretical,rel_error\n", 0), 0u);
    EXPECT_NE(s.find("nan,nan"), std::string::npos); // undetermined constant term
}
