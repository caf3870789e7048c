#pragma once

#include "sll/geometry.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace sll {

enum class TraceOperator {
    lame,
    stokes,
    laplace_vec,
    buckling_2d,
    scalar_laplace_2d // two-term Weyl model shared by Xi, Gamma and Lambda^D; no constant term
};
enum class TraceBc { dirichlet, traction_or_cauchy };
enum class Provenance { theoretical, fitted };

struct GeometryInputs {
    double volume = 1.0;
    double boundary_volume = 4.0;
    double scalar_curvature_integral = 0.0; // always 0 on flat domains
    double mean_curvature_integral = 0.0;   // integral of H over the boundary

    static GeometryInputs from_domain(const DomainSpec& domain);
};

struct AsymptoticTerm {
    double power = 0.0;
    double value = 0.0;
    bool determined = true; // false when the model says nothing about this power
};

/// Z(t) ~ sum_j c_j t^{p_j} with p = -n/2, (1-n)/2, (2-n)/2. Volume and
/// boundary-volume factors are folded into the coefficients.
struct AsymptoticModel {
    int n = 2;
    std::array<AsymptoticTerm, 3> terms{};
    Provenance provenance = Provenance::theoretical;
    GeometryInputs geom;
    // Fitted models only.
    double fit_residual = 0.0;
    double condition = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    int points = 0;

    [[nodiscard]] double evaluate(double t) const;
    [[nodiscard]] double coefficient(int index) const { return terms[index].value; }
};

/// Closed-form coefficients of the three leading heat-trace terms.
AsymptoticModel theoretical_coefficients(TraceOperator op, TraceBc bc, double lambda, double mu, int n,
                                         const GeometryInputs& geom);

struct PartitionCurve {
    std::vector<double> t;
    std::vector<double> z;
    std::vector<double> tail_bound;
    double weyl_constant = 0.0; // C_W in tail(t) = (C_W / t) exp(-t lambda_N)
};

/// Truncated partition function Z(t) = sum_k exp(-t lambda_k). `weyl_constant`
/// calibrates the tail estimate; 0 uses N / lambda_N from the spectrum.
PartitionCurve partition_function(const std::vector<double>& spectrum, const std::vector<double>& t_grid,
                                  double weyl_constant = 0.0);

/// n geometrically spaced points in [a, b].
std::vector<double> log_grid(double a, double b, int n);

struct CurveChecks {
    bool decreasing = true;
    bool log_convex = true;
};
CurveChecks check_curve(const PartitionCurve& curve);

struct FitWindow {
    double t_min = 0.0;
    double t_max = 0.0;
    bool valid = false;
};

/// t_max: the constant model term is below 10% of the boundary term.
/// t_min: the tail bound is below 0.1% of Z. Either bound is snapped to the grid.
FitWindow choose_window(const PartitionCurve& curve, const AsymptoticModel& theoretical);

inline constexpr double kMaxFitCondition = 1e10;

/// Weighted least squares of Z against t^{-1}, t^{-1/2}, 1 (n = 2), weights
/// 1/Z^2, over the grid points in [t_min, t_max]. Throws NumericalError when
/// the design matrix is ill-conditioned.
AsymptoticModel fit_asymptotics(const PartitionCurve& curve, double t_min, double t_max);

struct TermComparison {
    double power = 0.0;
    double fitted = 0.0;
    double theoretical = 0.0;
    double error = 0.0;  // relative, or absolute when |theoretical| < 1e-12
    bool relative = true;
    bool determined = true;
};

std::vector<TermComparison> compare(const AsymptoticModel& fitted, const AsymptoticModel& theoretical);

/// CSV rows: power,fitted,theoretical,rel_error.
void write_fit_csv(std::ostream& os, const std::vector<TermComparison>& rows);
/// Two columns "t Z(t)".
void write_zt(std::ostream& os, const PartitionCurve& curve);

} // namespace sll
