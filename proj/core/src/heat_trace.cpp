#include "sll/heat_trace.hpp"

#include "sll/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

namespace sll {

namespace {

constexpr double kPi = std::numbers::pi;

double pw(double base, double e) { return std::pow(base, e); }

} // namespace

GeometryInputs GeometryInputs::from_domain(const DomainSpec& domain) {
    GeometryInputs g;
    g.volume = domain.analytic_area;
    g.boundary_volume = domain.analytic_perimeter;
    g.scalar_curvature_integral = 0.0;
    g.mean_curvature_integral = domain.boundary_curvature_integral;
    return g;
}

double AsymptoticModel::evaluate(double t) const {
    double z = 0.0;
    for (const auto& term : terms) z += term.value * std::pow(t, term.power);
    return z;
}

AsymptoticModel theoretical_coefficients(TraceOperator op, TraceBc bc, double lambda, double mu, int n,
                                         const GeometryInputs& geom) {
    SLL_REQUIRE(mu > 0.0, "mu must be positive");
    SLL_REQUIRE(n >= 2, "dimension must be at least 2");
    AsymptoticModel m;
    m.n = n;
    m.geom = geom;
    m.provenance = Provenance::theoretical;
    const double dn = n;
    m.terms[0].power = -dn / 2.0;
    m.terms[1].power = (1.0 - dn) / 2.0;
    m.terms[2].power = (2.0 - dn) / 2.0;
    const double sign = bc == TraceBc::dirichlet ? -1.0 : 1.0;
    const double r_int = geom.scalar_curvature_integral;
    const double h_int = geom.mean_curvature_integral;
    const double pref2 = 1.0 / (6.0 * pw(4.0 * kPi, dn / 2.0));
    const double mu_a = pw(mu, -(dn - 2.0) / 2.0); // mu^{-(n-2)/2}

    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    switch (op) {
    case TraceOperator::lame: {
        const double nu = lambda + 2.0 * mu;
        SLL_REQUIRE(nu > 0.0, "Lame coefficients need lambda + 2 mu > 0");
        c0 = (dn - 1.0) / pw(4.0 * kPi * mu, dn / 2.0) + 1.0 / pw(4.0 * kPi * nu, dn / 2.0);
        c1 = sign * 0.25 *
             ((dn - 1.0) / pw(4.0 * kPi * mu, (dn - 1.0) / 2.0) + 1.0 / pw(4.0 * kPi * nu, (dn - 1.0) / 2.0));
        const double nu_a = pw(nu, -(dn - 2.0) / 2.0);
        const double r_coef =
            nu_a + (dn - 7.0) * mu_a + 12.0 * mu / dn * (pw(nu, -dn / 2.0) + (dn - 1.0) * pw(mu, -dn / 2.0));
        c2 = pref2 * (r_coef * r_int + 2.0 * (nu_a + (dn - 7.0) * mu_a) * h_int);
        break;
    }
    case TraceOperator::stokes: {
        const double beta = n == 2 ? 1.0 : 0.0;
        c0 = (dn - 1.0) / pw(4.0 * kPi * mu, dn / 2.0);
        c1 = sign * (dn - 1.0) / (4.0 * pw(4.0 * kPi * mu, (dn - 1.0) / 2.0));
        c2 = pref2 * ((beta + (dn - 7.0) * mu_a + 12.0 * (dn - 1.0) / dn * mu_a) * r_int +
                      2.0 * (beta + (dn - 7.0) * mu_a) * h_int);
        break;
    }
    case TraceOperator::laplace_vec:
        c0 = dn / pw(4.0 * kPi * mu, dn / 2.0);
        c1 = sign * dn / (4.0 * pw(4.0 * kPi * mu, (dn - 1.0) / 2.0));
        c2 = pref2 * ((dn + 6.0) * mu_a * r_int + 2.0 * (dn - 6.0) * mu_a * h_int);
        break;
    case TraceOperator::buckling_2d:
    case TraceOperator::scalar_laplace_2d:
        SLL_REQUIRE(n == 2, "planar model requires n = 2");
        c0 = 1.0 / (4.0 * kPi * mu);
        c1 = sign / (4.0 * std::sqrt(4.0 * kPi * mu));
        if (op == TraceOperator::buckling_2d) {
            c2 = -1.0 - h_int / (3.0 * kPi);
        } else {
            m.terms[2].determined = false;
        }
        break;
    }
    m.terms[0].value = c0 * geom.volume;
    m.terms[1].value = c1 * geom.boundary_volume;
    m.terms[2].value = c2;
    return m;
}

PartitionCurve partition_function(const std::vector<double>& spectrum, const std::vector<double>& t_grid,
                                  double weyl_constant) {
    SLL_REQUIRE(!spectrum.empty(), "partition function of an empty spectrum");
    SLL_REQUIRE(std::is_sorted(spectrum.begin(), spectrum.end()), "spectrum must be ascending");
    for (double t : t_grid) SLL_REQUIRE(t > 0.0, "t grid must be positive");
    PartitionCurve c;
    c.t = t_grid;
    const double top = spectrum.back();
    if (weyl_constant <= 0.0 && top > 0.0) weyl_constant = static_cast<double>(spectrum.size()) / top;
    c.weyl_constant = std::max(0.0, weyl_constant);
    for (double t : t_grid) {
        double z = 0.0;
        // Smallest terms first.
        for (auto it = spectrum.rbegin(); it != spectrum.rend(); ++it) z += std::exp(-t * *it);
        c.z.push_back(z);
        c.tail_bound.push_back(c.weyl_constant / t * std::exp(-t * top));
    }
    return c;
}

std::vector<double> log_grid(double a, double b, int n) {
    SLL_REQUIRE(a > 0.0 && b > a && n >= 2, "invalid log grid");
    std::vector<double> g(n);
    const double la = std::log(a);
    const double lb = std::log(b);
    for (int i = 0; i < n; ++i) g[i] = std::exp(la + (lb - la) * i / (n - 1));
    g.front() = a;
    g.back() = b;
    return g;
}

CurveChecks check_curve(const PartitionCurve& curve) {
    CurveChecks c;
    const std::size_t n = curve.t.size();
    for (std::size_t i = 0; i + 1 < n; ++i) c.decreasing = c.decreasing && curve.z[i + 1] < curve.z[i];
    for (std::size_t i = 0; i + 2 < n; ++i) {
        const double s1 = (std::log(curve.z[i + 1]) - std::log(curve.z[i])) / (curve.t[i + 1] - curve.t[i]);
        const double s2 = (std::log(curve.z[i + 2]) - std::log(curve.z[i + 1])) / (curve.t[i + 2] - curve.t[i + 1]);
        c.log_convex = c.log_convex && s2 - s1 >= -1e-12 * std::max({1.0, std::abs(s1), std::abs(s2)});
    }
    return c;
}

FitWindow choose_window(const PartitionCurve& curve, const AsymptoticModel& theoretical) {
    FitWindow w;
    double t_cap = curve.t.empty() ? 0.0 : curve.t.back();
    const auto& boundary = theoretical.terms[1];
    const auto& constant = theoretical.terms[2];
    if (constant.determined && constant.value != 0.0) {
        // |c2| t^{p2} < 0.1 |c1| t^{p1}, with p2 - p1 = 1/2.
        t_cap = std::pow(0.1 * std::abs(boundary.value) / std::abs(constant.value), 1.0 / (constant.power - boundary.power));
    }
    int count = 0;
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        const double t = curve.t[i];
        if (t > t_cap || curve.tail_bound[i] >= 1e-3 * curve.z[i]) continue;
        if (count == 0) w.t_min = t;
        w.t_max = t;
        ++count;
    }
    w.valid = count >= 3 && w.t_max > w.t_min;
    return w;
}

AsymptoticModel fit_asymptotics(const PartitionCurve& curve, double t_min, double t_max) {
    std::vector<int> rows;
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        if (curve.t[i] >= t_min && curve.t[i] <= t_max) rows.push_back(static_cast<int>(i));
    }
    if (rows.size() < 3) {
        throw NumericalError("heat-trace fit window holds " + std::to_string(rows.size()) +
                             " points; at least 3 are needed");
    }
    const std::array<double, 3> powers{-1.0, -0.5, 0.0};
    const int m = static_cast<int>(rows.size());
    Eigen::MatrixXd x(m, 3);
    Eigen::VectorXd y = Eigen::VectorXd::Ones(m);
    for (int r = 0; r < m; ++r) {
        const int i = rows[r];
        for (int j = 0; j < 3; ++j) x(r, j) = std::pow(curve.t[i], powers[j]) / curve.z[i];
    }
    Eigen::Vector3d scale;
    for (int j = 0; j < 3; ++j) {
        scale(j) = x.col(j).norm();
        x.col(j) /= scale(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
    if (!(cond <= kMaxFitCondition)) {
        std::ostringstream msg;
        msg << "heat-trace design matrix ill-conditioned (condition estimate " << std::setprecision(3) << cond
            << "); widen the t window";
        throw NumericalError(msg.str());
    }
    const Eigen::Vector3d sol = svd.solve(y);
    AsymptoticModel fit;
    fit.n = 2;
    fit.provenance = Provenance::fitted;
    for (int j = 0; j < 3; ++j) {
        fit.terms[j].power = powers[j];
        fit.terms[j].value = sol(j) / scale(j);
    }
    double ss = 0.0;
    for (int r = 0; r < m; ++r) {
        const int i = rows[r];
        const double rel = (fit.evaluate(curve.t[i]) - curve.z[i]) / curve.z[i];
        ss += rel * rel;
    }
    fit.fit_residual = std::sqrt(ss / m);
    fit.condition = cond;
    fit.t_min = curve.t[rows.front()];
    fit.t_max = curve.t[rows.back()];
    fit.points = m;
    return fit;
}

std::vector<TermComparison> compare(const AsymptoticModel& fitted, const AsymptoticModel& theoretical) {
    std::vector<TermComparison> out;
    for (int j = 0; j < 3; ++j) {
        SLL_REQUIRE(fitted.terms[j].power == theoretical.terms[j].power, "models have different powers");
        TermComparison c;
        c.power = theoretical.terms[j].power;
        c.fitted = fitted.terms[j].value;
        c.theoretical = theoretical.terms[j].value;
        c.determined = theoretical.terms[j].determined;
        c.relative = std::abs(c.theoretical) >= 1e-12;
        c.error = c.relative ? std::abs(c.fitted - c.theoretical) / std::abs(c.theoretical)
                             : std::abs(c.fitted - c.theoretical);
        out.push_back(c);
    }
    return out;
}

void write_fit_csv(std::ostream& os, const std::vector<TermComparison>& rows) {
    os << "power,fitted,theoretical,rel_error\n";
    os << std::setprecision(17);
    for (const auto& r : rows) {
        os << r.power << ',' << r.fitted << ',';
        if (r.determined) os << r.theoretical << ',' << r.error << '\n';
        else os << "nan,nan\n";
    }
}

void write_zt(std::ostream& os, const PartitionCurve& curve) {
    os << std::setprecision(17);
    for (std::size_t i = 0; i < curve.t.size(); ++i) os << curve.t[i] << ' ' << curve.z[i] << '\n';
}

} // namespace sll
