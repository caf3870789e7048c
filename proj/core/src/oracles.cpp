#include "sll/oracles.hpp"

#include "sll/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sll {

namespace {

constexpr double kSeriesLimit = 12.0;
constexpr double kMaxArgument = 400.0;

double j_series(int nu, double x) {
    const double half = 0.5 * x;
    double term = 1.0;
    for (int i = 1; i <= nu; ++i) term *= half / i;
    double sum = term;
    const double q = -half * half;
    for (int k = 0; k < 500; ++k) {
        term *= q / ((k + 1.0) * (k + 1.0 + nu));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum) && k > half) break;
    }
    return sum;
}

double j_miller(int nu, double x) {
    const double top = std::max<double>(nu, x);
    int start = static_cast<int>(top + 40.0 + 8.0 * std::cbrt(top));
    start += start % 2;
    double next = 0.0;  // J_{k+1}
    double cur = 1e-30; // J_k
    double norm = 0.0;
    double result = 0.0;
    for (int k = start; k > 0; --k) {
        const double prev = (2.0 * k / x) * cur - next; // J_{k-1}
        next = cur;
        cur = prev;
        if (k - 1 == nu) result = cur;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
        if (std::abs(cur) > 1e250) {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
    }
    norm += cur;
    return result / norm;
}

double refine_root(const std::function<double(double)>& f, const std::function<double(double)>& df, double lo,
                   double hi, double guess) {
    double flo = f(lo);
    double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx < 0.0) == (flo < 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        double next = 0.5 * (lo + hi);
        if (df) {
            const double d = df(x);
            if (d != 0.0) {
                const double newton = x - fx / d;
                if (newton > lo && newton < hi) next = newton;
            }
        }
        if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(x))) {
            return next;
        }
        x = next;
    }
    return x;
}

double mcmahon(int nu, int k) {
    const double beta = (k + 0.5 * nu - 0.25) * std::numbers::pi;
    const double mu = 4.0 * nu * nu;
    const double e = 8.0 * beta;
    return beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e);
}

} // namespace

double bessel_j(int nu, double x) {
    SLL_REQUIRE(nu >= 0, "Bessel order must be nonnegative");
    SLL_REQUIRE(x >= 0.0 && x <= kMaxArgument, "Bessel argument outside [0, 400]");
    if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
    if (x <= kSeriesLimit) return j_series(nu, x);
    return j_miller(nu, x);
}

double bessel_j_derivative(int nu, double x) {
    if (nu == 0) return -bessel_j(1, x);
    if (x == 0.0) return nu == 1 ? 0.5 : 0.0;
    return bessel_j(nu - 1, x) - nu / x * bessel_j(nu, x);
}

double bessel_i(int nu, double x) {
    SLL_REQUIRE(nu >= 0, "Bessel order must be nonnegative");
    SLL_REQUIRE(x >= 0.0 && x <= 50.0, "modified Bessel argument outside [0, 50]");
    const double half = 0.5 * x;
    double term = 1.0;
    for (int i = 1; i <= nu; ++i) term *= half / i;
    double sum = term;
    const double q = half * half;
    for (int k = 0; k < 1000; ++k) {
        term *= q / ((k + 1.0) * (k + 1.0 + nu));
        sum += term;
        if (term <= 1e-17 * sum) break;
    }
    return sum;
}

std::vector<double> bracketed_roots(const std::function<double(double)>& f, const std::function<double(double)>& df,
                                    double a, double b, double step) {
    std::vector<double> roots;
    double x0 = a;
    double f0 = f(x0);
    while (x0 < b) {
        const double x1 = std::min(b, x0 + step);
        const double f1 = f(x1);
        if (f0 == 0.0) {
            if (x0 > a) roots.push_back(x0);
        } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
            roots.push_back(refine_root(f, df, x0, x1, 0.5 * (x0 + x1)));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

BesselZeroTable bessel_zeros(int nu, int count) {
    SLL_REQUIRE(nu >= 0, "Bessel order must be nonnegative");
    SLL_REQUIRE(count >= 0 && count <= 100, "at most 100 Bessel zeros");
    BesselZeroTable table;
    table.order = nu;
    if (count == 0) return table;
    auto f = [nu](double x) { return bessel_j(nu, x); };
    auto df = [nu](double x) { return bessel_j_derivative(nu, x); };
    const double step = 0.1;
    double x0 = std::max(0.5, static_cast<double>(nu));
    double f0 = f(x0);
    while (static_cast<int>(table.zeros.size()) < count) {
        const double x1 = x0 + step;
        SLL_REQUIRE(x1 <= kMaxArgument, "Bessel zero beyond supported argument range");
        const double f1 = f(x1);
        if ((f0 < 0.0) != (f1 < 0.0)) {
            const int k = static_cast<int>(table.zeros.size()) + 1;
            table.zeros.push_back(refine_root(f, df, x0, x1, mcmahon(nu, k)));
        }
        x0 = x1;
        f0 = f1;
    }
    return table;
}

std::vector<double> bessel_derivative_zeros(int nu, int count) {
    SLL_REQUIRE(nu >= 0 && count >= 0, "invalid Bessel derivative zero request");
    std::vector<double> zeros;
    auto f = [nu](double x) { return bessel_j_derivative(nu, x); };
    double x0 = std::max(0.5, static_cast<double>(nu));
    double f0 = f(x0);
    while (static_cast<int>(zeros.size()) < count) {
        const double x1 = x0 + 0.1;
        SLL_REQUIRE(x1 <= kMaxArgument, "Bessel derivative zero beyond supported argument range");
        const double f1 = f(x1);
        if ((f0 < 0.0) != (f1 < 0.0)) zeros.push_back(refine_root(f, nullptr, x0, x1, 0.5 * (x0 + x1)));
        x0 = x1;
        f0 = f1;
    }
    return zeros;
}

namespace {

// J_m I'_m - J'_m I_m = J_m I_{m+1} + J_{m+1} I_m, scaled by e^{-x}.
double clamped_determinant(int m, double x) {
    return std::exp(-x) * (bessel_j(m, x) * bessel_i(m + 1, x) + bessel_j(m + 1, x) * bessel_i(m, x));
}

std::vector<double> clamped_roots_below(int m, double bound) {
    auto f = [m](double x) { return clamped_determinant(m, x); };
    return bracketed_roots(f, nullptr, std::max(0.5, static_cast<double>(m)), bound, 0.1);
}

} // namespace

double clamped_disk_root(int m, int k) {
    SLL_REQUIRE(m >= 0 && k >= 1, "invalid clamped root index");
    double bound = (k + 0.5 * m + 1.0) * std::numbers::pi + 2.0;
    for (;;) {
        SLL_REQUIRE(bound <= 50.0, "clamped root beyond supported argument range");
        const auto roots = clamped_roots_below(m, bound);
        if (static_cast<int>(roots.size()) >= k) return roots[k - 1];
        bound += std::numbers::pi;
    }
}

std::vector<double> square_laplace_spectrum(SquareBc bc, double mu, int count) {
    SLL_REQUIRE(count >= 0 && count <= 100000, "square spectrum count must be in [0, 1e5]");
    SLL_REQUIRE(mu > 0.0, "mu must be positive");
    const int first = bc == SquareBc::dirichlet ? 1 : 0;
    int radius = static_cast<int>(std::sqrt(4.0 * count / std::numbers::pi)) + 4;
    for (;;) {
        std::vector<long> sums;
        const long r2 = static_cast<long>(radius) * radius;
        for (long m = first; m <= radius; ++m) {
            for (long n = first; n <= radius; ++n) {
                if (m * m + n * n <= r2) sums.push_back(m * m + n * n);
            }
        }
        std::sort(sums.begin(), sums.end());
        if (static_cast<int>(sums.size()) >= count) {
            std::vector<double> out(count);
            const double c = mu * std::numbers::pi * std::numbers::pi;
            for (int i = 0; i < count; ++i) out[i] = c * static_cast<double>(sums[i]);
            return out;
        }
        radius *= 2;
    }
}

std::vector<DiskMode> disk_modes(DiskSpectrumKind kind, double mu, int count) {
    SLL_REQUIRE(mu > 0.0, "mu must be positive");
    SLL_REQUIRE(count >= 0, "count must be nonnegative");
    std::vector<DiskMode> modes;
    if (count == 0) return modes;
    double bound = 2.0 * std::sqrt(static_cast<double>(count)) + 6.0;
    for (;;) {
        modes.clear();
        int covered = 0;
        if (kind == DiskSpectrumKind::laplace_neumann) {
            modes.push_back({0.0, 0, 0, 1});
            covered = 1;
        }
        for (int m = 0; m <= static_cast<int>(bound) + 1; ++m) {
            std::vector<double> roots;
            switch (kind) {
            case DiskSpectrumKind::laplace_dirichlet:
                roots = bracketed_roots([m](double x) { return bessel_j(m, x); },
                                        [m](double x) { return bessel_j_derivative(m, x); },
                                        std::max(0.5, static_cast<double>(m)), bound, 0.1);
                break;
            case DiskSpectrumKind::laplace_neumann:
                roots = bracketed_roots([m](double x) { return bessel_j_derivative(m, x); }, nullptr,
                                        std::max(0.5, static_cast<double>(m)), bound, 0.1);
                break;
            case DiskSpectrumKind::stokes_dirichlet_eq_buckling:
                roots = bracketed_roots([m](double x) { return bessel_j(m + 1, x); },
                                        [m](double x) { return bessel_j_derivative(m + 1, x); },
                                        static_cast<double>(m + 1), bound, 0.1);
                break;
            case DiskSpectrumKind::clamped_plate:
                SLL_REQUIRE(bound <= 50.0, "clamped plate oracle limited to kappa <= 50");
                roots = clamped_roots_below(m, bound);
                break;
            }
            const int mult = m == 0 ? 1 : 2;
            for (std::size_t k = 0; k < roots.size(); ++k) {
                modes.push_back({mu * roots[k] * roots[k], m, static_cast<int>(k) + 1, mult});
                covered += mult;
            }
        }
        if (covered >= count) break;
        bound *= 1.3;
    }
    std::stable_sort(modes.begin(), modes.end(), [](const DiskMode& a, const DiskMode& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.angular_index < b.angular_index;
    });
    // Trim groups beyond the requested count.
    int covered = 0;
    std::size_t keep = 0;
    while (keep < modes.size() && covered < count) covered += modes[keep++].multiplicity;
    modes.resize(keep);
    return modes;
}

std::vector<double> disk_spectra(DiskSpectrumKind kind, double mu, int count) {
    std::vector<double> out;
    for (const auto& mode : disk_modes(kind, mu, count)) {
        for (int i = 0; i < mode.multiplicity; ++i) out.push_back(mode.value);
    }
    out.resize(std::min<std::size_t>(out.size(), static_cast<std::size_t>(count)));
    return out;
}

} // namespace sll
