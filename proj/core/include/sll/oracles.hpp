#pragma once

#include <functional>
#include <vector>

namespace sll {

/// J_nu(x) for integer nu >= 0 and 0 <= x <= 400: ascending series for
/// x <= 12, Miller backward recurrence normalized by J0 + 2 sum J_2k = 1 above.
double bessel_j(int nu, double x);
double bessel_j_derivative(int nu, double x);
/// Modified Bessel I_nu(x) by its ascending series (0 <= x <= 50).
double bessel_i(int nu, double x);

struct BesselZeroTable {
    int order = 0;
    std::vector<double> zeros; // ascending positive zeros j_{order,k}
};

/// First `count` (<= 100) positive zeros of J_nu, each to 1e-10 or better.
BesselZeroTable bessel_zeros(int nu, int count);
/// First `count` positive zeros of J'_nu (x = 0 excluded).
std::vector<double> bessel_derivative_zeros(int nu, int count);
/// k-th positive root of J_m(x) I'_m(x) - J'_m(x) I_m(x) (clamped disk plate).
double clamped_disk_root(int m, int k);

/// Sorted roots of f in [a, b] found by scanning with step `step` and
/// refining each sign change with safeguarded Newton (bisection fallback).
std::vector<double> bracketed_roots(const std::function<double(double)>& f, const std::function<double(double)>& df,
                                    double a, double b, double step);

enum class SquareBc { dirichlet, neumann };

/// mu * pi^2 (m^2 + n^2) on the unit square, repeated by multiplicity.
std::vector<double> square_laplace_spectrum(SquareBc bc, double mu, int count);

enum class DiskSpectrumKind { laplace_dirichlet, laplace_neumann, stokes_dirichlet_eq_buckling, clamped_plate };

/// One eigenvalue group of the unit disk with its angular index.
struct DiskMode {
    double value = 0.0;
    int angular_index = 0; // m in e^{i m theta}
    int radial_index = 0;  // k, 1-based
    int multiplicity = 1;  // 1 for m = 0, 2 otherwise
};

/// Eigenvalue groups of the unit disk, ascending, until at least `count`
/// eigenvalues (with multiplicity) are covered. Laplace: mu j_{m,k}^2 (or
/// mu j'_{m,k}^2 plus the constant mode). Stokes/buckling: mu j_{m+1,k}^2.
/// Clamped plate: Gamma = mu kappa^2 with kappa the clamped determinant root.
std::vector<DiskMode> disk_modes(DiskSpectrumKind kind, double mu, int count);
/// The same spectrum expanded by multiplicity and truncated to `count`.
std::vector<double> disk_spectra(DiskSpectrumKind kind, double mu, int count);

} // namespace sll
