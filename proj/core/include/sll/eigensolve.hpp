#pragma once

#include "sll/sparse.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace sll {

enum class EigMethod { dense, lanczos };

struct EigResult {
    std::vector<double> eigenvalues;     // ascending
    Eigen::MatrixXd eigenvectors;        // M-orthonormal columns; empty if not requested
    std::vector<double> residual_norms;  // ||A x - lambda M x||_2 / ||x||_M
    int iterations = 0;
    EigMethod method = EigMethod::dense;
    bool partial = false;   // fewer than k pairs converged
    bool truncated = false; // k exceeded the problem dimension
    double sigma = 0.0;     // shift actually used (after retries)
    int shift_retries = 0;
    double pivot_ratio = 0.0;
};

struct LanczosOptions {
    double tol = 1e-9;
    std::uint64_t seed = 0; // 0: take SLL_SEED from the environment (default 42)
    bool compute_vectors = true;
    int max_passes = 8;
};

/// Seed for Lanczos starting vectors: SLL_SEED if set, otherwise 42.
std::uint64_t default_seed();

/// Reference path: Cholesky M = L L^T, then a full symmetric eigendecomposition
/// of L^{-1} A L^{-T}. Throws NumericalError naming the failing pivot when M
/// is not positive definite.
EigResult solve_dense_sym_generalized(const SparseSymMatrix& a, const SparseSymMatrix& m, int k,
                                      bool compute_vectors = true);

/// k eigenvalues of A x = lambda M x nearest sigma, by Lanczos on
/// (A - sigma M)^{-1} M in the M-inner product with full reorthogonalization.
/// Repeated eigenvalues are recovered by restarting against the locked
/// vectors until Sylvester inertia counts confirm nothing is missing.
EigResult solve_shift_invert_lanczos(const SparseSymMatrix& a, const SparseSymMatrix& m, double sigma, int k,
                                     const LanczosOptions& opts = {});

/// Finite eigenvalues of [[A, B^T], [B, 0]] (x, p) = lambda [[M, 0], [0, 0]] (x, p)
/// nearest sigma. `constraint` is the (pressure x velocity) block B; without it
/// the call reduces to solve_shift_invert_lanczos.
EigResult solve_saddle_point_eig(const SparseSymMatrix& a, const std::optional<SparseMatrix>& constraint,
                                 const SparseSymMatrix& m, double sigma, int k, const LanczosOptions& opts = {});

/// Number of eigenvalues of the pencil strictly below `s` (Sylvester inertia
/// of A - sM, restricted to ker B when a constraint is given).
long count_below(const SparseSymMatrix& a, const std::optional<SparseMatrix>& constraint, const SparseSymMatrix& m,
                 double s);

/// Lowest Gershgorin-type estimate min_i (a_ii - sum_j |a_ij|) / m_ii.
double gershgorin_lower_estimate(const SparseSymMatrix& a, const SparseSymMatrix& m);

/// Lowers `sigma` until no eigenvalue lies below it, so that the eigenvalues
/// nearest the returned shift are the lowest ones. `scale` sets the step.
double shift_below_spectrum(const SparseSymMatrix& a, const std::optional<SparseMatrix>& constraint,
                            const SparseSymMatrix& m, double sigma, double scale);

} // namespace sll
