#pragma once

#include "sll/assembly.hpp"
#include "sll/eigensolve.hpp"
#include "sll/extrapolation.hpp"
#include "sll/geometry.hpp"

#include <string>
#include <vector>

namespace sll {

enum class Operator {
    lame_dirichlet,        // DL
    lame_traction,         // TL
    stokes_dirichlet,      // DS
    stokes_cauchy,         // CS
    laplace_vec_dirichlet, // DB
    laplace_vec_traction,  // TB
    scalar_dirichlet,      // Xi
    scalar_neumann,        // Theta
    buckling_dirichlet,    // Lambda^D
    clamped_plate          // Gamma
};

std::string operator_name(Operator op);
Operator operator_from_name(const std::string& name);

struct ProblemSpec {
    Operator op = Operator::scalar_dirichlet;
    double lambda = 0.0; // DL/TL only
    double mu = 1.0;
    DomainSpec domain = DomainSpec::unit_square();
    int refinement_level = 3;
    int count = 10;
    DivergenceMode div_mode = DivergenceMode::automatic;
};

void validate(const ProblemSpec& spec);

struct MultiplicityGroup {
    double value = 0.0; // mean of the group
    int first = 0;
    int size = 1;
};

struct SpectrumResult {
    ProblemSpec spec;
    std::vector<double> eigenvalues; // ascending
    std::vector<MultiplicityGroup> multiplicity_groups;
    std::vector<double> residuals;
    double mesh_h = 0.0;
    double wall_time = 0.0;
    int dofs = 0;
    int zero_modes = 0;
    bool partial = false;
    bool truncated = false;
    EigMethod method = EigMethod::lanczos;
};

struct SolveOptions {
    int workers = 1;
    int dense_limit = 600; // reduced dimension up to which the dense path is used
    LanczosOptions lanczos;
};

/// Groups consecutive eigenvalues whose relative gap is below `rel_tol`.
std::vector<MultiplicityGroup> multiplicity_groups(const std::vector<double>& values, double rel_tol = 1e-6);

inline constexpr double kZeroThreshold = 1e-8;

/// Number of eigenvalues with |v| <= 1e-8 * (first nonzero |v|). "Nonzero"
/// means above 1e-8 of the largest magnitude in the list.
int count_zero_modes(const std::vector<double>& values);

SpectrumResult compute_spectrum(const ProblemSpec& spec, const SolveOptions& opts = {});
/// Same, on a caller-provided mesh (refinement_level is informational).
SpectrumResult compute_spectrum(const ProblemSpec& spec, const Mesh& mesh, const SolveOptions& opts = {});

/// Dense solve of the assembled pencil. For the Stokes problems the pencil is
/// first projected onto an orthonormal basis of ker B (dense QR).
EigResult brute_force_dense_check(const ProblemSpec& spec, const SolveOptions& opts = {});

struct MeshExtrapolation {
    std::vector<double> values;
    std::vector<double> orders;
    std::vector<bool> extrapolated;
    std::vector<double> finest;
};

/// Requires three results of one problem at consecutive refinement levels.
MeshExtrapolation extrapolate_mesh(const std::vector<SpectrumResult>& results);

/// compute_spectrum at levels base, base+1, base+2 followed by extrapolate_mesh.
MeshExtrapolation converged_spectrum(const ProblemSpec& spec, int base_level, const SolveOptions& opts = {},
                                     std::vector<SpectrumResult>* levels = nullptr);

struct SweepTable {
    std::vector<double> lambdas;
    std::vector<std::vector<double>> dirichlet; // [lambda index][k]
    std::vector<std::vector<double>> traction;
    bool projected = false;
};

/// First k Lame eigenvalues for both boundary conditions on one fixed mesh.
/// The divergence mode is resolved once for the whole grid.
SweepTable lambda_sweep(const DomainSpec& domain, double mu, const std::vector<double>& lambdas, int k, int level,
                        DivergenceMode mode = DivergenceMode::automatic, const SolveOptions& opts = {});

struct MonotonicityRow {
    std::string bc;
    double lambda_low = 0.0;
    double lambda_high = 0.0;
    int index = 0; // 1-based
    double low = 0.0;
    double high = 0.0;
    double scale = 0.0; // largest magnitude in the two columns
    bool pass = true;
};

/// tau_k(lambda') <= tau_k(lambda'') + slack * s for consecutive grid points, where s is the
/// largest magnitude in the two columns (zero modes carry only roundoff).
std::vector<MonotonicityRow> check_monotone(const SweepTable& table, double slack = 1e-9);

struct PenaltyEstimate {
    double lambda = 0.0;
    std::vector<double> raw;     // at lambda
    std::vector<double> doubled; // at 2 lambda
    std::vector<double> extrapolated;
};

struct PenaltyResult {
    PenaltyEstimate dirichlet;
    PenaltyEstimate cauchy; // via the traction Lame form
};

/// Projected-divergence Lame eigenvalues at lambda and 2 lambda, extrapolated
/// linearly in eps = 1/(lambda + mu) when `richardson` is set.
PenaltyResult stokes_via_penalty(const DomainSpec& domain, double mu, double lambda_pen, int k, bool richardson,
                                 int level, const SolveOptions& opts = {});

struct SandwichRow {
    std::string bc;
    double lambda = 0.0;
    int index = 0;
    double lower = 0.0;  // theta_k (0 on the traction side)
    double middle = 0.0; // tau_k(lambda)
    double upper = 0.0;  // varsigma_k
    double left_margin = 0.0;  // (middle - lower) / middle
    double right_margin = 0.0; // (upper - middle) / upper
    bool pass = true;
};

struct SandwichReport {
    std::vector<SandwichRow> rows;
    bool pass = true;
};

/// theta_k <= tau_k(lambda) <= varsigma_k on mesh-extrapolated values.
/// `include_traction` adds 0 <= tau^T_k <= varsigma^C_k rows.
SandwichReport verify_sandwich(const DomainSpec& domain, double mu, const std::vector<double>& lambdas, int k,
                               int base_level, bool include_traction = false, double slack = 1e-3,
                               const SolveOptions& opts = {});

struct IdentityReport {
    std::vector<double> buckling; // extrapolated Lambda^D_k
    std::vector<double> stokes;   // extrapolated varsigma^D_k
    std::vector<double> gaps;     // |buckling - stokes| / stokes
    std::vector<double> level_max_gaps; // max gap per refinement level (raw values)
    double max_gap = 0.0;
};

IdentityReport verify_buckling_stokes_identity(const DomainSpec& domain, double mu, int k, int base_level,
                                               const SolveOptions& opts = {});

struct ChainReport {
    std::vector<double> theta; // Neumann
    std::vector<double> xi;    // Dirichlet
    std::vector<double> gamma; // clamped plate (square root taken)
    std::vector<double> buckling;
    std::vector<double> min_margins; // per k: smallest relative gap in the chain
    bool pass = true;
};

ChainReport verify_chain_inequalities(const DomainSpec& domain, double mu, int k, int base_level,
                                      double slack = 1e-3, const SolveOptions& opts = {});

struct ZeroCountObservation {
    int level = 0;
    double h = 0.0;
    int dofs = 0;
    int zero_modes = 0;
};

/// Numerically-zero eigenvalue counts of the traction vector Laplacian per level.
std::vector<ZeroCountObservation> traction_laplace_zero_counts(const DomainSpec& domain, double mu,
                                                               const std::vector<int>& levels, int count,
                                                               const SolveOptions& opts = {});

} // namespace sll
