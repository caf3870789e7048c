#include "sll/lab.hpp"

#include "sll/error.hpp"
#include "sll/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

namespace sll {

namespace {

const std::map<Operator, std::string>& operator_names() {
    static const std::map<Operator, std::string> names{
        {Operator::lame_dirichlet, "lame_dirichlet"},
        {Operator::lame_traction, "lame_traction"},
        {Operator::stokes_dirichlet, "stokes_dirichlet"},
        {Operator::stokes_cauchy, "stokes_cauchy"},
        {Operator::laplace_vec_dirichlet, "laplace_vec_dirichlet"},
        {Operator::laplace_vec_traction, "laplace_vec_traction"},
        {Operator::scalar_dirichlet, "scalar_dirichlet"},
        {Operator::scalar_neumann, "scalar_neumann"},
        {Operator::buckling_dirichlet, "buckling_dirichlet"},
        {Operator::clamped_plate, "clamped_plate"},
    };
    return names;
}

std::vector<int> complement(int n, const std::vector<int>& removed) {
    std::vector<char> mask(n, 1);
    for (int i : removed) mask[i] = 0;
    std::vector<int> keep;
    for (int i = 0; i < n; ++i) {
        if (mask[i]) keep.push_back(i);
    }
    return keep;
}

// Generalized pencil A x = v M x (with optional divergence constraint B x = 0).
struct Pencil {
    SparseSymMatrix a;
    SparseSymMatrix m;
    std::optional<SparseMatrix> b;
    bool square_root = false; // report sqrt of the pencil eigenvalues
    double scale = 1.0;       // typical eigenvalue unit, used to place shifts
};

Pencil build_pencil(const ProblemSpec& spec, const Mesh& mesh, int workers) {
    AssemblyOptions aopts;
    aopts.workers = workers;
    const double mu = spec.mu;
    auto from_system = [](const AssembledSystem& sys) {
        ReducedSystem r = reduce(sys);
        Pencil p;
        p.a = std::move(r.stiffness);
        p.m = std::move(r.mass);
        p.b = std::move(r.constraint);
        return p;
    };
    Pencil p;
    switch (spec.op) {
    case Operator::lame_dirichlet:
    case Operator::lame_traction: {
        const auto bc = spec.op == Operator::lame_dirichlet ? BoundaryCondition::dirichlet : BoundaryCondition::traction;
        p = from_system(assemble_lame(mesh, spec.lambda, mu, bc, spec.div_mode, aopts));
        p.b.reset(); // the constraint block only feeds the projected penalty
        break;
    }
    case Operator::stokes_dirichlet:
        p = from_system(assemble_stokes_taylor_hood(mesh, mu, BoundaryCondition::dirichlet, aopts));
        break;
    case Operator::stokes_cauchy:
        p = from_system(assemble_stokes_taylor_hood(mesh, mu, BoundaryCondition::cauchy_force, aopts));
        break;
    case Operator::laplace_vec_dirichlet:
        p = from_system(assemble_laplace_vector(mesh, mu, BoundaryCondition::dirichlet, aopts));
        break;
    case Operator::laplace_vec_traction:
        p = from_system(assemble_laplace_vector(mesh, mu, BoundaryCondition::traction, aopts));
        break;
    case Operator::scalar_dirichlet:
        p = from_system(assemble_scalar_laplace(mesh, mu, BoundaryCondition::dirichlet, ElementKind::P2, aopts));
        break;
    case Operator::scalar_neumann:
        p = from_system(assemble_scalar_laplace(mesh, mu, BoundaryCondition::neumann, ElementKind::P2, aopts));
        break;
    case Operator::buckling_dirichlet:
    case Operator::clamped_plate: {
        const MorleySystem sys = assemble_biharmonic_morley(mesh, aopts);
        const std::vector<int> keep = complement(sys.bending.dim(), sys.constrained_dofs);
        if (spec.op == Operator::buckling_dirichlet) {
            p.a = mu * sys.bending.restrict_to(keep);
            p.m = sys.geometric.restrict_to(keep);
        } else {
            p.a = (mu * mu) * sys.bending.restrict_to(keep);
            p.m = sys.mass.restrict_to(keep);
            p.square_root = true;
        }
        break;
    }
    }
    p.scale = p.square_root ? mu * mu : mu;
    return p;
}

constexpr int kDenseRescueLimit = 3000;

EigResult solve_pencil(const Pencil& p, int k, const SolveOptions& opts) {
    const bool constrained = p.b && p.b->rows() > 0;
    if (!constrained && p.a.dim() <= opts.dense_limit) {
        EigResult full = solve_dense_sym_generalized(p.a, p.m, std::min(k, p.a.dim()), false);
        full.truncated = k > p.a.dim();
        return full;
    }
    const double sigma = shift_below_spectrum(p.a, p.b, p.m, -p.scale, p.scale);
    LanczosOptions lopts = opts.lanczos;
    lopts.compute_vectors = false;
    EigResult res = solve_saddle_point_eig(p.a, p.b, p.m, sigma, k, lopts);
    if (res.partial && !constrained && p.a.dim() <= kDenseRescueLimit) {
        EigResult full = solve_dense_sym_generalized(p.a, p.m, std::min(k, p.a.dim()), false);
        full.truncated = res.truncated;
        return full;
    }
    return res;
}

std::vector<double> as_reported(const std::vector<double>& values, bool square_root) {
    if (!square_root) return values;
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::sqrt(std::max(0.0, values[i]));
    return out;
}

} // namespace

std::string operator_name(Operator op) { return operator_names().at(op); }

Operator operator_from_name(const std::string& name) {
    for (const auto& [op, n] : operator_names()) {
        if (n == name) return op;
    }
    throw InvalidArgument("unknown operator '" + name + "'");
}

void validate(const ProblemSpec& spec) {
    SLL_REQUIRE(spec.mu > 0.0, "mu must be positive");
    SLL_REQUIRE(spec.count >= 1, "count must be at least 1");
    SLL_REQUIRE(spec.refinement_level >= 0, "refinement level must be nonnegative");
    if (spec.op == Operator::lame_dirichlet || spec.op == Operator::lame_traction) {
        SLL_REQUIRE(spec.lambda + 2.0 * spec.mu > 0.0, "Lame parameters need lambda + 2 mu > 0");
    }
}

std::vector<MultiplicityGroup> multiplicity_groups(const std::vector<double>& values, double rel_tol) {
    std::vector<MultiplicityGroup> groups;
    double max_abs = 0.0;
    for (double v : values) max_abs = std::max(max_abs, std::abs(v));
    const double floor = kZeroThreshold * max_abs;
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        // Values below the floor are roundoff zeros and form one group.
        const bool both_zero = std::abs(values[i]) <= floor && i > 0 && std::abs(values[i - 1]) <= floor;
        const bool joins = !groups.empty() &&
                           (both_zero || std::abs(values[i] - values[i - 1]) <=
                                             rel_tol * std::max(std::abs(values[i]), std::abs(values[i - 1])));
        if (joins) {
            ++groups.back().size;
            sum += values[i];
        } else {
            if (!groups.empty()) groups.back().value = sum / groups.back().size;
            groups.push_back({values[i], static_cast<int>(i), 1});
            sum = values[i];
        }
    }
    if (!groups.empty()) groups.back().value = sum / groups.back().size;
    return groups;
}

int count_zero_modes(const std::vector<double>& values) {
    double max_abs = 0.0;
    for (double v : values) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) return static_cast<int>(values.size());
    double first_nonzero = max_abs;
    for (double v : values) {
        if (std::abs(v) > kZeroThreshold * max_abs) first_nonzero = std::min(first_nonzero, std::abs(v));
    }
    int zeros = 0;
    for (double v : values) {
        if (std::abs(v) <= kZeroThreshold * first_nonzero) ++zeros;
    }
    return zeros;
}

SpectrumResult compute_spectrum(const ProblemSpec& spec, const SolveOptions& opts) {
    validate(spec);
    return compute_spectrum(spec, mesh_for_level(spec.domain, spec.refinement_level), opts);
}

SpectrumResult compute_spectrum(const ProblemSpec& spec, const Mesh& mesh, const SolveOptions& opts) {
    validate(spec);
    const auto start = std::chrono::steady_clock::now();
    const Pencil p = build_pencil(spec, mesh, opts.workers);
    const EigResult eig = solve_pencil(p, spec.count, opts);

    SpectrumResult res;
    res.spec = spec;
    res.eigenvalues = as_reported(eig.eigenvalues, p.square_root);
    res.residuals = eig.residual_norms;
    res.multiplicity_groups = multiplicity_groups(res.eigenvalues);
    res.zero_modes = count_zero_modes(res.eigenvalues);
    res.mesh_h = mesh.h_max;
    res.dofs = p.a.dim();
    res.partial = eig.partial;
    res.truncated = eig.truncated;
    res.method = eig.method;
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

EigResult brute_force_dense_check(const ProblemSpec& spec, const SolveOptions& opts) {
    validate(spec);
    const Mesh mesh = mesh_for_level(spec.domain, spec.refinement_level);
    const Pencil p = build_pencil(spec, mesh, opts.workers);
    SLL_REQUIRE(p.a.dim() <= 4000, "dense check limited to reduced dimension 4000");
    EigResult res;
    if (p.b && p.b->rows() > 0) {
        // Orthonormal basis of ker B from a column-pivoted QR of B^T.
        const Eigen::MatrixXd bt = Eigen::MatrixXd(*p.b).transpose();
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(bt);
        const int r = static_cast<int>(qr.rank());
        const Eigen::MatrixXd q = qr.householderQ();
        const Eigen::MatrixXd z = q.rightCols(bt.rows() - r);
        const Eigen::MatrixXd az = z.transpose() * p.a.to_dense() * z;
        const Eigen::MatrixXd mz = z.transpose() * p.m.to_dense() * z;
        res = solve_dense_sym_generalized(SparseSymMatrix::from_dense(0.5 * (az + az.transpose())),
                                          SparseSymMatrix::from_dense(0.5 * (mz + mz.transpose())),
                                          std::min<int>(spec.count, static_cast<int>(z.cols())), false);
        res.truncated = spec.count > z.cols();
    } else {
        res = solve_dense_sym_generalized(p.a, p.m, std::min(spec.count, p.a.dim()), false);
        res.truncated = spec.count > p.a.dim();
    }
    res.eigenvalues = as_reported(res.eigenvalues, p.square_root);
    return res;
}

MeshExtrapolation extrapolate_mesh(const std::vector<SpectrumResult>& results) {
    SLL_REQUIRE(results.size() == 3, "mesh extrapolation needs three refinement levels");
    for (int i = 1; i < 3; ++i) {
        SLL_REQUIRE(results[i].spec.op == results[0].spec.op &&
                        results[i].spec.refinement_level == results[0].spec.refinement_level + i,
                    "extrapolation levels must be consecutive refinements of one problem");
    }
    MeshExtrapolation out;
    const auto values =
        richardson_lists(results[0].eigenvalues, results[1].eigenvalues, results[2].eigenvalues);
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.values.push_back(values[i].value);
        out.orders.push_back(values[i].order);
        out.extrapolated.push_back(values[i].extrapolated);
        out.finest.push_back(results[2].eigenvalues[i]);
    }
    return out;
}

MeshExtrapolation converged_spectrum(const ProblemSpec& spec, int base_level, const SolveOptions& opts,
                                     std::vector<SpectrumResult>* levels) {
    std::vector<std::function<SpectrumResult()>> jobs;
    SolveOptions inner = opts;
    if (opts.workers > 1) inner.workers = 1;
    for (int l = 0; l < 3; ++l) {
        ProblemSpec s = spec;
        s.refinement_level = base_level + l;
        jobs.emplace_back([s, inner] { return compute_spectrum(s, inner); });
    }
    std::vector<SpectrumResult> results = parallel_map(jobs, opts.workers);
    MeshExtrapolation out = extrapolate_mesh(results);
    if (levels) *levels = std::move(results);
    return out;
}

SweepTable lambda_sweep(const DomainSpec& domain, double mu, const std::vector<double>& lambdas, int k, int level,
                        DivergenceMode mode, const SolveOptions& opts) {
    SLL_REQUIRE(mu > 0.0 && k >= 1, "invalid sweep parameters");
    SLL_REQUIRE(std::is_sorted(lambdas.begin(), lambdas.end()), "lambda grid must be ascending");
    SweepTable table;
    table.lambdas = lambdas;
    bool projected = mode == DivergenceMode::projected;
    if (mode == DivergenceMode::automatic) {
        for (double l : lambdas) projected = projected || uses_projected_divergence(l, mu, mode);
    }
    table.projected = projected;
    const Mesh mesh = mesh_for_level(domain, level);
    SolveOptions inner = opts;
    if (opts.workers > 1) inner.workers = 1;
    std::vector<std::function<std::vector<double>()>> jobs;
    for (double l : lambdas) {
        SLL_REQUIRE(l + 2.0 * mu > 0.0, "sweep grid must lie in (-2 mu, inf)");
        for (Operator op : {Operator::lame_dirichlet, Operator::lame_traction}) {
            ProblemSpec s;
            s.op = op;
            s.lambda = l;
            s.mu = mu;
            s.domain = domain;
            s.refinement_level = level;
            s.count = k;
            s.div_mode = projected ? DivergenceMode::projected : DivergenceMode::plain;
            jobs.emplace_back([s, &mesh, inner] { return compute_spectrum(s, mesh, inner).eigenvalues; });
        }
    }
    const auto out = parallel_map(jobs, opts.workers);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        table.dirichlet.push_back(out[2 * i]);
        table.traction.push_back(out[2 * i + 1]);
    }
    return table;
}

std::vector<MonotonicityRow> check_monotone(const SweepTable& table, double slack) {
    std::vector<MonotonicityRow> rows;
    for (const auto& [name, columns] :
         {std::pair{"dirichlet", &table.dirichlet}, std::pair{"traction", &table.traction}}) {
        for (std::size_t i = 0; i + 1 < columns->size(); ++i) {
            const auto& lo = (*columns)[i];
            const auto& hi = (*columns)[i + 1];
            // Zero modes carry roundoff only; measure slack against the column scale.
            double scale = 0.0;
            for (double v : lo) scale = std::max(scale, std::abs(v));
            for (double v : hi) scale = std::max(scale, std::abs(v));
            for (std::size_t j = 0; j < std::min(lo.size(), hi.size()); ++j) {
                MonotonicityRow r;
                r.bc = name;
                r.lambda_low = table.lambdas[i];
                r.lambda_high = table.lambdas[i + 1];
                r.index = static_cast<int>(j) + 1;
                r.low = lo[j];
                r.high = hi[j];
                r.scale = scale;
                r.pass = lo[j] <= hi[j] + slack * scale;
                rows.push_back(r);
            }
        }
    }
    return rows;
}

PenaltyResult stokes_via_penalty(const DomainSpec& domain, double mu, double lambda_pen, int k, bool richardson,
                                 int level, const SolveOptions& opts) {
    SLL_REQUIRE(mu > 0.0, "mu must be positive");
    SLL_REQUIRE(lambda_pen >= 10.0 * mu, "penalty parameter must be at least 10 mu");
    const Mesh mesh = mesh_for_level(domain, level);
    SolveOptions inner = opts;
    if (opts.workers > 1) inner.workers = 1;
    std::vector<std::function<std::vector<double>()>> jobs;
    for (Operator op : {Operator::lame_dirichlet, Operator::lame_traction}) {
        for (double l : {lambda_pen, 2.0 * lambda_pen}) {
            ProblemSpec s;
            s.op = op;
            s.lambda = l;
            s.mu = mu;
            s.domain = domain;
            s.refinement_level = level;
            s.count = k;
            s.div_mode = DivergenceMode::projected;
            jobs.emplace_back([s, &mesh, inner] { return compute_spectrum(s, mesh, inner).eigenvalues; });
        }
    }
    const auto out = parallel_map(jobs, opts.workers);
    auto fill = [&](PenaltyEstimate& e, const std::vector<double>& raw, const std::vector<double>& doubled) {
        e.lambda = lambda_pen;
        e.raw = raw;
        e.doubled = doubled;
        if (!richardson) return;
        const double eps1 = 1.0 / (lambda_pen + mu);
        const double eps2 = 1.0 / (2.0 * lambda_pen + mu);
        for (std::size_t i = 0; i < std::min(raw.size(), doubled.size()); ++i) {
            e.extrapolated.push_back(extrapolate_linear_to_zero(eps1, raw[i], eps2, doubled[i]));
        }
    };
    PenaltyResult res;
    fill(res.dirichlet, out[0], out[1]);
    fill(res.cauchy, out[2], out[3]);
    return res;
}

namespace {

ProblemSpec make_spec(Operator op, const DomainSpec& domain, double mu, int k, double lambda = 0.0) {
    ProblemSpec s;
    s.op = op;
    s.domain = domain;
    s.mu = mu;
    s.count = k;
    s.lambda = lambda;
    return s;
}

} // namespace

SandwichReport verify_sandwich(const DomainSpec& domain, double mu, const std::vector<double>& lambdas, int k,
                               int base_level, bool include_traction, double slack, const SolveOptions& opts) {
    for (double l : lambdas) SLL_REQUIRE(l > -mu, "sandwich grid must lie in (-mu, inf)");
    SandwichReport report;
    const auto theta = converged_spectrum(make_spec(Operator::laplace_vec_dirichlet, domain, mu, k), base_level, opts);
    const auto stokes = converged_spectrum(make_spec(Operator::stokes_dirichlet, domain, mu, k), base_level, opts);
    MeshExtrapolation cauchy;
    if (include_traction) {
        cauchy = converged_spectrum(make_spec(Operator::stokes_cauchy, domain, mu, k), base_level, opts);
    }
    auto add_rows = [&](const std::string& bc, double lambda, const std::vector<double>& lower,
                        const std::vector<double>& middle, const std::vector<double>& upper) {
        for (int i = 0; i < k && i < static_cast<int>(middle.size()); ++i) {
            SandwichRow r;
            r.bc = bc;
            r.lambda = lambda;
            r.index = i + 1;
            r.lower = lower.empty() ? 0.0 : lower[i];
            r.middle = middle[i];
            r.upper = upper[i];
            const double mid_scale = std::max(std::abs(r.middle), 1e-300);
            const double up_scale = std::max(std::abs(r.upper), 1e-300);
            r.left_margin = (r.middle - r.lower) / mid_scale;
            r.right_margin = (r.upper - r.middle) / up_scale;
            if (lower.empty() && std::abs(r.middle) <= kZeroThreshold * up_scale) r.left_margin = 0.0;
            r.pass = r.left_margin >= -slack && r.right_margin >= -slack;
            report.pass = report.pass && r.pass;
            report.rows.push_back(r);
        }
    };
    for (double l : lambdas) {
        const auto tau = converged_spectrum(make_spec(Operator::lame_dirichlet, domain, mu, k, l), base_level, opts);
        add_rows("dirichlet", l, theta.values, tau.values, stokes.values);
        if (include_traction) {
            const auto tau_t =
                converged_spectrum(make_spec(Operator::lame_traction, domain, mu, k, l), base_level, opts);
            add_rows("traction", l, {}, tau_t.values, cauchy.values);
        }
    }
    return report;
}

IdentityReport verify_buckling_stokes_identity(const DomainSpec& domain, double mu, int k, int base_level,
                                               const SolveOptions& opts) {
    SLL_REQUIRE(domain.simply_connected(), "the stream-function route needs a simply connected domain");
    std::vector<SpectrumResult> lb;
    std::vector<SpectrumResult> ls;
    const auto buckling =
        converged_spectrum(make_spec(Operator::buckling_dirichlet, domain, mu, k), base_level, opts, &lb);
    const auto stokes = converged_spectrum(make_spec(Operator::stokes_dirichlet, domain, mu, k), base_level, opts, &ls);
    IdentityReport r;
    r.buckling = buckling.values;
    r.stokes = stokes.values;
    for (std::size_t i = 0; i < std::min(r.buckling.size(), r.stokes.size()); ++i) {
        r.gaps.push_back(std::abs(r.buckling[i] - r.stokes[i]) / std::abs(r.stokes[i]));
        r.max_gap = std::max(r.max_gap, r.gaps.back());
    }
    for (int l = 0; l < 3; ++l) {
        double g = 0.0;
        const auto& b = lb[l].eigenvalues;
        const auto& s = ls[l].eigenvalues;
        for (std::size_t i = 0; i < std::min(b.size(), s.size()); ++i) g = std::max(g, std::abs(b[i] - s[i]) / s[i]);
        r.level_max_gaps.push_back(g);
    }
    return r;
}

ChainReport verify_chain_inequalities(const DomainSpec& domain, double mu, int k, int base_level, double slack,
                                      const SolveOptions& opts) {
    ChainReport r;
    r.theta = converged_spectrum(make_spec(Operator::scalar_neumann, domain, mu, k), base_level, opts).values;
    r.xi = converged_spectrum(make_spec(Operator::scalar_dirichlet, domain, mu, k), base_level, opts).values;
    r.gamma = converged_spectrum(make_spec(Operator::clamped_plate, domain, mu, k), base_level, opts).values;
    r.buckling = converged_spectrum(make_spec(Operator::buckling_dirichlet, domain, mu, k), base_level, opts).values;
    const std::size_t n = std::min({r.theta.size(), r.xi.size(), r.gamma.size(), r.buckling.size()});
    for (std::size_t i = 0; i < n; ++i) {
        const double m1 = (r.xi[i] - r.theta[i]) / r.xi[i];
        const double m2 = (r.gamma[i] - r.xi[i]) / r.gamma[i];
        const double m3 = (r.buckling[i] - r.gamma[i]) / r.buckling[i];
        r.min_margins.push_back(std::min({m1, m2, m3}));
        r.pass = r.pass && r.min_margins.back() > -slack;
    }
    return r;
}

std::vector<ZeroCountObservation> traction_laplace_zero_counts(const DomainSpec& domain, double mu,
                                                               const std::vector<int>& levels, int count,
                                                               const SolveOptions& opts) {
    std::vector<ZeroCountObservation> out;
    for (int level : levels) {
        ProblemSpec s = make_spec(Operator::laplace_vec_traction, domain, mu, count);
        s.refinement_level = level;
        const SpectrumResult res = compute_spectrum(s, opts);
        out.push_back({level, res.mesh_h, res.dofs, res.zero_modes});
    }
    return out;
}

} // namespace sll
