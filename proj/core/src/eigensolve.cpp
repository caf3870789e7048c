#include "sll/eigensolve.hpp"

#include "sll/error.hpp"
#include "sll/factorization.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <string>

namespace sll {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SLL_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw InvalidArgument(std::string("SLL_SEED is not an unsigned integer: ") + env);
        }
    }
    return 42;
}

namespace {

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

// Residuals and Rayleigh quotients for the final pairs.
struct Finalizer {
    const SparseSymMatrix& a;
    const SparseSymMatrix& m;
    // Returns ||A x - lambda M x (+ B^T p)||_2 for an M-normalized x.
    std::function<double(const Eigen::VectorXd&, double)> residual;
};

void fill_pairs(EigResult& res, const Finalizer& fin, const Eigen::MatrixXd& x, bool keep_vectors) {
    const int p = static_cast<int>(x.cols());
    std::vector<double> lambda(p);
    Eigen::MatrixXd xs = x;
    for (int i = 0; i < p; ++i) {
        const double mm = fin.m.quadratic_form(xs.col(i));
        xs.col(i) /= std::sqrt(mm);
        lambda[i] = fin.a.quadratic_form(xs.col(i));
    }
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return lambda[i] < lambda[j]; });
    res.eigenvalues.resize(p);
    res.residual_norms.resize(p);
    if (keep_vectors) res.eigenvectors.resize(x.rows(), p);
    for (int r = 0; r < p; ++r) {
        const int i = order[r];
        res.eigenvalues[r] = lambda[i];
        res.residual_norms[r] = fin.residual(xs.col(i), lambda[i]);
        if (keep_vectors) res.eigenvectors.col(r) = xs.col(i);
    }
}

// Shift-invert Lanczos engine shared by the plain and saddle-point paths.
struct Engine {
    int n = 0;
    int n_effective = 0;
    double sigma = 0.0;
    const SparseSymMatrix* m = nullptr;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;
    std::function<Eigen::VectorXd(std::mt19937_64&)> start;
    // Number of eigenvalues strictly below s (may be empty: no inertia check).
    std::function<long(double)> negatives_at;
    long negatives_at_sigma = 0;
};

struct EngineOutput {
    Eigen::MatrixXd vectors;
    std::vector<double> theta;
    int iterations = 0;
    bool complete = false;
};

constexpr double kRitzTol = 1e-11;

void m_orthogonalize(Eigen::VectorXd& w, const Eigen::MatrixXd& basis, const Eigen::MatrixXd& m_basis, int cols) {
    if (cols == 0) return;
    w.noalias() -= basis.leftCols(cols) * (m_basis.leftCols(cols).transpose() * w);
}

EngineOutput run_engine(const Engine& eng, int k, const LanczosOptions& opts) {
    EngineOutput out;
    std::mt19937_64 rng(opts.seed == 0 ? default_seed() : opts.seed);
    const int max_dim = std::min(eng.n_effective, std::max(3 * k + 40, 60));
    Eigen::MatrixXd locked(eng.n, 0);
    Eigen::MatrixXd m_locked(eng.n, 0);
    std::vector<double> theta_locked;

    auto kth_threshold = [&]() {
        if (static_cast<int>(theta_locked.size()) < k) return 0.0;
        std::vector<double> mags;
        for (double t : theta_locked) mags.push_back(std::abs(t));
        std::nth_element(mags.begin(), mags.begin() + (k - 1), mags.end(), std::greater<>());
        return mags[k - 1];
    };

    for (int pass = 0; pass < opts.max_passes; ++pass) {
        const double threshold = kth_threshold();
        const int nl = static_cast<int>(locked.cols());
        if (nl >= eng.n_effective) break;
        Eigen::VectorXd v = eng.start(rng);
        for (int rep = 0; rep < 2; ++rep) m_orthogonalize(v, locked, m_locked, nl);
        const double vn = std::sqrt(std::max(0.0, eng.m->quadratic_form(v)));
        if (!(vn > 0.0)) break;
        v /= vn;

        // Restart passes that still miss pairs get a longer Krylov space.
        const long memory_cap = std::max(60L, 75'000'000L / std::max(1, eng.n));
        const long grown = static_cast<long>(max_dim) << std::min(pass, 5);
        const int dim = static_cast<int>(std::min<long>({grown, memory_cap, eng.n_effective - nl}));
        Eigen::MatrixXd basis(eng.n, dim);
        Eigen::MatrixXd m_basis(eng.n, dim);
        std::vector<double> alpha;
        std::vector<double> beta;
        Eigen::VectorXd ritz;
        Eigen::MatrixXd ritz_vec;
        std::vector<int> order;
        std::vector<bool> converged;
        int steps = 0;
        int next_check = std::min(dim, std::max(k, 10));
        while (steps < dim) {
            const int j = steps;
            basis.col(j) = v;
            m_basis.col(j) = eng.m->multiply(v);
            Eigen::VectorXd w = eng.apply(v);
            ++out.iterations;
            const double a = m_basis.col(j).dot(w);
            w -= a * v;
            if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
            // Second Gram-Schmidt sweep only when the first one cancelled most of w.
            double before = std::sqrt(std::max(0.0, eng.m->quadratic_form(w)));
            double b = 0.0;
            for (int rep = 0; rep < 2; ++rep) {
                m_orthogonalize(w, locked, m_locked, nl);
                m_orthogonalize(w, basis, m_basis, j + 1);
                b = std::sqrt(std::max(0.0, eng.m->quadratic_form(w)));
                if (b > 0.7071 * before) break;
                before = b;
            }
            alpha.push_back(a);
            beta.push_back(b);
            steps = j + 1;

            const double scale = std::abs(a) + b + (j > 0 ? beta[j - 1] : 0.0);
            const bool breakdown = b <= 1e-13 * std::max(scale, 1e-300);
            if (steps == next_check || steps == dim || breakdown) {
                Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), steps);
                Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), steps).head(std::max(0, steps - 1));
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
                tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
                ritz = tri.eigenvalues();
                ritz_vec = tri.eigenvectors();
                order.resize(steps);
                std::iota(order.begin(), order.end(), 0);
                std::stable_sort(order.begin(), order.end(),
                                 [&](int x, int y) { return std::abs(ritz(x)) > std::abs(ritz(y)); });
                const double theta_max = std::abs(ritz(order[0]));
                converged.assign(steps, false);
                for (int i = 0; i < steps; ++i) {
                    converged[i] = breakdown || std::abs(b * ritz_vec(steps - 1, i)) <= kRitzTol * theta_max;
                }
                const int want = std::min(k, steps);
                bool stop = true;
                for (int r = 0; r < want; ++r) stop = stop && converged[order[r]];
                if (!stop && threshold > 0.0) {
                    // Restart passes only need what lies above the current k-th value.
                    stop = true;
                    for (int r = 0; r < steps; ++r) {
                        const int i = order[r];
                        stop = stop && converged[i];
                        if (std::abs(ritz(i)) < threshold * (1.0 - 1e-9)) break;
                    }
                }
                if (stop || breakdown) break;
                next_check = std::min(dim, steps + std::max(5, steps / 10));
            }
            v = w / b;
        }

        // Lock converged Ritz pairs among the k dominant ones.
        int newly = 0;
        const int want = std::min<int>(k, static_cast<int>(order.size()));
        for (int r = 0; r < want; ++r) {
            const int i = order[r];
            if (!converged[i]) continue;
            if (threshold > 0.0 && std::abs(ritz(i)) < threshold * (1.0 - 1e-9)) continue;
            Eigen::VectorXd y = basis.leftCols(steps) * ritz_vec.col(i);
            const int cols = static_cast<int>(locked.cols());
            for (int rep = 0; rep < 2; ++rep) m_orthogonalize(y, locked, m_locked, cols);
            const double yn = std::sqrt(std::max(0.0, eng.m->quadratic_form(y)));
            if (!(yn > 1e-8)) continue;
            y /= yn;
            locked.conservativeResize(Eigen::NoChange, cols + 1);
            m_locked.conservativeResize(Eigen::NoChange, cols + 1);
            locked.col(cols) = y;
            m_locked.col(cols) = eng.m->multiply(y);
            theta_locked.push_back(ritz(i));
            ++newly;
        }

        if (static_cast<int>(theta_locked.size()) < k) {
            if (static_cast<int>(locked.cols()) >= eng.n_effective) break;
            continue;
        }
        if (!eng.negatives_at) {
            // Without inertia counts, stop once a restart adds nothing new.
            if (pass > 0 && newly == 0) {
                out.complete = true;
                break;
            }
            if (pass > 0 && kth_threshold() == threshold) {
                out.complete = true;
                break;
            }
            continue;
        }
        // Compare found eigenvalues against Sylvester counts on each side of sigma.
        std::vector<int> idx(theta_locked.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int x, int y) { return std::abs(theta_locked[x]) > std::abs(theta_locked[y]); });
        double reach_up = 0.0;
        double reach_down = 0.0;
        for (int r = 0; r < k; ++r) {
            const double d = 1.0 / theta_locked[idx[r]];
            if (d > 0.0) reach_up = std::max(reach_up, d);
            else reach_down = std::max(reach_down, -d);
        }
        bool complete = true;
        if (reach_up > 0.0) {
            const double edge = reach_up * (1.0 + 1e-9);
            long found = 0;
            for (double t : theta_locked) found += (t > 0.0 && 1.0 / t <= edge) ? 1 : 0;
            const long expected = eng.negatives_at(eng.sigma + edge) - eng.negatives_at_sigma;
            complete = complete && found >= expected;
        }
        if (reach_down > 0.0) {
            const double edge = reach_down * (1.0 + 1e-9);
            long found = 0;
            for (double t : theta_locked) found += (t < 0.0 && -1.0 / t <= edge) ? 1 : 0;
            const long expected = eng.negatives_at_sigma - eng.negatives_at(eng.sigma - edge);
            complete = complete && found >= expected;
        }
        if (complete) {
            out.complete = true;
            break;
        }
    }

    // Keep the k dominant locked pairs.
    std::vector<int> idx(theta_locked.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int x, int y) { return std::abs(theta_locked[x]) > std::abs(theta_locked[y]); });
    const int keep = std::min<int>(k, static_cast<int>(idx.size()));
    out.vectors.resize(eng.n, keep);
    for (int r = 0; r < keep; ++r) {
        out.vectors.col(r) = locked.col(idx[r]);
        out.theta.push_back(theta_locked[idx[r]]);
    }
    if (keep < k) out.complete = false;
    return out;
}

SparseMatrix shifted_lower(const SparseSymMatrix& a, const SparseSymMatrix& m, double s) {
    SparseMatrix l = a.lower() - s * m.lower();
    l.makeCompressed();
    return l;
}

// Removes pressure row 0 when constant pressures lie in the left kernel of B
// (enclosed flow), which makes the saddle-point matrix nonsingular.
SparseMatrix pin_pressure(const SparseMatrix& b) {
    if (b.rows() == 0) return b;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(b.rows());
    const Eigen::VectorXd col_sums = b.transpose() * ones;
    double bmax = 0.0;
    for (int j = 0; j < b.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(b, j); it; ++it) bmax = std::max(bmax, std::abs(it.value()));
    }
    if (col_sums.size() > 0 && col_sums.cwiseAbs().maxCoeff() > 1e-10 * bmax * std::sqrt(double(b.rows()))) return b;
    std::vector<Triplet> t;
    for (int j = 0; j < b.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(b, j); it; ++it) {
            if (it.row() > 0) t.emplace_back(static_cast<int>(it.row()) - 1, j, it.value());
        }
    }
    SparseMatrix pinned(b.rows() - 1, b.cols());
    pinned.setFromTriplets(t.begin(), t.end());
    return pinned;
}

struct SaddleSystem {
    int n = 0;
    int np = 0;
    double delta = 0.0;
    SparseMatrix exact_lower; // [[A - sM, .], [B, 0]]
    std::unique_ptr<SymmetricFactorization> factor;

    // Solves the exact system by iterating on the regularized factorization.
    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        Eigen::VectorXd x = factor->solve(rhs);
        for (int step = 0; step < 3; ++step) {
            const Eigen::VectorXd r = rhs - exact_lower.selfadjointView<Eigen::Lower>() * x;
            x += factor->solve(r);
        }
        return x;
    }
};

SaddleSystem build_saddle(const SparseSymMatrix& a, const SparseMatrix& b, const SparseSymMatrix& m, double s) {
    SaddleSystem sys;
    sys.n = a.dim();
    sys.np = static_cast<int>(b.rows());
    const SparseMatrix top = shifted_lower(a, m, s);
    double bmax = 0.0;
    for (int j = 0; j < b.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(b, j); it; ++it) bmax = std::max(bmax, std::abs(it.value()));
    }
    const double amax = std::max(a.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    sys.delta = 1e-8 * bmax * bmax / amax;
    std::vector<Triplet> t;
    t.reserve(top.nonZeros() + b.nonZeros() + sys.np);
    for (int j = 0; j < top.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(top, j); it; ++it) t.emplace_back(it.row(), j, it.value());
    }
    for (int j = 0; j < b.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(b, j); it; ++it) t.emplace_back(sys.n + it.row(), j, it.value());
    }
    const int total = sys.n + sys.np;
    sys.exact_lower.resize(total, total);
    sys.exact_lower.setFromTriplets(t.begin(), t.end());
    sys.exact_lower.makeCompressed();
    for (int q = 0; q < sys.np; ++q) t.emplace_back(sys.n + q, sys.n + q, -sys.delta);
    SparseMatrix reg(total, total);
    reg.setFromTriplets(t.begin(), t.end());
    sys.factor = std::make_unique<SymmetricFactorization>(reg, false);
    return sys;
}

template <typename Factor>
Factor factor_with_retries(const std::function<Factor(double)>& make, double& sigma, int& retries) {
    for (retries = 0;; ++retries) {
        try {
            Factor f = make(sigma);
            return f;
        } catch (const NumericalError&) {
            if (retries == 3) throw;
            sigma = sigma * (1.0 + 1e-3) + 1e-8;
        }
    }
}

} // namespace

EigResult solve_dense_sym_generalized(const SparseSymMatrix& a, const SparseSymMatrix& m, int k, bool compute_vectors) {
    SLL_REQUIRE(a.dim() == m.dim(), "A and M dimensions differ");
    SLL_REQUIRE(k >= 0, "k must be nonnegative");
    EigResult res;
    res.method = EigMethod::dense;
    const int n = a.dim();
    if (k > n) {
        res.truncated = true;
        k = n;
    }
    if (k == 0) return res;
    Eigen::MatrixXd l = m.to_dense();
    for (int j = 0; j < n; ++j) {
        double d = l(j, j);
        for (int p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
        if (!(d > 0.0)) throw NumericalError("mass matrix is not positive definite at pivot " + std::to_string(j), j);
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = l(i, j);
            for (int p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
            l(i, j) = s / ljj;
        }
    }
    const auto lt = l.triangularView<Eigen::Lower>();
    Eigen::MatrixXd c = a.to_dense();
    lt.solveInPlace(c);
    Eigen::MatrixXd ct = c.transpose();
    lt.solveInPlace(ct);
    c = ct;
    c = 0.5 * (c + c.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericalError("dense symmetric eigensolver did not converge");
    Eigen::MatrixXd x = es.eigenvectors().leftCols(k);
    l.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
    Finalizer fin{a, m, [&](const Eigen::VectorXd& v, double lam) {
                      return (a.multiply(v) - lam * m.multiply(v)).norm();
                  }};
    fill_pairs(res, fin, x, compute_vectors);
    // Keep the eigendecomposition values (Rayleigh quotients agree to roundoff).
    for (int i = 0; i < k; ++i) res.eigenvalues[i] = es.eigenvalues()(i);
    return res;
}

EigResult solve_shift_invert_lanczos(const SparseSymMatrix& a, const SparseSymMatrix& m, double sigma, int k,
                                     const LanczosOptions& opts) {
    SLL_REQUIRE(a.dim() == m.dim(), "A and M dimensions differ");
    SLL_REQUIRE(k >= 0, "k must be nonnegative");
    EigResult res;
    res.method = EigMethod::lanczos;
    const int n = a.dim();
    if (k > n) {
        res.truncated = true;
        k = n;
    }
    if (k == 0) return res;

    int retries = 0;
    std::function<SymmetricFactorization(double)> make = [&](double s) {
        SymmetricFactorization f(shifted_lower(a, m, s));
        if (f.pivot_ratio() > SymmetricFactorization::kPivotRatioLimit) {
            throw NumericalError("shifted matrix is numerically singular");
        }
        return f;
    };
    SymmetricFactorization f = factor_with_retries(make, sigma, retries);
    res.sigma = sigma;
    res.shift_retries = retries;
    res.pivot_ratio = f.pivot_ratio();

    Engine eng;
    eng.n = n;
    eng.n_effective = n;
    eng.sigma = sigma;
    eng.m = &m;
    eng.apply = [&](const Eigen::VectorXd& v) { return f.solve(m.multiply(v)); };
    eng.start = [&](std::mt19937_64& rng) { return random_vector(n, rng); };
    eng.negatives_at_sigma = f.negative_count();
    eng.negatives_at = [&](double s) { return count_below(a, std::nullopt, m, s); };
    EngineOutput out = run_engine(eng, k, opts);
    res.iterations = out.iterations;
    res.partial = !out.complete;
    Finalizer fin{a, m, [&](const Eigen::VectorXd& v, double lam) {
                      return (a.multiply(v) - lam * m.multiply(v)).norm();
                  }};
    fill_pairs(res, fin, out.vectors, opts.compute_vectors);
    return res;
}

EigResult solve_saddle_point_eig(const SparseSymMatrix& a, const std::optional<SparseMatrix>& constraint,
                                 const SparseSymMatrix& m, double sigma, int k, const LanczosOptions& opts) {
    if (!constraint || constraint->rows() == 0) return solve_shift_invert_lanczos(a, m, sigma, k, opts);
    SLL_REQUIRE(a.dim() == m.dim() && constraint->cols() == a.dim(), "saddle-point block dimensions differ");
    SLL_REQUIRE(k >= 0, "k must be nonnegative");
    EigResult res;
    res.method = EigMethod::lanczos;
    const SparseMatrix b = pin_pressure(*constraint);
    const int n = a.dim();
    const int n_eff = n - static_cast<int>(b.rows());
    SLL_REQUIRE(n_eff > 0, "constraint block has more rows than velocity dofs");
    if (k > n_eff) {
        res.truncated = true;
        k = n_eff;
    }
    if (k == 0) return res;

    int retries = 0;
    std::function<SaddleSystem(double)> make = [&](double s) {
        return build_saddle(a, b, m, s);
    };
    SaddleSystem sys = factor_with_retries(make, sigma, retries);
    res.sigma = sigma;
    res.shift_retries = retries;
    res.pivot_ratio = sys.factor->pivot_ratio();

    const int np = static_cast<int>(b.rows());
    auto full_solve = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + np);
        rhs.head(n) = m.multiply(v);
        return sys.solve(rhs);
    };
    Engine eng;
    eng.n = n;
    eng.n_effective = n_eff;
    eng.sigma = sigma;
    eng.m = &m;
    eng.apply = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(full_solve(v).head(n)); };
    // Start inside the discretely divergence-free subspace.
    eng.start = [&](std::mt19937_64& rng) { return Eigen::VectorXd(full_solve(random_vector(n, rng)).head(n)); };
    eng.negatives_at_sigma = sys.factor->negative_count();
    eng.negatives_at = [&](double s) { return build_saddle(a, b, m, s).factor->negative_count(); };
    EngineOutput out = run_engine(eng, k, opts);
    res.iterations = out.iterations;
    res.partial = !out.complete;
    Finalizer fin{a, m, [&](const Eigen::VectorXd& v, double lam) {
                      // Pressure recovered from one more shifted solve: A x - lam M x + B^T p = 0.
                      const Eigen::VectorXd y = full_solve(v);
                      const double theta = 1.0 / (lam - sigma);
                      const Eigen::VectorXd p = y.tail(np) / theta;
                      return (a.multiply(v) - lam * m.multiply(v) + b.transpose() * p).norm();
                  }};
    fill_pairs(res, fin, out.vectors, opts.compute_vectors);
    return res;
}

long count_below(const SparseSymMatrix& a, const std::optional<SparseMatrix>& constraint, const SparseSymMatrix& m,
                 double s) {
    for (int attempt = 0;; ++attempt) {
        try {
            if (!constraint || constraint->rows() == 0) {
                return SymmetricFactorization(shifted_lower(a, m, s)).negative_count();
            }
            const SparseMatrix b = pin_pressure(*constraint);
            return build_saddle(a, b, m, s).factor->negative_count() - b.rows();
        } catch (const NumericalError&) {
            if (attempt == 3) throw;
            s -= 1e-8 * (1.0 + std::abs(s));
        }
    }
}

double gershgorin_lower_estimate(const SparseSymMatrix& a, const SparseSymMatrix& m) {
    const SparseMatrix full = a.full();
    const Eigen::VectorXd md = m.diagonal();
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < full.outerSize(); ++j) {
        double diag = 0.0;
        double off = 0.0;
        for (SparseMatrix::InnerIterator it(full, j); it; ++it) {
            if (it.row() == j) diag = it.value();
            else off += std::abs(it.value());
        }
        if (md(j) > 0.0) best = std::min(best, (diag - off) / md(j));
    }
    return best;
}

double shift_below_spectrum(const SparseSymMatrix& a, const std::optional<SparseMatrix>& constraint,
                            const SparseSymMatrix& m, double sigma, double scale) {
    double step = std::abs(scale) > 0.0 ? std::abs(scale) : 1.0;
    for (int iter = 0; iter < 80; ++iter) {
        if (count_below(a, constraint, m, sigma) == 0) return sigma;
        sigma -= step;
        step *= 2.0;
    }
    throw NumericalError("could not place a shift below the spectrum");
}

} // namespace sll
