#include "sll/factorization.hpp"

#include "sll/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <lapacke.h>

#include <cmath>
#include <limits>
#include <vector>

namespace sll {

struct SymmetricFactorization::Impl {
    SparseMatrix lower;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> sparse;
    bool dense = false;
    Eigen::MatrixXd dense_factor;
    std::vector<lapack_int> ipiv;
    long negatives = 0;
    double ratio = 0.0;

    [[nodiscard]] Eigen::VectorXd raw_solve(const Eigen::VectorXd& b) const {
        if (!dense) return sparse.solve(b);
        Eigen::VectorXd x = b;
        const lapack_int n = static_cast<lapack_int>(b.size());
        const lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, 1, dense_factor.data(), n, ipiv.data(),
                                               x.data(), n);
        if (info != 0) throw NumericalError("dense symmetric solve failed", info);
        return x;
    }
};

namespace {

bool sparse_attempt(SymmetricFactorization::Impl& f, bool limit_ratio) {
    f.sparse.compute(f.lower);
    if (f.sparse.info() != Eigen::Success) return false;
    const Eigen::VectorXd& d = f.sparse.vectorD();
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    long neg = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!std::isfinite(d(i))) return false;
        lo = std::min(lo, std::abs(d(i)));
        hi = std::max(hi, std::abs(d(i)));
        if (d(i) < 0.0) ++neg;
    }
    if (lo == 0.0) return false;
    f.negatives = neg;
    f.ratio = hi / lo;
    return !limit_ratio || f.ratio <= SymmetricFactorization::kPivotRatioLimit;
}

void dense_bunch_kaufman(SymmetricFactorization::Impl& f) {
    const int n = static_cast<int>(f.lower.rows());
    f.dense_factor = Eigen::MatrixXd(f.lower);
    f.ipiv.assign(n, 0);
    const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, f.dense_factor.data(), n, f.ipiv.data());
    if (info < 0) throw NumericalError("dsytrf argument error", info);
    if (info > 0) throw NumericalError("matrix is singular (Bunch-Kaufman)", info - 1);
    long neg = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int k = 0; k < n;) {
        if (f.ipiv[k] > 0) {
            const double d = f.dense_factor(k, k);
            if (d < 0.0) ++neg;
            lo = std::min(lo, std::abs(d));
            hi = std::max(hi, std::abs(d));
            ++k;
        } else {
            Eigen::Matrix2d blk;
            blk << f.dense_factor(k, k), f.dense_factor(k + 1, k), f.dense_factor(k + 1, k), f.dense_factor(k + 1, k + 1);
            const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(blk, Eigen::EigenvaluesOnly).eigenvalues();
            for (int i = 0; i < 2; ++i) {
                if (ev(i) < 0.0) ++neg;
                lo = std::min(lo, std::abs(ev(i)));
                hi = std::max(hi, std::abs(ev(i)));
            }
            k += 2;
        }
    }
    if (lo == 0.0) throw NumericalError("matrix is singular (Bunch-Kaufman)");
    f.negatives = neg;
    f.ratio = hi / lo;
    f.dense = true;
}

} // namespace

SymmetricFactorization::SymmetricFactorization(const SparseMatrix& lower, bool limit_pivot_ratio) : impl_(std::make_unique<Impl>()) {
    SLL_REQUIRE(lower.rows() == lower.cols(), "factorization needs a square matrix");
    impl_->lower = lower;
    impl_->lower.makeCompressed();
    if (lower.rows() == 0) return;
    if (sparse_attempt(*impl_, limit_pivot_ratio)) return;
    if (lower.rows() > kDenseFallbackLimit) {
        throw NumericalError("sparse LDL^T breakdown or pivot ratio above limit, matrix too large for dense fallback");
    }
    dense_bunch_kaufman(*impl_);
}

SymmetricFactorization::~SymmetricFactorization() = default;
SymmetricFactorization::SymmetricFactorization(SymmetricFactorization&&) noexcept = default;
SymmetricFactorization& SymmetricFactorization::operator=(SymmetricFactorization&&) noexcept = default;

Eigen::VectorXd SymmetricFactorization::solve(const Eigen::VectorXd& b) const {
    if (b.size() == 0) return b;
    Eigen::VectorXd x = impl_->raw_solve(b);
    for (int step = 0; step < 2; ++step) {
        const Eigen::VectorXd r = b - impl_->lower.selfadjointView<Eigen::Lower>() * x;
        x += impl_->raw_solve(r);
    }
    return x;
}

int SymmetricFactorization::dim() const { return static_cast<int>(impl_->lower.rows()); }
long SymmetricFactorization::negative_count() const { return impl_->negatives; }
double SymmetricFactorization::pivot_ratio() const { return impl_->ratio; }
bool SymmetricFactorization::dense_fallback() const { return impl_->dense; }

} // namespace sll
