#pragma once

#include "sll/sparse.hpp"

#include <Eigen/Core>

#include <memory>

namespace sll {

/// LDL^T factorization of a symmetric, possibly indefinite sparse matrix
/// (lower triangle stored). The sparse path uses a fill-reducing AMD ordering
/// without pivoting; on breakdown, or when the pivot ratio exceeds
/// `kPivotRatioLimit`, small systems fall back to dense Bunch-Kaufman.
class SymmetricFactorization {
public:
    static constexpr double kPivotRatioLimit = 1e14;
    static constexpr int kDenseFallbackLimit = 5000;

    /// Throws NumericalError if the matrix is singular under both paths.
    /// Quasi-definite matrices (regularized saddle points) are stable in any
    /// pivot order, so `limit_pivot_ratio = false` skips the ratio test.
    explicit SymmetricFactorization(const SparseMatrix& lower, bool limit_pivot_ratio = true);
    ~SymmetricFactorization();
    SymmetricFactorization(SymmetricFactorization&&) noexcept;
    SymmetricFactorization& operator=(SymmetricFactorization&&) noexcept;

    /// Solves with two steps of iterative refinement against the stored matrix.
    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

    [[nodiscard]] int dim() const;
    /// Number of negative eigenvalues (Sylvester inertia of D).
    [[nodiscard]] long negative_count() const;
    /// max |d_i| / min |d_i| over the (block) pivots.
    [[nodiscard]] double pivot_ratio() const;
    [[nodiscard]] bool dense_fallback() const;

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

} // namespace sll
