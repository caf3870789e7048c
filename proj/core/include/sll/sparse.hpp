#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <string>
#include <vector>

namespace sll {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Symmetric sparse matrix with only the lower triangle stored.
class SparseSymMatrix {
public:
    SparseSymMatrix() = default;
    explicit SparseSymMatrix(int dim) : lower_(dim, dim) {}

    /// Builds from triplets; entries with row < col are mirrored into the lower
    /// triangle. Duplicates are summed in triplet order.
    static SparseSymMatrix from_triplets(int dim, const std::vector<Triplet>& triplets);
    static SparseSymMatrix from_lower(SparseMatrix lower);
    static SparseSymMatrix identity(int dim);
    static SparseSymMatrix from_dense(const Eigen::MatrixXd& dense);

    [[nodiscard]] int dim() const { return static_cast<int>(lower_.rows()); }
    [[nodiscard]] long nonzeros() const { return lower_.nonZeros(); }
    [[nodiscard]] bool symmetric() const { return true; }
    [[nodiscard]] const SparseMatrix& lower() const { return lower_; }

    [[nodiscard]] double coeff(int i, int j) const;
    [[nodiscard]] Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
    [[nodiscard]] double quadratic_form(const Eigen::VectorXd& x) const;
    [[nodiscard]] SparseMatrix full() const;
    [[nodiscard]] Eigen::MatrixXd to_dense() const;
    [[nodiscard]] Eigen::VectorXd diagonal() const;

    /// Keeps rows/cols listed in `keep` (ascending), renumbered 0..keep.size()-1.
    [[nodiscard]] SparseSymMatrix restrict_to(const std::vector<int>& keep) const;

    SparseSymMatrix& operator*=(double c);
    friend SparseSymMatrix operator*(double c, const SparseSymMatrix& a);
    friend SparseSymMatrix operator+(const SparseSymMatrix& a, const SparseSymMatrix& b);
    friend SparseSymMatrix operator-(const SparseSymMatrix& a, const SparseSymMatrix& b);

private:
    SparseMatrix lower_;
};

/// Largest |a_ij - b_ij| over the union of patterns.
double max_abs_difference(const SparseSymMatrix& a, const SparseSymMatrix& b);

// Coordinate dump used by the dense-oracle tests:
//   %%SymSparse
//   dim nnz
//   row col value      (lower triangle, 0-based, 17 significant digits)
void write_matrix_dump(std::ostream& os, const SparseSymMatrix& m);
SparseSymMatrix read_matrix_dump(std::istream& is);

} // namespace sll
