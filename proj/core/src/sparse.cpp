#include "sll/sparse.hpp"

#include "sll/error.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

namespace sll {

SparseSymMatrix SparseSymMatrix::from_triplets(int dim, const std::vector<Triplet>& triplets) {
    std::vector<Triplet> lower;
    lower.reserve(triplets.size());
    for (const auto& t : triplets) {
        if (t.row() >= t.col()) {
            lower.push_back(t);
        } else {
            lower.emplace_back(t.col(), t.row(), t.value());
        }
    }
    SparseSymMatrix m(dim);
    m.lower_.setFromTriplets(lower.begin(), lower.end());
    m.lower_.makeCompressed();
    return m;
}

SparseSymMatrix SparseSymMatrix::from_lower(SparseMatrix lower) {
    SLL_REQUIRE(lower.rows() == lower.cols(), "symmetric matrix must be square");
    SparseSymMatrix m;
    m.lower_ = lower.triangularView<Eigen::Lower>();
    m.lower_.makeCompressed();
    return m;
}

SparseSymMatrix SparseSymMatrix::identity(int dim) {
    SparseSymMatrix m(dim);
    m.lower_.setIdentity();
    return m;
}

SparseSymMatrix SparseSymMatrix::from_dense(const Eigen::MatrixXd& dense) {
    SLL_REQUIRE(dense.rows() == dense.cols(), "symmetric matrix must be square");
    std::vector<Triplet> t;
    for (int j = 0; j < dense.cols(); ++j) {
        for (int i = j; i < dense.rows(); ++i) {
            if (dense(i, j) != 0.0) t.emplace_back(i, j, dense(i, j));
        }
    }
    return from_triplets(static_cast<int>(dense.rows()), t);
}

double SparseSymMatrix::coeff(int i, int j) const {
    return i >= j ? lower_.coeff(i, j) : lower_.coeff(j, i);
}

Eigen::VectorXd SparseSymMatrix::multiply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = lower_.selfadjointView<Eigen::Lower>() * x;
    return y;
}

double SparseSymMatrix::quadratic_form(const Eigen::VectorXd& x) const { return x.dot(multiply(x)); }

SparseMatrix SparseSymMatrix::full() const {
    SparseMatrix f = lower_.selfadjointView<Eigen::Lower>();
    return f;
}

Eigen::MatrixXd SparseSymMatrix::to_dense() const { return Eigen::MatrixXd(full()); }

Eigen::VectorXd SparseSymMatrix::diagonal() const { return lower_.diagonal(); }

SparseSymMatrix SparseSymMatrix::restrict_to(const std::vector<int>& keep) const {
    std::vector<int> map(dim(), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) map[keep[i]] = static_cast<int>(i);
    std::vector<Triplet> t;
    t.reserve(lower_.nonZeros());
    for (int j = 0; j < lower_.outerSize(); ++j) {
        if (map[j] < 0) continue;
        for (SparseMatrix::InnerIterator it(lower_, j); it; ++it) {
            const int r = map[it.row()];
            if (r >= 0) t.emplace_back(r, map[j], it.value());
        }
    }
    return from_triplets(static_cast<int>(keep.size()), t);
}

SparseSymMatrix& SparseSymMatrix::operator*=(double c) {
    lower_ *= c;
    return *this;
}

SparseSymMatrix operator*(double c, const SparseSymMatrix& a) {
    SparseSymMatrix m = a;
    m *= c;
    return m;
}

SparseSymMatrix operator+(const SparseSymMatrix& a, const SparseSymMatrix& b) {
    SLL_REQUIRE(a.dim() == b.dim(), "dimension mismatch");
    SparseSymMatrix m;
    m.lower_ = a.lower_ + b.lower_;
    return m;
}

SparseSymMatrix operator-(const SparseSymMatrix& a, const SparseSymMatrix& b) {
    SLL_REQUIRE(a.dim() == b.dim(), "dimension mismatch");
    SparseSymMatrix m;
    m.lower_ = a.lower_ - b.lower_;
    return m;
}

double max_abs_difference(const SparseSymMatrix& a, const SparseSymMatrix& b) {
    const SparseMatrix d = a.lower() - b.lower();
    double m = 0.0;
    for (int j = 0; j < d.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(d, j); it; ++it) m = std::max(m, std::abs(it.value()));
    }
    return m;
}

void write_matrix_dump(std::ostream& os, const SparseSymMatrix& m) {
    os << "%%SymSparse\n" << m.dim() << ' ' << m.nonzeros() << '\n' << std::setprecision(17);
    const SparseMatrix& l = m.lower();
    for (int j = 0; j < l.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(l, j); it; ++it) {
            os << it.row() << ' ' << j << ' ' << it.value() << '\n';
        }
    }
}

SparseSymMatrix read_matrix_dump(std::istream& is) {
    std::string header;
    std::getline(is, header);
    if (header.rfind("%%SymSparse", 0) != 0) throw ParseError("matrix dump: missing %%SymSparse header");
    long dim = 0, nnz = 0;
    if (!(is >> dim >> nnz) || dim < 0 || nnz < 0) throw ParseError("matrix dump: bad size line");
    std::vector<Triplet> t;
    t.reserve(nnz);
    for (long k = 0; k < nnz; ++k) {
        long r, c;
        double v;
        if (!(is >> r >> c >> v)) throw ParseError("matrix dump: truncated entry list");
        if (r < 0 || c < 0 || r >= dim || c >= dim) throw ParseError("matrix dump: index out of range");
        t.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
    }
    return SparseSymMatrix::from_triplets(static_cast<int>(dim), t);
}

} // namespace sll
