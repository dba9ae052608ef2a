#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <locale>
#include <numeric>
#include <ostream>
#include <sstream>
#include <span>
#include <vector>

#include "dampwave/errors.hpp"

namespace dampwave {

using Vector = std::vector<double>;

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed sparse row matrix with strictly increasing column indices per row.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Duplicate (row, col) entries are summed in the order they appear,
    /// so (i,j) and (j,i) accumulated from the same symmetric element
    /// contributions come out bitwise equal.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
        for (const auto& t : triplets)
            if (t.row >= rows || t.col >= cols) throw InvalidArgument("triplet index out of range");
        std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        SparseMatrix m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.row_ptr_.assign(rows + 1, 0);
        for (std::size_t i = 0; i < triplets.size();) {
            const std::size_t r = triplets[i].row, c = triplets[i].col;
            double sum = 0.0;
            for (; i < triplets.size() && triplets[i].row == r && triplets[i].col == c; ++i) sum += triplets[i].value;
            m.col_idx_.push_back(c);
            m.values_.push_back(sum);
            ++m.row_ptr_[r + 1];
        }
        std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());
        return m;
    }

    static SparseMatrix identity(std::size_t n) {
        std::vector<Triplet> t;
        for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
        return from_triplets(n, n, std::move(t));
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    [[nodiscard]] std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    /// Entry (i, j), zero when not stored.
    [[nodiscard]] double at(std::size_t i, std::size_t j) const {
        if (i >= rows_ || j >= cols_) throw InvalidArgument("matrix index out of range");
        const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
        const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
        const auto it = std::lower_bound(first, last, j);
        return it != last && *it == j ? values_[static_cast<std::size_t>(it - col_idx_.begin())] : 0.0;
    }

    [[nodiscard]] Vector diagonal() const {
        Vector d(std::min(rows_, cols_), 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
        return d;
    }

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const {
        if (x.size() != cols_ || y.size() != rows_) throw InvalidArgument("matrix-vector dimension mismatch");
        for (std::size_t i = 0; i < rows_; ++i) {
            double sum = 0.0;
            for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) sum += values_[p] * x[col_idx_[p]];
            y[i] = sum;
        }
    }

    [[nodiscard]] Vector operator*(std::span<const double> x) const {
        Vector y(rows_);
        multiply(x, y);
        return y;
    }

    /// x^T A y
    [[nodiscard]] double inner(std::span<const double> x, std::span<const double> y) const {
        if (x.size() != rows_) throw InvalidArgument("bilinear form dimension mismatch");
        const Vector ay = *this * y;
        return std::inner_product(x.begin(), x.end(), ay.begin(), 0.0);
    }

    [[nodiscard]] SparseMatrix transpose() const {
        std::vector<Triplet> t;
        t.reserve(nonzeros());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) t.push_back({col_idx_[p], i, values_[p]});
        return from_triplets(cols_, rows_, std::move(t));
    }

    /// max |a_ij - a_ji|; infinity when not square.
    [[nodiscard]] double asymmetry() const {
        if (rows_ != cols_) return INFINITY;
        double worst = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
                worst = std::max(worst, std::abs(values_[p] - at(col_idx_[p], i)));
        return worst;
    }

    /// Dense row-major copy, for small systems and tests.
    [[nodiscard]] std::vector<double> to_dense() const {
        std::vector<double> dense(rows_ * cols_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) dense[i * cols_ + col_idx_[p]] = values_[p];
        return dense;
    }

    bool operator==(const SparseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

/// a*A + b*B over the union of both sparsity patterns.
inline SparseMatrix linear_combination(double a, const SparseMatrix& A, double b, const SparseMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) throw InvalidArgument("matrix sum dimension mismatch");
    std::vector<Triplet> t;
    t.reserve(A.nonzeros() + B.nonzeros());
    for (const auto& [scale, M] : {std::pair<double, const SparseMatrix*>{a, &A}, {b, &B}}) {
        const auto rp = M->row_ptr();
        const auto ci = M->col_idx();
        const auto v = M->values();
        for (std::size_t i = 0; i < M->rows(); ++i)
            for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) t.push_back({i, ci[p], scale * v[p]});
    }
    return SparseMatrix::from_triplets(A.rows(), A.cols(), std::move(t));
}

/// One "row col value" line per stored entry, 0-based.
inline void write_coordinate(std::ostream& out, const SparseMatrix& A) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    const auto rp = A.row_ptr();
    const auto ci = A.col_idx();
    const auto v = A.values();
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) buf << i << ' ' << ci[p] << ' ' << v[p] << '\n';
    out << buf.str();
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("dot product dimension mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace dampwave
