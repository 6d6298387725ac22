#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pintlcp {

using Complex = std::complex<double>;

/// Compressed-row sparse matrix.
///
/// Column indices are sorted within each row and explicit zeros are never
/// stored. Matrices are built through SparseBuilder, which sums duplicate
/// entries and drops exact zeros.
template <typename Scalar>
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> offsets,
                 std::vector<std::size_t> columns, std::vector<Scalar> values)
        : rows_(rows), cols_(cols), offsets_(std::move(offsets)),
          columns_(std::move(columns)), values_(std::move(values)) {
        if (offsets_.size() != rows_ + 1 || offsets_.front() != 0 ||
            offsets_.back() != columns_.size() || columns_.size() != values_.size()) {
            throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
        }
        for (std::size_t r = 0; r < rows_; ++r) {
            if (offsets_[r] > offsets_[r + 1]) {
                throw std::invalid_argument("SparseMatrix: row offsets must be nondecreasing");
            }
            for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
                if (columns_[k] >= cols_) throw std::invalid_argument("SparseMatrix: column out of range");
                if (k > offsets_[r] && columns_[k] <= columns_[k - 1]) {
                    throw std::invalid_argument("SparseMatrix: columns must be strictly increasing per row");
                }
            }
        }
    }

    static SparseMatrix identity(std::size_t n) {
        std::vector<std::size_t> offsets(n + 1), columns(n);
        std::vector<Scalar> values(n, Scalar(1));
        for (std::size_t i = 0; i < n; ++i) {
            offsets[i + 1] = i + 1;
            columns[i] = i;
        }
        return SparseMatrix(n, n, std::move(offsets), std::move(columns), std::move(values));
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t nnz() const noexcept { return values_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
    [[nodiscard]] const std::vector<std::size_t>& columns() const noexcept { return columns_; }
    [[nodiscard]] const std::vector<Scalar>& values() const noexcept { return values_; }

    /// Entry lookup by binary search; zero when not stored.
    [[nodiscard]] Scalar at(std::size_t r, std::size_t c) const {
        const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[r]);
        const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[r + 1]);
        const auto it = std::lower_bound(first, last, c);
        if (it == last || *it != c) return Scalar(0);
        return values_[static_cast<std::size_t>(it - columns_.begin())];
    }

    /// y = A x. Summation runs row-major in stored column order.
    template <typename In, typename Out>
    void multiply(std::span<const In> x, std::span<Out> y) const {
        if (x.size() != cols_ || y.size() != rows_) {
            throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
        }
        for (std::size_t r = 0; r < rows_; ++r) {
            Out acc{};
            for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
                acc += values_[k] * x[columns_[k]];
            }
            y[r] = acc;
        }
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::size_t> columns_;
    std::vector<Scalar> values_;
};

/// Row-wise accumulator producing a SparseMatrix.
template <typename Scalar>
class SparseBuilder {
public:
    SparseBuilder(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows) {}

    void add(std::size_t r, std::size_t c, Scalar value) {
        if (r >= rows_.size() || c >= cols_) throw std::out_of_range("SparseBuilder::add: index out of range");
        rows_[r][c] += value;
    }

    [[nodiscard]] SparseMatrix<Scalar> build() const {
        std::vector<std::size_t> offsets{0};
        std::vector<std::size_t> columns;
        std::vector<Scalar> values;
        offsets.reserve(rows_.size() + 1);
        for (const auto& row : rows_) {
            for (const auto& [c, v] : row) {
                if (v == Scalar(0)) continue;
                columns.push_back(c);
                values.push_back(v);
            }
            offsets.push_back(columns.size());
        }
        return SparseMatrix<Scalar>(rows_.size(), cols_, std::move(offsets), std::move(columns),
                                    std::move(values));
    }

private:
    std::size_t cols_;
    std::vector<std::map<std::size_t, Scalar>> rows_;
};

/// Standard sparse product y = A x.
template <typename Scalar>
[[nodiscard]] std::vector<Scalar> spmv(const SparseMatrix<Scalar>& a, std::span<const Scalar> x) {
    std::vector<Scalar> y(a.rows());
    a.multiply(x, std::span<Scalar>(y));
    return y;
}

/// Same sparsity pattern and values, complex storage.
[[nodiscard]] SparseMatrix<Complex> to_complex(const SparseMatrix<double>& a);

}  // namespace pintlcp
