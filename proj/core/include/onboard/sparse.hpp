#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace onboard {

struct SparseVector {
  std::vector<std::uint32_t> indices;  // strictly ascending
  std::vector<double> values;

  std::size_t nnz() const noexcept { return indices.size(); }
  void push(std::uint32_t index, double value) {
    indices.push_back(index);
    values.push_back(value);
  }
};

/// Read-only view of one sparse row.
struct RowView {
  std::span<const std::uint32_t> indices;
  std::span<const double> values;

  RowView() = default;
  RowView(std::span<const std::uint32_t> i, std::span<const double> v) : indices(i), values(v) {}
  RowView(const SparseVector& v) : indices(v.indices), values(v.values) {}  // NOLINT: implicit view

  double at(std::uint32_t column) const;
  double dot(std::span<const double> dense) const {
    double s = 0;
    for (std::size_t k = 0; k < indices.size(); ++k) s += values[k] * dense[indices[k]];
    return s;
  }
};

/// Compressed sparse rows. Columns are fixed at construction.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t cols) : cols_(cols) {}

  std::size_t rows() const noexcept { return row_ptr_.size() - 1; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return col_idx_.size(); }

  /// Entries must be in ascending column order and within range.
  void append_row(const SparseVector& row);
  void append_row(RowView row);

  RowView row(std::size_t i) const {
    const std::size_t b = row_ptr_[i], e = row_ptr_[i + 1];
    return {std::span<const std::uint32_t>(col_idx_).subspan(b, e - b),
            std::span<const double>(values_).subspan(b, e - b)};
  }

  /// New matrix holding the listed rows in order (duplicates allowed).
  SparseMatrix select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

/// Column-major companion of a SparseMatrix, used by split search. Each
/// column lists its nonzero entries in ascending (value, row) order.
class ColumnIndex {
 public:
  explicit ColumnIndex(const SparseMatrix& m);

  std::size_t nnz(std::size_t col) const noexcept { return col_ptr_[col + 1] - col_ptr_[col]; }
  std::span<const std::uint32_t> rows(std::size_t col) const {
    return std::span<const std::uint32_t>(row_idx_).subspan(col_ptr_[col], nnz(col));
  }
  std::span<const double> values(std::size_t col) const {
    return std::span<const double>(values_).subspan(col_ptr_[col], nnz(col));
  }

 private:
  std::vector<std::size_t> col_ptr_;
  std::vector<std::uint32_t> row_idx_;
  std::vector<double> values_;
};

}  // namespace onboard
