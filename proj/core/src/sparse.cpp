#include "onboard/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace onboard {

double RowView::at(std::uint32_t column) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), column);
  if (it == indices.end() || *it != column) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

void SparseMatrix::append_row(RowView row) {
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    if (row.indices[k] >= cols_ || (k > 0 && row.indices[k] <= row.indices[k - 1])) {
      throw std::invalid_argument("sparse row indices must be ascending and within range");
    }
  }
  col_idx_.insert(col_idx_.end(), row.indices.begin(), row.indices.end());
  values_.insert(values_.end(), row.values.begin(), row.values.end());
  row_ptr_.push_back(col_idx_.size());
}

void SparseMatrix::append_row(const SparseVector& row) {
  append_row(RowView{row.indices, row.values});
}

SparseMatrix SparseMatrix::select_rows(std::span<const std::size_t> rows) const {
  SparseMatrix out(cols_);
  std::size_t total = 0;
  for (std::size_t r : rows) total += row_ptr_[r + 1] - row_ptr_[r];
  out.col_idx_.reserve(total);
  out.values_.reserve(total);
  out.row_ptr_.reserve(rows.size() + 1);
  for (std::size_t r : rows) {
    out.col_idx_.insert(out.col_idx_.end(), col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]),
                        col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]));
    out.values_.insert(out.values_.end(), values_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]),
                       values_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]));
    out.row_ptr_.push_back(out.col_idx_.size());
  }
  return out;
}

ColumnIndex::ColumnIndex(const SparseMatrix& m) : col_ptr_(m.cols() + 1, 0) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::uint32_t c : m.row(r).indices) ++col_ptr_[c + 1];
  }
  for (std::size_t c = 0; c < m.cols(); ++c) col_ptr_[c + 1] += col_ptr_[c];
  row_idx_.resize(m.nnz());
  values_.resize(m.nnz());
  std::vector<std::size_t> next(col_ptr_.begin(), col_ptr_.end() - 1);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    RowView row = m.row(r);
    for (std::size_t k = 0; k < row.indices.size(); ++k) {
      const std::size_t slot = next[row.indices[k]]++;
      row_idx_[slot] = static_cast<std::uint32_t>(r);
      values_[slot] = row.values[k];
    }
  }
  // Within a column, order entries by value, then row.
  std::vector<std::pair<double, std::uint32_t>> buf;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const std::size_t b = col_ptr_[c], e = col_ptr_[c + 1];
    buf.clear();
    for (std::size_t i = b; i < e; ++i) buf.emplace_back(values_[i], row_idx_[i]);
    std::sort(buf.begin(), buf.end());
    for (std::size_t i = b; i < e; ++i) {
      values_[i] = buf[i - b].first;
      row_idx_[i] = buf[i - b].second;
    }
  }
}

}  // namespace onboard
