#include "opcorrect/fem/sparse.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

namespace opcorrect::fem {

CsrMatrix::CsrMatrix(int n_rows, int n_cols, std::vector<int> row_offsets,
                     std::vector<int> col_indices, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  require(n_rows >= 0 && n_cols >= 0, "CsrMatrix: negative dimensions");
  require(row_offsets_.size() == static_cast<std::size_t>(n_rows) + 1,
          "CsrMatrix: row_offsets must have n_rows+1 entries");
  require(row_offsets_.front() == 0 &&
              static_cast<std::size_t>(row_offsets_.back()) == col_indices_.size(),
          "CsrMatrix: row_offsets inconsistent with col_indices");
  require(col_indices_.size() == values_.size(), "CsrMatrix: col_indices/values size mismatch");
  for (int i = 0; i < n_rows; ++i) {
    require(row_offsets_[i] <= row_offsets_[i + 1], "CsrMatrix: row_offsets must be nondecreasing");
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      require(col_indices_[k] >= 0 && col_indices_[k] < n_cols, "CsrMatrix: column out of range");
      if (k > row_offsets_[i])
        require(col_indices_[k - 1] < col_indices_[k],
                "CsrMatrix: column indices must be strictly increasing within a row");
    }
  }
}

CsrMatrix CsrMatrix::from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<int> offsets(static_cast<std::size_t>(n_rows) + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    require(t.row >= 0 && t.row < n_rows && t.col >= 0 && t.col < n_cols,
            "CsrMatrix::from_triplets: index out of range");
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      vals.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[static_cast<std::size_t>(t.row) + 1];
  }
  for (int i = 0; i < n_rows; ++i) offsets[i + 1] += offsets[i];
  return CsrMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

CsrMatrix CsrMatrix::from_dense(const Matrix& dense, double drop_tol) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < dense.rows(); ++i)
    for (Eigen::Index j = 0; j < dense.cols(); ++j)
      if (std::abs(dense(i, j)) > drop_tol)
        t.push_back({static_cast<int>(i), static_cast<int>(j), dense(i, j)});
  return from_triplets(static_cast<int>(dense.rows()), static_cast<int>(dense.cols()), std::move(t));
}

CsrMatrix CsrMatrix::identity(int n) {
  std::vector<int> offsets(static_cast<std::size_t>(n) + 1);
  std::vector<int> cols(static_cast<std::size_t>(n));
  for (int i = 0; i <= n; ++i) offsets[i] = i;
  for (int i = 0; i < n; ++i) cols[i] = i;
  return CsrMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

int CsrMatrix::find(int row, int col) const {
  const auto begin = col_indices_.begin() + row_offsets_[row];
  const auto end = col_indices_.begin() + row_offsets_[row + 1];
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return -1;
  return static_cast<int>(it - col_indices_.begin());
}

double CsrMatrix::coeff(int row, int col) const {
  const int k = find(row, col);
  return k < 0 ? 0.0 : values_[k];
}

void CsrMatrix::multiply(const Vector& x, Vector& y) const {
  require(x.size() == n_cols_, "CsrMatrix::multiply: dimension mismatch");
  y.resize(n_rows_);
  const int* off = row_offsets_.data();
  const int* col = col_indices_.data();
  const double* val = values_.data();
  const double* xp = x.data();
  for (int i = 0; i < n_rows_; ++i) {
    double s = 0.0;
    for (int k = off[i]; k < off[i + 1]; ++k) s += val[k] * xp[col[k]];
    y[i] = s;
  }
}

Vector CsrMatrix::operator*(const Vector& x) const {
  Vector y;
  multiply(x, y);
  return y;
}

double CsrMatrix::quadratic_form(const Vector& x) const { return x.dot((*this) * x); }

Vector CsrMatrix::diagonal() const {
  Vector d = Vector::Zero(std::min(n_rows_, n_cols_));
  for (int i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
  return d;
}

Matrix CsrMatrix::to_dense() const {
  Matrix d = Matrix::Zero(n_rows_, n_cols_);
  for (int i = 0; i < n_rows_; ++i)
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) d(i, col_indices_[k]) += values_[k];
  return d;
}

Vector CsrMatrix::row_sums() const {
  Vector s = Vector::Zero(n_rows_);
  for (int i = 0; i < n_rows_; ++i)
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) s[i] += values_[k];
  return s;
}

double CsrMatrix::symmetry_defect() const {
  if (n_rows_ != n_cols_) return std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  double max_diff = 0.0;
  for (int i = 0; i < n_rows_; ++i) {
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const int j = col_indices_[k];
      max_abs = std::max(max_abs, std::abs(values_[k]));
      max_diff = std::max(max_diff, std::abs(values_[k] - coeff(j, i)));
    }
  }
  return max_abs == 0.0 ? 0.0 : max_diff / max_abs;
}

bool CsrMatrix::same_pattern(const CsrMatrix& other) const {
  return n_rows_ == other.n_rows_ && n_cols_ == other.n_cols_ &&
         row_offsets_ == other.row_offsets_ && col_indices_ == other.col_indices_;
}

CsrMatrix& CsrMatrix::add_scaled(double alpha, const CsrMatrix& other) {
  require(same_pattern(other), "CsrMatrix::add_scaled: sparsity patterns differ");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += alpha * other.values_[k];
  return *this;
}

CsrMatrix& CsrMatrix::scale(double alpha) {
  for (double& v : values_) v *= alpha;
  return *this;
}

CsrMatrix linear_combination(double a, const CsrMatrix& A, double b, const CsrMatrix& B) {
  CsrMatrix out = A;
  out.scale(a);
  out.add_scaled(b, B);
  return out;
}

} // namespace opcorrect::fem
