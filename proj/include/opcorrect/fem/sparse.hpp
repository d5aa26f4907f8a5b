#pragma once

#include "opcorrect/common/types.hpp"

#include <vector>

namespace opcorrect::fem {

/// Compressed sparse row matrix. Column indices are strictly increasing within
/// each row; explicit zeros may be stored (e.g. after Dirichlet elimination).
class CsrMatrix {
public:
  CsrMatrix() = default;
  CsrMatrix(int n_rows, int n_cols, std::vector<int> row_offsets, std::vector<int> col_indices,
            std::vector<double> values);

  struct Triplet {
    int row;
    int col;
    double value;
  };
  /// Duplicate (row, col) entries are summed.
  static CsrMatrix from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets);
  static CsrMatrix from_dense(const Matrix& dense, double drop_tol = 0.0);
  static CsrMatrix identity(int n);

  int n_rows() const { return n_rows_; }
  int n_cols() const { return n_cols_; }
  std::size_t nnz() const { return col_indices_.size(); }

  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Position of (row, col) in values(), or -1 when not stored.
  int find(int row, int col) const;
  double coeff(int row, int col) const;

  void multiply(const Vector& x, Vector& y) const;
  Vector operator*(const Vector& x) const;
  double quadratic_form(const Vector& x) const;
  Vector diagonal() const;
  Matrix to_dense() const;
  Vector row_sums() const;

  /// max |A_ij - A_ji| / max |A_ij|.
  double symmetry_defect() const;
  bool is_symmetric(double rel_tol = 1e-14) const { return symmetry_defect() <= rel_tol; }

  /// Requires identical sparsity patterns.
  CsrMatrix& add_scaled(double alpha, const CsrMatrix& other);
  CsrMatrix& scale(double alpha);
  bool same_pattern(const CsrMatrix& other) const;

private:
  int n_rows_ = 0;
  int n_cols_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

CsrMatrix linear_combination(double a, const CsrMatrix& A, double b, const CsrMatrix& B);

} // namespace opcorrect::fem
