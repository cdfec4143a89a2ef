// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_LINALG_HPP
#define MLLG_LINALG_HPP

#include <memory>
#include <span>
#include <vector>

namespace mllg
{

struct Triplet
{
  int row = 0, col = 0;
  double value = 0.0;
};

//
// Compressed-row sparse matrix. Duplicate (row, col) contributions are summed on
// construction; explicitly stored zeros are kept.
//
class SparseMatrix
{
public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<Triplet> triplets);

  static SparseMatrix Identity(int n);
  static SparseMatrix Diagonal(std::span<const double> d);

  int Rows() const { return rows_; }
  int Cols() const { return cols_; }
  int NonZeros() const { return static_cast<int>(values_.size()); }
  const std::vector<int> &RowOffsets() const { return row_offsets_; }
  const std::vector<int> &ColIndices() const { return col_indices_; }
  const std::vector<double> &Values() const { return values_; }

  // Stored value at (i, j), zero if the entry is not in the pattern.
  double At(int i, int j) const;

  // y = A x and y = A^T x.
  void Multiply(std::span<const double> x, std::span<double> y) const;
  void MultiplyTranspose(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  // x^T A x
  double Quadratic(std::span<const double> x) const;
  // y^T A x
  double Bilinear(std::span<const double> y, std::span<const double> x) const;

  SparseMatrix Transpose() const;
  std::vector<double> DiagonalEntries() const;
  double MaxAbs() const;
  // max |A - A^T| over all entries.
  double SymmetryDefect() const;
  // max |A - A^T| <= rel_tol * max |A|.
  bool IsSymmetric(double rel_tol = 1e-13) const;
  // Submatrix A(rows, cols) for the given index lists.
  SparseMatrix Restrict(std::span<const int> rows, std::span<const int> cols) const;
  std::vector<Triplet> ToTriplets() const;

private:
  int rows_ = 0, cols_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

// a A + b B
SparseMatrix Add(double a, const SparseMatrix &A, double b, const SparseMatrix &B);

struct SolverConfig
{
  int max_iterations = 0;  // 0 selects 10 n
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 1e-14;
  bool check_symmetry = true;

  // Throws std::invalid_argument for non-positive tolerances or negative iteration caps.
  void Validate() const;
};

struct SolveReport
{
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
};

class JacobiPreconditioner
{
public:
  // Throws std::invalid_argument on a non-positive diagonal entry.
  explicit JacobiPreconditioner(const SparseMatrix &A);
  explicit JacobiPreconditioner(std::vector<double> diagonal);

  void Apply(std::span<const double> r, std::span<double> z) const;
  const std::vector<double> &InverseDiagonal() const { return inv_diag_; }

private:
  std::vector<double> inv_diag_;
};

// Preconditioned conjugate gradients; x holds the initial guess on entry. Stops when
// ||b - A x|| <= max(rel_tol ||b||, abs_tol). Non-convergence is reported, not thrown.
SolveReport CgSolve(const SparseMatrix &A, std::span<const double> b, std::vector<double> &x,
                    const SolverConfig &config, const JacobiPreconditioner *pc = nullptr);

// Row-major dense matrix for small systems.
struct DenseMatrix
{
  int rows = 0, cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double &operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

// Direct LU solve with full pivoting. Throws NumericalError when A is singular to
// working precision, std::invalid_argument on shape mismatch.
std::vector<double> DenseSolve(const DenseMatrix &A, std::span<const double> b);

//
// Sparse direct solver (LU, or LDL^T for symmetric matrices). Factorize once, solve many.
//
class SparseDirectSolver
{
public:
  enum class Kind
  {
    LU,
    SymmetricLDLT
  };

  SparseDirectSolver();
  ~SparseDirectSolver();
  SparseDirectSolver(SparseDirectSolver &&) noexcept;
  SparseDirectSolver &operator=(SparseDirectSolver &&) noexcept;

  // Throws NumericalError if the factorization fails.
  void Factorize(const SparseMatrix &A, Kind kind);
  std::vector<double> Solve(std::span<const double> b) const;
  bool Factorized() const;
  int Size() const { return n_; }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
};

double Dot(std::span<const double> a, std::span<const double> b);
double Norm2(std::span<const double> a);
double NormInf(std::span<const double> a);

}  // namespace mllg

#endif  // MLLG_LINALG_HPP
