// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mllg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include "mllg/errors.hpp"

namespace mllg
{

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<Triplet> triplets)
  : rows_(rows), cols_(cols)
{
  if (rows < 0 || cols < 0)
  {
    throw std::invalid_argument("negative matrix dimension");
  }
  for (const auto &t : triplets)
  {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
    {
      throw std::out_of_range("triplet (" + std::to_string(t.row) + "," +
                              std::to_string(t.col) + ") outside matrix");
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet &a, const Triplet &b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_offsets_.assign(rows + 1, 0);
  col_indices_.reserve(triplets.size());
  values_.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size();)
  {
    const int r = triplets[k].row, c = triplets[k].col;
    double v = 0.0;
    for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k)
    {
      v += triplets[k].value;
    }
    col_indices_.push_back(c);
    values_.push_back(v);
    row_offsets_[r + 1]++;
  }
  for (int r = 0; r < rows; ++r)
  {
    row_offsets_[r + 1] += row_offsets_[r];
  }
}

SparseMatrix SparseMatrix::Identity(int n)
{
  std::vector<double> d(n, 1.0);
  return Diagonal(d);
}

SparseMatrix SparseMatrix::Diagonal(std::span<const double> d)
{
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
  {
    t.push_back({static_cast<int>(i), static_cast<int>(i), d[i]});
  }
  const int n = static_cast<int>(d.size());
  return SparseMatrix(n, n, std::move(t));
}

double SparseMatrix::At(int i, int j) const
{
  const auto begin = col_indices_.begin() + row_offsets_[i];
  const auto end = col_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  return (it != end && *it == j) ? values_[it - col_indices_.begin()] : 0.0;
}

void SparseMatrix::Multiply(std::span<const double> x, std::span<double> y) const
{
  for (int i = 0; i < rows_; ++i)
  {
    double s = 0.0;
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
    {
      s += values_[k] * x[col_indices_[k]];
    }
    y[i] = s;
  }
}

void SparseMatrix::MultiplyTranspose(std::span<const double> x, std::span<double> y) const
{
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < rows_; ++i)
  {
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
    {
      y[col_indices_[k]] += values_[k] * x[i];
    }
  }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const
{
  std::vector<double> y(rows_);
  Multiply(x, y);
  return y;
}

double SparseMatrix::Quadratic(std::span<const double> x) const { return Bilinear(x, x); }

double SparseMatrix::Bilinear(std::span<const double> y, std::span<const double> x) const
{
  double s = 0.0;
  for (int i = 0; i < rows_; ++i)
  {
    double r = 0.0;
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
    {
      r += values_[k] * x[col_indices_[k]];
    }
    s += y[i] * r;
  }
  return s;
}

std::vector<Triplet> SparseMatrix::ToTriplets() const
{
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int i = 0; i < rows_; ++i)
  {
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
    {
      t.push_back({i, col_indices_[k], values_[k]});
    }
  }
  return t;
}

SparseMatrix SparseMatrix::Transpose() const
{
  auto t = ToTriplets();
  for (auto &e : t)
  {
    std::swap(e.row, e.col);
  }
  return SparseMatrix(cols_, rows_, std::move(t));
}

std::vector<double> SparseMatrix::DiagonalEntries() const
{
  std::vector<double> d(std::min(rows_, cols_));
  for (std::size_t i = 0; i < d.size(); ++i)
  {
    d[i] = At(static_cast<int>(i), static_cast<int>(i));
  }
  return d;
}

double SparseMatrix::MaxAbs() const
{
  double m = 0.0;
  for (double v : values_)
  {
    m = std::max(m, std::fabs(v));
  }
  return m;
}

double SparseMatrix::SymmetryDefect() const
{
  if (rows_ != cols_)
  {
    return std::numeric_limits<double>::infinity();
  }
  double defect = 0.0;
  for (int i = 0; i < rows_; ++i)
  {
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
    {
      defect = std::max(defect, std::fabs(values_[k] - At(col_indices_[k], i)));
    }
  }
  return defect;
}

bool SparseMatrix::IsSymmetric(double rel_tol) const
{
  return SymmetryDefect() <= rel_tol * MaxAbs();
}

SparseMatrix SparseMatrix::Restrict(std::span<const int> rows, std::span<const int> cols) const
{
  std::vector<int> col_map(cols_, -1);
  for (std::size_t j = 0; j < cols.size(); ++j)
  {
    col_map[cols[j]] = static_cast<int>(j);
  }
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    const int r = rows[i];
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
    {
      if (const int c = col_map[col_indices_[k]]; c >= 0)
      {
        t.push_back({static_cast<int>(i), c, values_[k]});
      }
    }
  }
  return SparseMatrix(static_cast<int>(rows.size()), static_cast<int>(cols.size()),
                      std::move(t));
}

SparseMatrix Add(double a, const SparseMatrix &A, double b, const SparseMatrix &B)
{
  if (A.Rows() != B.Rows() || A.Cols() != B.Cols())
  {
    throw std::invalid_argument("Add: dimension mismatch");
  }
  auto t = A.ToTriplets();
  for (auto &e : t)
  {
    e.value *= a;
  }
  for (auto e : B.ToTriplets())
  {
    e.value *= b;
    t.push_back(e);
  }
  return SparseMatrix(A.Rows(), A.Cols(), std::move(t));
}

void SolverConfig::Validate() const
{
  if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0))
  {
    throw std::invalid_argument("solver tolerances must be > 0");
  }
  if (max_iterations < 0)
  {
    throw std::invalid_argument("max_iterations must be >= 1 (or 0 for the default)");
  }
}

JacobiPreconditioner::JacobiPreconditioner(const SparseMatrix &A)
  : JacobiPreconditioner(A.DiagonalEntries())
{
}

JacobiPreconditioner::JacobiPreconditioner(std::vector<double> diagonal)
  : inv_diag_(std::move(diagonal))
{
  for (std::size_t i = 0; i < inv_diag_.size(); ++i)
  {
    if (!(inv_diag_[i] > 0.0))
    {
      throw std::invalid_argument("Jacobi preconditioner: non-positive diagonal entry at " +
                                  std::to_string(i));
    }
    inv_diag_[i] = 1.0 / inv_diag_[i];
  }
}

void JacobiPreconditioner::Apply(std::span<const double> r, std::span<double> z) const
{
  for (std::size_t i = 0; i < inv_diag_.size(); ++i)
  {
    z[i] = inv_diag_[i] * r[i];
  }
}

double Dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    s += a[i] * b[i];
  }
  return s;
}

double Norm2(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

double NormInf(std::span<const double> a)
{
  double m = 0.0;
  for (double v : a)
  {
    m = std::max(m, std::fabs(v));
  }
  return m;
}

SolveReport CgSolve(const SparseMatrix &A, std::span<const double> b, std::vector<double> &x,
                    const SolverConfig &config, const JacobiPreconditioner *pc)
{
  config.Validate();
  const int n = A.Rows();
  if (A.Cols() != n || static_cast<int>(b.size()) != n)
  {
    throw std::invalid_argument("CgSolve: dimension mismatch");
  }
  if (config.check_symmetry && !A.IsSymmetric())
  {
    throw std::invalid_argument("CgSolve: matrix is not symmetric");
  }
  if (static_cast<int>(x.size()) != n)
  {
    x.assign(n, 0.0);
  }
  const int max_it = config.max_iterations > 0 ? config.max_iterations : std::max(1, 10 * n);
  const double target = std::max(config.relative_tolerance * Norm2(b), config.absolute_tolerance);

  std::vector<double> r(n), z(n), p(n), q(n);
  A.Multiply(x, r);
  for (int i = 0; i < n; ++i)
  {
    r[i] = b[i] - r[i];
  }
  SolveReport report;
  report.residual_norm = Norm2(r);
  if (report.residual_norm <= target)
  {
    report.converged = true;
    return report;
  }
  auto precondition = [&](const std::vector<double> &in, std::vector<double> &out) {
    if (pc)
    {
      pc->Apply(in, out);
    }
    else
    {
      out = in;
    }
  };
  precondition(r, z);
  p = z;
  double rz = Dot(r, z);
  for (int it = 1; it <= max_it; ++it)
  {
    A.Multiply(p, q);
    const double pq = Dot(p, q);
    if (!(pq > 0.0))
    {
      // Direction of non-positive curvature: the matrix is not positive definite.
      report.iterations = it;
      return report;
    }
    const double alpha = rz / pq;
    for (int i = 0; i < n; ++i)
    {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    report.iterations = it;
    report.residual_norm = Norm2(r);
    if (report.residual_norm <= target)
    {
      report.converged = true;
      return report;
    }
    precondition(r, z);
    const double rz_new = Dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i)
    {
      p[i] = z[i] + beta * p[i];
    }
  }
  return report;
}

std::vector<double> DenseSolve(const DenseMatrix &A, std::span<const double> b)
{
  if (A.rows != A.cols || static_cast<int>(b.size()) != A.rows)
  {
    throw std::invalid_argument("DenseSolve: dimension mismatch");
  }
  const int n = A.rows;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
      A.data.data(), n, n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(n * std::numeric_limits<double>::epsilon());
  if (!lu.isInvertible())
  {
    throw NumericalError("DenseSolve: matrix is singular to working precision");
  }
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
  Eigen::VectorXd x = lu.solve(rhs);
  return {x.data(), x.data() + n};
}

struct SparseDirectSolver::Impl
{
  using Csc = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  Kind kind = Kind::LU;
  Eigen::SparseLU<Csc, Eigen::COLAMDOrdering<int>> lu;
  Eigen::SimplicialLDLT<Csc, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  bool ok = false;
};

SparseDirectSolver::SparseDirectSolver() : impl_(std::make_unique<Impl>()) {}
SparseDirectSolver::~SparseDirectSolver() = default;
SparseDirectSolver::SparseDirectSolver(SparseDirectSolver &&) noexcept = default;
SparseDirectSolver &SparseDirectSolver::operator=(SparseDirectSolver &&) noexcept = default;

void SparseDirectSolver::Factorize(const SparseMatrix &A, Kind kind)
{
  if (A.Rows() != A.Cols())
  {
    throw std::invalid_argument("SparseDirectSolver: matrix must be square");
  }
  n_ = A.Rows();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(A.NonZeros());
  for (const auto &e : A.ToTriplets())
  {
    t.emplace_back(e.row, e.col, e.value);
  }
  Impl::Csc M(n_, n_);
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  impl_->kind = kind;
  impl_->ok = false;
  if (kind == Kind::LU)
  {
    impl_->lu.compute(M);
    if (impl_->lu.info() != Eigen::Success)
    {
      throw NumericalError("sparse LU factorization failed: " + impl_->lu.lastErrorMessage());
    }
  }
  else
  {
    impl_->ldlt.compute(M);
    if (impl_->ldlt.info() != Eigen::Success)
    {
      throw NumericalError("sparse LDL^T factorization failed");
    }
  }
  impl_->ok = true;
}

bool SparseDirectSolver::Factorized() const { return impl_ && impl_->ok; }

std::vector<double> SparseDirectSolver::Solve(std::span<const double> b) const
{
  if (!Factorized())
  {
    throw std::logic_error("SparseDirectSolver::Solve before Factorize");
  }
  if (static_cast<int>(b.size()) != n_)
  {
    throw std::invalid_argument("SparseDirectSolver::Solve: dimension mismatch");
  }
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n_);
  Eigen::VectorXd x =
      impl_->kind == Kind::LU ? Eigen::VectorXd(impl_->lu.solve(rhs)) : Eigen::VectorXd(impl_->ldlt.solve(rhs));
  return {x.data(), x.data() + n_};
}

}  // namespace mllg
