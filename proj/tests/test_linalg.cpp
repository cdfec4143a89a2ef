// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include "doctest.h"
#include "mllg/errors.hpp"
#include "mllg/linalg.hpp"
#include "oracles.hpp"

using namespace mllg;

namespace
{

// Random SPD matrix B^T B + n I with sparse B.
SparseMatrix RandomSpd(std::mt19937_64 &rng, int n)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
  {
    B(i, i) = u(rng);
    B(i, (i + 3) % n) = u(rng);
  }
  Eigen::MatrixXd A = B.transpose() * B + 0.1 * Eigen::MatrixXd::Identity(n, n);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      if (A(i, j) != 0.0)
      {
        t.push_back({i, j, A(i, j)});
      }
    }
  }
  return SparseMatrix(n, n, t);
}

}  // namespace

TEST_CASE("sparse matrix basics")
{
  SparseMatrix A(2, 3, {{0, 0, 1.0}, {0, 2, 2.0}, {1, 1, 3.0}, {0, 2, 0.5}, {1, 0, 0.0}});
  CHECK(A.At(0, 2) == 2.5);
  CHECK(A.At(1, 0) == 0.0);
  CHECK(A.NonZeros() == 4);  // explicit zero kept, duplicate summed
  const std::vector<double> x = {1, 2, 3};
  const auto y = A * x;
  CHECK(y[0] == 8.5);
  CHECK(y[1] == 6.0);
  std::vector<double> z(3);
  A.MultiplyTranspose(std::vector<double>{1, 1}, z);
  CHECK(z == std::vector<double>{1.0, 3.0, 2.5});
  const auto At = A.Transpose();
  CHECK(At.Rows() == 3);
  CHECK(At.At(2, 0) == 2.5);
  CHECK_THROWS(SparseMatrix(2, 2, {{2, 0, 1.0}}));
}

TEST_CASE("symmetry check and restriction")
{
  SparseMatrix S(2, 2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  CHECK(S.IsSymmetric());
  SparseMatrix N(2, 2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0 + 1e-10}, {1, 1, 3.0}});
  CHECK_FALSE(N.IsSymmetric());
  const std::vector<int> idx = {1};
  const auto R = S.Restrict(idx, idx);
  CHECK(R.Rows() == 1);
  CHECK(R.At(0, 0) == 3.0);
  const auto sum = Add(2.0, S, -1.0, SparseMatrix::Identity(2));
  CHECK(sum.At(0, 0) == 3.0);
  CHECK(sum.At(0, 1) == 2.0);
}

TEST_CASE("cg solves small systems")
{
  SolverConfig cfg;
  SUBCASE("identity in one iteration")
  {
    const auto I = SparseMatrix::Identity(5);
    const std::vector<double> b = {1, -2, 3, 0.5, 7};
    std::vector<double> x(5, 0.0);
    const auto r = CgSolve(I, b, x, cfg);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(x == b);
  }
  SUBCASE("hand-eliminated 2x2")
  {
    SparseMatrix A(2, 2, {{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}});
    std::vector<double> x(2, 0.0);
    const auto r = CgSolve(A, std::vector<double>{1, 2}, x, cfg);
    CHECK(r.converged);
    CHECK(x[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-12));
  }
  SUBCASE("indefinite matrix reports non-convergence")
  {
    SparseMatrix A(2, 2, {{0, 0, 1.0}, {1, 1, -1.0}});
    std::vector<double> x(2, 0.0);
    const auto r = CgSolve(A, std::vector<double>{1, 1}, x, cfg);
    CHECK_FALSE(r.converged);
  }
  SUBCASE("non-symmetric matrix is refused")
  {
    SparseMatrix A(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}});
    std::vector<double> x(2, 0.0);
    CHECK_THROWS_AS(CgSolve(A, std::vector<double>{1, 1}, x, cfg), std::invalid_argument);
  }
  SUBCASE("random SPD converges within n iterations and is deterministic")
  {
    std::mt19937_64 rng(7);
    for (int n : {10, 30, 50})
    {
      const auto A = RandomSpd(rng, n);
      const auto b = oracle::RandomVector(rng, n);
      std::vector<double> x(n, 0.0), x2(n, 0.0);
      SolverConfig c;
      c.max_iterations = 2 * n;  // finite precision slack over the exact-arithmetic bound n
      const auto r = CgSolve(A, b, x, c);
      CHECK(r.converged);
      CHECK(r.iterations <= 2 * n);
      std::vector<double> res = A * x;
      for (int i = 0; i < n; ++i)
      {
        res[i] -= b[i];
      }
      CHECK(Norm2(res) <= 1e-10 * Norm2(b));
      CgSolve(A, b, x2, c);
      CHECK(x == x2);
    }
  }
}

TEST_CASE("solver config validation")
{
  SolverConfig c;
  c.relative_tolerance = 0.0;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c = SolverConfig{};
  c.max_iterations = -1;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
}

TEST_CASE("jacobi preconditioner")
{
  JacobiPreconditioner pc(std::vector<double>{2.0, 4.0});
  std::vector<double> z(2);
  pc.Apply(std::vector<double>{1.0, 1.0}, z);
  CHECK(z[0] == 0.5);
  CHECK(z[1] == 0.25);
  CHECK_THROWS_AS(JacobiPreconditioner(std::vector<double>{1.0, 0.0}), std::invalid_argument);

  // Badly scaled SPD system: Jacobi reduces the iteration count.
  const int n = 40;
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i)
  {
    const double s = std::pow(10.0, 4.0 * i / (n - 1));
    t.push_back({i, i, 2.0 * s});
    if (i + 1 < n)
    {
      const double s1 = std::pow(10.0, 4.0 * (i + 1) / (n - 1));
      t.push_back({i, i + 1, -0.5 * std::sqrt(s * s1)});
      t.push_back({i + 1, i, -0.5 * std::sqrt(s * s1)});
    }
  }
  SparseMatrix A(n, n, t);
  std::vector<double> b(n, 1.0), x0(n, 0.0), x1(n, 0.0);
  SolverConfig cfg;
  const auto plain = CgSolve(A, b, x0, cfg);
  JacobiPreconditioner jac(A);
  const auto pre = CgSolve(A, b, x1, cfg, &jac);
  CHECK(plain.converged);
  CHECK(pre.converged);
  CHECK(pre.iterations < plain.iterations);
}

TEST_CASE("dense solve")
{
  DenseMatrix I(3, 3);
  for (int i = 0; i < 3; ++i)
  {
    I(i, i) = 1.0;
  }
  const std::vector<double> b = {1, 2, 3};
  CHECK(DenseSolve(I, b) == b);
  DenseMatrix P(2, 2);
  P(0, 1) = 1.0;
  P(1, 0) = 1.0;
  const auto x = DenseSolve(P, std::vector<double>{1, 2});
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(1.0));
  DenseMatrix S(2, 2);
  S(0, 0) = 1.0;
  S(0, 1) = 2.0;
  S(1, 0) = 2.0;
  S(1, 1) = 4.0;
  CHECK_THROWS_AS(DenseSolve(S, std::vector<double>{1, 2}), NumericalError);
  CHECK_THROWS_AS(DenseSolve(S, std::vector<double>{1, 2, 3}), std::invalid_argument);

  // Hilbert matrix of order 6 against its exact inverse.
  const int n = 6;
  DenseMatrix H(n, n);
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      H(i, j) = 1.0 / (i + j + 1.0);
    }
  }
  auto binom = [](int a, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
    {
      r = r * (a - k + i) / i;
    }
    return r;
  };
  std::vector<double> ones(n, 1.0);
  const auto y = DenseSolve(H, ones);
  for (int i = 0; i < n; ++i)
  {
    double exact = 0.0;
    for (int j = 0; j < n; ++j)
    {
      // (H^{-1})_{ij}, 1-based formula
      const int I1 = i + 1, J1 = j + 1;
      exact += ((I1 + J1) % 2 == 0 ? 1.0 : -1.0) * (I1 + J1 - 1) * binom(n + I1 - 1, n - J1) *
               binom(n + J1 - 1, n - I1) * binom(I1 + J1 - 2, I1 - 1) * binom(I1 + J1 - 2, I1 - 1);
    }
    CHECK(y[i] == doctest::Approx(exact).epsilon(1e-7));
  }
}

TEST_CASE("sparse direct solver")
{
  std::mt19937_64 rng(11);
  const auto A = RandomSpd(rng, 25);
  const auto b = oracle::RandomVector(rng, 25);
  for (auto kind : {SparseDirectSolver::Kind::LU, SparseDirectSolver::Kind::SymmetricLDLT})
  {
    SparseDirectSolver s;
    CHECK_FALSE(s.Factorized());
    s.Factorize(A, kind);
    CHECK(s.Factorized());
    const auto x = s.Solve(b);
    auto r = A * x;
    for (int i = 0; i < 25; ++i)
    {
      r[i] -= b[i];
    }
    CHECK(Norm2(r) < 1e-12 * Norm2(b));
  }
  SparseMatrix singular(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
  SparseDirectSolver s;
  CHECK_THROWS_AS(s.Factorize(singular, SparseDirectSolver::Kind::LU), NumericalError);
}
