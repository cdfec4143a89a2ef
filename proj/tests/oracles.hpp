// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

// Independent reference computations for the test suites. Nothing here calls into the
// library's quadrature or basis code.

#ifndef MLLG_TESTS_ORACLES_HPP
#define MLLG_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>
#include "mllg/vec3.hpp"

namespace oracle
{

using mllg::Vec3;

// Gauss-Legendre nodes and weights on [0, 1] by Newton iteration on P_n.
inline void GaussLegendre01(int n, std::vector<double> &x, std::vector<double> &w)
{
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
  {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it)
    {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k)
      {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? z : p1;
      const double pm = (n == 1) ? 1.0 : p0;
      dp = n * (z * pn - pm) / (z * z - 1.0);
      const double dz = pn / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16)
      {
        break;
      }
    }
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Tensor (collapsed) Gauss rule over a physical tetrahedron: integrates f exactly for
// polynomials up to degree 2n-3.
inline double IntegrateTet(const std::array<Vec3, 4> &x, const std::function<double(const Vec3 &)> &f,
                           int n = 6)
{
  std::vector<double> gx, gw;
  GaussLegendre01(n, gx, gw);
  const Vec3 e1 = x[1] - x[0], e2 = x[2] - x[0], e3 = x[3] - x[0];
  const double det = std::fabs(mllg::dot(e1, mllg::cross(e2, e3)));
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      for (int k = 0; k < n; ++k)
      {
        const double u = gx[i], v = gx[j], s = gx[k];
        // reference point (a, b, c) with a + b + c <= 1
        const double a = u;
        const double b = v * (1.0 - u);
        const double c = s * (1.0 - u) * (1.0 - v);
        const double jac = (1.0 - u) * (1.0 - u) * (1.0 - v);
        sum += gw[i] * gw[j] * gw[k] * jac * f(x[0] + a * e1 + b * e2 + c * e3);
      }
    }
  }
  return sum * det;
}

// Barycentric coordinates by solving the 4x4 affine system directly.
inline std::array<double, 4> Barycentric(const std::array<Vec3, 4> &x, const Vec3 &p)
{
  Eigen::Matrix4d A;
  for (int a = 0; a < 4; ++a)
  {
    A(0, a) = x[a].x;
    A(1, a) = x[a].y;
    A(2, a) = x[a].z;
    A(3, a) = 1.0;
  }
  const Eigen::Vector4d l = A.fullPivLu().solve(Eigen::Vector4d(p.x, p.y, p.z, 1.0));
  return {l[0], l[1], l[2], l[3]};
}

// Barycentric gradients by central differences of the affine solve.
inline std::array<Vec3, 4> BarycentricGradients(const std::array<Vec3, 4> &x)
{
  const Vec3 c = 0.25 * (x[0] + x[1] + x[2] + x[3]);
  std::array<Vec3, 4> g;
  const double h = 1e-3;
  for (int d = 0; d < 3; ++d)
  {
    Vec3 dp;
    dp[d] = h;
    const auto lp = Barycentric(x, c + dp), lm = Barycentric(x, c - dp);
    for (int a = 0; a < 4; ++a)
    {
      g[a][d] = (lp[a] - lm[a]) / (2.0 * h);
    }
  }
  return g;
}

// Whitney function lambda_a grad lambda_b - lambda_b grad lambda_a at p.
inline Vec3 Whitney(const std::array<Vec3, 4> &x, int a, int b, const Vec3 &p)
{
  const auto l = Barycentric(x, p);
  const auto g = BarycentricGradients(x);
  return l[a] * g[b] - l[b] * g[a];
}

// Curl by central differences of an arbitrary vector field.
inline Vec3 NumericalCurl(const std::function<Vec3(const Vec3 &)> &f, const Vec3 &p, double h = 1e-4)
{
  auto d = [&](int comp, int dir) {
    Vec3 e;
    e[dir] = h;
    return (f(p + e)[comp] - f(p - e)[comp]) / (2.0 * h);
  };
  return {d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)};
}

inline Vec3 RandomUnit(std::mt19937_64 &rng)
{
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v{n(rng), n(rng), n(rng)};
  return v / mllg::norm(v);
}

inline Vec3 RandomTangent(std::mt19937_64 &rng, const Vec3 &m, double scale = 1.0)
{
  std::normal_distribution<double> n(0.0, scale);
  Vec3 v{n(rng), n(rng), n(rng)};
  return v - mllg::dot(v, m) * m;
}

inline std::vector<double> RandomVector(std::mt19937_64 &rng, std::size_t n, double scale = 1.0)
{
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto &x : v)
  {
    x = u(rng);
  }
  return v;
}

}  // namespace oracle

#endif  // MLLG_TESTS_ORACLES_HPP
