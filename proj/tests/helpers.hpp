#pragma once

#include "ssrkit/model.hpp"
#include "ssrkit/simulate.hpp"

#include <vector>

namespace ssrtest {

using ssr::LtiSystem;
using ssr::Mat;
using ssr::SensorDef;
using ssr::Vec;

inline Mat rowmajor(int rows, int cols, std::initializer_list<double> vals) {
  Mat m(rows, cols);
  int k = 0;
  for (double v : vals) m(k / cols, k % cols) = v, ++k;
  return m;
}

/// Four-state system with eigenvalues 1 (double, diagonalizable), 2 and 3,
/// observed by four scalar sensors.  Sensors 2 and 3 are blind to the
/// eigenvalue-3 direction, which makes {1,4} the unique minimal removal set
/// that breaks observability.
inline LtiSystem f_system() {
  Mat A = rowmajor(4, 4,
                   {1, 0, 0, -2,
                    0.5, 1.5, -0.5, 2,
                    -0.5, -0.5, 1.5, 0,
                    0, 0, 0, 3});
  std::vector<SensorDef> sensors(4);
  sensors[0] = {1, rowmajor(1, 4, {3, 2, 0, 2})};
  sensors[1] = {2, rowmajor(1, 4, {2, 3, 1, -1})};
  sensors[2] = {3, rowmajor(1, 4, {2, 2, 0, 0})};
  sensors[3] = {4, rowmajor(1, 4, {2, 3, -1, 0})};
  return ssr::validate_system(A, sensors);
}

/// Two states, six sensors: three copies of [1 0] and three of [0 1] under
/// A = 2I.  Every single sensor misses an eigendirection, so the eigenvalue
/// observability index is -1 while the sparse index is 2.
inline LtiSystem example1_system() {
  Mat A = 2.0 * Mat::Identity(2, 2);
  std::vector<SensorDef> sensors(6);
  for (int i = 0; i < 3; ++i) sensors[i] = {i + 1, rowmajor(1, 2, {1, 0})};
  for (int i = 3; i < 6; ++i) sensors[i] = {i + 1, rowmajor(1, 2, {0, 1})};
  return ssr::validate_system(A, sensors);
}

/// Companion matrix of x^n + c_{n-1} x^{n-1} + ... + c_0 (last row -c).
inline Mat companion(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size());
  Mat A = Mat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) A(n - 1, j) = -c[static_cast<std::size_t>(j)];
  return A;
}

/// Companion matrix with the given eigenvalues (expands the polynomial).
inline Mat companion_with_roots(const std::vector<double>& roots) {
  std::vector<double> c{1.0};
  for (double r : roots) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] += -r * c[i];
    }
    c = next;
  }
  c.pop_back();  // drop the leading 1
  return companion(c);
}

inline LtiSystem random_system(ssr::Rng& rng, int n, int N) {
  Mat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
  std::vector<SensorDef> sensors(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    sensors[static_cast<std::size_t>(i)] = {i + 1, rng.vec(n, -1.0, 1.0).transpose()};
  return ssr::validate_system(A, sensors);
}

inline double rel_err(const Mat& got, const Mat& want) {
  const double scale = std::max(1.0, want.norm());
  return (got - want).norm() / scale;
}

}  // namespace ssrtest
