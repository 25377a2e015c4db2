#pragma once

#include <algorithm>
#include <array>
#include <random>

#include "cidx/algebra.hpp"
#include "doctest.h"

namespace testing {

using cidx::Complex;
using cidx::Index;
using cidx::Mat;

inline Mat unit(Index n, Index i, Index j) {
  Mat m = Mat::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

inline Mat eye(Index n) { return Mat::Identity(n, n); }

// M_k (x) 1_m inside M_{km}.
inline cidx::ConcreteAlgebra left_factor(Index k, Index m) {
  std::vector<Mat> e;
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) e.push_back(cidx::kron(unit(k, i, j), eye(m)));
  return cidx::ConcreteAlgebra::span(k * m, e);
}

// 1_k (x) M_m inside M_{km}.
inline cidx::ConcreteAlgebra right_factor(Index k, Index m) {
  std::vector<Mat> e;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) e.push_back(cidx::kron(eye(k), unit(m, i, j)));
  return cidx::ConcreteAlgebra::span(k * m, e);
}

// Normalized partial trace over the second factor, embedded back as x (x) 1.
inline Mat partial_trace_right(const Mat& x, Index k, Index m) {
  Mat r = Mat::Zero(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) r(i, j) = x.block(i * m, j * m, m, m).trace() / static_cast<double>(m);
  return cidx::kron(r, eye(m));
}

inline Mat random_matrix(Index n, std::mt19937_64& rng) { return cidx::random_complex(n, n, rng); }

// Permutation matrices of a regular representation given a multiplication table.
inline std::vector<Mat> regular_rep(const std::vector<std::vector<int>>& mult) {
  const auto n = static_cast<Index>(mult.size());
  std::vector<Mat> out;
  for (Index g = 0; g < n; ++g) {
    Mat p = Mat::Zero(n, n);
    for (Index h = 0; h < n; ++h) p(mult[g][h], h) = 1.0;
    out.push_back(p);
  }
  return out;
}

// S3 as permutations of {0,1,2}, composed right-to-left.
inline std::vector<std::vector<int>> s3_table(std::vector<std::array<int, 3>>* perms_out = nullptr) {
  std::vector<std::array<int, 3>> perms = {{0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}};
  const auto n = perms.size();
  std::vector<std::vector<int>> mult(n, std::vector<int>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
      mult[a][b] = static_cast<int>(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  if (perms_out) *perms_out = perms;
  return mult;
}

inline std::vector<std::vector<int>> cyclic_table(int n) {
  std::vector<std::vector<int>> mult(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) mult[a][b] = (a + b) % n;
  return mult;
}

// Span of the listed group elements, which double as its generators.
inline cidx::ConcreteAlgebra group_span(const std::vector<Mat>& grp, const std::vector<int>& idx) {
  std::vector<Mat> e;
  for (int i : idx) e.push_back(grp[static_cast<std::size_t>(i)]);
  return cidx::ConcreteAlgebra::span(grp[0].rows(), e, e);
}

}  // namespace testing
