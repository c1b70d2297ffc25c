#include "chirp2d/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace chirp2d {

Vec6 scale_matrix(int M, int N) {
  if (M < 1 || N < 1) throw std::invalid_argument("scale_matrix needs M, N >= 1");
  const double m = M, n = N;
  const double rmn = 1.0 / std::sqrt(m * n);
  return {rmn,
          rmn,
          1.0 / (m * std::sqrt(m * n)),
          1.0 / (m * m * std::sqrt(m * n)),
          1.0 / (n * std::sqrt(m * n)),
          1.0 / (n * n * std::sqrt(m * n))};
}

Mat6 sigma_matrix(double A, double B) {
  if (A == 0.0 && B == 0.0)
    throw std::invalid_argument("sigma_matrix needs (A, B) != (0, 0)");
  const double s = A * A + B * B;
  return Mat6{{{0.5, 0.0, B / 4, B / 6, B / 4, B / 6},
               {0.0, 0.5, -A / 4, -A / 6, -A / 4, -A / 6},
               {B / 4, -A / 4, s / 6, s / 8, s / 8, s / 12},
               {B / 6, -A / 6, s / 8, s / 10, s / 12, s / 18},
               {B / 4, -A / 4, s / 8, s / 12, s / 6, s / 8},
               {B / 6, -A / 6, s / 12, s / 18, s / 8, s / 10}}};
}

Mat6 invert6(const Mat6& in) {
  // Gauss-Jordan with partial pivoting on an augmented [A | I] block.
  constexpr int n = 6;
  double a[n][2 * n];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a[i][j] = in[i][j];
      a[i][n + j] = (i == j) ? 1.0 : 0.0;
    }
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) throw std::runtime_error("invert6: singular matrix");
    if (piv != col)
      for (int j = 0; j < 2 * n; ++j) std::swap(a[piv][j], a[col][j]);
    const double d = a[col][col];
    for (int j = 0; j < 2 * n; ++j) a[col][j] /= d;
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (int j = 0; j < 2 * n; ++j) a[r][j] -= f * a[col][j];
    }
  }
  Mat6 out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i][j] = a[i][n + j];
  return out;
}

Mat6 sigma_inverse(double A, double B) { return invert6(sigma_matrix(A, B)); }

double noise_c(const NoiseSpec& spec) {
  if (spec.kernel.empty())
    throw std::invalid_argument("noise_c needs a non-empty kernel");
  double c = 0.0;
  for (const auto& t : spec.kernel) c += t.a * t.a;
  return c;
}

AvarReport avar(double A, double B, double sigma, double c, int M, int N) {
  if (A == 0.0 && B == 0.0)
    throw std::invalid_argument("avar needs (A, B) != (0, 0)");
  if (!(sigma >= 0.0)) throw std::invalid_argument("avar needs sigma >= 0");
  if (!(c > 0.0)) throw std::invalid_argument("avar needs c > 0");
  if (M < 1 || N < 1) throw std::invalid_argument("avar needs M, N >= 1");
  AvarReport rep;
  rep.M = M;
  rep.N = N;
  rep.sigma2 = sigma * sigma;
  rep.c = c;
  const Mat6 inv = sigma_inverse(A, B);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) rep.cov[i][j] = rep.sigma2 * c * inv[i][j];
  const Vec6 d = scale_matrix(M, N);
  for (int i = 0; i < 6; ++i) rep.per_param[i] = rep.cov[i][i] * d[i] * d[i];
  return rep;
}

}  // namespace chirp2d
