#pragma once

// Closed-form large-sample covariance machinery for the estimators: the
// diagonal rate matrix D, the 6x6 information-style matrix Sigma and its
// inverse, the noise constant c, and per-parameter plug-in variances.
//
// Parameter order everywhere: (A, B, alpha, beta, gamma, delta).

#include <array>

#include "chirp2d/model.hpp"

namespace chirp2d {

using Mat6 = std::array<std::array<double, 6>, 6>;
using Vec6 = std::array<double, 6>;

// Diagonal entries of the rate matrix D:
//   ( (MN)^{-1/2}, (MN)^{-1/2},
//     M^{-3/2} N^{-1/2}, M^{-5/2} N^{-1/2},
//     M^{-1/2} N^{-3/2}, M^{-1/2} N^{-5/2} ).
// The scaled estimator (theta_hat - theta0) * D^{-1} has an O(1) limiting
// covariance; squaring these entries maps limiting variances back to raw
// parameter scale.
Vec6 scale_matrix(int M, int N);

// The symmetric 6x6 matrix Sigma(A,B); with s = A^2 + B^2 its rows are
//   [ 1/2     0      B/4    B/6    B/4    B/6  ]
//   [ 0       1/2   -A/4   -A/6   -A/4   -A/6  ]
//   [ B/4    -A/4    s/6    s/8    s/8    s/12 ]
//   [ B/6    -A/6    s/8    s/10   s/12   s/18 ]
//   [ B/4    -A/4    s/8    s/12   s/6    s/8  ]
//   [ B/6    -A/6    s/12   s/18   s/8    s/10 ].
// Throws std::invalid_argument when (A,B) == (0,0).
Mat6 sigma_matrix(double A, double B);

// Numeric inverse of sigma_matrix(A,B) (Gauss-Jordan with partial pivoting).
// The known closed-form display of this inverse is used as a cross-check in
// tests, not as the implementation.
Mat6 sigma_inverse(double A, double B);

// c = sum of squared kernel coefficients. Throws std::invalid_argument on an
// empty kernel.
double noise_c(const NoiseSpec& spec);

// Plug-in variance report for one component:
//   cov       = sigma^2 * c * sigma_inverse(A,B)   (limiting covariance)
//   per_param = diagonal of cov scaled by the squared D entries, i.e. the
//               finite-sample approximate variance of each raw estimate.
struct AvarReport {
  int component_index = 1;  // 1-based position in the model
  Mat6 cov{};
  Vec6 per_param{};
  int M = 0;
  int N = 0;
  double sigma2 = 0.0;
  double c = 0.0;
};

AvarReport avar(double A, double B, double sigma, double c, int M, int N);

// General dense 6x6 inverse used by sigma_inverse; exposed for tests.
// Throws std::runtime_error on singular input.
Mat6 invert6(const Mat6& in);

}  // namespace chirp2d
