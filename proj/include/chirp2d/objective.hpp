#pragma once

// Objective-function layer: the periodogram-style criterion I, the residual
// sum of squares Q, the two-column trigonometric design accumulators, and the
// closed-form amplitude solve. All evaluations stream over the grid without
// materializing the MN x 2 design matrix, using the separability of the phase
// into a row part (alpha*m + beta*m^2) and a column part (gamma*n + delta*n^2).

#include "chirp2d/model.hpp"

namespace chirp2d {

// A point of the four nonlinear parameters, each strictly inside (0, pi).
struct NonlinearPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

// Throws std::domain_error if any coordinate is outside the open interval.
void validate_point(const NonlinearPoint& p);

// Amplitude pair (the linear parameters).
struct LinearPair {
  double A = 0.0;
  double B = 0.0;
};

// Accumulated design quantities at a nonlinear point:
//   proj_c = sum y*cos(phase), proj_s = sum y*sin(phase)
//   gram   = [[sum cos^2, sum cos*sin], [sum cos*sin, sum sin^2]]
struct DesignApply {
  double proj_c = 0.0;
  double proj_s = 0.0;
  double g_cc = 0.0;
  double g_cs = 0.0;
  double g_ss = 0.0;
};

// I(point) = (2/MN) * (proj_c^2 + proj_s^2). Always >= 0.
double periodogram(const DataGrid& data, const NonlinearPoint& point);

// Streaming computation of the Gram matrix and projection vector.
// Cost: O(MN) for the projections plus O(M+N) for the Gram entries (the
// squared-term sums reduce to a product of two one-dimensional sums).
DesignApply design_matrix_apply(const DataGrid& data, const NonlinearPoint& point);

enum class SolveMode { exact, approximate };

// exact: gram^{-1} * proj (least squares amplitudes); throws
//   std::runtime_error naming the point when the Gram matrix has condition
//   number above 1e12 (degenerate nonlinear point).
// approximate: (2/MN) * proj, the closed-form large-sample amplitudes.
LinearPair linear_solve(const DataGrid& data, const NonlinearPoint& point,
                        SolveMode mode);

// Q(point, pair) = sum over the grid of (y - A*cos(phase) - B*sin(phase))^2,
// accumulated per cell (no algebraic shortcut, so noiseless exact fits sum
// to zero instead of cancellation residue).
double error_sum(const DataGrid& data, const NonlinearPoint& point,
                 const LinearPair& pair);

// Q with the amplitudes profiled out at this point:
//   energy - proj^T gram^{-1} proj.
// Cheap evaluation path for the optimizer's inner loop; returns +infinity
// when the Gram matrix is near-singular (candidate rejected, search
// continues). The fast form trades the last ~1e-16 of relative accuracy for
// speed; report final residuals with error_sum instead.
double profiled_error_sum(const DataGrid& data, const NonlinearPoint& point);

}  // namespace chirp2d
