#pragma once

// Estimation layer: initial values from the extended Fourier grid, local
// refinement by Nelder-Mead (amplitudes profiled out), and the sequential
// multi-component procedure.

#include <array>
#include <optional>
#include <vector>

#include "chirp2d/model.hpp"
#include "chirp2d/objective.hpp"

namespace chirp2d {

// The extended Fourier grid over the four nonlinear axes is
//   (pi*k1/M, pi*k2/M^2, pi*j1/N, pi*j2/N^2),
//   k1 = 1..M-1, k2 = 1..M^2-1, j1 = 1..N-1, j2 = 1..N^2-1.
//
// strategy full:           exhaustive scan of the (optionally strided) grid.
//                          O(M^3 N^3) evaluations at stride 1 - intended for
//                          small grids and oracle comparisons (<= ~16x16).
// strategy coarse_to_fine: two-stage hierarchical search exploiting the
//                          separable phase, suitable for desk-scale grids.
//                          See grid_init() notes below.
struct GridConfig {
  enum class Strategy { full, coarse_to_fine };
  Strategy strategy = Strategy::coarse_to_fine;
  // Strides (s1,s2,s3,s4) for the (k1,k2,j1,j2) axes. All entries must be
  // >= 1 when provided. If unset, the defaults depend on the strategy:
  //   full           -> (1, 1, 1, 1)            (the exact extended grid)
  //   coarse_to_fine -> (1, 2, 1, ceil(N/8)),
  // and small grids widen to exhaustive scans automatically. The k2 axis is
  // never auto-strided beyond 2: see grid_init() notes.
  std::optional<std::array<int, 4>> stride;
  // Refinement levels for coarse_to_fine: each level halves the working
  // stride and searches a +-3-cell window around each kept candidate.
  int levels = 4;
};

// Nelder-Mead settings. xtol is measured in per-axis scaled units (the
// simplex is built with per-axis scales 1/M, 1/M^2, 1/N, 1/N^2); ftol is a
// relative objective spread. restarts counts additional runs re-seeded from
// the incumbent after convergence.
struct OptConfig {
  int max_iters = 20000;
  double xtol = 1e-10;
  double ftol = 1e-12;
  int restarts = 1;
};

void validate_grid_config(const GridConfig& cfg);
void validate_opt_config(const OptConfig& cfg);

enum class Method { alse, lse };

// One fitted component. objective holds the final criterion value: the
// periodogram I for Method::alse, the residual sum Q for Method::lse.
struct FitResult {
  ChirpComponent component;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  NonlinearPoint init;
};

// Best grid node of the periodogram over the (possibly strided,
// hierarchically refined) extended grid.
//
// Values within 1e-12 relative of the running maximum are treated as tied and
// the lexicographically smallest (k1,k2,j1,j2) wins. This matters because the
// criterion has an exact reflection symmetry: since k+k^2 is even for every
// integer k, the node (M-k1, M^2-k2, N-j1, N^2-j2) evaluates the complex
// conjugate of the node (k1,k2,j1,j2) and carries the identical value, so
// every maximum appears twice.
//
// coarse_to_fine details: stage 1 scans the (j1,j2) axes on the configured
// strides, scoring each candidate by the m-energy of the column-collapsed
// signal (a phase-insensitive score that does not depend on the unknown
// (k1,k2)); the best 16 well-separated candidates are each refined by
// stride-halving window search for cfg.levels levels. Stage 2, per candidate,
// collapses the grid to a length-M complex signal and scans (k1,k2) with the
// k2 axis at stride <= 2: hopping a quadratic-phase axis by more than ~2
// cells attenuates the true peak below the half-energy ghost ridges that
// rational frequency ratios produce, so a coarser k2 scan is structurally
// unreliable. The returned node is the honest periodogram winner across all
// refined candidates. Throws std::invalid_argument when the grid is empty
// (M < 2 or N < 2).
NonlinearPoint grid_init(const DataGrid& data, const GridConfig& cfg);

// Refine to a local maximum of the periodogram (derivative-free simplex with
// box projection onto [1e-6, pi-1e-6]^4). Amplitudes are the closed-form
// approximate solve at the refined point. Non-convergence within max_iters
// yields converged=false, never an exception. The returned representative is
// canonicalized to B >= 0 via the exact reflection
//   (A, B, t) -> (A, -B, pi - t)   (identical fitted signal);
// estimates are therefore directly comparable to truths with positive B.
FitResult refine_alse(const DataGrid& data, const NonlinearPoint& init,
                      const OptConfig& cfg);

// Refine to a local minimum of the amplitude-profiled residual sum Q.
// Amplitudes are the exact least squares solve at the optimum. Near-singular
// Gram candidates inside the search evaluate to +infinity (rejected).
// Canonicalized to B >= 0 like refine_alse.
FitResult refine_lse(const DataGrid& data, const NonlinearPoint& init,
                     const OptConfig& cfg);

// Sequential extraction of p components: fit one component on the working
// grid (grid_init + refine), subtract its synthesized signal, repeat on the
// residual. Returns exactly p results in extraction order. A non-converged
// step is flagged in its FitResult and extraction continues. The input grid
// is not modified.
std::vector<FitResult> sequential_fit(const DataGrid& data, int p,
                                      Method method, const GridConfig& gridcfg,
                                      const OptConfig& optcfg);

// Single fit helper: grid_init then refine with the given method.
FitResult fit_one(const DataGrid& data, Method method,
                  const GridConfig& gridcfg, const OptConfig& optcfg);

}  // namespace chirp2d
