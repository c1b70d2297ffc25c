#pragma once

// Chirp signal model: component definitions, clean-signal synthesis,
// stationary moving-average noise generation, and grid I/O.
//
// Conventions used throughout the library:
//   * grids are M x N with 1-based indices (m = 1..M rows, n = 1..N columns)
//   * the phase of a component at (m, n) is
//       alpha*m + beta*m^2 + gamma*n + delta*n^2
//   * storage is row-major, element (m, n) at values[(m-1)*N + (n-1)]

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace chirp2d {

// File-level failures (open/read/write/parse). Distinct from
// std::invalid_argument (bad configuration) and plain std::runtime_error
// (numerical failure) so the CLI can map each family to its own exit code.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// One signal component: y(m,n) contribution
//   A*cos(phase) + B*sin(phase),  phase = alpha*m + beta*m^2 + gamma*n + delta*n^2.
// alpha, beta, gamma, delta must each lie strictly inside (0, pi);
// (A, B) must not both be zero.
struct ChirpComponent {
  double A = 0.0;
  double B = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;

  double energy() const { return A * A + B * B; }  // squared amplitude
};

// Throws std::invalid_argument if the component violates its invariants.
void validate_component(const ChirpComponent& c);

// Ordered list of components. The constructor enforces:
//   * every component individually valid,
//   * all nonlinear quadruples (alpha,beta,gamma,delta) pairwise distinct,
//   * strictly decreasing energies A^2+B^2 (the sequential method extracts
//     strongest-first); pass allow_unordered=true to skip the ordering check.
class ChirpModel {
 public:
  explicit ChirpModel(std::vector<ChirpComponent> components,
                      bool allow_unordered = false);

  const std::vector<ChirpComponent>& components() const { return comps_; }
  int size() const { return int(comps_.size()); }

 private:
  std::vector<ChirpComponent> comps_;
};

// Dense M x N grid of real observations, 1-based accessors.
struct DataGrid {
  int M = 0;
  int N = 0;
  std::vector<double> values;  // row-major, (m,n) -> values[(m-1)*N + (n-1)]

  DataGrid() = default;
  DataGrid(int M_, int N_);  // zero-filled; throws if M or N < 1

  double at(int m, int n) const { return values[std::size_t(m - 1) * N + (n - 1)]; }
  double& at(int m, int n) { return values[std::size_t(m - 1) * N + (n - 1)]; }

  double energy() const;  // sum of squared values
};

// One term of a moving-average kernel: coefficient a applied to the
// innovation at offset (m - j, n - k).
struct KernelTerm {
  int j = 0;
  int k = 0;
  double a = 0.0;
};

// Stationary linear-process noise specification:
//   X(m,n) = sum_terms a(j,k) * eps(m-j, n-k),  eps iid N(0, sigma^2).
struct NoiseSpec {
  double sigma = 0.0;
  std::vector<KernelTerm> kernel;  // must be non-empty when sigma > 0
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument on violations (negative sigma, empty kernel
// with sigma > 0, duplicate (j,k) offsets).
void validate_noise_spec(const NoiseSpec& spec);

// Clean signal on an M x N grid (M, N >= 2).
DataGrid synthesize(const ChirpModel& model, int M, int N);

// Clean signal of a single component (convenience used by the sequential
// subtraction step and the CLI reconstruction output).
DataGrid synthesize_component(const ChirpComponent& comp, int M, int N);

// Stationary noise field. The innovation field is drawn on the index
// rectangle padded by the kernel support, so every output cell receives full
// convolution mass (exact stationarity including borders). Deterministic
// given spec.seed: the generator is SplitMix64 applied to a per-cell counter,
// mapped to normals by Box-Muller; identical spec and dimensions give
// identical output on every platform.
DataGrid generate_noise(const NoiseSpec& spec, int M, int N);

// Element-wise sum; throws std::invalid_argument on dimension mismatch.
DataGrid add_noise(const DataGrid& clean, const DataGrid& noise);

// --- deterministic Gaussian draws (exposed for tests and the MC harness) ---

// SplitMix64 mix of a 64-bit value (stateless hash form).
std::uint64_t splitmix64(std::uint64_t x);

// k-th standard normal of the stream identified by seed (Box-Muller over two
// counter-indexed uniforms; the uniform for the log is flipped into (0,1]).
double normal_draw(std::uint64_t seed, std::uint64_t k);

// --- serialization ---

// CSV: line 1 is "M,N"; then M lines of N comma-separated values written
// with 17 significant digits (lossless round-trip for doubles).
void write_csv(const DataGrid& grid, const std::string& path);

// Parse errors throw std::runtime_error citing 1-based line and column.
DataGrid read_csv(const std::string& path);

// Binary 8-bit PGM (P5, maxval 255), affine rescale min->0, max->255.
// A constant grid maps to all zeros.
void write_pgm(const DataGrid& grid, const std::string& path);

}  // namespace chirp2d
