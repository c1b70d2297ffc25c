#include "chirp2d/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chirp2d {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

bool finite(double x) { return std::isfinite(x); }

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void validate_component(const ChirpComponent& c) {
  require(finite(c.A) && finite(c.B), "component amplitudes must be finite");
  require(c.A != 0.0 || c.B != 0.0, "component amplitudes (A, B) must not both be zero");
  const double angles[4] = {c.alpha, c.beta, c.gamma, c.delta};
  const char* names[4] = {"alpha", "beta", "gamma", "delta"};
  for (int i = 0; i < 4; ++i) {
    require(finite(angles[i]) && angles[i] > 0.0 && angles[i] < kPi,
            std::string("component ") + names[i] + " must lie strictly inside (0, pi)");
  }
}

ChirpModel::ChirpModel(std::vector<ChirpComponent> components, bool allow_unordered)
    : comps_(std::move(components)) {
  require(!comps_.empty(), "model needs at least one component");
  for (const auto& c : comps_) validate_component(c);
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    for (std::size_t j = i + 1; j < comps_.size(); ++j) {
      const auto& a = comps_[i];
      const auto& b = comps_[j];
      require(a.alpha != b.alpha || a.beta != b.beta || a.gamma != b.gamma ||
                  a.delta != b.delta,
              "components " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                  " share the same nonlinear quadruple");
    }
  }
  if (!allow_unordered) {
    for (std::size_t i = 0; i + 1 < comps_.size(); ++i) {
      require(comps_[i].energy() > comps_[i + 1].energy(),
              "component energies A^2+B^2 must be strictly decreasing "
              "(pass allow_unordered to skip this check)");
    }
  }
}

DataGrid::DataGrid(int M_, int N_) : M(M_), N(N_) {
  if (M < 1 || N < 1) throw std::invalid_argument("grid dimensions must be >= 1");
  values.assign(std::size_t(M) * N, 0.0);
}

double DataGrid::energy() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

void validate_noise_spec(const NoiseSpec& spec) {
  require(finite(spec.sigma) && spec.sigma >= 0.0, "noise sigma must be >= 0");
  if (spec.sigma > 0.0) require(!spec.kernel.empty(), "noise kernel must be non-empty when sigma > 0");
  for (const auto& t : spec.kernel) require(finite(t.a), "kernel coefficients must be finite");
  for (std::size_t i = 0; i < spec.kernel.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.kernel.size(); ++j) {
      require(spec.kernel[i].j != spec.kernel[j].j || spec.kernel[i].k != spec.kernel[j].k,
              "noise kernel has a duplicate (j, k) offset");
    }
  }
}

DataGrid synthesize_component(const ChirpComponent& comp, int M, int N) {
  if (M < 2 || N < 2) throw std::invalid_argument("synthesis needs M >= 2 and N >= 2");
  validate_component(comp);
  DataGrid g(M, N);
  // The phase splits into a row part and a column part; tabulating both keeps
  // synthesis at O(M+N) trig calls and makes large-m arguments no less
  // accurate than the direct evaluation (same double-rounded phase).
  std::vector<double> cr(M), sr(M), cc(N), sc(N);
  for (int m = 1; m <= M; ++m) {
    const double ph = comp.alpha * m + comp.beta * double(m) * m;
    cr[m - 1] = std::cos(ph);
    sr[m - 1] = std::sin(ph);
  }
  for (int n = 1; n <= N; ++n) {
    const double ph = comp.gamma * n + comp.delta * double(n) * n;
    cc[n - 1] = std::cos(ph);
    sc[n - 1] = std::sin(ph);
  }
  for (int m = 1; m <= M; ++m) {
    double* row = &g.values[std::size_t(m - 1) * N];
    for (int n = 1; n <= N; ++n) {
      const double cphi = cr[m - 1] * cc[n - 1] - sr[m - 1] * sc[n - 1];
      const double sphi = sr[m - 1] * cc[n - 1] + cr[m - 1] * sc[n - 1];
      row[n - 1] = comp.A * cphi + comp.B * sphi;
    }
  }
  return g;
}

DataGrid synthesize(const ChirpModel& model, int M, int N) {
  if (M < 2 || N < 2) throw std::invalid_argument("synthesis needs M >= 2 and N >= 2");
  DataGrid g(M, N);
  for (const auto& comp : model.components()) {
    DataGrid one = synthesize_component(comp, M, N);
    for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] += one.values[i];
  }
  return g;
}

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {
// Counter-indexed uniform: value i of the stream identified by seed. This is
// exactly the SplitMix64 output sequence started at `seed`, addressed
// randomly instead of iterated.
double unit_uniform(std::uint64_t seed, std::uint64_t i) {
  const std::uint64_t r = splitmix64(seed + i * 0x9E3779B97F4A7C15ull);
  return double(r >> 11) * 0x1.0p-53;  // [0, 1)
}
}  // namespace

double normal_draw(std::uint64_t seed, std::uint64_t k) {
  // Box-Muller over two counter-indexed uniforms. u1 is flipped into (0, 1]
  // so the logarithm is always finite.
  const double u1 = 1.0 - unit_uniform(seed, 2 * k);
  const double u2 = unit_uniform(seed, 2 * k + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

DataGrid generate_noise(const NoiseSpec& spec, int M, int N) {
  if (M < 1 || N < 1) throw std::invalid_argument("noise grid dimensions must be >= 1");
  validate_noise_spec(spec);
  DataGrid g(M, N);
  if (spec.sigma == 0.0 || spec.kernel.empty()) return g;

  // X(m,n) = sum a(j,k) eps(m-j, n-k). Innovations are drawn on the index
  // rectangle padded by the kernel support so border cells receive the same
  // full convolution mass as interior ones (exact stationarity).
  int jmin = spec.kernel[0].j, jmax = spec.kernel[0].j;
  int kmin = spec.kernel[0].k, kmax = spec.kernel[0].k;
  for (const auto& t : spec.kernel) {
    jmin = std::min(jmin, t.j);
    jmax = std::max(jmax, t.j);
    kmin = std::min(kmin, t.k);
    kmax = std::max(kmax, t.k);
  }
  const int r0 = 1 - jmax, r1 = M - jmin;  // rows of the innovation field
  const int c0 = 1 - kmax, c1 = N - kmin;  // columns
  const int H = r1 - r0 + 1, W = c1 - c0 + 1;

  std::vector<double> eps(std::size_t(H) * W);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      const std::uint64_t idx = std::uint64_t(r) * W + c;
      eps[idx] = spec.sigma * normal_draw(spec.seed, idx);
    }
  }

  for (int m = 1; m <= M; ++m) {
    for (int n = 1; n <= N; ++n) {
      double x = 0.0;
      for (const auto& t : spec.kernel) {
        const int rr = (m - t.j) - r0;
        const int cc = (n - t.k) - c0;
        x += t.a * eps[std::size_t(rr) * W + cc];
      }
      g.at(m, n) = x;
    }
  }
  return g;
}

DataGrid add_noise(const DataGrid& clean, const DataGrid& noise) {
  if (clean.M != noise.M || clean.N != noise.N)
    throw std::invalid_argument("grid dimension mismatch in add_noise");
  DataGrid g = clean;
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] += noise.values[i];
  return g;
}

void write_csv(const DataGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  char buf[64];
  out << grid.M << "," << grid.N << "\n";
  for (int m = 1; m <= grid.M; ++m) {
    std::string line;
    for (int n = 1; n <= grid.N; ++n) {
      std::snprintf(buf, sizeof buf, "%.17g", grid.at(m, n));
      if (n > 1) line += ',';
      line += buf;
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("write failed: " + path);
}

namespace {
[[noreturn]] void parse_fail(const std::string& path, int line, int col,
                             const std::string& what) {
  throw IoError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                ": " + what);
}

// Parses one comma-separated line of `count` doubles (or ints when integral).
// `line_no` is 1-based; column positions reported are 1-based characters.
std::vector<double> parse_row(const std::string& s, int count,
                              const std::string& path, int line_no) {
  std::vector<double> out;
  out.reserve(count);
  std::size_t pos = 0;
  for (int f = 0; f < count; ++f) {
    if (f > 0) {
      if (pos >= s.size() || s[pos] != ',')
        parse_fail(path, line_no, int(pos) + 1, "expected ','");
      ++pos;
    }
    const char* start = s.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start) parse_fail(path, line_no, int(pos) + 1, "expected a number");
    if (!std::isfinite(v)) parse_fail(path, line_no, int(pos) + 1, "non-finite value");
    pos += std::size_t(end - start);
    out.push_back(v);
  }
  // allow trailing \r from CRLF files
  if (pos < s.size() && s[pos] == '\r') ++pos;
  if (pos != s.size()) parse_fail(path, line_no, int(pos) + 1, "unexpected trailing content");
  return out;
}
}  // namespace

DataGrid read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) parse_fail(path, 1, 1, "missing header line 'M,N'");
  const std::vector<double> hdr = parse_row(line, 2, path, 1);
  const double Md = hdr[0], Nd = hdr[1];
  if (Md < 1 || Nd < 1 || Md != int(Md) || Nd != int(Nd) || Md > 1e7 || Nd > 1e7)
    parse_fail(path, 1, 1, "header must hold positive integer dimensions");
  const int M = int(Md), N = int(Nd);
  DataGrid g(M, N);
  for (int m = 1; m <= M; ++m) {
    if (!std::getline(in, line))
      parse_fail(path, m + 1, 1, "unexpected end of file (expected " +
                                     std::to_string(M) + " data rows)");
    const std::vector<double> row = parse_row(line, N, path, m + 1);
    for (int n = 1; n <= N; ++n) g.at(m, n) = row[n - 1];
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line != "\r")
      parse_fail(path, M + 2, 1, "unexpected extra data row");
  }
  return g;
}

void write_pgm(const DataGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : grid.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out << "P5\n" << grid.N << " " << grid.M << "\n255\n";
  std::string bytes(grid.values.size(), '\0');
  if (hi > lo) {
    const double s = 255.0 / (hi - lo);
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
      const int p = int(std::lround((grid.values[i] - lo) * s));
      bytes[i] = char(std::clamp(p, 0, 255));
    }
  }
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace chirp2d
