#include "chirp2d/objective.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace chirp2d {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kCondLimit = 1e12;

struct Tables {
  std::vector<double> cr, sr;  // cos/sin(alpha*m + beta*m^2), m = 1..M
  std::vector<double> cc, sc;  // cos/sin(gamma*n + delta*n^2), n = 1..N
};

Tables build_tables(const NonlinearPoint& p, int M, int N) {
  Tables t;
  t.cr.resize(M);
  t.sr.resize(M);
  t.cc.resize(N);
  t.sc.resize(N);
  for (int m = 1; m <= M; ++m) {
    const double ph = p.alpha * m + p.beta * double(m) * m;
    t.cr[m - 1] = std::cos(ph);
    t.sr[m - 1] = std::sin(ph);
  }
  for (int n = 1; n <= N; ++n) {
    const double ph = p.gamma * n + p.delta * double(n) * n;
    t.cc[n - 1] = std::cos(ph);
    t.sc[n - 1] = std::sin(ph);
  }
  return t;
}

// proj_c = sum y cos(row+col), proj_s = sum y sin(row+col), computed by first
// collapsing each row against the column tables.
void projections(const DataGrid& d, const Tables& t, double& proj_c, double& proj_s) {
  double C = 0.0, S = 0.0;
  for (int m = 0; m < d.M; ++m) {
    const double* row = &d.values[std::size_t(m) * d.N];
    double rc = 0.0, rs = 0.0;
    for (int n = 0; n < d.N; ++n) {
      rc += row[n] * t.cc[n];
      rs += row[n] * t.sc[n];
    }
    C += t.cr[m] * rc - t.sr[m] * rs;
    S += t.sr[m] * rc + t.cr[m] * rs;
  }
  proj_c = C;
  proj_s = S;
}

// Gram entries from the double-angle identity. With
//   P = sum_{m,n} exp(-2i(row_m + col_n)) = (sum_m e^{-2i row})(sum_n e^{-2i col}),
//   sum cos^2 = (MN + Re P)/2, sum sin^2 = (MN - Re P)/2, sum cos sin = -Im P / 2.
// The double-angle tables come from the existing single-angle ones, so this
// costs O(M+N) with no additional trig.
void gram_entries(int M, int N, const Tables& t, double& g_cc, double& g_cs, double& g_ss) {
  double mr = 0.0, mi = 0.0;  // sum_m e^{-2i row_m}
  for (int m = 0; m < M; ++m) {
    mr += t.cr[m] * t.cr[m] - t.sr[m] * t.sr[m];  // cos 2x
    mi += -2.0 * t.sr[m] * t.cr[m];               // -sin 2x = Im e^{-2ix}
  }
  double nr = 0.0, ni = 0.0;
  for (int n = 0; n < N; ++n) {
    nr += t.cc[n] * t.cc[n] - t.sc[n] * t.sc[n];
    ni += -2.0 * t.sc[n] * t.cc[n];
  }
  const double Pr = mr * nr - mi * ni;
  const double Pi = mr * ni + mi * nr;
  const double MN = double(M) * N;
  g_cc = 0.5 * (MN + Pr);
  g_ss = 0.5 * (MN - Pr);
  // sum cos*sin = sum sin(2 phase)/2, and Im P = -sum sin(2 phase):
  g_cs = -0.5 * Pi;
}

// Eigenvalue bounds of the symmetric 2x2 Gram matrix.
void gram_eigs(double g_cc, double g_cs, double g_ss, double& lo, double& hi) {
  const double tr = g_cc + g_ss;
  const double disc = std::sqrt(std::max(0.0, (g_cc - g_ss) * (g_cc - g_ss) + 4.0 * g_cs * g_cs));
  hi = 0.5 * (tr + disc);
  lo = 0.5 * (tr - disc);
}

std::string point_str(const NonlinearPoint& p) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "(alpha=%.17g, beta=%.17g, gamma=%.17g, delta=%.17g)",
                p.alpha, p.beta, p.gamma, p.delta);
  return buf;
}

}  // namespace

void validate_point(const NonlinearPoint& p) {
  const double v[4] = {p.alpha, p.beta, p.gamma, p.delta};
  const char* names[4] = {"alpha", "beta", "gamma", "delta"};
  for (int i = 0; i < 4; ++i) {
    if (!(std::isfinite(v[i]) && v[i] > 0.0 && v[i] < kPi))
      throw std::domain_error(std::string(names[i]) + " must lie strictly inside (0, pi)");
  }
}

double periodogram(const DataGrid& data, const NonlinearPoint& point) {
  validate_point(point);
  const Tables t = build_tables(point, data.M, data.N);
  double C, S;
  projections(data, t, C, S);
  return 2.0 / (double(data.M) * data.N) * (C * C + S * S);
}

DesignApply design_matrix_apply(const DataGrid& data, const NonlinearPoint& point) {
  validate_point(point);
  const Tables t = build_tables(point, data.M, data.N);
  DesignApply out;
  projections(data, t, out.proj_c, out.proj_s);
  gram_entries(data.M, data.N, t, out.g_cc, out.g_cs, out.g_ss);
  return out;
}

LinearPair linear_solve(const DataGrid& data, const NonlinearPoint& point, SolveMode mode) {
  const DesignApply d = design_matrix_apply(data, point);
  if (mode == SolveMode::approximate) {
    const double f = 2.0 / (double(data.M) * data.N);
    return {f * d.proj_c, f * d.proj_s};
  }
  double lo, hi;
  gram_eigs(d.g_cc, d.g_cs, d.g_ss, lo, hi);
  if (!(lo > 0.0) || hi > kCondLimit * lo)
    throw std::runtime_error("degenerate design at nonlinear point " + point_str(point) +
                             ": Gram condition number exceeds 1e12");
  const double det = d.g_cc * d.g_ss - d.g_cs * d.g_cs;
  return {(d.g_ss * d.proj_c - d.g_cs * d.proj_s) / det,
          (d.g_cc * d.proj_s - d.g_cs * d.proj_c) / det};
}

double error_sum(const DataGrid& data, const NonlinearPoint& point, const LinearPair& pair) {
  validate_point(point);
  const Tables t = build_tables(point, data.M, data.N);
  double q = 0.0;
  for (int m = 0; m < data.M; ++m) {
    const double* row = &data.values[std::size_t(m) * data.N];
    const double cr = t.cr[m], sr = t.sr[m];
    for (int n = 0; n < data.N; ++n) {
      const double cphi = cr * t.cc[n] - sr * t.sc[n];
      const double sphi = sr * t.cc[n] + cr * t.sc[n];
      const double r = row[n] - pair.A * cphi - pair.B * sphi;
      q += r * r;
    }
  }
  return q;
}

double profiled_error_sum(const DataGrid& data, const NonlinearPoint& point) {
  validate_point(point);
  const Tables t = build_tables(point, data.M, data.N);
  double C, S;
  projections(data, t, C, S);
  double g_cc, g_cs, g_ss;
  gram_entries(data.M, data.N, t, g_cc, g_cs, g_ss);
  double lo, hi;
  gram_eigs(g_cc, g_cs, g_ss, lo, hi);
  if (!(lo > 0.0) || hi > kCondLimit * lo)
    return std::numeric_limits<double>::infinity();
  const double det = g_cc * g_ss - g_cs * g_cs;
  const double fitted = (g_ss * C * C - 2.0 * g_cs * C * S + g_cc * S * S) / det;
  return data.energy() - fitted;
}

}  // namespace chirp2d
