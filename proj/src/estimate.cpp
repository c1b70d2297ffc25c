#include "chirp2d/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace chirp2d {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kBoxLo = 1e-6;
constexpr double kRelTie = 1e-12;

// ---------------------------------------------------------------------------
// grid search
// ---------------------------------------------------------------------------

struct Cell {
  int k1, k2, j1, j2;
};

bool cell_less(const Cell& a, const Cell& b) {
  return std::tie(a.k1, a.k2, a.j1, a.j2) < std::tie(b.k1, b.k2, b.j1, b.j2);
}

// Collects candidate cells and resolves the winner with the near-tie rule:
// values within kRelTie (relative) of the maximum are tied and the
// lexicographically smallest (k1,k2,j1,j2) among them wins. The criterion has
// an exact reflection symmetry (every maximum value appears at two cells), so
// a plain argmax would be decided by floating-point noise; the tie band makes
// the choice deterministic and implementation-independent.
class TiedBest {
 public:
  void offer(double v, const Cell& c) {
    if (v > vmax_) vmax_ = v;
    if (v >= vmax_ * (1.0 - kRelTie)) {
      band_.emplace_back(v, c);
      if (band_.size() > 64) prune();
    }
  }
  bool empty() const { return band_.empty(); }
  Cell best() const {
    const double cutoff = vmax_ * (1.0 - kRelTie);
    const Cell* win = nullptr;
    for (const auto& [v, c] : band_) {
      if (v >= cutoff && (!win || cell_less(c, *win))) win = &c;
    }
    return *win;
  }
  double value() const { return vmax_; }

 private:
  void prune() {
    const double cutoff = vmax_ * (1.0 - kRelTie);
    band_.erase(std::remove_if(band_.begin(), band_.end(),
                               [&](const auto& e) { return e.first < cutoff; }),
                band_.end());
  }
  double vmax_ = -1.0;
  std::vector<std::pair<double, Cell>> band_;
};

NonlinearPoint cell_point(const Cell& c, int M, int N) {
  return {kPi * c.k1 / M, kPi * c.k2 / (double(M) * M), kPi * c.j1 / N,
          kPi * c.j2 / (double(N) * N)};
}

std::array<int, 4> resolve_strides(const GridConfig& cfg, int M, int N) {
  if (cfg.stride) return *cfg.stride;
  if (cfg.strategy == GridConfig::Strategy::full) return {1, 1, 1, 1};
  // Hierarchical defaults. The quadratic k2 axis is scanned at stride 2: a
  // coarser hop attenuates the energy of the true cell below the level of the
  // half-energy ghost ridges that rational frequency ratios create, so wide
  // k2 strides trade correctness for speed. Small k2 ranges drop to stride 1
  // so tiny grids are searched exhaustively.
  const int s2 = (M * M - 1 <= 4096) ? 1 : 2;
  return {1, s2, 1, (N + 7) / 8};
}

NonlinearPoint full_scan(const DataGrid& d, const std::array<int, 4>& s) {
  const int M = d.M, N = d.N;
  TiedBest best;
  for (int k1 = 1; k1 <= M - 1; k1 += s[0])
    for (int k2 = 1; k2 <= M * M - 1; k2 += s[1])
      for (int j1 = 1; j1 <= N - 1; j1 += s[2])
        for (int j2 = 1; j2 <= N * N - 1; j2 += s[3]) {
          const Cell c{k1, k2, j1, j2};
          best.offer(periodogram(d, cell_point(c, M, N)), c);
        }
  return cell_point(best.best(), M, N);
}

// Hierarchical window refinement of a 2-axis integer score function. Starting
// from (x, y) with working strides (t1, t2), each level halves the strides and
// scans a +-3*(old stride) window, keeping the best (seeded with the incumbent,
// so refinement never regresses). Exact value ties keep the first point in
// ascending scan order, i.e. the lexicographically smallest.
template <typename F>
std::pair<int, int> refine2(const F& f, int x, int y, int lo1, int hi1, int lo2,
                            int hi2, int t1, int t2, int levels) {
  for (int lvl = 0; lvl < levels; ++lvl) {
    const int u1 = std::max(1, t1 / 2), u2 = std::max(1, t2 / 2);
    double bv = f(x, y);
    int bx = x, by = y;
    for (int xx = std::max(lo1, x - 3 * t1); xx <= std::min(hi1, x + 3 * t1); xx += u1)
      for (int yy = std::max(lo2, y - 3 * t2); yy <= std::min(hi2, y + 3 * t2); yy += u2) {
        const double v = f(xx, yy);
        if (v > bv) {
          bv = v;
          bx = xx;
          by = yy;
        }
      }
    x = bx;
    y = by;
    if (t1 == 1 && t2 == 1) break;
    t1 = u1;
    t2 = u2;
  }
  return {x, y};
}

// Greedy selection of the top `keep` entries of a (score, x, y) list, already
// sorted best-first, skipping entries within the separation box of an
// already-kept one (same local basin).
std::vector<std::pair<int, int>> top_separated(
    std::vector<std::tuple<double, int, int>>& ranked, int keep, int sep1, int sep2) {
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::tie(std::get<1>(a), std::get<2>(a)) <
           std::tie(std::get<1>(b), std::get<2>(b));
  });
  std::vector<std::pair<int, int>> out;
  for (const auto& [v, x, y] : ranked) {
    bool fresh = true;
    for (const auto& [a, b] : out) {
      if (std::abs(x - a) <= sep1 && std::abs(y - b) <= sep2) {
        fresh = false;
        break;
      }
    }
    if (fresh) {
      out.emplace_back(x, y);
      if (int(out.size()) >= keep) break;
    }
  }
  return out;
}

// Two-stage hierarchical search. Stage 1 locates column-phase (j1, j2)
// candidates by a phase-insensitive score that does not depend on the unknown
// row phase; stage 2 searches the row axes (k1, k2) per candidate on a
// collapsed length-M complex signal; the honest periodogram value at the
// refined cells picks the winner.
NonlinearPoint coarse_scan(const DataGrid& d, const std::array<int, 4>& s, int levels) {
  const int M = d.M, N = d.N;
  const int s1 = s[0], s2 = s[1], s3 = s[2], s4 = s[3];

  std::vector<double> cc(N), sc(N), rc(M), rs(M);
  const auto col_collapse = [&](int j1, int j2) {
    // rc[m] + i*rs[m] <- row m of the data projected on the column phase
    const double g = kPi * j1 / N, dd = kPi * j2 / (double(N) * N);
    for (int n = 1; n <= N; ++n) {
      const double ph = g * n + dd * double(n) * n;
      cc[n - 1] = std::cos(ph);
      sc[n - 1] = std::sin(ph);
    }
    for (int m = 0; m < M; ++m) {
      const double* row = &d.values[std::size_t(m) * N];
      double a = 0.0, b = 0.0;
      for (int n = 0; n < N; ++n) {
        a += row[n] * cc[n];
        b += row[n] * sc[n];
      }
      rc[m] = a;
      rs[m] = b;
    }
  };
  const auto stage1_score = [&](int j1, int j2) {
    col_collapse(j1, j2);
    double t = 0.0;
    for (int m = 0; m < M; ++m) t += rc[m] * rc[m] + rs[m] * rs[m];
    return t;
  };

  // ---- stage 1: scan the (j1, j2) axes ----
  std::vector<std::tuple<double, int, int>> scanned;
  for (int j1 = 1; j1 <= N - 1; j1 += s3)
    for (int j2 = 1; j2 <= N * N - 1; j2 += s4)
      scanned.emplace_back(stage1_score(j1, j2), j1, j2);

  // On tiny grids every scanned cell goes to stage 2 (the search is then
  // effectively exhaustive, which the small-grid agreement guarantees rely
  // on); otherwise keep the best 16 well-separated basins.
  const bool keep_all = scanned.size() <= 1024 && M <= 32;
  const bool do_refine = s3 > 1 || s4 > 1;  // stride-1 scans are already exact
  std::vector<std::pair<int, int>> cands;
  if (keep_all) {
    for (const auto& [v, a, b] : scanned) cands.emplace_back(a, b);
  } else {
    cands = top_separated(scanned, 16, 2, 2 * s4);
  }

  // refine each candidate and re-rank by refined score
  std::vector<std::tuple<double, int, int>> refined;
  for (auto [j1, j2] : cands) {
    if (do_refine) {
      std::tie(j1, j2) = refine2(stage1_score, j1, j2, 1, N - 1, 1, N * N - 1,
                                 s3, s4, levels);
    }
    refined.emplace_back(stage1_score(j1, j2), j1, j2);
  }
  std::sort(refined.begin(), refined.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::tie(std::get<1>(a), std::get<2>(a)) <
           std::tie(std::get<1>(b), std::get<2>(b));
  });
  std::vector<std::pair<int, int>> jlist;
  for (const auto& [v, a, b] : refined) {
    if (std::none_of(jlist.begin(), jlist.end(), [&](const auto& p) {
          return p.first == a && p.second == b;
        }))
      jlist.emplace_back(a, b);
    if (!keep_all && int(jlist.size()) >= 8) break;
  }

  // ---- stage 2: per candidate, search the (k1, k2) axes ----
  // row-phase table for the strided k1 sweep, reused across all candidates
  std::vector<int> k1list;
  for (int k1 = 1; k1 <= M - 1; k1 += s1) k1list.push_back(k1);
  std::vector<double> Ec(k1list.size() * M), Es(k1list.size() * M);
  for (std::size_t i = 0; i < k1list.size(); ++i) {
    const double a = kPi * k1list[i] / M;
    for (int m = 1; m <= M; ++m) {
      Ec[i * M + m - 1] = std::cos(a * m);
      Es[i * M + m - 1] = std::sin(a * m);
    }
  }

  TiedBest best;
  std::vector<double> gr(M), gi(M), hr(M), hi(M);
  for (const auto& [j1, j2] : jlist) {
    col_collapse(j1, j2);
    // g = row-collapsed complex signal: sum_n y(m,n) e^{-i col phase}
    for (int m = 0; m < M; ++m) {
      gr[m] = rc[m];
      gi[m] = -rs[m];
    }
    const auto rowscore = [&](int k1, int k2) {
      // |sum_m g_m e^{-i(a m + b m^2)}|^2
      const double a = kPi * k1 / M, b = kPi * k2 / (double(M) * M);
      double zr = 0.0, zi = 0.0;
      for (int m = 1; m <= M; ++m) {
        const double ph = a * m + b * double(m) * m;
        const double c = std::cos(ph), sn = std::sin(ph);
        zr += gr[m - 1] * c + gi[m - 1] * sn;
        zi += gi[m - 1] * c - gr[m - 1] * sn;
      }
      return zr * zr + zi * zi;
    };

    // scan: strided k2 columns x all listed k1 rows
    std::vector<std::tuple<double, int, int>> colmax;
    for (int k2 = 1; k2 <= M * M - 1; k2 += s2) {
      const double b = kPi * k2 / (double(M) * M);
      for (int m = 1; m <= M; ++m) {
        const double ph = b * double(m) * m;
        const double c = std::cos(ph), sn = std::sin(ph);
        hr[m - 1] = gr[m - 1] * c + gi[m - 1] * sn;
        hi[m - 1] = gi[m - 1] * c - gr[m - 1] * sn;
      }
      double vbest = -1.0;
      int kbest = 0;
      for (std::size_t i = 0; i < k1list.size(); ++i) {
        const double* ec = &Ec[i * M];
        const double* es = &Es[i * M];
        double zr = 0.0, zi = 0.0;
        for (int m = 0; m < M; ++m) {
          zr += hr[m] * ec[m] + hi[m] * es[m];
          zi += hi[m] * ec[m] - hr[m] * es[m];
        }
        const double v = zr * zr + zi * zi;
        if (v > vbest) {
          vbest = v;
          kbest = k1list[i];
        }
      }
      colmax.emplace_back(vbest, kbest, k2);
    }

    auto klist = top_separated(colmax, 4, 2, 2 * s2);
    std::vector<std::pair<int, int>> kref;
    for (auto [k1, k2] : klist) {
      auto p = refine2(rowscore, k1, k2, 1, M - 1, 1, M * M - 1, s1, s2, levels);
      if (std::none_of(kref.begin(), kref.end(),
                       [&](const auto& q) { return q == p; }))
        kref.push_back(p);
    }
    for (const auto& [k1, k2] : kref) {
      const Cell c{k1, k2, j1, j2};
      best.offer(periodogram(d, cell_point(c, M, N)), c);
    }
  }
  return cell_point(best.best(), M, N);
}

// ---------------------------------------------------------------------------
// Nelder-Mead refinement
// ---------------------------------------------------------------------------

using Vec4 = std::array<double, 4>;

Vec4 clamp_box(Vec4 x) {
  for (double& v : x) v = std::clamp(v, kBoxLo, kPi - kBoxLo);
  return x;
}

bool inside_box(const Vec4& x) {
  for (double v : x)
    if (v < kBoxLo || v > kPi - kBoxLo) return false;
  return true;
}

struct NmRun {
  Vec4 x;
  double f;
  int iters;
  bool by_tol;  // stopped by the tolerance test (not by the iteration cap)
};

// Simplex minimization with per-axis scales. The simplex spread test is
// measured in scaled units; the objective spread test is relative with the
// problem's energy scale `fscale` as a floor, so objectives that reach exact
// zero (noiseless fits) still terminate.
NmRun nelder_mead(const std::function<double(const Vec4&)>& F, const Vec4& x0,
                  const Vec4& scales, const OptConfig& cfg, double fscale) {
  constexpr int kDim = 4, kVerts = 5;
  std::array<Vec4, kVerts> v;
  std::array<double, kVerts> f;
  v[0] = x0;
  for (int i = 1; i < kVerts; ++i) {
    v[i] = x0;
    v[i][i - 1] += scales[i - 1];
  }
  for (int i = 0; i < kVerts; ++i) f[i] = F(v[i]);

  std::array<int, kVerts> ord{0, 1, 2, 3, 4};
  int iters = 0;
  bool by_tol = false;
  while (iters < cfg.max_iters) {
    std::stable_sort(ord.begin(), ord.end(),
                     [&](int a, int b) { return f[a] < f[b]; });
    const int lo = ord[0], hi = ord[kVerts - 1], nh = ord[kVerts - 2];

    double spread = 0.0;
    for (int i = 1; i < kVerts; ++i)
      for (int a = 0; a < kDim; ++a)
        spread = std::max(spread, std::abs(v[ord[i]][a] - v[lo][a]) / scales[a]);
    const double fs = 2.0 * std::abs(f[hi] - f[lo]);
    if (spread < cfg.xtol && fs <= cfg.ftol * (std::abs(f[hi]) + std::abs(f[lo]) + fscale)) {
      by_tol = true;
      break;
    }
    ++iters;

    Vec4 cen{};
    for (int i = 0; i < kVerts; ++i)
      if (i != hi)
        for (int a = 0; a < kDim; ++a) cen[a] += v[i][a];
    for (int a = 0; a < kDim; ++a) cen[a] /= kDim;

    Vec4 xr;
    for (int a = 0; a < kDim; ++a) xr[a] = cen[a] + (cen[a] - v[hi][a]);
    const double fr = F(xr);
    if (fr < f[lo]) {
      Vec4 xe;
      for (int a = 0; a < kDim; ++a) xe[a] = cen[a] + 2.0 * (cen[a] - v[hi][a]);
      const double fe = F(xe);
      if (fe < fr) {
        v[hi] = xe;
        f[hi] = fe;
      } else {
        v[hi] = xr;
        f[hi] = fr;
      }
    } else if (fr < f[nh]) {
      v[hi] = xr;
      f[hi] = fr;
    } else {
      Vec4 xc;
      for (int a = 0; a < kDim; ++a) xc[a] = cen[a] + 0.5 * (v[hi][a] - cen[a]);
      const double fc = F(xc);
      if (fc < f[hi]) {
        v[hi] = xc;
        f[hi] = fc;
      } else {
        for (int i = 0; i < kVerts; ++i) {
          if (i == lo) continue;
          for (int a = 0; a < kDim; ++a) v[i][a] = v[lo][a] + 0.5 * (v[i][a] - v[lo][a]);
          f[i] = F(v[i]);
        }
      }
    }
  }
  std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return f[a] < f[b]; });
  return {v[ord[0]], f[ord[0]], iters, by_tol};
}

// Shared driver for both refiners: minimizes `objective` (already negated for
// maximization) from `init` with restarts, box projection and
// B >= 0 canonicalization via the exact reflection t -> pi - t, which leaves
// the fitted signal unchanged on the integer lattice.
struct RefineCore {
  NonlinearPoint point;
  int iterations = 0;
  bool converged = false;
};

RefineCore refine_core(const DataGrid& data, const NonlinearPoint& init,
                       const OptConfig& cfg,
                       const std::function<double(const NonlinearPoint&)>& objective) {
  const Vec4 scales{1.0 / data.M, 1.0 / (double(data.M) * data.M), 1.0 / data.N,
                    1.0 / (double(data.N) * data.N)};
  const double fscale = data.energy();
  const auto F = [&](const Vec4& x) {
    const Vec4 c = clamp_box(x);
    return objective({c[0], c[1], c[2], c[3]});
  };
  Vec4 x{init.alpha, init.beta, init.gamma, init.delta};
  NmRun run = nelder_mead(F, clamp_box(x), scales, cfg, fscale);
  int iters = run.iters;
  for (int r = 0; r < cfg.restarts; ++r) {
    run = nelder_mead(F, clamp_box(run.x), scales, cfg, fscale);
    iters += run.iters;
  }
  RefineCore out;
  out.iterations = iters;
  out.converged = run.by_tol && inside_box(run.x);
  const Vec4 c = clamp_box(run.x);
  out.point = {c[0], c[1], c[2], c[3]};
  return out;
}

NonlinearPoint reflect(const NonlinearPoint& p) {
  return {kPi - p.alpha, kPi - p.beta, kPi - p.gamma, kPi - p.delta};
}

}  // namespace

void validate_grid_config(const GridConfig& cfg) {
  if (cfg.stride) {
    for (int s : *cfg.stride)
      if (s < 1) throw std::invalid_argument("grid strides must be >= 1");
  }
  if (cfg.levels < 1) throw std::invalid_argument("grid levels must be >= 1");
}

void validate_opt_config(const OptConfig& cfg) {
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(cfg.xtol > 0.0)) throw std::invalid_argument("xtol must be > 0");
  if (!(cfg.ftol >= 0.0)) throw std::invalid_argument("ftol must be >= 0");
  if (cfg.restarts < 0) throw std::invalid_argument("restarts must be >= 0");
}

NonlinearPoint grid_init(const DataGrid& data, const GridConfig& cfg) {
  validate_grid_config(cfg);
  if (data.M < 2 || data.N < 2)
    throw std::invalid_argument("grid_init needs M >= 2 and N >= 2");
  const std::array<int, 4> s = resolve_strides(cfg, data.M, data.N);
  if (cfg.strategy == GridConfig::Strategy::full) return full_scan(data, s);
  return coarse_scan(data, s, cfg.levels);
}

FitResult refine_alse(const DataGrid& data, const NonlinearPoint& init,
                      const OptConfig& cfg) {
  validate_point(init);
  validate_opt_config(cfg);
  RefineCore core = refine_core(data, init, cfg, [&](const NonlinearPoint& p) {
    return -periodogram(data, p);
  });
  LinearPair amps = linear_solve(data, core.point, SolveMode::approximate);
  if (amps.B < 0.0) {
    core.point = reflect(core.point);
    amps = linear_solve(data, core.point, SolveMode::approximate);
  }
  FitResult out;
  out.component = {amps.A, amps.B, core.point.alpha, core.point.beta,
                   core.point.gamma, core.point.delta};
  out.objective = periodogram(data, core.point);
  out.iterations = core.iterations;
  out.converged = core.converged;
  out.init = init;
  return out;
}

FitResult refine_lse(const DataGrid& data, const NonlinearPoint& init,
                     const OptConfig& cfg) {
  validate_point(init);
  validate_opt_config(cfg);
  RefineCore core = refine_core(data, init, cfg, [&](const NonlinearPoint& p) {
    return profiled_error_sum(data, p);
  });
  // The exact amplitude solve can only fail if the optimizer terminated at a
  // degenerate point (every such candidate evaluated to +inf during the
  // search); fall back to the approximate amplitudes and flag the fit.
  const auto solve_amps = [&](const NonlinearPoint& p, bool& ok) {
    try {
      ok = true;
      return linear_solve(data, p, SolveMode::exact);
    } catch (const std::runtime_error&) {
      ok = false;
      return linear_solve(data, p, SolveMode::approximate);
    }
  };
  bool ok = true;
  LinearPair amps = solve_amps(core.point, ok);
  if (amps.B < 0.0) {
    core.point = reflect(core.point);
    bool ok2 = true;
    amps = solve_amps(core.point, ok2);
    ok = ok && ok2;
  }
  FitResult out;
  out.component = {amps.A, amps.B, core.point.alpha, core.point.beta,
                   core.point.gamma, core.point.delta};
  out.objective = error_sum(data, core.point, amps);
  out.iterations = core.iterations;
  out.converged = core.converged && ok;
  out.init = init;
  return out;
}

FitResult fit_one(const DataGrid& data, Method method, const GridConfig& gridcfg,
                  const OptConfig& optcfg) {
  const NonlinearPoint init = grid_init(data, gridcfg);
  return method == Method::alse ? refine_alse(data, init, optcfg)
                                : refine_lse(data, init, optcfg);
}

std::vector<FitResult> sequential_fit(const DataGrid& data, int p, Method method,
                                      const GridConfig& gridcfg,
                                      const OptConfig& optcfg) {
  if (p < 1) throw std::invalid_argument("component count p must be >= 1");
  std::vector<FitResult> out;
  out.reserve(p);
  DataGrid work = data;
  for (int k = 0; k < p; ++k) {
    FitResult fr = fit_one(work, method, gridcfg, optcfg);
    out.push_back(fr);
    if (k + 1 < p) {
      const ChirpComponent& c = fr.component;
      if (c.A != 0.0 || c.B != 0.0) {
        const DataGrid sig = synthesize_component(c, work.M, work.N);
        for (std::size_t i = 0; i < work.values.size(); ++i)
          work.values[i] -= sig.values[i];
      }
    }
  }
  return out;
}

}  // namespace chirp2d
