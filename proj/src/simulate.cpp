#include "chirp2d/simulate.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace chirp2d {

const char* method_name(Method m) { return m == Method::alse ? "alse" : "lse"; }

std::array<Summary, 6> summarize(const std::vector<std::array<double, 6>>& estimates,
                                 const std::array<double, 6>& truth) {
  if (estimates.empty())
    throw std::invalid_argument("summarize needs at least one estimate");
  std::array<Summary, 6> out{};
  const double inv = 1.0 / double(estimates.size());
  for (int i = 0; i < 6; ++i) {
    double sum = 0.0, sq = 0.0;
    for (const auto& e : estimates) {
      sum += e[i];
      const double d = e[i] - truth[i];
      sq += d * d;
    }
    out[i].average = sum * inv;
    out[i].bias = out[i].average - truth[i];
    out[i].mse = sq * inv;
  }
  return out;
}

namespace {

struct RepOutcome {
  bool ok = false;
  std::vector<std::array<double, 6>> comps;  // extraction order
};

std::array<double, 6> comp_to_array(const ChirpComponent& c) {
  return {c.A, c.B, c.alpha, c.beta, c.gamma, c.delta};
}

// One replicate of one method: sequential extraction with either the shared
// step-1 grid initialization or the true nonlinear points as starts.
RepOutcome run_one(const DataGrid& grid, const McConfig& cfg, Method method,
                   const NonlinearPoint* shared_first_init,
                   NonlinearPoint* first_init_out) {
  RepOutcome out;
  const int p = cfg.model.size();
  DataGrid work = grid;
  bool all_ok = true;
  for (int k = 0; k < p; ++k) {
    NonlinearPoint init;
    if (cfg.init_at_truth) {
      const auto& t = cfg.model.components()[k];
      init = {t.alpha, t.beta, t.gamma, t.delta};
    } else if (k == 0 && shared_first_init) {
      init = *shared_first_init;
    } else {
      init = grid_init(work, cfg.gridcfg);
      if (k == 0 && first_init_out) *first_init_out = init;
    }
    const FitResult fr = method == Method::alse
                             ? refine_alse(work, init, cfg.optcfg)
                             : refine_lse(work, init, cfg.optcfg);
    all_ok = all_ok && fr.converged;
    out.comps.push_back(comp_to_array(fr.component));
    if (k + 1 < p) {
      const ChirpComponent& c = fr.component;
      if (c.A != 0.0 || c.B != 0.0) {
        const DataGrid sig = synthesize_component(c, work.M, work.N);
        for (std::size_t i = 0; i < work.values.size(); ++i)
          work.values[i] -= sig.values[i];
      }
    }
  }
  out.ok = all_ok;
  return out;
}

}  // namespace

McReport run_mc(const McConfig& cfg) {
  if (cfg.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (cfg.M < 2 || cfg.N < 2) throw std::invalid_argument("run_mc needs M, N >= 2");
  if (cfg.methods.empty()) throw std::invalid_argument("methods must be non-empty");
  if (!cfg.sequential && cfg.model.size() != 1)
    throw std::invalid_argument("sequential=false requires a single-component model");
  if (cfg.threads < 0) throw std::invalid_argument("threads must be >= 0");
  validate_noise_spec(cfg.noise);
  validate_grid_config(cfg.gridcfg);
  validate_opt_config(cfg.optcfg);

  const auto t0 = std::chrono::steady_clock::now();
  const int R = cfg.replicates;
  const int p = cfg.model.size();
  const DataGrid clean = synthesize(cfg.model, cfg.M, cfg.N);

  // outcomes[mi][r]; filled by replicate index so aggregation order (and thus
  // the report) is identical for every thread count.
  std::vector<std::vector<RepOutcome>> outcomes(cfg.methods.size());
  for (auto& v : outcomes) v.resize(R);

  const auto worker_body = [&](int r) {
    NoiseSpec ns = cfg.noise;
    ns.seed = cfg.base_seed + std::uint64_t(r);
    DataGrid grid = clean;
    if (ns.sigma > 0.0) grid = add_noise(clean, generate_noise(ns, cfg.M, cfg.N));
    // The step-1 initialization depends only on the data, not the method, so
    // it is computed once per replicate and shared across methods.
    NonlinearPoint first_init;
    bool have_first = false;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      try {
        outcomes[mi][r] =
            run_one(grid, cfg, cfg.methods[mi],
                    (!cfg.init_at_truth && have_first) ? &first_init : nullptr,
                    &first_init);
        if (!cfg.init_at_truth) have_first = true;
      } catch (const std::exception&) {
        outcomes[mi][r] = RepOutcome{};  // counted as a failed replicate
      }
    }
  };

  unsigned T = cfg.threads > 0 ? unsigned(cfg.threads)
                               : std::max(1u, std::thread::hardware_concurrency());
  T = std::min<unsigned>(T, unsigned(R));
  if (T <= 1) {
    for (int r = 0; r < R; ++r) worker_body(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(T);
    for (unsigned t = 0; t < T; ++t) {
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < R; r = next.fetch_add(1)) worker_body(r);
      });
    }
    for (auto& th : pool) th.join();
  }

  McReport rep;
  rep.M = cfg.M;
  rep.N = cfg.N;
  rep.replicates = R;
  rep.sigma = cfg.noise.sigma;
  rep.noise_c_value = cfg.noise.kernel.empty() ? 0.0 : noise_c(cfg.noise);
  rep.base_seed = cfg.base_seed;
  rep.sequential = cfg.sequential;
  rep.init_at_truth = cfg.init_at_truth;
  for (const auto& c : cfg.model.components()) rep.truth.push_back(comp_to_array(c));

  // kernel-free configurations are only legal when sigma == 0; the variance
  // column is identically zero then and the c factor is immaterial
  const double c_val = cfg.noise.kernel.empty() ? 1.0 : noise_c(cfg.noise);

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    McTable table;
    table.method = cfg.methods[mi];
    table.cells.resize(p);
    std::vector<std::vector<std::array<double, 6>>> per_comp(p);
    int ok_count = 0;
    for (int r = 0; r < R; ++r) {
      const RepOutcome& o = outcomes[mi][r];
      if (!o.ok) continue;
      ++ok_count;
      for (int k = 0; k < p; ++k) per_comp[k].push_back(o.comps[k]);
    }
    table.failure_count = R - ok_count;
    if (ok_count == 0)
      throw std::runtime_error(std::string("every replicate failed for method ") +
                               method_name(cfg.methods[mi]));
    for (int k = 0; k < p; ++k) {
      const auto& truth_c = cfg.model.components()[k];
      const auto sums = summarize(per_comp[k], rep.truth[k]);
      const AvarReport av =
          avar(truth_c.A, truth_c.B, cfg.noise.sigma, c_val, cfg.M, cfg.N);
      for (int i = 0; i < 6; ++i) {
        table.cells[k][i].average = sums[i].average;
        table.cells[k][i].bias = sums[i].bias;
        table.cells[k][i].mse = sums[i].mse;
        table.cells[k][i].avar = av.per_param[i];
      }
    }
    rep.tables.push_back(std::move(table));
  }

  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string mc_report_to_csv(const McReport& report) {
  std::string out = "method,component,stat,A,B,alpha,beta,gamma,delta\n";
  static const char* stats[4] = {"Avg", "Bias", "MSE", "AVar"};
  for (const auto& table : report.tables) {
    for (std::size_t k = 0; k < table.cells.size(); ++k) {
      for (int si = 0; si < 4; ++si) {
        out += method_name(table.method);
        out += ',' + std::to_string(k + 1) + ',' + stats[si];
        for (int i = 0; i < 6; ++i) {
          const McCell& c = table.cells[k][i];
          const double v = si == 0   ? c.average
                           : si == 1 ? c.bias
                           : si == 2 ? c.mse
                                     : c.avar;
          out += ',' + fmt17(v);
        }
        out += '\n';
      }
    }
  }
  return out;
}

std::string mc_report_to_json(const McReport& report) {
  nlohmann::json j;
  j["schema_version"] = report.schema_version;
  j["M"] = report.M;
  j["N"] = report.N;
  j["replicates"] = report.replicates;
  j["sigma"] = report.sigma;
  j["noise_c"] = report.noise_c_value;
  j["base_seed"] = report.base_seed;
  j["sequential"] = report.sequential;
  j["init_at_truth"] = report.init_at_truth;
  j["wall_seconds"] = report.wall_seconds;
  static const char* pnames[6] = {"A", "B", "alpha", "beta", "gamma", "delta"};
  j["truth"] = nlohmann::json::array();
  for (const auto& t : report.truth) {
    nlohmann::json c;
    for (int i = 0; i < 6; ++i) c[pnames[i]] = t[i];
    j["truth"].push_back(c);
  }
  j["tables"] = nlohmann::json::array();
  for (const auto& table : report.tables) {
    nlohmann::json jt;
    jt["method"] = method_name(table.method);
    jt["failure_count"] = table.failure_count;
    jt["components"] = nlohmann::json::array();
    for (const auto& cells : table.cells) {
      nlohmann::json jc;
      for (int i = 0; i < 6; ++i) {
        jc[pnames[i]] = {{"average", cells[i].average},
                         {"bias", cells[i].bias},
                         {"mse", cells[i].mse},
                         {"avar", cells[i].avar}};
      }
      jt["components"].push_back(jc);
    }
    j["tables"].push_back(jt);
  }
  return j.dump(2) + "\n";
}

}  // namespace chirp2d
