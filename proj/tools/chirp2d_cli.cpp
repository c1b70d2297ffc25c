// Command-line driver: synthesize grids, fit chirp components, print
// closed-form variance tables, run Monte Carlo studies, and produce the
// four-image texture demo.
//
// Exit codes: 0 success (including non-converged fits, which are encoded in
// the report), 1 usage/configuration error, 2 I/O error, 3 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chirp2d/asymptotics.hpp"
#include "chirp2d/estimate.hpp"
#include "chirp2d/model.hpp"
#include "chirp2d/objective.hpp"
#include "chirp2d/simulate.hpp"

namespace {

using nlohmann::json;
using namespace chirp2d;

// ---------------------------------------------------------------------------
// config file helpers
// ---------------------------------------------------------------------------

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("config parse failure in " + path + ": " + e.what());
  }
}

std::vector<KernelTerm> kernel_from_json(const json& arr) {
  std::vector<KernelTerm> out;
  for (const auto& t : arr) {
    if (!t.is_array() || t.size() != 3)
      throw std::invalid_argument("noise.kernel entries must be [j, k, a] triples");
    out.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
  }
  return out;
}

std::vector<KernelTerm> parse_kernel_string(const std::string& s) {
  // "j,k,a;j,k,a;..."
  std::vector<KernelTerm> out;
  std::stringstream terms(s);
  std::string term;
  while (std::getline(terms, term, ';')) {
    KernelTerm t;
    char extra = 0;
    if (std::sscanf(term.c_str(), "%d,%d,%lf%c", &t.j, &t.k, &t.a, &extra) != 3)
      throw std::invalid_argument("kernel term '" + term + "' is not 'j,k,a'");
    out.push_back(t);
  }
  if (out.empty()) throw std::invalid_argument("empty kernel string");
  return out;
}

ChirpModel model_from_json(const json& jm) {
  if (!jm.contains("components") || !jm["components"].is_array() ||
      jm["components"].empty())
    throw std::invalid_argument("config model.components must be a non-empty array");
  std::vector<ChirpComponent> comps;
  for (const auto& c : jm["components"]) {
    comps.push_back({c.at("A").get<double>(), c.at("B").get<double>(),
                     c.at("alpha").get<double>(), c.at("beta").get<double>(),
                     c.at("gamma").get<double>(), c.at("delta").get<double>()});
  }
  const bool unordered = jm.value("allow_unordered", false);
  return ChirpModel(std::move(comps), unordered);
}

NoiseSpec noise_from_json(const json& jn) {
  NoiseSpec spec;
  spec.sigma = jn.value("sigma", 0.0);
  spec.seed = jn.value("seed", std::uint64_t{0});
  if (jn.contains("kernel")) spec.kernel = kernel_from_json(jn["kernel"]);
  return spec;
}

std::array<int, 4> parse_stride_string(const std::string& s) {
  std::array<int, 4> v{};
  char extra = 0;
  if (std::sscanf(s.c_str(), "%d,%d,%d,%d%c", &v[0], &v[1], &v[2], &v[3], &extra) != 4)
    throw std::invalid_argument("stride must be four comma-separated integers 's1,s2,s3,s4'");
  return v;
}

GridConfig::Strategy strategy_from_name(const std::string& name) {
  if (name == "full") return GridConfig::Strategy::full;
  if (name == "coarse") return GridConfig::Strategy::coarse_to_fine;
  throw std::invalid_argument("grid strategy must be 'full' or 'coarse'");
}

Method method_from_name(const std::string& name) {
  if (name == "alse") return Method::alse;
  if (name == "lse") return Method::lse;
  throw std::invalid_argument("method must be 'alse' or 'lse'");
}

// Fit-section settings shared by cmd_fit / cmd_mc / cmd_demo: config file
// values first, then flag overrides.
struct FitSettings {
  std::string method = "lse";
  int p = 1;
  std::string grid = "coarse";
  std::string stride;  // empty = strategy default
  int levels = 4;
  OptConfig opt;

  void apply_config(const json& j) {
    if (!j.contains("fit")) return;
    const json& f = j["fit"];
    method = f.value("method", method);
    p = f.value("p", p);
    grid = f.value("grid", grid);
    levels = f.value("levels", levels);
    if (f.contains("stride")) {
      const auto v = f["stride"].get<std::vector<int>>();
      if (v.size() != 4)
        throw std::invalid_argument("config fit.stride must have four entries");
      char buf[80];
      std::snprintf(buf, sizeof buf, "%d,%d,%d,%d", v[0], v[1], v[2], v[3]);
      stride = buf;
    }
    opt.max_iters = f.value("max_iters", opt.max_iters);
    opt.xtol = f.value("xtol", opt.xtol);
    opt.ftol = f.value("ftol", opt.ftol);
    opt.restarts = f.value("restarts", opt.restarts);
  }

  GridConfig grid_config() const {
    GridConfig g;
    g.strategy = strategy_from_name(grid);
    g.levels = levels;
    if (!stride.empty()) g.stride = parse_stride_string(stride);
    return g;
  }
};

json component_to_json(const FitResult& fr) {
  const ChirpComponent& c = fr.component;
  json j;
  j["A"] = c.A;
  j["B"] = c.B;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["delta"] = c.delta;
  j["objective"] = fr.objective;
  j["iterations"] = fr.iterations;
  j["converged"] = fr.converged;
  j["init"] = {{"alpha", fr.init.alpha},
               {"beta", fr.init.beta},
               {"gamma", fr.init.gamma},
               {"delta", fr.init.delta}};
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

int env_threads_default() {
  if (const char* e = std::getenv("CHIRP2D_THREADS")) {
    const int v = std::atoi(e);
    if (v > 0) return v;
  }
  return 0;  // auto
}

// ---------------------------------------------------------------------------
// subcommand option blocks
// ---------------------------------------------------------------------------

struct SynthOpts {
  std::string config, out, kernel;
  int M = 0, N = 0;
  double A = 0, B = 0, alpha = 0, beta = 0, gamma = 0, delta = 0;
  bool have_component = false;
  double sigma = -1.0;  // <0 = unset
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool pgm = false;
};

struct FitOpts {
  std::string config, in, out, residual, recon;
  FitSettings settings;
  std::string method_flag, grid_flag, stride_flag;
  int p_flag = 0, levels_flag = 0;
};

struct AvarOpts {
  double A = 0, B = 0, sigma = 0, c = 1.0;
  std::string kernel;
  int M = 0, N = 0;
  std::string out;
};

struct McOpts {
  std::string config, out;
  int replicates = 0;  // 0 = config/default
  std::vector<std::string> methods;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  int M = 0, N = 0;
  double sigma = -1.0;
  std::string method_flag, grid_flag, stride_flag;
  int p_flag = 0, levels_flag = 0;
  bool init_at_truth = false;
};

struct DemoOpts {
  std::string outdir = ".";
  std::uint64_t seed = 2024;
  int threads = 0;
};

// ---------------------------------------------------------------------------
// subcommand implementations
// ---------------------------------------------------------------------------

int do_synth(const SynthOpts& o) {
  json cfg;
  if (!o.config.empty()) cfg = load_config(o.config);

  int M = o.M > 0 ? o.M : cfg.value("M", 0);
  int N = o.N > 0 ? o.N : cfg.value("N", 0);
  if (M < 2 || N < 2)
    throw std::invalid_argument("synth needs M >= 2 and N >= 2 (flag or config)");

  std::optional<ChirpModel> model;
  if (o.have_component) {
    model.emplace(std::vector<ChirpComponent>{
        {o.A, o.B, o.alpha, o.beta, o.gamma, o.delta}});
  } else if (cfg.contains("model")) {
    model.emplace(model_from_json(cfg["model"]));
  } else {
    throw std::invalid_argument(
        "synth needs a component (--A/--B/--alpha/--beta/--gamma/--delta) or a "
        "config with a model section");
  }

  NoiseSpec noise;
  if (cfg.contains("noise")) noise = noise_from_json(cfg["noise"]);
  if (o.sigma >= 0.0) noise.sigma = o.sigma;
  if (o.seed_set) noise.seed = o.seed;
  if (!o.kernel.empty()) noise.kernel = parse_kernel_string(o.kernel);
  if (noise.sigma > 0.0 && noise.kernel.empty()) noise.kernel = {{0, 0, 1.0}};

  DataGrid grid = synthesize(*model, M, N);
  if (noise.sigma > 0.0) grid = add_noise(grid, generate_noise(noise, M, N));

  write_csv(grid, o.out + ".csv");
  if (o.pgm) write_pgm(grid, o.out + ".pgm");
  std::printf("M=%d N=%d energy=%.17g\n", grid.M, grid.N, grid.energy());
  return 0;
}

int do_fit(const FitOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  FitSettings s = o.settings;
  if (!o.config.empty()) s.apply_config(load_config(o.config));
  if (!o.method_flag.empty()) s.method = o.method_flag;
  if (!o.grid_flag.empty()) s.grid = o.grid_flag;
  if (!o.stride_flag.empty()) s.stride = o.stride_flag;
  if (o.p_flag > 0) s.p = o.p_flag;
  if (o.levels_flag > 0) s.levels = o.levels_flag;

  const Method method = method_from_name(s.method);
  const GridConfig gridcfg = s.grid_config();

  const DataGrid grid = read_csv(o.in);
  const std::vector<FitResult> fits =
      sequential_fit(grid, s.p, method, gridcfg, s.opt);

  DataGrid residual = grid;
  for (const auto& fr : fits) {
    const ChirpComponent& c = fr.component;
    if (c.A == 0.0 && c.B == 0.0) continue;
    const DataGrid sig = synthesize_component(c, grid.M, grid.N);
    for (std::size_t i = 0; i < residual.values.size(); ++i)
      residual.values[i] -= sig.values[i];
  }

  json rep;
  rep["schema_version"] = 1;
  rep["input"] = o.in;
  rep["M"] = grid.M;
  rep["N"] = grid.N;
  rep["method"] = s.method;
  rep["p"] = s.p;
  rep["components"] = json::array();
  for (const auto& fr : fits) rep["components"].push_back(component_to_json(fr));
  rep["input_energy"] = grid.energy();
  rep["residual_energy"] = residual.energy();
  rep["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string text = rep.dump(2) + "\n";
  if (!o.out.empty()) {
    write_text_file(o.out, text);
    std::printf("fit: %d component(s), residual_energy=%.6g, report=%s\n",
                int(fits.size()), residual.energy(), o.out.c_str());
  } else {
    std::fputs(text.c_str(), stdout);
  }
  if (!o.residual.empty()) write_csv(residual, o.residual);
  if (!o.recon.empty()) {
    DataGrid recon = grid;
    for (std::size_t i = 0; i < recon.values.size(); ++i)
      recon.values[i] -= residual.values[i];
    write_pgm(recon, o.recon);
  }
  return 0;
}

int do_avar(const AvarOpts& o) {
  double c = o.c;
  if (!o.kernel.empty()) {
    NoiseSpec spec;
    spec.sigma = o.sigma;
    spec.kernel = parse_kernel_string(o.kernel);
    c = noise_c(spec);
  }
  const AvarReport rep = avar(o.A, o.B, o.sigma, c, o.M, o.N);

  static const char* pnames[6] = {"A", "B", "alpha", "beta", "gamma", "delta"};
  if (!o.out.empty()) {
    json j;
    j["schema_version"] = 1;
    j["A"] = o.A;
    j["B"] = o.B;
    j["sigma"] = o.sigma;
    j["c"] = rep.c;
    j["M"] = rep.M;
    j["N"] = rep.N;
    for (int i = 0; i < 6; ++i) {
      j["per_param"][pnames[i]] = rep.per_param[i];
      for (int k = 0; k < 6; ++k) j["cov"][i][k] = rep.cov[i][k];
    }
    write_text_file(o.out, j.dump(2) + "\n");
  }
  std::printf("limiting covariance (sigma^2 * c * inverse information), "
              "A=%g B=%g sigma=%g c=%g M=%d N=%d\n",
              o.A, o.B, o.sigma, rep.c, rep.M, rep.N);
  for (int i = 0; i < 6; ++i) {
    for (int k = 0; k < 6; ++k) std::printf(" % .6e", rep.cov[i][k]);
    std::printf("\n");
  }
  std::printf("per-parameter approximate variances:\n");
  for (int i = 0; i < 6; ++i)
    std::printf("  %-6s %.2E\n", pnames[i], rep.per_param[i]);
  return 0;
}

int do_mc(const McOpts& o) {
  const json cfg = load_config(o.config);
  if (!cfg.contains("model"))
    throw std::invalid_argument("mc config needs a model section");

  FitSettings s;
  s.apply_config(cfg);
  if (!o.method_flag.empty()) s.method = o.method_flag;
  if (!o.grid_flag.empty()) s.grid = o.grid_flag;
  if (!o.stride_flag.empty()) s.stride = o.stride_flag;
  if (o.levels_flag > 0) s.levels = o.levels_flag;

  McConfig mc{model_from_json(cfg["model"]),
              cfg.contains("noise") ? noise_from_json(cfg["noise"]) : NoiseSpec{},
              o.M > 0 ? o.M : cfg.value("M", 0),
              o.N > 0 ? o.N : cfg.value("N", 0)};
  if (o.sigma >= 0.0) mc.noise.sigma = o.sigma;
  if (mc.noise.sigma > 0.0 && mc.noise.kernel.empty()) mc.noise.kernel = {{0, 0, 1.0}};

  const json jm = cfg.value("mc", json::object());
  mc.replicates = o.replicates > 0 ? o.replicates : jm.value("replicates", 200);
  mc.sequential = jm.value("sequential", true);
  mc.base_seed = o.seed_set ? o.seed : jm.value("base_seed", std::uint64_t{1});
  mc.init_at_truth = o.init_at_truth || jm.value("init_at_truth", false);
  mc.threads = o.threads > 0 ? o.threads : jm.value("threads", env_threads_default());
  mc.gridcfg = s.grid_config();
  mc.optcfg = s.opt;

  std::vector<std::string> method_names = o.methods;
  if (method_names.empty() && jm.contains("methods"))
    method_names = jm["methods"].get<std::vector<std::string>>();
  if (!method_names.empty()) {
    mc.methods.clear();
    for (const auto& name : method_names) mc.methods.push_back(method_from_name(name));
  }

  const McReport rep = run_mc(mc);

  if (!o.out.empty()) {
    write_text_file(o.out + ".csv", mc_report_to_csv(rep));
    write_text_file(o.out + ".json", mc_report_to_json(rep));
  }
  std::printf("mc: M=%d N=%d replicates=%d sigma=%g seed=%llu wall=%.1fs\n", rep.M,
              rep.N, rep.replicates, rep.sigma,
              static_cast<unsigned long long>(rep.base_seed), rep.wall_seconds);
  static const char* pnames[6] = {"A", "B", "alpha", "beta", "gamma", "delta"};
  for (const auto& table : rep.tables) {
    std::printf("method %s (failures %d):\n", method_name(table.method),
                table.failure_count);
    for (std::size_t k = 0; k < table.cells.size(); ++k) {
      std::printf("  component %zu:\n", k + 1);
      for (int i = 0; i < 6; ++i) {
        const McCell& c = table.cells[k][i];
        std::printf("    %-6s avg=% .6g bias=% .3e mse=%.3e avar=%.3e\n",
                    pnames[i], c.average, c.bias, c.mse, c.avar);
      }
    }
  }
  if (o.out.empty())
    std::printf("(pass --out PREFIX to write PREFIX.csv and PREFIX.json)\n");
  return 0;
}

int do_demo(const DemoOpts& o) {
  // Built-in showcase: one strong chirp texture on a 100x100 grid under
  // correlated moving-average noise, fitted by both methods.
  const int M = 100, N = 100;
  const ChirpComponent truth{6.0, 6.0, 2.75, 0.05, 2.5, 0.075};
  NoiseSpec noise;
  noise.sigma = std::sqrt(2.0);
  noise.kernel = {{0, 0, 1.0}, {1, 0, 0.5}, {0, 1, 0.4}, {1, 1, 0.3}};
  noise.seed = o.seed;

  const std::string dir = o.outdir.empty() ? "." : o.outdir;
  const ChirpModel model({truth});
  const DataGrid clean = synthesize(model, M, N);
  const DataGrid noisy = add_noise(clean, generate_noise(noise, M, N));
  write_pgm(clean, dir + "/true.pgm");
  write_pgm(noisy, dir + "/noisy.pgm");

  GridConfig gridcfg;  // coarse_to_fine defaults
  OptConfig optcfg;
  json rep;
  rep["schema_version"] = 1;
  rep["M"] = M;
  rep["N"] = N;
  rep["seed"] = o.seed;
  rep["truth"] = {{"A", truth.A},         {"B", truth.B},     {"alpha", truth.alpha},
                  {"beta", truth.beta},   {"gamma", truth.gamma},
                  {"delta", truth.delta}};
  std::printf("%-6s %9s %9s %9s %9s %9s %9s\n", "", "A", "B", "alpha", "beta",
              "gamma", "delta");
  std::printf("truth  %9.6f %9.6f %9.6f %9.6f %9.6f %9.6f\n", truth.A, truth.B,
              truth.alpha, truth.beta, truth.gamma, truth.delta);
  for (const Method method : {Method::lse, Method::alse}) {
    const std::vector<FitResult> fits =
        sequential_fit(noisy, 1, method, gridcfg, optcfg);
    const FitResult& fr = fits[0];
    const DataGrid recon = synthesize_component(fr.component, M, N);
    write_pgm(recon, dir + "/fit_" + method_name(method) + ".pgm");
    rep[std::string("fit_") + method_name(method)] = component_to_json(fr);
    const ChirpComponent& c = fr.component;
    std::printf("%-6s %9.6f %9.6f %9.6f %9.6f %9.6f %9.6f\n", method_name(method),
                c.A, c.B, c.alpha, c.beta, c.gamma, c.delta);
  }
  write_text_file(dir + "/demo.json", rep.dump(2) + "\n");
  std::printf("wrote true.pgm, noisy.pgm, fit_lse.pgm, fit_alse.pgm, demo.json in %s\n",
              dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2-D chirp signal estimation toolkit"};
  app.require_subcommand(1);

  SynthOpts so;
  CLI::App* synth = app.add_subcommand("synth", "synthesize a data grid (CSV, optional PGM)");
  synth->add_option("--config", so.config, "JSON config file");
  synth->add_option("--M", so.M, "grid rows");
  synth->add_option("--N", so.N, "grid columns");
  auto* optA = synth->add_option("--A", so.A, "cosine amplitude");
  synth->add_option("--B", so.B, "sine amplitude");
  synth->add_option("--alpha", so.alpha, "row frequency, in (0, pi)");
  synth->add_option("--beta", so.beta, "row frequency rate, in (0, pi)");
  synth->add_option("--gamma", so.gamma, "column frequency, in (0, pi)");
  synth->add_option("--delta", so.delta, "column frequency rate, in (0, pi)");
  synth->add_option("--sigma", so.sigma, "noise level (innovation std dev)");
  auto* synth_seed = synth->add_option("--seed", so.seed, "noise seed");
  synth->add_option("--kernel", so.kernel, "noise kernel 'j,k,a;j,k,a;...'");
  synth->add_flag("--pgm", so.pgm, "also write a PGM rendering");
  synth->add_option("--out", so.out, "output path prefix")->required();

  FitOpts fo;
  CLI::App* fit = app.add_subcommand("fit", "estimate chirp components from a CSV grid");
  fit->add_option("--in", fo.in, "input CSV grid")->required();
  fit->add_option("--config", fo.config, "JSON config file");
  fit->add_option("--method", fo.method_flag, "alse | lse");
  fit->add_option("--p", fo.p_flag, "number of components to extract");
  fit->add_option("--grid", fo.grid_flag, "initialization search: full | coarse");
  fit->add_option("--levels", fo.levels_flag, "refinement levels for coarse search");
  fit->add_option("--stride", fo.stride_flag, "grid strides 's1,s2,s3,s4'");
  fit->add_option("--max-iters", fo.settings.opt.max_iters, "optimizer iteration cap");
  fit->add_option("--xtol", fo.settings.opt.xtol, "optimizer simplex tolerance");
  fit->add_option("--ftol", fo.settings.opt.ftol, "optimizer objective tolerance");
  fit->add_option("--restarts", fo.settings.opt.restarts, "optimizer restarts");
  fit->add_option("--out", fo.out, "write the JSON report here (default: stdout)");
  fit->add_option("--residual", fo.residual, "write the residual grid CSV here");
  fit->add_option("--recon", fo.recon, "write the reconstructed-signal PGM here");

  AvarOpts ao;
  CLI::App* avar_cmd = app.add_subcommand("avar", "closed-form variance table");
  avar_cmd->add_option("--A", ao.A, "cosine amplitude")->required();
  avar_cmd->add_option("--B", ao.B, "sine amplitude")->required();
  avar_cmd->add_option("--sigma", ao.sigma, "noise level")->required();
  avar_cmd->add_option("--c", ao.c, "noise constant (sum of squared kernel coefficients)");
  avar_cmd->add_option("--kernel", ao.kernel, "derive c from kernel 'j,k,a;...'");
  avar_cmd->add_option("--M", ao.M, "grid rows")->required();
  avar_cmd->add_option("--N", ao.N, "grid columns")->required();
  avar_cmd->add_option("--out", ao.out, "write a JSON report here");

  McOpts mo;
  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo study");
  mc->add_option("--config", mo.config, "JSON config file with the model")->required();
  mc->add_option("--replicates", mo.replicates, "replicate count");
  mc->add_option("--method", mo.methods, "method (repeatable): alse | lse");
  auto* mc_seed = mc->add_option("--seed", mo.seed, "base seed");
  mc->add_option("--threads", mo.threads, "worker threads (0 = all cores)")
      ->envname("CHIRP2D_THREADS");
  mc->add_option("--M", mo.M, "grid rows override");
  mc->add_option("--N", mo.N, "grid columns override");
  mc->add_option("--sigma", mo.sigma, "noise level override");
  mc->add_option("--grid", mo.grid_flag, "initialization search: full | coarse");
  mc->add_option("--levels", mo.levels_flag, "refinement levels");
  mc->add_option("--stride", mo.stride_flag, "grid strides 's1,s2,s3,s4'");
  mc->add_flag("--init-at-truth", mo.init_at_truth,
               "start refinement from the true parameters");
  mc->add_option("--out", mo.out, "output prefix for PREFIX.csv / PREFIX.json");

  DemoOpts deo;
  CLI::App* demo = app.add_subcommand("demo", "four-image texture demo (synthesize + fit)");
  demo->add_option("--out", deo.outdir, "output directory (default: .)");
  demo->add_option("--seed", deo.seed, "noise seed");
  demo->add_option("--threads", deo.threads, "unused; accepted for symmetry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  so.have_component = optA->count() > 0;
  so.seed_set = synth_seed->count() > 0;
  mo.seed_set = mc_seed->count() > 0;

  try {
    if (synth->parsed()) return do_synth(so);
    if (fit->parsed()) return do_fit(fo);
    if (avar_cmd->parsed()) return do_avar(ao);
    if (mc->parsed()) return do_mc(mo);
    if (demo->parsed()) return do_demo(deo);
    std::fprintf(stderr, "no subcommand\n");
    return 1;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
}
