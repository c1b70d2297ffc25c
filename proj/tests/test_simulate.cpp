// Monte Carlo harness: aggregation, determinism, and statistical sanity.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "chirp2d/simulate.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

using namespace chirp2d;

namespace {
const std::array<double, 6> kTruth{2.0, 3.0, 1.5, 0.5, 2.5, 0.75};

ChirpModel one_comp_model() { return ChirpModel({{2.0, 3.0, 1.5, 0.5, 2.5, 0.75}}); }

McConfig make_cfg(int M, int N, double sigma, int replicates) {
  McConfig cfg{one_comp_model()};
  cfg.M = M;
  cfg.N = N;
  cfg.replicates = replicates;
  cfg.noise.sigma = sigma;
  if (sigma > 0.0) cfg.noise.kernel = {{0, 0, 1.0}};
  return cfg;
}

// Cell-scaled absolute bias: one extended-grid cell ~ pi in these units.
double scaled_bias(const McTable& t, int comp, int i, int M, int N) {
  const double scale[6] = {1.0,
                           1.0,
                           double(M),
                           double(M) * M,
                           double(N),
                           double(N) * N};
  return std::abs(t.cells[comp][i].bias) * scale[i];
}
}  // namespace

TEST_CASE("summaries of exact and symmetric estimate sets") {
  auto s = summarize({kTruth}, kTruth);
  for (int i = 0; i < 6; ++i) {
    CHECK(s[i].average == kTruth[i]);
    CHECK(s[i].bias == 0.0);
    CHECK(s[i].mse == 0.0);
  }
  std::array<double, 6> up{}, dn{};
  for (int i = 0; i < 6; ++i) {
    up[i] = kTruth[i] + 1.0;
    dn[i] = kTruth[i] - 1.0;
  }
  s = summarize({up, dn}, kTruth);
  for (int i = 0; i < 6; ++i) {
    CHECK(s[i].bias == 0.0);
    CHECK(s[i].mse == 1.0);
  }
  CHECK_THROWS_AS(summarize({}, kTruth), std::invalid_argument);
}

TEST_CASE("summary MSE estimates the deviation variance") {
  // estimates = truth + scale * (sum of 12 uniforms - 6): variance scale^2
  oracle::TestRng rng(5150);
  const double scale = 0.03;
  std::vector<std::array<double, 6>> est;
  for (int r = 0; r < 1000; ++r) {
    std::array<double, 6> e{};
    for (int i = 0; i < 6; ++i) {
      double z = -6.0;
      for (int u = 0; u < 12; ++u) z += rng.next_unit();
      e[i] = kTruth[i] + scale * z;
    }
    est.push_back(e);
  }
  const auto s = summarize(est, kTruth);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(s[i].mse - scale * scale) < 0.15 * scale * scale);
    CHECK(std::abs(s[i].bias) < 5.0 * scale / std::sqrt(1000.0));
  }
}

TEST_CASE("noiseless single-replicate study pins both methods") {
  McConfig cfg = make_cfg(50, 50, 0.0, 1);
  cfg.methods = {Method::lse, Method::alse};
  const McReport rep = run_mc(cfg);
  REQUIRE(rep.tables.size() == 2);
  CHECK(rep.M == 50);
  CHECK(rep.sigma == 0.0);
  CHECK(rep.truth.size() == 1);
  CHECK(rep.truth[0][2] == 1.5);

  const McTable& lse = rep.tables[0];
  CHECK(lse.method == Method::lse);
  CHECK(lse.failure_count == 0);
  for (int i = 0; i < 6; ++i) {
    // rate-exact recovery from clean data
    CHECK(scaled_bias(lse, 0, i, 50, 50) < 1e-4);
    // with a single replicate the MSE is exactly the squared bias
    const McCell& c = lse.cells[0][i];
    CHECK(std::abs(c.mse - c.bias * c.bias) <=
          1e-15 * (c.mse + c.bias * c.bias + 1e-300));
    CHECK(c.avar == 0.0);  // sigma = 0
  }

  const McTable& alse = rep.tables[1];
  CHECK(alse.method == Method::alse);
  CHECK(alse.failure_count == 0);
  // The periodogram maximizer carries a deterministic finite-sample ridge
  // offset on clean data: clearly nonzero but well under one grid cell.
  double maxdrift = 0.0;
  for (int i = 2; i < 6; ++i)
    maxdrift = std::max(maxdrift, scaled_bias(alse, 0, i, 50, 50));
  CHECK(maxdrift > 1e-3);
  CHECK(maxdrift < 0.5);
}

TEST_CASE("study results are identical for any thread count") {
  McConfig cfg = make_cfg(25, 25, 0.5, 8);
  cfg.base_seed = 400;
  McConfig cfg1 = cfg;
  cfg1.threads = 1;
  McConfig cfg4 = cfg;
  cfg4.threads = 4;
  const McReport r1 = run_mc(cfg1);
  const McReport r4 = run_mc(cfg4);
  CHECK(mc_report_to_csv(r1) == mc_report_to_csv(r4));
  REQUIRE(r1.tables.size() == r4.tables.size());
  for (std::size_t mi = 0; mi < r1.tables.size(); ++mi)
    CHECK(r1.tables[mi].failure_count == r4.tables[mi].failure_count);
}

TEST_CASE("error grows with the noise level on matched seeds") {
  McConfig lo = make_cfg(25, 25, 0.1, 20);
  lo.base_seed = 7000;
  McConfig hi = make_cfg(25, 25, 1.0, 20);
  hi.base_seed = 7000;
  const McReport rlo = run_mc(lo);
  const McReport rhi = run_mc(hi);
  for (std::size_t mi = 0; mi < rlo.tables.size(); ++mi) {
    CHECK(rhi.tables[mi].cells[0][2].mse > rlo.tables[mi].cells[0][2].mse);
    CHECK(rhi.tables[mi].cells[0][4].mse > rlo.tables[mi].cells[0][4].mse);
  }
}

TEST_CASE("error shrinks as the grid grows") {
  double prev = 0.0;
  bool first = true;
  for (int M : {25, 50, 100}) {
    McConfig cfg = make_cfg(M, M, 0.5, 30);
    cfg.methods = {Method::lse};
    cfg.base_seed = 31000;
    const McReport rep = run_mc(cfg);
    const double mse_alpha = rep.tables[0].cells[0][2].mse;
    if (!first) CHECK(mse_alpha < prev);
    first = false;
    prev = mse_alpha;
  }
}

TEST_CASE("observed MSE tracks the closed-form variance column") {
  McConfig cfg = make_cfg(50, 50, 0.5, 60);
  cfg.methods = {Method::lse};
  cfg.base_seed = 88000;
  const McReport rep = run_mc(cfg);
  const McTable& t = rep.tables[0];
  CHECK(t.failure_count == 0);
  for (int i = 2; i < 6; ++i) {
    const double ratio = t.cells[0][i].mse / t.cells[0][i].avar;
    CHECK(ratio > 1.0 / 3.0);
    CHECK(ratio < 3.0);
  }
  // the variance column is the direct plug-in value at the truth
  const AvarReport av = avar(2.0, 3.0, 0.5, 1.0, 50, 50);
  CHECK(t.cells[0][2].avar == av.per_param[2]);
}

TEST_CASE("study fails loudly when every replicate fails") {
  McConfig cfg = make_cfg(16, 16, 0.0, 2);
  cfg.optcfg.max_iters = 1;  // cannot converge
  CHECK_THROWS_AS(run_mc(cfg), std::runtime_error);
}

TEST_CASE("study configuration validation") {
  McConfig cfg = make_cfg(16, 16, 0.1, 0);
  CHECK_THROWS_AS(run_mc(cfg), std::invalid_argument);  // replicates < 1
  cfg = make_cfg(16, 16, 0.1, 2);
  cfg.methods.clear();
  CHECK_THROWS_AS(run_mc(cfg), std::invalid_argument);
  cfg = make_cfg(16, 16, 0.1, 2);
  cfg.threads = -1;
  CHECK_THROWS_AS(run_mc(cfg), std::invalid_argument);

  const ChirpComponent c1{5.0, 4.0, 2.1, 0.1, 1.25, 0.25};
  const ChirpComponent c2{3.0, 2.0, 1.5, 0.5, 1.75, 0.75};
  McConfig two{ChirpModel({c1, c2})};
  two.M = two.N = 16;
  two.replicates = 1;
  two.sequential = false;  // illegal with two components
  CHECK_THROWS_AS(run_mc(two), std::invalid_argument);
}

TEST_CASE("report serialization formats") {
  McConfig cfg = make_cfg(16, 16, 0.3, 2);
  cfg.methods = {Method::lse};
  cfg.base_seed = 12;
  const McReport rep = run_mc(cfg);

  const std::string csv = mc_report_to_csv(rep);
  CHECK(csv.rfind("method,component,stat,A,B,alpha,beta,gamma,delta\n", 0) == 0);
  CHECK(csv.find("\nlse,1,Avg,") != std::string::npos);
  CHECK(csv.find("\nlse,1,AVar,") != std::string::npos);

  const auto j = nlohmann::json::parse(mc_report_to_json(rep));
  CHECK(j["schema_version"] == 1);
  CHECK(j["M"] == 16);
  CHECK(j["replicates"] == 2);
  CHECK(j["sigma"] == 0.3);
  CHECK(j["truth"].is_array());
  REQUIRE(j["tables"].size() == 1);
  CHECK(j["tables"][0]["method"] == "lse");
  CHECK(j["tables"][0]["failure_count"] == 0);
  CHECK(j["tables"][0]["components"].size() == 1);
}
