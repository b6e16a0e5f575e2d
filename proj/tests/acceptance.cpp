#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "wiretap/channel.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/harness.hpp"
#include "wiretap/linalg.hpp"
#include "wiretap/mimome.hpp"
#include "wiretap/misome.hpp"
#include "wiretap/sdof.hpp"

using namespace wiretap;
using wiretap::testing::gram_rank;
using wiretap::testing::random_matrix;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // <= 0 when no runtime bound applies
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<AntennaConfig> all_configs() {
  std::vector<AntennaConfig> out;
  for (int na = 1; na <= 6; ++na)
    for (int nb = 1; nb <= 6; ++nb)
      for (int ne = 1; ne <= 6; ++ne)
        for (int nj = 1; nj <= 6; ++nj) out.push_back({na, nb, ne, nj});
  return out;
}

// Positivity conditions restated independently of the library.
bool positive_condition(const AntennaConfig& c) {
  return c.nb == 1 ? c.ne < c.na + c.nj - 1 : c.ne < c.na + c.nj;
}

double eigen_ratio(const CMatrix& q) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (q + q.adjoint()), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  return ev.size() < 2 || top <= 0.0 ? 0.0 : std::max(ev(ev.size() - 2), 0.0) / top;
}

Outcome gsvd_correctness() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> dim(1, 6);
  int failures = 0;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = dim(rng), m = dim(rng), k = dim(rng);
    CMatrix h = random_matrix(rng, n, m), g = random_matrix(rng, n, k);
    if (t % 3 == 1) {
      const int rk = std::uniform_int_distribution<int>(1, std::min(n, m))(rng);
      h = random_matrix(rng, n, rk) * random_matrix(rng, rk, m);
    }
    if (t % 5 == 2) g = h * random_matrix(rng, m, k);
    const GsvdResult r = gsvd_transform(h, g);
    const double e1 = (h * r.psi1 - r.x * r.d1.transpose()).norm() / std::max(h.norm(), 1.0);
    const double e2 = (g * r.psi2 - r.x * r.d2.transpose()).norm() / std::max(g.norm(), 1.0);
    const double e3 = (r.d1.transpose() * r.d1 + r.d2.transpose() * r.d2 -
                       Eigen::MatrixXd::Identity(r.k, r.k)).norm();
    const double e4 = (r.psi1.adjoint() * r.psi1 - CMatrix::Identity(m, m)).norm();
    const double e5 = (r.psi2.adjoint() * r.psi2 - CMatrix::Identity(k, k)).norm();
    const double e = std::max({e1, e2, e3, e4, e5});
    worst = std::max(worst, e);
    const int kk = gram_rank(hcat(h, g)), rh = gram_rank(h), rg = gram_rank(g);
    const bool dims = r.k == kk && r.p == kk - rh && r.r == kk - rg && r.s == rh + rg - kk;
    if (!(e <= 1e-8) || !dims) ++failures;
  }
  return {failures == 0, std::to_string(failures) + " failures, worst residual " +
                             fmt("%.2e", worst)};
}

Outcome sdof_consistency() {
  int mismatches = 0, positive = 0;
  for (const auto& c : all_configs()) {
    const int d = sdof_closed_form(c).d_star;
    if (d != sdof_table_lookup(c).d_star) ++mismatches;
    if ((d > 0) != positive_condition(c) || (d > 0) != positive_sdof_condition(c)) ++mismatches;
    positive += d > 0;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 1296 configs, " +
                               std::to_string(positive) + " with d* > 0"};
}

Outcome alignment_validity() {
  int checked = 0, failures = 0;
  std::string first;
  for (const auto& c : all_configs()) {
    const int d = sdof_closed_form(c).d_star;
    if (d == 0) continue;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ++checked;
      const WiretapChannel ch = sample_channel(c, 1000 + seed);
      bool ok = false;
      try {
        const PrecoderPair p = alignment_precoders(ch);
        ok = verify_alignment(ch, p, 1e-8).ok() && gram_rank(ch.h1 * p.v) == d;
      } catch (const std::exception&) {
        ok = false;
      }
      if (!ok && failures++ == 0) first = c.to_string() + " seed " + std::to_string(seed);
    }
  }
  std::string detail = std::to_string(failures) + " failures over " + std::to_string(checked) +
                       " channels";
  if (failures) detail += ", first " + first;
  return {failures == 0, detail};
}

Outcome empirical_sdof() {
  struct Case {
    AntennaConfig cfg;
    std::vector<Scheme> schemes;
    double target;
    double tol;
  };
  const std::vector<Case> cases = {
      {{3, 1, 3, 2}, {Scheme::kAlignment, Scheme::kOptimalMisome}, 1.0, 0.15},
      {{3, 3, 3, 4}, {Scheme::kAlignment}, 2.0, 0.2},
      {{1, 1, 2, 2}, {Scheme::kAlignment, Scheme::kOptimalMisome}, 0.0, 0.1},
  };
  Outcome out;
  for (const auto& cs : cases) {
    ExperimentConfig e;
    e.configs = {cs.cfg};
    e.snr_db_list = {40, 50};
    e.trials = 20;
    e.seed = 5;
    e.schemes = cs.schemes;
    std::map<std::string, std::map<double, double>> mean;
    int failed = 0;
    for (const auto& r : run_sweep(e)) {
      mean[r.scheme][r.snr_db] += r.cs_bits / e.trials;
      for (const auto& f : r.flags) failed += f.rfind("failed:", 0) == 0;
    }
    for (auto& [scheme, m] : mean) {
      const double slope = (m[50] - m[40]) / std::log2(10.0);
      const bool ok = std::abs(slope - cs.target) <= cs.tol && failed == 0;
      out.pass = out.pass && ok;
      if (!out.detail.empty()) out.detail += "; ";
      out.detail += cs.cfg.to_string() + " " + scheme + " " + fmt("%.3f", slope);
    }
    if (failed) out.detail += " (" + std::to_string(failed) + " failed trials)";
  }
  return out;
}

double scalar_grid_oracle(const WiretapChannel& ch, double power) {
  const double h1 = std::norm(ch.h1(0, 0)), g1 = std::norm(ch.g1(0, 0));
  const double g2 = std::norm(ch.g2(0, 0)), h2 = std::norm(ch.h2(0, 0));
  double best = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double qa = power * i / 399.0;
    for (int j = 0; j < 400; ++j) {
      const double qj = (power - qa) * j / 399.0;
      const double rd = std::log2(1.0 + h1 * qa / (1.0 + g2 * qj));
      const double re = std::log2(1.0 + g1 * qa / (1.0 + h2 * qj));
      best = std::max(best, rd - re);
    }
  }
  return best;
}

Outcome misome_vs_oracle() {
  double worst = 0.0;
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const WiretapChannel ch = sample_channel({1, 1, 1, 1}, 300 + seed);
    for (double power : {1.0, 10.0}) {
      const double solver = misome_secrecy_capacity(ch, power).cs;
      const double oracle = scalar_grid_oracle(ch, power);
      const double err = std::abs(solver - oracle);
      worst = std::max(worst, err);
      failures += !(err <= 2e-2);
    }
  }
  return {failures == 0, std::to_string(failures) + " of 40 outside 2e-2, worst gap " +
                             fmt("%.2e", worst) + " bits"};
}

Outcome rank_one_recovery() {
  double worst = 0.0;
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const WiretapChannel ch = sample_channel({3, 1, 3, 2}, 500 + seed);
    const SecrecyResult r = misome_secrecy_capacity(ch, snr_db_to_power(10.0));
    const double ratio = eigen_ratio(r.covariances.qa);
    worst = std::max(worst, ratio);
    failures += !(ratio <= 1e-5);
  }
  return {failures == 0, std::to_string(failures) + " of 50 above 1e-5, worst ratio " +
                             fmt("%.2e", worst)};
}

Outcome closed_form_vs_grid() {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> gain(0.01, 5.0), pw(0.5, 50.0);
  int done = 0, arg_fail = 0, val_fail = 0;
  double worst_arg = 0.0, worst_val = 0.0;
  while (done < 1000) {
    const double a = gain(rng), b = gain(rng), c = gain(rng), p = pw(rng);
    if (std::abs(b - c) < 1e-3 * std::max(b, c)) continue;
    ++done;
    const AlignmentClosedForm f = solve_alignment_power(a, b, c, p);
    double gx = 0.0, gv = -1.0;
    const long n = static_cast<long>(std::floor(p / 1e-4));
    for (long i = 0; i <= n + 1; ++i) {
      const double x = std::min(p, i * 1e-4);
      const double v = (1 + a * x) * (1 + c * (p - x)) / (1 + c * p + (b - c) * x);
      if (v > gv) {
        gv = v;
        gx = x;
      }
    }
    const double de = std::abs(f.eta_max - gv) / gv, dx = std::abs(f.x_star - gx);
    worst_arg = std::max(worst_arg, dx);
    worst_val = std::max(worst_val, de);
    arg_fail += !(dx <= 1e-3);
    val_fail += !(de <= 1e-6);
  }
  return {arg_fail == 0 && val_fail == 0,
          std::to_string(arg_fail) + " argument and " + std::to_string(val_fail) +
              " value misses, worst |dx| " + fmt("%.2e", worst_arg) + ", worst rel " +
              fmt("%.2e", worst_val)};
}

Outcome fig2_ordering() {
  const ExperimentConfig e = preset("fig2");
  std::map<double, std::map<std::string, double>> mean;
  int failed = 0;
  for (const auto& r : run_sweep(e)) {
    mean[r.snr_db][r.scheme] += r.cs_bits / e.trials;
    for (const auto& f : r.flags) failed += f.rfind("failed:", 0) == 0;
  }
  bool ok = failed == 0;
  std::string bad;
  for (auto& [snr, m] : mean) {
    const double opt = m["optimal-misome"], al = m["alignment"], zf = m["zf"];
    if (!(opt >= al && al >= 0.0 && opt >= zf)) {
      ok = false;
      bad += " " + fmt("%g", snr) + "dB";
    }
  }
  const double zf_rise = mean[30]["zf"] - mean[20]["zf"];
  const double opt_rise = mean[30]["optimal-misome"] - mean[20]["optimal-misome"];
  ok = ok && zf_rise < 0.5 * opt_rise;
  std::string detail = "20->30 dB rise zf " + fmt("%.3f", zf_rise) + " vs optimal " +
                       fmt("%.3f", opt_rise) + ", at 30 dB optimal " +
                       fmt("%.3f", mean[30]["optimal-misome"]) + " alignment " +
                       fmt("%.3f", mean[30]["alignment"]) + " zf " + fmt("%.3f", mean[30]["zf"]);
  if (!bad.empty()) detail += ", ordering violated at" + bad;
  if (failed) detail += ", " + std::to_string(failed) + " failed trials";
  return {ok, detail};
}

Outcome gauss_seidel_behaviour() {
  const double power = snr_db_to_power(10.0);
  int monotone_fail = 0, bridge_fail = 0, converged = 0, start_fail = 0;
  double worst_step = 0.0, worst_bridge = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const WiretapChannel ch = sample_channel({3, 3, 3, 4}, 700 + seed);
    const GaussSeidelReport rep = gauss_seidel_solve(ch, power);
    bool mono = true;
    for (size_t i = 1; i < rep.theta_trace.size(); ++i) {
      const double step = rep.theta_trace[i] - rep.theta_trace[i - 1];
      worst_step = std::min(worst_step, step);
      mono = mono && step >= -1e-9;
    }
    monotone_fail += !mono;
    bool bridge = !rep.bridge_gaps.empty();
    for (double g : rep.bridge_gaps) {
      worst_bridge = std::max(worst_bridge, g);
      bridge = bridge && g <= 1e-8;
    }
    bridge_fail += !bridge;
    converged += rep.converged && rep.iterations <= 100;
    const CovariancePair start =
        equal_power_covariances(alignment_precoders(ch), power);
    start_fail += !(rep.result.cs >= secrecy_rate(ch, start) - 1e-6);
  }
  const bool ok = monotone_fail == 0 && bridge_fail == 0 && converged >= 48 && start_fail == 0;
  return {ok, std::to_string(converged) + "/50 converged, worst theta step " +
                  fmt("%.1e", worst_step) + ", worst bridge gap " + fmt("%.1e", worst_bridge) +
                  ", " + std::to_string(start_fail) + " below the alignment start"};
}

std::string csv_without_timing(const std::vector<TrialRecord>& records) {
  std::istringstream in(format_csv(records));
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (!line.empty() && line.back() == ',') cols.emplace_back();
    if (cols.size() > 5) cols.erase(cols.begin() + 5);
    for (size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += '\n';
  }
  return out;
}

Outcome determinism() {
  ExperimentConfig a = preset("fig2");
  a.trials = 3;
  ExperimentConfig b = preset("fig3");
  b.trials = 3;
  b.snr_db_list = {0, 10, 20};
  bool ok = true;
  size_t rows = 0;
  for (const ExperimentConfig& e : {a, b}) {
    setenv("SECRECY_OPT_THREADS", "1", 1);
    const std::string first = csv_without_timing(run_sweep(e));
    setenv("SECRECY_OPT_THREADS", "4", 1);
    const std::string second = csv_without_timing(run_sweep(e));
    ok = ok && first == second;
    rows += std::count(first.begin(), first.end(), '\n') - 1;
  }
  unsetenv("SECRECY_OPT_THREADS");
  return {ok, std::to_string(rows) + " rows compared across repeated sweeps"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "gsvd-correctness", 5.0, gsvd_correctness},
      {2, "sdof-consistency", 1.0, sdof_consistency},
      {3, "alignment-validity", 60.0, alignment_validity},
      {4, "empirical-sdof", 300.0, empirical_sdof},
      {5, "misome-vs-grid-oracle", 600.0, misome_vs_oracle},
      {6, "rank-one-recovery", 0.0, rank_one_recovery},
      {7, "closed-form-vs-grid", 0.0, closed_form_vs_grid},
      {8, "fig2-ordering", 0.0, fig2_ordering},
      {9, "gauss-seidel", 0.0, gauss_seidel_behaviour},
      {10, "determinism", 0.0, determinism},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += ", over the " + fmt("%g", c.budget_s) + " s budget";
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
