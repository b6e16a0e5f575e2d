#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wiretap/errors.hpp"
#include "wiretap/harness.hpp"
#include "wiretap/mimome.hpp"
#include "wiretap/misome.hpp"
#include "wiretap/sdof.hpp"

using nlohmann::json;
using namespace wiretap;

namespace {

constexpr int kExitSolver = 2;
constexpr int kExitInvalid = 3;

struct ChannelArgs {
  std::string path;
  std::optional<std::uint64_t> seed;
  AntennaConfig config;
};

void add_channel_options(CLI::App* cmd, ChannelArgs& a) {
  cmd->add_option("--channel", a.path, "channel JSON file");
  cmd->add_option("--seed", a.seed, "sample a Rayleigh channel with this seed");
  cmd->add_option("--na", a.config.na, "source antennas");
  cmd->add_option("--nb", a.config.nb, "receiver antennas");
  cmd->add_option("--ne", a.config.ne, "eavesdropper antennas");
  cmd->add_option("--nj", a.config.nj, "helper antennas");
}

WiretapChannel resolve_channel(const ChannelArgs& a) {
  if (!a.path.empty() && a.seed) throw InvalidInput("use either --channel or --seed");
  if (!a.path.empty()) return load_channel(a.path);
  return sample_channel(a.config, a.seed.value_or(1));
}

json covariance_json(const CMatrix& q) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    json rr = json::array(), ii = json::array();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      rr.push_back(q(i, j).real());
      ii.push_back(q(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"re", re}, {"im", im}};
}

json result_json(const SecrecyResult& r) {
  return {{"rd_bits", r.rd},
          {"re_bits", r.re},
          {"cs_bits", r.cs},
          {"qa", covariance_json(r.covariances.qa)},
          {"qj", covariance_json(r.covariances.qj)},
          {"iterations", r.diagnostics.iterations},
          {"status", r.diagnostics.status},
          {"flags", r.diagnostics.flags}};
}

int cmd_sdof(const AntennaConfig& c, bool table_check) {
  if (table_check) {
    int mismatches = 0, checked = 0;
    for (int na = 1; na <= 6; ++na)
      for (int nb = 1; nb <= 6; ++nb)
        for (int ne = 1; ne <= 6; ++ne)
          for (int nj = 1; nj <= 6; ++nj) {
            AntennaConfig k{na, nb, ne, nj};
            SdofBreakdown f = sdof_closed_form(k);
            SdofBreakdown t = sdof_table_lookup(k);
            ++checked;
            if (f.d_star != t.d_star || (f.d_star > 0) != positive_sdof_condition(k)) {
              ++mismatches;
              std::cerr << "mismatch at " << k.to_string() << ": formula " << f.d_star
                        << ", table " << t.d_star << "\n";
            }
          }
    std::cout << json{{"checked", checked}, {"mismatches", mismatches}}.dump() << "\n";
    return mismatches == 0 ? 0 : kExitSolver;
  }
  c.validate();
  SdofBreakdown b = sdof_closed_form(c);
  SdofBreakdown t = sdof_table_lookup(c);
  std::cout << json{{"config", c.to_string()},
                    {"d0", b.d0},
                    {"d1", b.d1},
                    {"s", b.s},
                    {"d2", b.d2},
                    {"d_star", b.d_star},
                    {"table_row", t.table_row},
                    {"alignment_case", to_string(alignment_case(c))}}
                   .dump(2)
            << "\n";
  return 0;
}

int cmd_capacity(const ChannelArgs& a, double snr_db, int grid) {
  WiretapChannel ch = resolve_channel(a);
  TwoLayerConfig cfg;
  cfg.grid_points = grid;
  const double power = snr_db_to_power(snr_db);
  MisomeCapacity r = misome_secrecy_capacity_report(ch, power, cfg);
  json out = result_json(r.result);
  out["tau_star"] = r.tau_star;
  out["f_tau_star"] = r.f_tau_star;
  out["eigen_ratio"] = r.eigen_ratio;
  if (ch.config.nj >= 2 && positive_sdof_condition(ch.config)) {
    MisoAlignment al = alignment_closed_form(ch, power);
    out["alignment_cs_bits"] = al.closed_form.cs_sub;
  }
  out["zf_cs_bits"] = zf_baseline(ch, power).cs;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_mimome(const ChannelArgs& a, double snr_db, double tol, int max_iters,
               const std::string& init) {
  WiretapChannel ch = resolve_channel(a);
  GaussSeidelOptions o;
  o.tol = tol;
  o.max_iters = max_iters;
  o.init = init == "isotropic" ? InitKind::kIsotropic : InitKind::kAlignment;
  GaussSeidelReport r = gauss_seidel_solve(ch, snr_db_to_power(snr_db), o);
  json out = result_json(r.result);
  out["initial_cs_bits"] = r.initial.cs;
  out["theta_trace"] = r.theta_trace;
  out["rate_trace"] = r.rate_trace;
  out["converged"] = r.converged;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const std::string& preset_name, const std::string& config_path,
              std::optional<int> trials, std::optional<std::uint64_t> seed,
              const std::string& out_path, const std::string& format) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw InvalidInput("cannot read '" + config_path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    cfg = experiment_from_json(ss.str());
  } else if (!preset_name.empty()) {
    cfg = preset(preset_name);
  } else {
    throw InvalidInput("sweep needs --preset or --config");
  }
  if (trials) cfg.trials = *trials;
  if (seed) cfg.seed = *seed;
  cfg.validate();
  auto records = run_sweep(cfg);
  OutputFormat fmt = format == "json" ? OutputFormat::kJson : OutputFormat::kCsv;
  if (out_path.empty() || out_path == "-")
    std::cout << (fmt == OutputFormat::kJson ? format_json(records) : format_csv(records));
  else
    emit_results(records, fmt, out_path);
  return 0;
}

int cmd_gsvd_check(int trials, std::uint64_t seed) {
  GsvdCheckSummary s = gsvd_property_suite(trials, seed);
  for (auto& m : s.messages) std::cerr << m << "\n";
  std::cout << json{{"trials", s.trials},
                    {"failures", s.failures},
                    {"worst_residual", s.worst_residual}}
                   .dump()
            << "\n";
  return s.failures == 0 ? 0 : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy rate tools for the helper-assisted wiretap channel"};
  app.require_subcommand(1);

  AntennaConfig sdof_cfg;
  bool table_check = false;
  auto* sdof = app.add_subcommand("sdof", "secure degrees of freedom of a configuration");
  sdof->add_option("--na", sdof_cfg.na);
  sdof->add_option("--nb", sdof_cfg.nb);
  sdof->add_option("--ne", sdof_cfg.ne);
  sdof->add_option("--nj", sdof_cfg.nj);
  sdof->add_flag("--table-check", table_check, "compare formula and table on {1..6}^4");

  ChannelArgs cap_ch;
  cap_ch.config = {3, 1, 3, 2};
  double cap_snr = 10.0;
  int grid = 200;
  auto* cap = app.add_subcommand("capacity-misome", "secrecy capacity with nb = 1");
  add_channel_options(cap, cap_ch);
  cap->add_option("--snr-db", cap_snr);
  cap->add_option("--grid", grid, "tau grid points")->check(CLI::Range(2, 100000));

  ChannelArgs mim_ch;
  mim_ch.config = {3, 3, 3, 4};
  double mim_snr = 10.0, tol = 1e-2;
  int max_iters = 100;
  std::string init = "alignment";
  auto* mim = app.add_subcommand("solve-mimome", "Gauss-Seidel secrecy rate");
  add_channel_options(mim, mim_ch);
  mim->add_option("--snr-db", mim_snr);
  mim->add_option("--tol", tol);
  mim->add_option("--max-iters", max_iters)->check(CLI::NonNegativeNumber);
  mim->add_option("--init", init)->check(CLI::IsMember({"alignment", "isotropic"}));

  std::string preset_name, config_path, out_path, format = "csv";
  std::optional<int> trials;
  std::optional<std::uint64_t> sweep_seed;
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep");
  auto* popt = sweep->add_option("--preset", preset_name)
                   ->check(CLI::IsMember(preset_names()));
  sweep->add_option("--config", config_path, "experiment JSON")->excludes(popt);
  sweep->add_option("--trials", trials)->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_seed);
  sweep->add_option("--out", out_path, "output file (stdout if omitted)");
  sweep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  int gsvd_trials = 200;
  std::uint64_t gsvd_seed = 1;
  auto* gsvd = app.add_subcommand("gsvd-check", "randomized GSVD property suite");
  gsvd->add_option("--trials", gsvd_trials)->check(CLI::PositiveNumber);
  gsvd->add_option("--seed", gsvd_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*sdof) return cmd_sdof(sdof_cfg, table_check);
    if (*cap) return cmd_capacity(cap_ch, cap_snr, grid);
    if (*mim) return cmd_mimome(mim_ch, mim_snr, tol, max_iters, init);
    if (*sweep) return cmd_sweep(preset_name, config_path, trials, sweep_seed, out_path, format);
    if (*gsvd) return cmd_gsvd_check(gsvd_trials, gsvd_seed);
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
