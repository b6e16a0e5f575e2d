#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wiretap/channel.hpp"

namespace wiretap {

enum class Scheme { kOptimalMisome, kAlignment, kZf, kGaussSeidel, kSdofTheory };

std::string to_string(Scheme s);
/// Accepts the hyphenated names printed by to_string.
Scheme parse_scheme(const std::string& name);

/// Solver knobs that sweeps may override.
struct SolverOverrides {
  int misome_grid_points = 200;
  double gs_tol = 1e-2;
  int gs_max_iters = 100;
};

struct ExperimentConfig {
  /// One entry per antenna configuration; most presets use a single one.
  std::vector<AntennaConfig> configs;
  std::vector<double> snr_db_list;
  int trials = 50;
  std::uint64_t seed = 1;
  std::vector<Scheme> schemes;
  SolverOverrides overrides;

  void validate() const;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  std::string scheme;
  double cs_bits = 0.0;
  int iterations = 0;
  double wall_time_ms = 0.0;
  /// Joined with ';' in CSV output.
  std::vector<std::string> flags;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// P = 10^(snr_db / 10).
double snr_db_to_power(double snr_db);

/// Seed of trial `index` under `master`; independent of the schemes or SNRs.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

struct SchemeOutcome {
  double cs_bits = 0.0;
  int iterations = 0;
  std::vector<std::string> flags;
};

/// Runs one scheme on one channel. For sdof-theory cs_bits holds d*.
/// Solver exceptions propagate.
SchemeOutcome run_scheme(Scheme scheme, const WiretapChannel& ch, double power,
                         const SolverOverrides& overrides = {});

/// Records ordered by (config, trial, snr, scheme). Sweeps over several
/// configs tag each record with a "cfg=NaxNbxNexNj" flag. Parallelism is
/// capped by SECRECY_OPT_THREADS.
std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg);

/// (Cs(P2) - Cs(P1)) / (log2 P2 - log2 P1).
double empirical_sdof_slope(const WiretapChannel& ch, Scheme scheme,
                            double p1_db = 40.0, double p2_db = 50.0,
                            const SolverOverrides& overrides = {});

/// Named figure presets: fig2 .. fig7.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// {"configs": [[na,nb,ne,nj], ...], "snr_db": [...], "trials": n,
///  "seed": s, "schemes": [...], "grid_points": g, "gs_tol": t,
///  "gs_max_iters": m}
ExperimentConfig experiment_from_json(const std::string& text);

/// Outcome of the randomized GSVD property suite.
struct GsvdCheckSummary {
  int trials = 0;
  int failures = 0;
  double worst_residual = 0.0;
  std::vector<std::string> messages;
};

/// Random (N, M, K) in [1, 6]^3 with random inner ranks; checks the
/// factorization residuals and unitarity against `tol` and the block sizes
/// against the rank-arithmetic oracle.
GsvdCheckSummary gsvd_property_suite(int trials, std::uint64_t seed,
                                     double tol = 1e-8);

enum class OutputFormat { kCsv, kJson };

std::string format_csv(const std::vector<TrialRecord>& records);
std::string format_json(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> parse_csv(const std::string& text);
std::vector<TrialRecord> parse_json(const std::string& text);

/// Writes to `path`; throws std::runtime_error naming the path on I/O failure.
void emit_results(const std::vector<TrialRecord>& records, OutputFormat format,
                  const std::string& path);

}  // namespace wiretap
