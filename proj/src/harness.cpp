#include "wiretap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "wiretap/errors.hpp"
#include "wiretap/mimome.hpp"
#include "wiretap/misome.hpp"
#include "wiretap/sdof.hpp"

namespace wiretap {

using nlohmann::json;

namespace {

const std::vector<std::pair<Scheme, std::string>>& scheme_names() {
  static const std::vector<std::pair<Scheme, std::string>> names = {
      {Scheme::kOptimalMisome, "optimal-misome"},
      {Scheme::kAlignment, "alignment"},
      {Scheme::kZf, "zf"},
      {Scheme::kGaussSeidel, "gauss-seidel"},
      {Scheme::kSdofTheory, "sdof-theory"},
  };
  return names;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ';';
    out += flags[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string config_tag(const AntennaConfig& c) {
  return "cfg=" + std::to_string(c.na) + "x" + std::to_string(c.nb) + "x" +
         std::to_string(c.ne) + "x" + std::to_string(c.nj);
}

unsigned thread_budget(std::size_t work) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SECRECY_OPT_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) n = std::min<unsigned>(n, unsigned(v));
  }
  return unsigned(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

const char* failure_kind(const std::exception& e) {
  if (dynamic_cast<const InvalidInput*>(&e)) return "failed:invalid-input";
  if (dynamic_cast<const DegenerateChannel*>(&e)) return "failed:degenerate-channel";
  if (dynamic_cast<const Infeasible*>(&e)) return "failed:infeasible";
  if (dynamic_cast<const SolverFailure*>(&e)) return "failed:solver";
  return "failed:other";
}

}  // namespace

std::string to_string(Scheme s) {
  for (auto& [k, v] : scheme_names())
    if (k == s) return v;
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  for (auto& [k, v] : scheme_names())
    if (v == name) return k;
  throw InvalidInput("unknown scheme '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (configs.empty()) throw InvalidInput("experiment needs at least one antenna config");
  for (auto& c : configs) c.validate();
  if (snr_db_list.empty()) throw InvalidInput("SNR list must be non-empty");
  for (double s : snr_db_list)
    if (!std::isfinite(s)) throw InvalidInput("SNR values must be finite");
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  if (schemes.empty()) throw InvalidInput("at least one scheme is required");
  if (overrides.misome_grid_points < 2) throw InvalidInput("grid_points must be at least 2");
  if (overrides.gs_max_iters < 0) throw InvalidInput("gs_max_iters must be nonnegative");
}

double snr_db_to_power(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 applied to a counter offset from the master seed.
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SchemeOutcome run_scheme(Scheme scheme, const WiretapChannel& ch, double power,
                         const SolverOverrides& overrides) {
  const AntennaConfig& c = ch.config;
  SchemeOutcome out;
  switch (scheme) {
    case Scheme::kSdofTheory:
      out.cs_bits = sdof_closed_form(c).d_star;
      break;
    case Scheme::kOptimalMisome: {
      TwoLayerConfig tl;
      tl.grid_points = overrides.misome_grid_points;
      MisomeCapacity r = misome_secrecy_capacity_report(ch, power, tl);
      out.cs_bits = r.result.cs;
      out.iterations = r.result.diagnostics.iterations;
      out.flags = r.result.diagnostics.flags;
      break;
    }
    case Scheme::kAlignment: {
      if (!positive_sdof_condition(c)) {
        out.flags.push_back("zero-sdof");
        break;
      }
      if (c.nb == 1 && c.nj >= 2) {
        MisoAlignment a = alignment_closed_form(ch, power);
        out.cs_bits = a.closed_form.cs_sub;
        if (a.closed_form.grid_fallback) out.flags.push_back("grid-fallback");
      } else {
        PrecoderPair pair = alignment_precoders(ch);
        out.cs_bits = secrecy_rate(ch, equal_power_covariances(pair, power));
      }
      break;
    }
    case Scheme::kZf: {
      SecrecyResult r = zf_baseline(ch, power);
      out.cs_bits = r.cs;
      out.iterations = r.diagnostics.iterations;
      out.flags = r.diagnostics.flags;
      break;
    }
    case Scheme::kGaussSeidel: {
      GaussSeidelOptions o;
      o.tol = overrides.gs_tol;
      o.max_iters = overrides.gs_max_iters;
      GaussSeidelReport r = gauss_seidel_solve(ch, power, o);
      out.cs_bits = r.result.cs;
      out.iterations = r.iterations;
      out.flags = r.result.diagnostics.flags;
      if (r.result.diagnostics.status != "ok") out.flags.push_back(r.result.diagnostics.status);
      break;
    }
  }
  out.cs_bits = std::max(out.cs_bits, 0.0);
  return out;
}

std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t nconf = cfg.configs.size();
  const std::size_t ntrial = std::size_t(cfg.trials);
  const std::size_t per_item = cfg.snr_db_list.size() * cfg.schemes.size();
  const bool tag = nconf > 1;
  std::vector<TrialRecord> records(nconf * ntrial * per_item);

  auto work = [&](std::size_t item) {
    const std::size_t ci = item / ntrial, ti = item % ntrial;
    const AntennaConfig& conf = cfg.configs[ci];
    const std::uint64_t seed = trial_seed(cfg.seed, ti);
    WiretapChannel ch = sample_channel(conf, seed);
    std::size_t slot = item * per_item;
    for (double snr : cfg.snr_db_list) {
      const double power = snr_db_to_power(snr);
      for (Scheme s : cfg.schemes) {
        TrialRecord& r = records[slot++];
        r.seed = seed;
        r.snr_db = snr;
        r.scheme = to_string(s);
        auto t0 = std::chrono::steady_clock::now();
        try {
          SchemeOutcome o = run_scheme(s, ch, power, cfg.overrides);
          r.cs_bits = o.cs_bits;
          r.iterations = o.iterations;
          r.flags = std::move(o.flags);
        } catch (const std::exception& e) {
          r.cs_bits = 0.0;
          r.flags = {failure_kind(e)};
        }
        auto t1 = std::chrono::steady_clock::now();
        r.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (tag) r.flags.insert(r.flags.begin(), config_tag(conf));
      }
    }
  };

  const std::size_t items = nconf * ntrial;
  const unsigned nthreads = thread_budget(items);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < items; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < items; i = next++) work(i);
      });
    for (auto& th : pool) th.join();
  }
  return records;
}

double empirical_sdof_slope(const WiretapChannel& ch, Scheme scheme, double p1_db,
                            double p2_db, const SolverOverrides& overrides) {
  if (!(p2_db > p1_db)) throw InvalidInput("p2_db must exceed p1_db");
  const double p1 = snr_db_to_power(p1_db), p2 = snr_db_to_power(p2_db);
  double c1 = run_scheme(scheme, ch, p1, overrides).cs_bits;
  double c2 = run_scheme(scheme, ch, p2, overrides).cs_bits;
  return (c2 - c1) / (std::log2(p2) - std::log2(p1));
}

std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig e;
  e.trials = 50;
  e.seed = 1;
  const std::vector<double> snr_0_30 = {0, 5, 10, 15, 20, 25, 30};
  if (name == "fig2") {
    e.configs = {{3, 1, 3, 2}};
    e.snr_db_list = snr_0_30;
    e.schemes = {Scheme::kOptimalMisome, Scheme::kAlignment, Scheme::kZf};
  } else if (name == "fig3") {
    e.configs = {{3, 3, 3, 4}};
    e.snr_db_list = snr_0_30;
    e.schemes = {Scheme::kAlignment, Scheme::kGaussSeidel};
  } else if (name == "fig4") {
    e.configs = {{3, 3, 3, 4}};
    e.snr_db_list = {0, 10, 20};
    e.schemes = {Scheme::kGaussSeidel};
  } else if (name == "fig5") {
    for (int na = 1; na <= 8; ++na) e.configs.push_back({na, 3, 4, 3});
    e.snr_db_list = {40, 50};
    e.schemes = {Scheme::kSdofTheory, Scheme::kAlignment};
  } else if (name == "fig6" || name == "fig7") {
    const int nj = name == "fig6" ? 2 : 4;
    for (int nb = 1; nb <= 4; ++nb)
      for (int na = 1; na <= 8; ++na) e.configs.push_back({na, nb, 4, nj});
    e.snr_db_list = {50};
    e.schemes = {Scheme::kSdofTheory};
    e.trials = 1;
  } else {
    throw InvalidInput("unknown preset '" + name + "'");
  }
  return e;
}

ExperimentConfig experiment_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw InvalidInput(std::string("bad experiment JSON: ") + ex.what());
  }
  ExperimentConfig e;
  try {
    if (j.contains("preset")) e = preset(j.at("preset").get<std::string>());
    if (j.contains("configs")) {
      e.configs.clear();
      for (auto& c : j.at("configs")) {
        auto v = c.get<std::vector<int>>();
        if (v.size() != 4) throw InvalidInput("each config needs four antenna counts");
        e.configs.push_back({v[0], v[1], v[2], v[3]});
      }
    }
    if (j.contains("snr_db")) e.snr_db_list = j.at("snr_db").get<std::vector<double>>();
    if (j.contains("trials")) e.trials = j.at("trials").get<int>();
    if (j.contains("seed")) e.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("schemes")) {
      e.schemes.clear();
      for (auto& s : j.at("schemes")) e.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    if (j.contains("grid_points")) e.overrides.misome_grid_points = j.at("grid_points").get<int>();
    if (j.contains("gs_tol")) e.overrides.gs_tol = j.at("gs_tol").get<double>();
    if (j.contains("gs_max_iters")) e.overrides.gs_max_iters = j.at("gs_max_iters").get<int>();
  } catch (const json::exception& ex) {
    throw InvalidInput(std::string("bad experiment JSON: ") + ex.what());
  }
  e.validate();
  return e;
}

std::string format_csv(const std::vector<TrialRecord>& records) {
  std::string out = "seed,snr_db,scheme,cs_bits,iterations,wall_time_ms,flags\n";
  for (auto& r : records) {
    out += std::to_string(r.seed) + ',' + format_double(r.snr_db) + ',' + r.scheme + ',' +
           format_double(r.cs_bits) + ',' + std::to_string(r.iterations) + ',' +
           format_double(r.wall_time_ms) + ',' + join_flags(r.flags) + '\n';
  }
  return out;
}

std::string format_json(const std::vector<TrialRecord>& records) {
  json arr = json::array();
  for (auto& r : records) {
    arr.push_back({{"seed", r.seed},
                   {"snr_db", r.snr_db},
                   {"scheme", r.scheme},
                   {"cs_bits", r.cs_bits},
                   {"iterations", r.iterations},
                   {"wall_time_ms", r.wall_time_ms},
                   {"flags", r.flags}});
  }
  return arr.dump(2) + "\n";
}

std::vector<TrialRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "seed,snr_db,scheme,cs_bits,iterations,wall_time_ms,flags")
    throw InvalidInput("CSV header mismatch");
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 7) throw InvalidInput("CSV row has " + std::to_string(f.size()) + " fields");
    TrialRecord r;
    r.seed = std::stoull(f[0]);
    r.snr_db = std::stod(f[1]);
    r.scheme = f[2];
    r.cs_bits = std::stod(f[3]);
    r.iterations = std::stoi(f[4]);
    r.wall_time_ms = std::stod(f[5]);
    if (!f[6].empty()) r.flags = split(f[6], ';');
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TrialRecord> parse_json(const std::string& text) {
  std::vector<TrialRecord> out;
  try {
    for (auto& o : json::parse(text)) {
      TrialRecord r;
      r.seed = o.at("seed").get<std::uint64_t>();
      r.snr_db = o.at("snr_db").get<double>();
      r.scheme = o.at("scheme").get<std::string>();
      r.cs_bits = o.at("cs_bits").get<double>();
      r.iterations = o.at("iterations").get<int>();
      r.wall_time_ms = o.at("wall_time_ms").get<double>();
      r.flags = o.at("flags").get<std::vector<std::string>>();
      out.push_back(std::move(r));
    }
  } catch (const json::exception& ex) {
    throw InvalidInput(std::string("bad results JSON: ") + ex.what());
  }
  return out;
}

GsvdCheckSummary gsvd_property_suite(int trials, std::uint64_t seed, double tol) {
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  GsvdCheckSummary sum;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 6);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  auto gauss = [&](int r, int c) {
    CMatrix m(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) m(i, j) = cplx(nd(rng), nd(rng));
    return m;
  };
  // Random matrix of rank at most `rank`.
  auto low_rank = [&](int r, int c, int rank) {
    return CMatrix(gauss(r, rank) * gauss(rank, c));
  };
  for (int t = 0; t < trials; ++t) {
    const int n = dim(rng), m = dim(rng), k = dim(rng);
    const int rh = std::uniform_int_distribution<int>(1, std::min(n, m))(rng);
    const int rg = std::uniform_int_distribution<int>(1, std::min(n, k))(rng);
    CMatrix h = low_rank(n, m, rh);
    CMatrix g = low_rank(n, k, rg);
    // Occasionally force shared or nested column spaces.
    const int mode = std::uniform_int_distribution<int>(0, 3)(rng);
    if (mode == 1 && k >= 1) g.col(0) = h * gauss(m, 1);
    if (mode == 2) g = h * gauss(m, k);

    GsvdResult res = gsvd_transform(h, g);
    SubspaceDims oracle = subspace_dims_oracle(h, g);
    SubspaceDims got{res.k, res.p, res.r, res.s};
    const double scale = std::max({h.norm(), g.norm(), 1.0});
    const double r1 = frobenius_relative_residual(h * res.psi1, res.x * res.d1.transpose(), scale);
    const double r2 = frobenius_relative_residual(g * res.psi2, res.x * res.d2.transpose(), scale);
    const Eigen::MatrixXd csum =
        res.d1.transpose() * res.d1 + res.d2.transpose() * res.d2;
    const double r3 = (csum - Eigen::MatrixXd::Identity(res.k, res.k)).norm();
    const double r4 = (res.psi1.adjoint() * res.psi1 - CMatrix::Identity(m, m)).norm();
    const double r5 = (res.psi2.adjoint() * res.psi2 - CMatrix::Identity(k, k)).norm();
    const double worst = std::max({r1, r2, r3, r4, r5});
    sum.worst_residual = std::max(sum.worst_residual, worst);
    ++sum.trials;
    if (!(worst <= tol) || !(got == oracle) || numeric_rank(res.x) != res.k) {
      ++sum.failures;
      std::ostringstream msg;
      msg << "trial " << t << " (N,M,K)=(" << n << "," << m << "," << k << ") residual "
          << worst << " dims k,p,r,s=" << got.k << "," << got.p << "," << got.r << ","
          << got.s << " oracle " << oracle.k << "," << oracle.p << "," << oracle.r << ","
          << oracle.s;
      sum.messages.push_back(msg.str());
    }
  }
  return sum;
}

void emit_results(const std::vector<TrialRecord>& records, OutputFormat format,
                  const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << (format == OutputFormat::kCsv ? format_csv(records) : format_json(records));
  f.close();
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace wiretap
