#include "wiretap/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "wiretap/errors.hpp"

namespace wiretap {

namespace {

void check_shape(const CMatrix& m, int rows, int cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << name << " is " << m.rows() << "x" << m.cols() << ", expected "
       << rows << "x" << cols;
    throw InvalidInput(os.str());
  }
}

// Rate of a receiver seeing signal covariance `sig` over interference-plus-
// noise `I + interf`, computed by whitening with the Cholesky factor.
double whitened_rate(const CMatrix& signal_map, const CMatrix& q_signal,
                     const CMatrix& interf_map, const CMatrix& q_interf) {
  const Eigen::Index n = signal_map.rows();
  if (n == 0) return 0.0;
  CMatrix noise = CMatrix::Identity(n, n);
  if (interf_map.cols() > 0) {
    noise += interf_map * q_interf * interf_map.adjoint();
  }
  Eigen::LLT<CMatrix> llt(0.5 * (noise + noise.adjoint()));
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("interference-plus-noise covariance is not PD");
  }
  CMatrix a = signal_map.cols() > 0
                  ? CMatrix(signal_map * q_signal * signal_map.adjoint())
                  : CMatrix(CMatrix::Zero(n, n));
  // L^-1 A L^-H
  CMatrix tmp = llt.matrixL().solve(a);
  CMatrix white = llt.matrixL().solve(tmp.adjoint()).adjoint();
  const double r = log2_det_hpd(CMatrix::Identity(n, n) + white);
  return std::max(r, 0.0);
}

CMatrix read_matrix(const nlohmann::json& doc, const std::string& name,
                    int rows, int cols) {
  const auto& re = doc.at(name + "_re");
  const auto& im = doc.at(name + "_im");
  if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != rows ||
      static_cast<int>(im.size()) != rows) {
    throw InvalidInput(name + ": expected " + std::to_string(rows) + " rows");
  }
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!re[i].is_array() || !im[i].is_array() ||
        static_cast<int>(re[i].size()) != cols ||
        static_cast<int>(im[i].size()) != cols) {
      throw InvalidInput(name + ": row " + std::to_string(i) + " must have " +
                         std::to_string(cols) + " entries");
    }
    for (int j = 0; j < cols; ++j) {
      m(i, j) = cplx(re[i][j].get<double>(), im[i][j].get<double>());
    }
  }
  return m;
}

void write_matrix(nlohmann::json& doc, const std::string& name,
                  const CMatrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ii = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ii.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  doc[name + "_re"] = re;
  doc[name + "_im"] = im;
}

}  // namespace

void AntennaConfig::validate() const {
  if (na < 1 || nb < 1 || ne < 1 || nj < 1) {
    throw InvalidInput("antenna counts must be positive, got " + to_string());
  }
}

std::string AntennaConfig::to_string() const {
  std::ostringstream os;
  os << "(na=" << na << ", nb=" << nb << ", ne=" << ne << ", nj=" << nj << ")";
  return os.str();
}

void WiretapChannel::validate() const {
  config.validate();
  check_shape(h1, config.nb, config.na, "h1");
  check_shape(g1, config.ne, config.na, "g1");
  check_shape(g2, config.nb, config.nj, "g2");
  check_shape(h2, config.ne, config.nj, "h2");
}

WiretapChannel make_channel(CMatrix h1, CMatrix g1, CMatrix g2, CMatrix h2) {
  WiretapChannel ch;
  ch.config = AntennaConfig{static_cast<int>(h1.cols()),
                            static_cast<int>(h1.rows()),
                            static_cast<int>(g1.rows()),
                            static_cast<int>(g2.cols())};
  ch.h1 = std::move(h1);
  ch.g1 = std::move(g1);
  ch.g2 = std::move(g2);
  ch.h2 = std::move(h2);
  ch.validate();
  return ch;
}

double CovariancePair::total_power() const {
  return qa.trace().real() + qj.trace().real();
}

WiretapChannel sample_channel(const AntennaConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  auto draw = [&](int rows, int cols) {
    CMatrix m(rows, cols);
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        m(i, j) = cplx(re, im);
      }
    }
    return m;
  };
  WiretapChannel ch;
  ch.config = config;
  ch.h1 = draw(config.nb, config.na);
  ch.g1 = draw(config.ne, config.na);
  ch.g2 = draw(config.nb, config.nj);
  ch.h2 = draw(config.ne, config.nj);
  return ch;
}

CMatrix clip_psd(const CMatrix& q, const char* what) {
  if (q.rows() != q.cols()) {
    throw InvalidInput(std::string(what) + " must be square");
  }
  if (q.rows() == 0) return q;
  const HermitianEigen eig = hermitian_eigen(q);
  const double tr = std::max(eig.values.cwiseMax(0.0).sum(), 0.0);
  const double floor = -1e-9 * std::max(tr, 1e-300);
  if (eig.values.minCoeff() < floor) {
    std::ostringstream os;
    os << what << " is not positive semidefinite (min eigenvalue "
       << eig.values.minCoeff() << ")";
    throw InvalidInput(os.str());
  }
  const RVector clipped = eig.values.cwiseMax(0.0);
  return eig.vectors * clipped.asDiagonal() * eig.vectors.adjoint();
}

CovariancePair validate_covariances(const WiretapChannel& ch,
                                    const CovariancePair& cov, double budget) {
  check_shape(cov.qa, ch.config.na, ch.config.na, "qa");
  check_shape(cov.qj, ch.config.nj, ch.config.nj, "qj");
  CovariancePair out{clip_psd(cov.qa, "qa"), clip_psd(cov.qj, "qj")};
  if (budget > 0.0 && out.total_power() > budget * (1.0 + 1e-8)) {
    std::ostringstream os;
    os << "covariance power " << out.total_power() << " exceeds budget "
       << budget;
    throw InvalidInput(os.str());
  }
  return out;
}

double rate_legitimate(const WiretapChannel& ch, const CovariancePair& cov) {
  const CovariancePair c = validate_covariances(ch, cov);
  return whitened_rate(ch.h1, c.qa, ch.g2, c.qj);
}

double rate_eavesdropper(const WiretapChannel& ch, const CovariancePair& cov) {
  const CovariancePair c = validate_covariances(ch, cov);
  return whitened_rate(ch.g1, c.qa, ch.h2, c.qj);
}

double secrecy_rate(const WiretapChannel& ch, const CovariancePair& cov) {
  return std::max(rate_legitimate(ch, cov) - rate_eavesdropper(ch, cov), 0.0);
}

SecrecyResult evaluate(const WiretapChannel& ch, const CovariancePair& cov) {
  SecrecyResult res;
  res.rd = rate_legitimate(ch, cov);
  res.re = rate_eavesdropper(ch, cov);
  res.cs = std::max(res.rd - res.re, 0.0);
  res.covariances = cov;
  if (res.rd < res.re) res.diagnostics.flags.push_back("clamped");
  return res;
}

CovariancePair zero_covariances(const AntennaConfig& config) {
  return {CMatrix::Zero(config.na, config.na),
          CMatrix::Zero(config.nj, config.nj)};
}

WiretapChannel channel_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    AntennaConfig cfg{doc.at("na").get<int>(), doc.at("nb").get<int>(),
                      doc.at("ne").get<int>(), doc.at("nj").get<int>()};
    cfg.validate();
    WiretapChannel ch;
    ch.config = cfg;
    ch.h1 = read_matrix(doc, "h1", cfg.nb, cfg.na);
    ch.g1 = read_matrix(doc, "g1", cfg.ne, cfg.na);
    ch.g2 = read_matrix(doc, "g2", cfg.nb, cfg.nj);
    ch.h2 = read_matrix(doc, "h2", cfg.ne, cfg.nj);
    ch.validate();
    return ch;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("channel file: ") + e.what());
  }
}

std::string channel_to_json(const WiretapChannel& ch) {
  nlohmann::json doc;
  doc["na"] = ch.config.na;
  doc["nb"] = ch.config.nb;
  doc["ne"] = ch.config.ne;
  doc["nj"] = ch.config.nj;
  write_matrix(doc, "h1", ch.h1);
  write_matrix(doc, "g1", ch.g1);
  write_matrix(doc, "g2", ch.g2);
  write_matrix(doc, "h2", ch.h2);
  return doc.dump(2);
}

WiretapChannel load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open channel file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return channel_from_json(buf.str());
}

void save_channel(const WiretapChannel& ch, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write channel file " + path);
  out << channel_to_json(ch) << '\n';
}

}  // namespace wiretap
