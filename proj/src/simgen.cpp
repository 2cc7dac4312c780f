#include "fisherwatch/simgen.hpp"

#include <cmath>
#include <map>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace fisherwatch::simgen {
namespace {

constexpr double kMinEigenvalue = 1e-10;

void require_spd(const RowMatrix& m, std::size_t p, const std::string& what) {
  if (m.rows() != static_cast<Eigen::Index>(p) || m.cols() != static_cast<Eigen::Index>(p)) {
    throw Error(ErrorCode::Scenario, what + " must be " + std::to_string(p) + "x" +
                                         std::to_string(p));
  }
  if (!m.allFinite()) throw Error(ErrorCode::Scenario, what + " has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::Scenario, what + " is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= kMinEigenvalue) {
    throw Error(ErrorCode::Scenario, what + " is not positive definite");
  }
}

bool active(const Event& e, std::size_t t, std::size_t T) {
  return t > e.tau && t <= e.end.value_or(T);
}

void apply(const Event& e, RowMatrix& sigma) {
  const auto p = sigma.rows();
  switch (e.kind) {
    case EventKind::ScaleSubset: {
      Eigen::VectorXd d = Eigen::VectorXd::Ones(p);
      for (std::size_t c : e.channels) d(static_cast<Eigen::Index>(c - 1)) = std::sqrt(e.factor);
      sigma = d.asDiagonal() * sigma * d.asDiagonal();
      break;
    }
    case EventKind::Spike: {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
      if (!e.direction.empty()) {
        for (Eigen::Index i = 0; i < p; ++i) u(i) = e.direction[static_cast<std::size_t>(i)];
      } else {
        for (std::size_t c : e.channels) u(static_cast<Eigen::Index>(c - 1)) = 1.0;
      }
      u.normalize();
      sigma += e.strength * u * u.transpose();
      break;
    }
    case EventKind::FullReplace:
      sigma = e.matrix;
      break;
  }
}

}  // namespace

RowMatrix sample_spd(const CovSpec& spec, std::size_t p) {
  if (p == 0) throw Error(ErrorCode::Scenario, "dimension must be positive");
  const auto n = static_cast<Eigen::Index>(p);
  switch (spec.kind) {
    case CovKind::Identity:
      return RowMatrix::Identity(n, n);
    case CovKind::Toeplitz: {
      if (!(std::fabs(spec.rho) < 1.0)) {
        throw Error(ErrorCode::Scenario, "Toeplitz rho must satisfy |rho| < 1");
      }
      RowMatrix m(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          m(i, j) = std::pow(spec.rho, static_cast<double>(std::abs(i - j)));
        }
      }
      return m;
    }
    case CovKind::Matrix:
      require_spd(spec.matrix, p, "covariance matrix");
      return spec.matrix;
  }
  throw Error(ErrorCode::Scenario, "unknown covariance kind");
}

void validate_scenario(const Scenario& sc) {
  if (sc.p < 2) throw Error(ErrorCode::Scenario, "p must be at least 2");
  if (sc.T < 2) throw Error(ErrorCode::Scenario, "T must be at least 2");
  if (!(sc.noise_sigma >= 0.0) || !std::isfinite(sc.noise_sigma)) {
    throw Error(ErrorCode::Scenario, "noise_sigma must be a non-negative number");
  }
  if (!(std::fabs(sc.ar1) < 1.0)) throw Error(ErrorCode::Scenario, "ar1 must satisfy |ar1| < 1");
  sample_spd(sc.base, sc.p);

  for (std::size_t k = 0; k < sc.events.size(); ++k) {
    const Event& e = sc.events[k];
    const std::string tag = "event " + std::to_string(k + 1);
    if (e.tau < 1 || e.tau >= sc.T) {
      throw Error(ErrorCode::Scenario, tag + ": tau must lie in [1, T-1]");
    }
    if (e.end && (*e.end <= e.tau || *e.end > sc.T)) {
      throw Error(ErrorCode::Scenario, tag + ": end must lie in (tau, T]");
    }
    for (std::size_t c : e.channels) {
      if (c < 1 || c > sc.p) throw Error(ErrorCode::Scenario, tag + ": channel out of range");
    }
    switch (e.kind) {
      case EventKind::ScaleSubset:
        if (e.channels.empty()) throw Error(ErrorCode::Scenario, tag + ": no channels");
        if (!(e.factor > 0.0) || !std::isfinite(e.factor)) {
          throw Error(ErrorCode::Scenario, tag + ": factor must be positive");
        }
        break;
      case EventKind::Spike: {
        if (!(e.strength >= 0.0) || !std::isfinite(e.strength)) {
          throw Error(ErrorCode::Scenario, tag + ": strength must be non-negative");
        }
        if (e.direction.empty() && e.channels.empty()) {
          throw Error(ErrorCode::Scenario, tag + ": spike needs a direction or channels");
        }
        if (!e.direction.empty()) {
          if (e.direction.size() != sc.p) {
            throw Error(ErrorCode::Scenario, tag + ": direction must have length p");
          }
          double norm = 0.0;
          for (double v : e.direction) norm += v * v;
          if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw Error(ErrorCode::Scenario, tag + ": direction must be non-zero");
          }
        }
        break;
      }
      case EventKind::FullReplace:
        require_spd(e.matrix, sc.p, tag + " matrix");
        break;
    }
  }
}

RowMatrix covariance_at(const Scenario& sc, std::size_t t) {
  RowMatrix sigma = sample_spd(sc.base, sc.p);
  for (const Event& e : sc.events) {
    if (active(e, t, sc.T)) apply(e, sigma);
  }
  return sigma;
}

Simulation generate(const Scenario& sc) {
  validate_scenario(sc);
  const auto p = static_cast<Eigen::Index>(sc.p);

  // One Cholesky factor per distinct set of active events.
  std::map<std::vector<bool>, Eigen::MatrixXd> factors;
  std::vector<const Eigen::MatrixXd*> factor_at(sc.T + 1, nullptr);
  for (std::size_t t = 1; t <= sc.T; ++t) {
    std::vector<bool> mask(sc.events.size());
    for (std::size_t k = 0; k < sc.events.size(); ++k) mask[k] = active(sc.events[k], t, sc.T);
    auto it = factors.find(mask);
    if (it == factors.end()) {
      const RowMatrix sigma = covariance_at(sc, t);
      require_spd(sigma, sc.p, "covariance at sample " + std::to_string(t));
      Eigen::LLT<Eigen::MatrixXd> llt(sigma);
      it = factors.emplace(mask, llt.matrixL().toDenseMatrix()).first;
    }
    factor_at[t] = &it->second;
  }

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-std::sqrt(3.0), std::sqrt(3.0));
  auto innovation = [&]() {
    return sc.marginal == Marginal::Uniform ? uniform(rng) : normal(rng);
  };

  const double carry = sc.ar1;
  const double fresh = std::sqrt(1.0 - sc.ar1 * sc.ar1);
  RowMatrix values(p, static_cast<Eigen::Index>(sc.T));
  Eigen::VectorXd z(p);
  Eigen::VectorXd noise(p);
  for (std::size_t t = 1; t <= sc.T; ++t) {
    for (Eigen::Index i = 0; i < p; ++i) {
      const double e = innovation();
      z(i) = t == 1 ? e : carry * z(i) + fresh * e;
    }
    for (Eigen::Index i = 0; i < p; ++i) noise(i) = normal(rng);
    values.col(static_cast<Eigen::Index>(t - 1)) = (*factor_at[t]) * z + sc.noise_sigma * noise;
  }

  GroundTruth truth;
  for (const Event& e : sc.events) {
    truth.change_times.push_back(e.tau);
    truth.end_times.push_back(e.end.value_or(sc.T));
  }
  return {StateMatrix(std::move(values), {}, sc.sample_rate_hz), std::move(truth)};
}

}  // namespace fisherwatch::simgen
