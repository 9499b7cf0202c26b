#include "cascade/observables.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cascade {

double PhotonDistribution::mean() const { return factorial_moment(1); }

double PhotonDistribution::factorial_moment(int n) const {
  double acc = 0.0;
  for (int m = n; m <= cutoff(); ++m) {
    double falling = 1.0;
    for (int k = 0; k < n; ++k) falling *= double(m - k);
    acc += probabilities[static_cast<std::size_t>(m)] * falling;
  }
  return acc;
}

Complex expectation(const Matrix& op, const Matrix& rho) {
  if (op.rows() != rho.rows() || op.cols() != rho.cols()) {
    throw std::invalid_argument("expectation: shape mismatch");
  }
  return (op * rho).trace();
}

Complex expectation(const Operator& op, const DensityMatrix& rho) {
  return expectation(op.matrix, rho.matrix);
}

PhotonDistribution photon_distribution(const DensityMatrix& rho,
                                       int cavity_slot) {
  const Factor& f = rho.layout.factor(cavity_slot);
  if (f.type != FactorType::BosonMode) {
    throw std::invalid_argument("photon_distribution: slot " +
                                std::to_string(cavity_slot) +
                                " is not a boson mode");
  }
  const int d = f.dim();
  const int pre = rho.layout.dim_before(cavity_slot);
  const int post = rho.layout.dim_after(cavity_slot);
  PhotonDistribution dist;
  dist.slot = cavity_slot;
  dist.probabilities.assign(static_cast<std::size_t>(d), 0.0);
  for (int n = 0; n < d; ++n) {
    double p = 0.0;
    for (int a = 0; a < pre; ++a) {
      const int base = (a * d + n) * post;
      for (int q = 0; q < post; ++q) {
        p += rho.matrix(base + q, base + q).real();
      }
    }
    dist.probabilities[static_cast<std::size_t>(n)] = p;
  }
  return dist;
}

double g_n(const PhotonDistribution& dist, int n, double mean_floor) {
  if (n < 2) throw std::invalid_argument("g_n requires n >= 2");
  const double mean = dist.mean();
  if (mean < mean_floor) {
    throw UndefinedCorrelationError(
        "g_n: mean photon number " + std::to_string(mean) +
        " below floor; correlation undefined");
  }
  return dist.factorial_moment(n) / std::pow(mean, n);
}

double g_n(const DensityMatrix& rho, int cavity_slot, int n,
           double mean_floor) {
  return g_n(photon_distribution(rho, cavity_slot), n, mean_floor);
}

double reference_gn(ReferenceKind kind, int n) {
  if (n < 1) throw std::invalid_argument("reference_gn requires n >= 1");
  switch (kind.type) {
    case ReferenceKind::Coherent:
      return 1.0;
    case ReferenceKind::Thermal: {
      double f = 1.0;
      for (int k = 2; k <= n; ++k) f *= double(k);
      return f;
    }
    case ReferenceKind::Fock: {
      const int N = kind.fock_n;
      if (n > N) return 0.0;
      double v = 1.0;
      for (int k = 0; k < n; ++k) v *= double(N - k) / double(N);
      return v;
    }
  }
  throw std::logic_error("unreachable");
}

double second_central_difference(const std::map<int, double>& g_values,
                                 int n) {
  auto fetch = [&](int k) {
    auto it = g_values.find(k);
    if (it != g_values.end()) return it->second;
    if (k == 1) return 1.0;  // g^(1)(0) = <a^dag a>/<a^dag a>
    throw std::invalid_argument("second_central_difference: missing g^(" +
                                std::to_string(k) + ")");
  };
  return fetch(n + 1) - 2.0 * fetch(n) + fetch(n - 1);
}

std::vector<double> thermal_occupation(double nbar, int cutoff) {
  if (nbar < 0) throw std::invalid_argument("thermal_occupation: nbar < 0");
  std::vector<double> p(static_cast<std::size_t>(cutoff) + 1);
  double norm = 0.0;
  for (int n = 0; n <= cutoff; ++n) {
    p[static_cast<std::size_t>(n)] =
        std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1);
    norm += p[static_cast<std::size_t>(n)];
  }
  for (double& v : p) v /= norm;
  return p;
}

std::vector<double> coherent_occupation(double nbar, int cutoff) {
  if (nbar < 0) throw std::invalid_argument("coherent_occupation: nbar < 0");
  std::vector<double> p(static_cast<std::size_t>(cutoff) + 1);
  double norm = 0.0;
  double term = std::exp(-nbar);  // Poisson p_0
  for (int n = 0; n <= cutoff; ++n) {
    p[static_cast<std::size_t>(n)] = term;
    norm += term;
    term *= nbar / double(n + 1);
  }
  for (double& v : p) v /= norm;
  return p;
}

}  // namespace cascade
