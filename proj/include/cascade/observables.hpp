#pragma once

#include "cascade/integrator.hpp"

#include <map>
#include <vector>

namespace cascade {

struct PhotonDistribution {
  std::vector<double> probabilities;  // p_0 .. p_cutoff
  int slot = -1;

  int cutoff() const { return static_cast<int>(probabilities.size()) - 1; }
  double mean() const;
  /// Factorial moment <a^dag^n a^n> = sum_m p_m m!/(m-n)!.
  double factorial_moment(int n) const;
};

/// Raised when a normalized correlation is requested for a near-vacuum
/// state (mean photon number below the floor).
class UndefinedCorrelationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Complex expectation(const Operator& op, const DensityMatrix& rho);
Complex expectation(const Matrix& op, const Matrix& rho);

/// Diagonal of the partial trace over all factors except `cavity_slot`.
PhotonDistribution photon_distribution(const DensityMatrix& rho,
                                       int cavity_slot);

/// g^(n)(0) = <a^dag^n a^n> / <a^dag a>^n via factorial moments.
double g_n(const DensityMatrix& rho, int cavity_slot, int n,
           double mean_floor = 1e-9);
double g_n(const PhotonDistribution& dist, int n, double mean_floor = 1e-9);

struct ReferenceKind {
  enum Type { Fock, Coherent, Thermal };
  Type type = Coherent;
  int fock_n = 0;

  static ReferenceKind fock(int n) { return {Fock, n}; }
  static ReferenceKind coherent() { return {Coherent, 0}; }
  static ReferenceKind thermal() { return {Thermal, 0}; }
};

/// Closed-form g^(n): Fock(N) -> N!/(N^n (N-n)!) (0 for n > N),
/// Coherent -> 1, Thermal -> n!.
double reference_gn(ReferenceKind kind, int n);

/// Discrete curvature g^(n+1) - 2 g^(n) + g^(n-1) with unit spacing.
/// A missing n-1 = 1 neighbor defaults to g^(1) = 1.
double second_central_difference(const std::map<int, double>& g_values, int n);

/// Analytic photon-number distributions for references and tests.
std::vector<double> thermal_occupation(double nbar, int cutoff);
std::vector<double> coherent_occupation(double nbar, int cutoff);

}  // namespace cascade
