#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace cascade {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class FactorType { TwoLevel, BosonMode };

/// One tensor factor of a composite Hilbert space: a two-level system
/// (ground = index 0, excited = index 1) or a bosonic mode truncated at
/// `cutoff` photons (dimension cutoff + 1).
struct Factor {
  FactorType type = FactorType::TwoLevel;
  int cutoff = 0;

  int dim() const { return type == FactorType::TwoLevel ? 2 : cutoff + 1; }

  static Factor two_level() { return {FactorType::TwoLevel, 0}; }
  static Factor boson(int cutoff);

  bool operator==(const Factor&) const = default;
};

/// Ordered list of tensor factors. The order is fixed at construction and
/// defines the row-major Kronecker index convention: the first factor
/// varies slowest.
class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  explicit SubsystemLayout(std::vector<Factor> factors);

  int dim() const { return dim_; }
  int factor_count() const { return static_cast<int>(factors_.size()); }
  const Factor& factor(int slot) const;
  const std::vector<Factor>& factors() const { return factors_; }

  /// Product of factor dimensions strictly before / after `slot`.
  int dim_before(int slot) const;
  int dim_after(int slot) const;

  bool operator==(const SubsystemLayout&) const = default;

 private:
  std::vector<Factor> factors_;
  int dim_ = 1;
};

/// Dense operator on a composite space, tagged with its layout.
struct Operator {
  SubsystemLayout layout;
  Matrix matrix;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

/// Boson annihilation operator on photon states 0..cutoff:
/// M[n-1, n] = sqrt(n).
Operator annihilation(int cutoff);
Operator creation(int cutoff);

/// Pauli lowering operator, basis order (ground = 0, excited = 1):
/// M[0, 1] = 1.
Operator sigma_minus();
Operator sigma_plus();

/// Embed a single-factor operator at `slot`, identity on all other factors.
Operator embed(const Operator& op, int slot, const SubsystemLayout& layout);
Operator embed(const Matrix& local, int slot, const SubsystemLayout& layout);

/// Jaynes-Cummings interaction H = g sum_j (a^dag sigma_j^- + sigma_j^+ a)
/// embedded on `layout`. Rates in ps^-1, hbar = 1.
Operator build_jc_hamiltonian(double g, int cavity_slot,
                              const std::vector<int>& emitter_slots,
                              const SubsystemLayout& layout);

bool is_hermitian(const Matrix& m, double tol = 1e-12);

}  // namespace cascade
