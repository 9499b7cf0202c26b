#pragma once

#include "cascade/hilbert.hpp"

#include <Eigen/SparseCore>

#include <vector>

namespace cascade {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Lindblad dissipator term. Applied as rate * (2 J rho J^dag - {J^dag J, rho}),
/// i.e. the rate multiplies the whole bracket.
struct Dissipator {
  Operator jump;
  double rate = 0.0;
};

/// Unidirectional source->target cross coupling:
/// -strength * ([Jt^dag, Js rho] + [rho Js^dag, Jt]).
struct CascadeTerm {
  Operator source_jump;
  Operator target_jump;
  double strength = 0.0;
};

/// Full right-hand side of the master equation:
/// drho/dt = -i[H, rho] + sum dissipators + sum cascade terms.
struct GeneratorSpec {
  Operator hamiltonian;
  std::vector<Dissipator> dissipators;
  std::vector<CascadeTerm> cascades;

  int dim() const { return hamiltonian.dim(); }
  const SubsystemLayout& layout() const { return hamiltonian.layout; }
};

Matrix apply_dissipator(const Dissipator& d, const Matrix& rho);
Matrix apply_cascade(const CascadeTerm& c, const Matrix& rho);

/// Reference implementation via dense left/right products, O(K dim^3).
/// Accepts non-Hermitian rho (integrator stages pass such intermediates).
Matrix apply_generator(const GeneratorSpec& spec, const Matrix& rho);

/// Column-stacked vectorization L with L vec(rho) = vec(apply_generator(rho)).
/// Refuses dimensions above `dim_cap` (the superoperator has dim^2 rows).
SparseMatrix vectorized_superoperator(const GeneratorSpec& spec,
                                      int dim_cap = 64);

/// Precomputed sparse form of the generator for fast repeated application:
/// L rho = G rho + rho G^dag + sum_k c_k A_k rho B_k^dag with
/// G = -iH - sum rate J^dag J - sum strength Jt^dag Js.
/// Immutable after construction; apply() is safe to call concurrently.
class GeneratorKernel {
 public:
  explicit GeneratorKernel(const GeneratorSpec& spec, int threads = 1);

  int dim() const { return dim_; }
  int threads() const { return threads_; }
  void set_threads(int threads) { threads_ = threads < 1 ? 1 : threads; }

  void apply(const Matrix& rho, Matrix& out) const;
  Matrix apply(const Matrix& rho) const;

  /// Diagonal of the vectorized superoperator (Jacobi preconditioning).
  Vector superoperator_diagonal() const;

 private:
  struct Feed {
    Complex coeff;
    SparseMatrix a;      // left factor
    SparseMatrix b_adj;  // B^dag, right factor
  };

  void apply_columns(const Matrix& rho, Matrix& out, Vector& t, int j0,
                     int j1) const;

  int dim_ = 0;
  int threads_ = 1;
  SparseMatrix left_;      // G
  SparseMatrix left_adj_;  // G^dag
  std::vector<Feed> feeds_;
};

}  // namespace cascade
