#pragma once

#include "cascade/lindblad.hpp"

#include <cstdint>

namespace cascade {

struct DensityMatrix {
  SubsystemLayout layout;
  Matrix matrix;

  int dim() const { return static_cast<int>(matrix.rows()); }

  /// |vacuum/ground><vacuum/ground| (index 0 of every factor).
  static DensityMatrix vacuum(const SubsystemLayout& layout);
  static DensityMatrix maximally_mixed(const SubsystemLayout& layout);
};

struct EvolveOptions {
  double dt = 0.01;              // ps
  double residual_tol = 1e-10;   // ps^-1, max-norm of drho/dt
  double max_time = 1e4;         // ps
};

struct EvolutionResult {
  DensityMatrix final_state;
  std::int64_t steps = 0;
  double residual = 0.0;  // ||drho/dt||_max at the final state
  bool converged = false;
  double trace_drift = 0.0;  // max |tr(rho) - 1| observed
};

/// One classic RK4 update. Throws on non-finite values in the result.
Matrix rk4_step(const GeneratorKernel& kernel, const Matrix& rho, double dt);
Matrix rk4_step(const GeneratorSpec& spec, const Matrix& rho, double dt);

/// Fixed-step RK4 until ||drho/dt||_max < residual_tol or t > max_time.
/// The Hermitian part is enforced after each full step; trace is never
/// renormalized, its drift is monitored and reported.
EvolutionResult evolve_to_steady_state(const GeneratorKernel& kernel,
                                       const DensityMatrix& rho0,
                                       const EvolveOptions& opts = {});
EvolutionResult evolve_to_steady_state(const GeneratorSpec& spec,
                                       const DensityMatrix& rho0,
                                       const EvolveOptions& opts = {},
                                       int threads = 1);

/// Independent steady-state oracle: trace-one Hermitian solution of
/// L vec(rho) = 0 via the sparse vectorized superoperator and inverse
/// iteration. Throws if the null space is degenerate (dimension > 1).
DensityMatrix steady_state_nullspace(const GeneratorSpec& spec,
                                     int dim_cap = 64);

struct LinearSteadyStateResult {
  DensityMatrix state;
  bool converged = false;
  double residual = 0.0;  // ||L rho||_max
  std::int64_t matvecs = 0;
};

/// Production steady-state solver: preconditioned BiCGSTAB on the
/// trace-constrained linear system, matrix-free through the kernel.
/// Deterministic for fixed inputs. On failure the caller is expected to
/// fall back to plain RK4 evolution.
LinearSteadyStateResult steady_state_linear(const GeneratorKernel& kernel,
                                            const DensityMatrix& guess,
                                            double residual_tol = 1e-10,
                                            std::int64_t max_iters = 4000);

}  // namespace cascade
