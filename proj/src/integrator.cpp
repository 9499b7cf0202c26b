#include "cascade/integrator.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace cascade {

namespace {

using Eigen::Index;
using MapVec = Eigen::Map<Vector>;
using MapCVec = Eigen::Map<const Vector>;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

void hermitian_part(Matrix& rho, Matrix& scratch) {
  scratch = rho.adjoint();
  rho += scratch;
  rho *= 0.5;
}

}  // namespace

DensityMatrix DensityMatrix::vacuum(const SubsystemLayout& layout) {
  Matrix m = Matrix::Zero(layout.dim(), layout.dim());
  m(0, 0) = 1.0;
  return {layout, std::move(m)};
}

DensityMatrix DensityMatrix::maximally_mixed(const SubsystemLayout& layout) {
  const int d = layout.dim();
  return {layout, Matrix::Identity(d, d) / double(d)};
}

Matrix rk4_step(const GeneratorKernel& kernel, const Matrix& rho, double dt) {
  if (dt <= 0) throw std::invalid_argument("rk4_step: dt must be > 0");
  const Matrix k1 = kernel.apply(rho);
  const Matrix k2 = kernel.apply(rho + (0.5 * dt) * k1);
  const Matrix k3 = kernel.apply(rho + (0.5 * dt) * k2);
  const Matrix k4 = kernel.apply(rho + dt * k3);
  Matrix out = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!out.allFinite()) {
    throw std::runtime_error("rk4_step: non-finite values (dt too large?)");
  }
  return out;
}

Matrix rk4_step(const GeneratorSpec& spec, const Matrix& rho, double dt) {
  return rk4_step(GeneratorKernel(spec), rho, dt);
}

EvolutionResult evolve_to_steady_state(const GeneratorKernel& kernel,
                                       const DensityMatrix& rho0,
                                       const EvolveOptions& opts) {
  const int d = kernel.dim();
  if (rho0.dim() != d) {
    throw std::invalid_argument("evolve_to_steady_state: shape mismatch");
  }
  Matrix rho = rho0.matrix;
  Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), stage(d, d);
  const double dt = opts.dt;
  if (dt <= 0) throw std::invalid_argument("dt must be > 0");
  const std::int64_t max_steps =
      static_cast<std::int64_t>(opts.max_time / dt + 0.5);

  EvolutionResult result;
  result.final_state.layout = rho0.layout;
  double trace_drift = std::abs(rho.trace().real() - 1.0);
  for (std::int64_t step = 0;; ++step) {
    kernel.apply(rho, k1);
    const double residual = max_abs(k1);
    if (!std::isfinite(residual)) {
      throw std::runtime_error("evolve_to_steady_state: non-finite state");
    }
    result.residual = residual;
    result.steps = step;
    if (residual < opts.residual_tol) {
      result.converged = true;
      break;
    }
    if (step >= max_steps) break;
    stage = rho + (0.5 * dt) * k1;
    kernel.apply(stage, k2);
    stage = rho + (0.5 * dt) * k2;
    kernel.apply(stage, k3);
    stage = rho + dt * k3;
    kernel.apply(stage, k4);
    k1 += 2.0 * k2;
    k1 += 2.0 * k3;
    k1 += k4;
    rho += (dt / 6.0) * k1;
    hermitian_part(rho, stage);
    const double drift = std::abs(rho.trace().real() - 1.0);
    if (drift > trace_drift) trace_drift = drift;
  }
  result.trace_drift = trace_drift;
  result.final_state.matrix = std::move(rho);
  return result;
}

EvolutionResult evolve_to_steady_state(const GeneratorSpec& spec,
                                       const DensityMatrix& rho0,
                                       const EvolveOptions& opts, int threads) {
  return evolve_to_steady_state(GeneratorKernel(spec, threads), rho0, opts);
}

DensityMatrix steady_state_nullspace(const GeneratorSpec& spec, int dim_cap) {
  const int d = spec.dim();
  const SparseMatrix l = vectorized_superoperator(spec, dim_cap);
  const Index n = l.rows();

  SparseMatrix shifted = l;
  const double sigma = 1e-8;
  for (Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
  shifted.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("steady_state_nullspace: factorization failed");
  }

  auto inf_norm = [](const Vector& v) { return v.cwiseAbs().maxCoeff(); };

  // Inverse iteration toward the eigenvalue nearest zero.
  Vector x = Vector::Zero(n);
  for (int i = 0; i < d; ++i) x[static_cast<Index>(i) * d + i] = 1.0 / d;
  double res = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    x = lu.solve(x);
    x /= x.norm();
    res = inf_norm(l * x) / inf_norm(x);
    if (res < 1e-12) break;
  }
  if (res >= 1e-9) {
    throw std::runtime_error(
        "steady_state_nullspace: inverse iteration did not converge, residual " +
        std::to_string(res));
  }

  // Deflated iterations probe for additional null-space directions.
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int extra_null = 0;
  std::vector<Vector> basis{x};
  for (int probe = 0; probe < 5; ++probe) {
    Vector y(n);
    for (Index i = 0; i < n; ++i) y[i] = Complex(u(rng), u(rng));
    bool null_dir = false;
    for (int iter = 0; iter < 40; ++iter) {
      y = lu.solve(y);
      for (const Vector& b : basis) y -= b * b.dot(y);
      const double ny = y.norm();
      if (ny < 1e-30) break;
      y /= ny;
      if (inf_norm(l * y) / inf_norm(y) < 1e-8) {
        null_dir = true;
        break;
      }
    }
    if (!null_dir) break;
    basis.push_back(y);
    ++extra_null;
  }
  if (extra_null > 0) {
    throw std::runtime_error(
        "steady_state_nullspace: degenerate null space, dimension >= " +
        std::to_string(extra_null + 1) + " (decoupled sectors?)");
  }

  Matrix rho = Eigen::Map<const Matrix>(x.data(), d, d);
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-8) {
    throw std::runtime_error(
        "steady_state_nullspace: null vector is traceless (decoupled sectors?)");
  }
  rho /= tr;
  rho = (0.5 * (rho + rho.adjoint())).eval();
  return {spec.layout(), std::move(rho)};
}

LinearSteadyStateResult steady_state_linear(const GeneratorKernel& kernel,
                                            const DensityMatrix& guess,
                                            double residual_tol,
                                            std::int64_t max_iters) {
  const int d = kernel.dim();
  if (guess.dim() != d) {
    throw std::invalid_argument("steady_state_linear: shape mismatch");
  }
  const Index n = static_cast<Index>(d) * d;

  // Trace-constrained system: A x = L x except the component of vec index 0
  // (element (0,0)) is replaced by tr(x); right-hand side e_0.
  Matrix scratch(d, d);
  auto matvec = [&](const Matrix& x, Matrix& out) {
    kernel.apply(x, out);
    out(0, 0) = x.trace();
  };

  Vector diag = kernel.superoperator_diagonal();
  diag[0] = 1.0;
  Matrix invd(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      const Complex v = diag[static_cast<Index>(j) * d + i];
      invd(i, j) = std::abs(v) > 1e-14 ? 1.0 / v : Complex(1.0, 0.0);
    }
  }

  auto dot = [n](const Matrix& a, const Matrix& b) {
    return MapCVec(a.data(), n).dot(MapCVec(b.data(), n));
  };
  auto norm2 = [n](const Matrix& a) { return MapCVec(a.data(), n).norm(); };

  Matrix b = Matrix::Zero(d, d);
  b(0, 0) = 1.0;

  Matrix x = guess.matrix;
  Matrix r(d, d), rhat(d, d), p(d, d), v(d, d), s(d, d), t(d, d), phat(d, d),
      shat(d, d);
  matvec(x, r);
  r = b - r;
  rhat = r;
  Complex rho_old(1.0, 0.0), alpha(1.0, 0.0), omega(1.0, 0.0);
  v.setZero();
  p.setZero();
  std::int64_t matvecs = 1;
  const double tol = residual_tol * 0.05;
  bool ok = false;
  while (matvecs + 2 <= max_iters) {
    const Complex rho_new = dot(rhat, r);
    if (std::abs(rho_new) < 1e-60) {  // breakdown: restart
      rhat = r;
      rho_old = alpha = omega = Complex(1.0, 0.0);
      v.setZero();
      p.setZero();
      continue;
    }
    const Complex beta = (rho_new / rho_old) * (alpha / omega);
    p = r + beta * (p - omega * v);
    phat = p.cwiseProduct(invd);
    matvec(phat, v);
    ++matvecs;
    const Complex denom = dot(rhat, v);
    if (std::abs(denom) < 1e-60) {
      rhat = r;
      rho_old = alpha = omega = Complex(1.0, 0.0);
      v.setZero();
      p.setZero();
      continue;
    }
    alpha = rho_new / denom;
    s = r - alpha * v;
    if (norm2(s) < tol) {
      x += alpha * phat;
      ok = true;
      break;
    }
    shat = s.cwiseProduct(invd);
    matvec(shat, t);
    ++matvecs;
    const double tt = norm2(t);
    if (tt < 1e-60) break;
    omega = dot(t, s) / (tt * tt);
    x += alpha * phat + omega * shat;
    r = s - omega * t;
    rho_old = rho_new;
    if (norm2(r) < tol) {
      ok = true;
      break;
    }
    if (std::abs(omega) < 1e-60) break;
  }

  LinearSteadyStateResult result;
  result.matvecs = matvecs;
  Matrix rho = 0.5 * (x + x.adjoint());
  const double tr = rho.trace().real();
  if (ok && std::isfinite(tr) && std::abs(tr) > 1e-8) {
    rho /= tr;
    kernel.apply(rho, scratch);
    result.residual = scratch.cwiseAbs().maxCoeff();
    result.converged = result.residual <= residual_tol;
  } else {
    result.converged = false;
    result.residual = std::numeric_limits<double>::infinity();
  }
  result.state = {guess.layout, std::move(rho)};
  return result;
}

}  // namespace cascade
