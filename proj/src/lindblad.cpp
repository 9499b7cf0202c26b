#include "cascade/lindblad.hpp"

#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cascade {

namespace {

void check_shape(const GeneratorSpec& spec) {
  const int d = spec.dim();
  for (const Dissipator& dis : spec.dissipators) {
    if (dis.jump.dim() != d) throw std::invalid_argument("dissipator shape mismatch");
    if (dis.rate < 0) throw std::invalid_argument("dissipator rate < 0");
  }
  for (const CascadeTerm& c : spec.cascades) {
    if (c.source_jump.dim() != d || c.target_jump.dim() != d) {
      throw std::invalid_argument("cascade term shape mismatch");
    }
  }
}

SparseMatrix to_sparse(const Matrix& m) {
  SparseMatrix s = m.sparseView(0.0, 0.0);
  s.makeCompressed();
  return s;
}

SparseMatrix sparse_identity(int n) {
  SparseMatrix s(n, n);
  s.setIdentity();
  return s;
}

SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib) {
          trips.emplace_back(ia.row() * b.rows() + ib.row(),
                             ia.col() * b.cols() + ib.col(),
                             ia.value() * ib.value());
        }
      }
    }
  }
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

// y += c * A * x, A column-major sparse
inline void spmv_acc(const SparseMatrix& a, const Vector& x,
                     Eigen::Ref<Vector, 0, Eigen::InnerStride<>> y, Complex c) {
  const int n = static_cast<int>(a.outerSize());
  for (int k = 0; k < n; ++k) {
    const Complex xk = c * x[k];
    if (xk == Complex(0.0, 0.0)) continue;
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      y[it.row()] += it.value() * xk;
    }
  }
}

}  // namespace

Matrix apply_dissipator(const Dissipator& d, const Matrix& rho) {
  const Matrix& j = d.jump.matrix;
  if (j.rows() != rho.rows() || rho.rows() != rho.cols()) {
    throw std::invalid_argument("apply_dissipator: shape mismatch");
  }
  const Matrix jr = j * rho;
  const Matrix jdj = j.adjoint() * j;
  return d.rate * (2.0 * (jr * j.adjoint()) - jdj * rho - rho * jdj);
}

Matrix apply_cascade(const CascadeTerm& c, const Matrix& rho) {
  const Matrix& js = c.source_jump.matrix;
  const Matrix& jt = c.target_jump.matrix;
  if (js.rows() != rho.rows() || rho.rows() != rho.cols()) {
    throw std::invalid_argument("apply_cascade: shape mismatch");
  }
  const Matrix jsr = js * rho;
  const Matrix rjs = rho * js.adjoint();
  return -c.strength *
         (jt.adjoint() * jsr - jsr * jt.adjoint() + rjs * jt - jt * rjs);
}

Matrix apply_generator(const GeneratorSpec& spec, const Matrix& rho) {
  if (rho.rows() != spec.dim() || rho.cols() != spec.dim()) {
    throw std::invalid_argument("apply_generator: shape mismatch");
  }
  const Matrix& h = spec.hamiltonian.matrix;
  Matrix out = Complex(0.0, -1.0) * (h * rho - rho * h);
  for (const Dissipator& d : spec.dissipators) out += apply_dissipator(d, rho);
  for (const CascadeTerm& c : spec.cascades) out += apply_cascade(c, rho);
  return out;
}

SparseMatrix vectorized_superoperator(const GeneratorSpec& spec, int dim_cap) {
  check_shape(spec);
  const int d = spec.dim();
  if (d > dim_cap) {
    throw std::invalid_argument("vectorized_superoperator: dimension " +
                                std::to_string(d) + " exceeds cap " +
                                std::to_string(dim_cap));
  }
  const SparseMatrix id = sparse_identity(d);
  const SparseMatrix h = to_sparse(spec.hamiltonian.matrix);
  const Complex mi(0.0, -1.0);
  // vec(A rho B) = (B^T kron A) vec(rho), column-stacked.
  SparseMatrix l = mi * sparse_kron(id, h) - mi * sparse_kron(SparseMatrix(h.transpose()), id);
  for (const Dissipator& dis : spec.dissipators) {
    const SparseMatrix j = to_sparse(dis.jump.matrix);
    const SparseMatrix jc = j.conjugate();
    const SparseMatrix jdj = SparseMatrix(j.adjoint()) * j;
    l = l + SparseMatrix(Complex(2.0 * dis.rate, 0.0) * sparse_kron(jc, j)) -
        SparseMatrix(Complex(dis.rate, 0.0) *
                     (sparse_kron(id, jdj) +
                      sparse_kron(SparseMatrix(jdj.transpose()), id)));
  }
  for (const CascadeTerm& c : spec.cascades) {
    const SparseMatrix js = to_sparse(c.source_jump.matrix);
    const SparseMatrix jt = to_sparse(c.target_jump.matrix);
    const SparseMatrix jtd_js = SparseMatrix(jt.adjoint()) * js;
    const SparseMatrix jsd_jt = SparseMatrix(js.adjoint()) * jt;
    SparseMatrix term =
        sparse_kron(id, jtd_js) - sparse_kron(SparseMatrix(jt.conjugate()), js) +
        sparse_kron(SparseMatrix(jsd_jt.transpose()), id) -
        sparse_kron(SparseMatrix(js.conjugate()), jt);
    l = l - SparseMatrix(Complex(c.strength, 0.0) * term);
  }
  l.makeCompressed();
  return l;
}

GeneratorKernel::GeneratorKernel(const GeneratorSpec& spec, int threads)
    : dim_(spec.dim()), threads_(threads < 1 ? 1 : threads) {
  check_shape(spec);
  Matrix g = Complex(0.0, -1.0) * spec.hamiltonian.matrix;
  for (const Dissipator& d : spec.dissipators) {
    const Matrix& j = d.jump.matrix;
    g -= d.rate * (j.adjoint() * j);
    Feed f;
    f.coeff = Complex(2.0 * d.rate, 0.0);
    f.a = to_sparse(j);
    f.b_adj = to_sparse(j.adjoint());
    if (d.rate != 0.0) feeds_.push_back(std::move(f));
  }
  for (const CascadeTerm& c : spec.cascades) {
    if (c.strength == 0.0) continue;
    const Matrix& js = c.source_jump.matrix;
    const Matrix& jt = c.target_jump.matrix;
    g -= c.strength * (jt.adjoint() * js);
    feeds_.push_back({Complex(c.strength, 0.0), to_sparse(js), to_sparse(jt.adjoint())});
    feeds_.push_back({Complex(c.strength, 0.0), to_sparse(jt), to_sparse(js.adjoint())});
  }
  left_ = to_sparse(g);
  left_adj_ = to_sparse(g.adjoint());
}

void GeneratorKernel::apply_columns(const Matrix& rho, Matrix& out, Vector& t,
                                    int j0, int j1) const {
  for (int j = j0; j < j1; ++j) {
    auto outj = out.col(j);
    outj.setZero();
    spmv_acc(left_, rho.col(j), outj, Complex(1.0, 0.0));
    for (SparseMatrix::InnerIterator it(left_adj_, j); it; ++it) {
      outj += it.value() * rho.col(it.row());
    }
    for (const Feed& f : feeds_) {
      bool any = false;
      for (SparseMatrix::InnerIterator it(f.b_adj, j); it; ++it) {
        if (!any) {
          t = it.value() * rho.col(it.row());
          any = true;
        } else {
          t += it.value() * rho.col(it.row());
        }
      }
      if (any) spmv_acc(f.a, t, outj, f.coeff);
    }
  }
}

void GeneratorKernel::apply(const Matrix& rho, Matrix& out) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) {
    throw std::invalid_argument("GeneratorKernel::apply: shape mismatch");
  }
  out.resize(dim_, dim_);
#ifdef _OPENMP
  if (threads_ > 1) {
#pragma omp parallel num_threads(threads_)
    {
      Vector t(dim_);
#pragma omp for schedule(static)
      for (int j = 0; j < dim_; ++j) apply_columns(rho, out, t, j, j + 1);
    }
    return;
  }
#endif
  Vector t(dim_);
  apply_columns(rho, out, t, 0, dim_);
}

Matrix GeneratorKernel::apply(const Matrix& rho) const {
  Matrix out;
  apply(rho, out);
  return out;
}

Vector GeneratorKernel::superoperator_diagonal() const {
  Vector gdiag = Vector::Zero(dim_);
  for (int k = 0; k < dim_; ++k) {
    for (SparseMatrix::InnerIterator it(left_, k); it; ++it) {
      if (it.row() == k) gdiag[k] = it.value();
    }
  }
  std::vector<Vector> adiag, bdiag;
  for (const Feed& f : feeds_) {
    Vector da = Vector::Zero(dim_), db = Vector::Zero(dim_);
    for (int k = 0; k < dim_; ++k) {
      for (SparseMatrix::InnerIterator it(f.a, k); it; ++it) {
        if (it.row() == k) da[k] = it.value();
      }
      for (SparseMatrix::InnerIterator it(f.b_adj, k); it; ++it) {
        if (it.row() == k) db[k] = it.value();
      }
    }
    adiag.push_back(std::move(da));
    bdiag.push_back(std::move(db));
  }
  Vector d(static_cast<Eigen::Index>(dim_) * dim_);
  for (int j = 0; j < dim_; ++j) {
    for (int i = 0; i < dim_; ++i) {
      Complex v = gdiag[i] + std::conj(gdiag[j]);
      for (std::size_t f = 0; f < feeds_.size(); ++f) {
        v += feeds_[f].coeff * adiag[f][i] * bdiag[f][j];
      }
      d[static_cast<Eigen::Index>(j) * dim_ + i] = v;
    }
  }
  return d;
}

}  // namespace cascade
