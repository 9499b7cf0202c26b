#include "cascade/hilbert.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace cascade {

Factor Factor::boson(int cutoff) {
  if (cutoff < 1) {
    throw std::invalid_argument("boson mode cutoff must be >= 1, got " +
                                std::to_string(cutoff));
  }
  return {FactorType::BosonMode, cutoff};
}

SubsystemLayout::SubsystemLayout(std::vector<Factor> factors)
    : factors_(std::move(factors)) {
  std::int64_t d = 1;
  for (const Factor& f : factors_) {
    d *= f.dim();
    if (d > std::numeric_limits<int>::max()) {
      throw std::invalid_argument("layout dimension overflows int");
    }
  }
  dim_ = static_cast<int>(d);
}

const Factor& SubsystemLayout::factor(int slot) const {
  if (slot < 0 || slot >= factor_count()) {
    throw std::invalid_argument("factor slot " + std::to_string(slot) +
                                " out of range");
  }
  return factors_[static_cast<std::size_t>(slot)];
}

int SubsystemLayout::dim_before(int slot) const {
  int d = 1;
  for (int i = 0; i < slot; ++i) d *= factor(i).dim();
  return d;
}

int SubsystemLayout::dim_after(int slot) const {
  int d = 1;
  for (int i = slot + 1; i < factor_count(); ++i) d *= factor(i).dim();
  return d;
}

Operator annihilation(int cutoff) {
  if (cutoff < 1) {
    throw std::invalid_argument("annihilation requires cutoff >= 1");
  }
  const int d = cutoff + 1;
  Matrix m = Matrix::Zero(d, d);
  for (int n = 1; n <= cutoff; ++n) m(n - 1, n) = std::sqrt(double(n));
  return {SubsystemLayout({Factor::boson(cutoff)}), std::move(m)};
}

Operator creation(int cutoff) {
  Operator a = annihilation(cutoff);
  a.matrix = a.matrix.adjoint().eval();
  return a;
}

Operator sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return {SubsystemLayout({Factor::two_level()}), std::move(m)};
}

Operator sigma_plus() {
  Operator s = sigma_minus();
  s.matrix = s.matrix.adjoint().eval();
  return s;
}

Operator embed(const Matrix& local, int slot, const SubsystemLayout& layout) {
  const int d = layout.factor(slot).dim();
  if (local.rows() != d || local.cols() != d) {
    throw std::invalid_argument(
        "embed: operator dimension " + std::to_string(local.rows()) +
        " does not match factor dimension " + std::to_string(d) + " at slot " +
        std::to_string(slot));
  }
  const int pre = layout.dim_before(slot);
  const int post = layout.dim_after(slot);
  Matrix out = Matrix::Zero(layout.dim(), layout.dim());
  for (int p = 0; p < pre; ++p) {
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        const Complex v = local(r, c);
        if (v == Complex(0.0, 0.0)) continue;
        const int row0 = (p * d + r) * post;
        const int col0 = (p * d + c) * post;
        for (int q = 0; q < post; ++q) out(row0 + q, col0 + q) = v;
      }
    }
  }
  return {layout, std::move(out)};
}

Operator embed(const Operator& op, int slot, const SubsystemLayout& layout) {
  return embed(op.matrix, slot, layout);
}

Operator build_jc_hamiltonian(double g, int cavity_slot,
                              const std::vector<int>& emitter_slots,
                              const SubsystemLayout& layout) {
  if (emitter_slots.empty()) {
    throw std::invalid_argument("build_jc_hamiltonian: no emitter slots");
  }
  const Factor& cav = layout.factor(cavity_slot);
  if (cav.type != FactorType::BosonMode) {
    throw std::invalid_argument("cavity slot is not a boson mode");
  }
  for (std::size_t i = 0; i < emitter_slots.size(); ++i) {
    const int s = emitter_slots[i];
    if (s == cavity_slot) {
      throw std::invalid_argument("emitter slot collides with cavity slot");
    }
    for (std::size_t j = i + 1; j < emitter_slots.size(); ++j) {
      if (emitter_slots[j] == s) {
        throw std::invalid_argument("duplicate emitter slot");
      }
    }
    if (layout.factor(s).type != FactorType::TwoLevel) {
      throw std::invalid_argument("emitter slot is not a two-level system");
    }
  }
  const Matrix adag = embed(creation(cav.cutoff), cavity_slot, layout).matrix;
  Matrix h = Matrix::Zero(layout.dim(), layout.dim());
  for (int s : emitter_slots) {
    const Matrix sm = embed(sigma_minus(), s, layout).matrix;
    h += adag * sm;
  }
  h = g * (h + h.adjoint().eval());
  return {layout, std::move(h)};
}

bool is_hermitian(const Matrix& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() < tol;
}

}  // namespace cascade
