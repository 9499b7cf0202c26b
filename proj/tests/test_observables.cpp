#include "cascade/observables.hpp"

#include "doctest.h"

#include <cmath>

using namespace cascade;

namespace {

// Helper: product state with the cavity at `slot` holding `dist` and all
// other factors in their ground states.
DensityMatrix product_state(const std::vector<double>& dist) {
  const int cutoff = static_cast<int>(dist.size()) - 1;
  const SubsystemLayout layout(
      {Factor::two_level(), Factor::boson(cutoff), Factor::two_level()});
  Matrix m = Matrix::Zero(layout.dim(), layout.dim());
  const int after = layout.dim_after(1);
  for (int n = 0; n <= cutoff; ++n) {
    m(n * after, n * after) = dist[static_cast<std::size_t>(n)];
  }
  return {layout, std::move(m)};
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST_CASE("analytic occupation distributions") {
  const std::vector<double> th = thermal_occupation(0.5, 60);
  double sum = 0.0, mean = 0.0;
  for (std::size_t n = 0; n < th.size(); ++n) {
    sum += th[n];
    mean += n * th[n];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mean == doctest::Approx(0.5).epsilon(1e-9));
  // geometric ratio nbar / (nbar + 1)
  CHECK(th[3] / th[2] == doctest::Approx(0.5 / 1.5));

  const std::vector<double> co = coherent_occupation(1.0, 40);
  CHECK(co[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(co[2] == doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-9));

  CHECK_THROWS_AS(thermal_occupation(-0.1, 10), std::invalid_argument);
}

TEST_CASE("factorial moments and mean") {
  PhotonDistribution dist{{0.0, 0.0, 0.0, 0.0, 1.0}, 0};  // Fock 4
  CHECK(dist.mean() == doctest::Approx(4.0));
  CHECK(dist.factorial_moment(1) == doctest::Approx(4.0));
  CHECK(dist.factorial_moment(2) == doctest::Approx(12.0));
  CHECK(dist.factorial_moment(4) == doctest::Approx(24.0));
  CHECK(dist.factorial_moment(5) == doctest::Approx(0.0));
}

TEST_CASE("reference g^(n) closed forms") {
  CHECK(reference_gn(ReferenceKind::coherent(), 5) == 1.0);
  CHECK(reference_gn(ReferenceKind::thermal(), 2) == doctest::Approx(2.0));
  CHECK(reference_gn(ReferenceKind::thermal(), 4) == doctest::Approx(24.0));
  CHECK(reference_gn(ReferenceKind::fock(4), 2) == doctest::Approx(0.75));
  CHECK(reference_gn(ReferenceKind::fock(2), 2) == doctest::Approx(0.5));
  CHECK(reference_gn(ReferenceKind::fock(3), 4) == 0.0);  // n > N
  CHECK(reference_gn(ReferenceKind::fock(5), 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(reference_gn(ReferenceKind::thermal(), 0),
                  std::invalid_argument);
}

TEST_CASE("g_n matches analytic references on synthetic distributions") {
  PhotonDistribution th{thermal_occupation(0.5, 40), 0};
  for (int n = 2; n <= 6; ++n) {
    CHECK(g_n(th, n) == doctest::Approx(factorial(n)).epsilon(1e-4));
  }
  // thermal ladder property g^(n+1)/g^(n) = n + 1
  for (int n = 2; n <= 5; ++n) {
    CHECK(g_n(th, n + 1) / g_n(th, n) == doctest::Approx(n + 1).epsilon(1e-4));
  }

  PhotonDistribution co{coherent_occupation(1.0, 20), 0};
  for (int n = 2; n <= 6; ++n) {
    CHECK(g_n(co, n) == doctest::Approx(1.0).epsilon(1e-6));
  }

  PhotonDistribution fock{{0.0, 0.0, 0.0, 0.0, 1.0}, 0};
  CHECK(std::abs(g_n(fock, 2) - 0.75) < 1e-10);
}

TEST_CASE("g_n and photon_distribution through a composite state") {
  const DensityMatrix rho = product_state(thermal_occupation(0.8, 30));
  const PhotonDistribution dist = photon_distribution(rho, 1);
  CHECK(dist.mean() == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(g_n(rho, 1, 2) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g_n(rho, 1, 2) == doctest::Approx(g_n(dist, 2)));
  CHECK_THROWS_AS(photon_distribution(rho, 0), std::invalid_argument);
  CHECK_THROWS_AS(photon_distribution(rho, 3), std::invalid_argument);
}

TEST_CASE("dual route: factorial moment vs operator expectation") {
  const DensityMatrix rho = product_state(coherent_occupation(1.3, 25));
  const Operator a = embed(annihilation(25), 1, rho.layout);
  const Matrix n_op = a.matrix.adjoint() * a.matrix;
  const Matrix n2_op =
      a.matrix.adjoint() * a.matrix.adjoint() * a.matrix * a.matrix;
  const double mean = expectation(n_op, rho.matrix).real();
  const double mom2 = expectation(n2_op, rho.matrix).real();
  const double g2_op = mom2 / (mean * mean);
  CHECK(g_n(rho, 1, 2) == doctest::Approx(g2_op).epsilon(1e-10));
}

TEST_CASE("undefined correlation near vacuum") {
  PhotonDistribution vac{{1.0, 0.0, 0.0}, 0};
  CHECK_THROWS_AS(g_n(vac, 2), UndefinedCorrelationError);
  CHECK_THROWS_AS(g_n(vac, 2, 1e-12), std::runtime_error);
  CHECK_THROWS_AS(g_n(vac, 1), std::invalid_argument);  // n >= 2 only
}

TEST_CASE("second central difference") {
  std::map<int, double> g;
  g[2] = 2.0;
  g[3] = 6.0;
  g[4] = 24.0;
  // at n = 2 the missing g^(1) defaults to 1
  CHECK(second_central_difference(g, 2) == doctest::Approx(6.0 - 4.0 + 1.0));
  CHECK(second_central_difference(g, 3) == doctest::Approx(24.0 - 12.0 + 2.0));
  CHECK_THROWS_AS(second_central_difference(g, 4), std::invalid_argument);

  // Fock(4): g2 = 0.75, g3 = 0.375 -> curvature at n = 2 is -0.125
  std::map<int, double> fock;
  fock[2] = reference_gn(ReferenceKind::fock(4), 2);
  fock[3] = reference_gn(ReferenceKind::fock(4), 3);
  CHECK(second_central_difference(fock, 2) == doctest::Approx(-0.125));

  // coherent curve is flat
  std::map<int, double> coh{{2, 1.0}, {3, 1.0}};
  CHECK(second_central_difference(coh, 2) == doctest::Approx(0.0));
  // thermal curve is convex
  std::map<int, double> th{{2, 2.0}, {3, 6.0}};
  CHECK(second_central_difference(th, 2) == doctest::Approx(3.0));
}
