#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "cesaro/design.hpp"
#include "cesaro/spectral.hpp"
#include "oracles.hpp"

using namespace cesaro;
using cd = std::complex<double>;

namespace {

// Uniform shift with exactly one component per torus axis.
cesaro::GroupElement random_shift(const cesaro::TorusSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c;
  for (int a = 0; a < space.dim(); ++a) c.push_back(u(rng));
  return cesaro::GroupElement::from(space, c);
}
const TorusSpace T1(1);
const TorusSpace T2(2);
constexpr double kPi = std::numbers::pi;

void expect_hermitian_psd(const Eigen::MatrixXcd& m, double L) {
  EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
  EXPECT_LE(es.eigenvalues().maxCoeff(), 1.0 + 1e-12);
  EXPECT_NEAR(m.trace().real(), L * static_cast<double>(m.rows()), 1e-12);
}
}  // namespace

TEST(Basis, Sizes) {
  const ModalBasis b0(T1, 0);
  ASSERT_EQ(b0.size(), 1u);
  EXPECT_EQ(b0.eigenvalue(0), 0.0);

  const ModalBasis b2(T1, 2);
  ASSERT_EQ(b2.size(), 5u);
  EXPECT_EQ(b2.mode(0)[0], -2);
  EXPECT_EQ(b2.mode(4)[0], 2);
  EXPECT_NEAR(b2.eigenvalue(0), 16 * kPi * kPi, 1e-12);
  EXPECT_NEAR(b2.eigenvalue(4), 16 * kPi * kPi, 1e-12);

  const ModalBasis b21(T2, 1);
  ASSERT_EQ(b21.size(), 9u);
  const auto idx = b21.index_of({1, 1});
  ASSERT_GE(idx, 0);
  EXPECT_NEAR(b21.eigenvalue(static_cast<std::size_t>(idx)), 8 * kPi * kPi, 1e-12);
  EXPECT_EQ(b21.block(static_cast<std::size_t>(idx)), 1);
}

TEST(Basis, OrderedAndDistinct) {
  for (int K = 0; K <= 3; ++K) {
    const ModalBasis b(T2, K);
    EXPECT_EQ(b.size(), static_cast<std::size_t>((2 * K + 1) * (2 * K + 1)));
    for (std::size_t i = 1; i < b.size(); ++i) EXPECT_LT(b.mode(i - 1), b.mode(i));
    for (std::size_t i = 0; i < b.size(); ++i) {
      EXPECT_GE(b.eigenvalue(i), 0.0);
      EXPECT_EQ(b.index_of(b.mode(i)), static_cast<std::ptrdiff_t>(i));
    }
  }
  EXPECT_EQ(ModalBasis(T1, 2).index_of({7, 0}), -1);
  EXPECT_THROW(ModalBasis(T2, 100), std::invalid_argument);
}

TEST(Gamma, FullTorusIsIdentity) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const TorusSpace& s : {T1, T2}) {
    const ModalBasis b(s, 2);
    for (int t = 0; t < 5; ++t) {
      const auto g = gamma_matrix(b, PrototypeSet::full(s), random_shift(s, rng));
      const auto n = static_cast<Eigen::Index>(b.size());
      EXPECT_LT((g.entries - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(Gamma, HalfIntervalEntries) {
  const ModalBasis b(T1, 1);
  const auto g = gamma_matrix(b, PrototypeSet::interval(0.0, 0.5), GroupElement::identity());
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(g.entries(i, i) - 0.5), 0.0, 1e-15);
  const auto i0 = b.index_of({0, 0});
  const auto i1 = b.index_of({1, 0});
  // Gamma_ij = int e_i conj(e_j) = int_0^{1/2} exp(-2 pi i y) dy = -i / pi
  const cd entry = g.entries(i0, i1);
  EXPECT_NEAR(entry.real(), 0.0, 1e-15);
  EXPECT_NEAR(entry.imag(), -1.0 / kPi, 1e-15);
  const cd quad = oracle::fourier(PrototypeSet::interval(0.0, 0.5), {1, 0}, 1000000);
  EXPECT_LT(std::abs(entry - quad), 1e-6);
}

TEST(Gamma, PhaseCovariance) {
  const ModalBasis b(T1, 2);
  const PrototypeSet w = PrototypeSet::interval(0.1, 0.45);
  const auto g0 = gamma_matrix(b, w, GroupElement::identity());
  const auto gh = gamma_matrix(b, w, GroupElement::from(T1, {0.5}));
  Eigen::VectorXcd d(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) d(static_cast<Eigen::Index>(i)) = std::polar(1.0, 2 * kPi * b.mode(i)[0] * 0.5);
  const Eigen::MatrixXcd expected = d.asDiagonal() * g0.entries * d.conjugate().asDiagonal();
  EXPECT_LT((gh.entries - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Gamma, HermitianPsdWithUnitSpectrum) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const TorusSpace& s = t % 2 ? T2 : T1;
    Box box;
    for (int a = 0; a < s.dim(); ++a) {
      box.lo[a] = u(rng);
      box.hi[a] = box.lo[a] + 0.1 + 0.5 * u(rng);
    }
    const PrototypeSet w(s, {box});
    const ModalBasis b(s, 2);
    const auto g = gamma_matrix(b, w, random_shift(s, rng));
    expect_hermitian_psd(g.entries, w.measure());
  }
}

TEST(Gamma, EquispacedAverageKillsFrequencies) {
  for (int K = 1; K <= 3; ++K) {
    const ModalBasis b(T1, K);
    const PrototypeSet w = PrototypeSet::interval(0.2, 0.5);
    const int J = 4 * K + 1;
    Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(b.size(), b.size());
    for (int j = 0; j < J; ++j)
      avg += gamma_matrix(b, w, GroupElement::from(T1, {double(j) / J})).entries / double(J);
    const auto n = static_cast<Eigen::Index>(b.size());
    EXPECT_LT((avg - w.measure() * Eigen::MatrixXcd::Identity(n, n)).norm(), 1e-12);
  }
}

TEST(GammaOracle, RiemannQuadrature) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const TorusSpace& s = t % 4 == 3 ? T2 : T1;
    const int K = 1 + t % 3;
    Box box;
    for (int a = 0; a < s.dim(); ++a) {
      box.lo[a] = u(rng);
      box.hi[a] = box.lo[a] + 0.1 + 0.6 * u(rng);
    }
    const PrototypeSet w(s, {box});
    const auto shift = random_shift(s, rng);
    const ModalBasis b(s, K);
    const auto g = gamma_matrix(b, w, shift);
    const auto moved = translate_set(w, shift);
    const int nodes = s.dim() == 1 ? 1000000 : 200;
    // Check one full row against quadrature: entries depend only on n_j - n_i.
    const std::size_t i = b.size() / 2;
    for (std::size_t j = 0; j < b.size(); j += (s.dim() == 1 ? 1 : 4)) {
      const Frequency diff{b.mode(j)[0] - b.mode(i)[0], b.mode(j)[1] - b.mode(i)[1]};
      const cd quad = oracle::fourier(moved, diff, nodes);
      EXPECT_LT(std::abs(g.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - quad), 1e-6);
    }
  }
}

TEST(Gram, ClosedFormEigenvalues) {
  const auto ev = temporal_gram_eigenvalues(2 * kPi, 0.0, 1.0);
  EXPECT_NEAR(ev[0], 0.5, 1e-15);
  EXPECT_NEAR(ev[1], 0.5, 1e-15);
  for (double rho : {0.3, 1.0, 2.5, 7.0, 40.0}) {
    for (double T0 : {0.5, 1.0, 2.0}) {
      const auto a = temporal_gram_eigenvalues(rho, 0.0, T0);
      const auto b = temporal_gram_eigenvalues(rho, 0.37, T0);
      const double half = std::abs(std::sin(rho * T0)) / (2 * rho);
      EXPECT_NEAR(a[0], T0 / 2 - half, 1e-12);
      EXPECT_NEAR(a[1], T0 / 2 + half, 1e-12);
      EXPECT_NEAR(a[0], b[0], 1e-12);
      EXPECT_NEAR(a[1], b[1], 1e-12);
    }
  }
}

TEST(Lipschitz, PlugInValues) {
  const ModalBasis b0(T1, 0);
  // Klein-Gordon, constant mode rho = 1: C_eq = T0 / c with c the Gram lower eigenvalue.
  const double c = temporal_gram_eigenvalues(1.0, 0.0, 1.0)[0];
  EXPECT_NEAR(trajectory_lipschitz_bound(b0, 1.0, Model::klein_gordon, 1.0), 2.0 * 1.0 * (1.0 / c), 1e-12);
  // Wave K = 0: only the velocity mode, rho_max = 0.
  EXPECT_EQ(trajectory_lipschitz_bound(b0, 0.0, Model::wave, 1.0), 0.0);
  const ModalBasis b1(T1, 1);
  EXPECT_NEAR(trajectory_lipschitz_bound(b1, 0.0, Model::schrodinger, 1.0), 8 * kPi * kPi, 1e-9);
  EXPECT_NEAR(trajectory_lipschitz_bound(b1, 0.0, Model::wave, 1.0), 8 * kPi, 1e-9);
  EXPECT_NEAR(lipschitz_from_frequency(2 * 3.0, 1.5, 1.0), 2 * lipschitz_from_frequency(3.0, 1.5, 1.0), 1e-15);
  EXPECT_GE(trajectory_lipschitz_bound(b1, 0.0, Model::schrodinger, 2.0), 0.0);
}

TEST(Lipschitz, BoundsObservedDensityDerivative) {
  // F(t) = int_{g w} |q(t)|^2 for normalized windowed data; finite differences stay below Lambda.
  const ModalBasis b(T1, 2);
  const PrototypeSet w = PrototypeSet::interval(0.0, 0.3);
  const auto G = gamma_matrix(b, w, GroupElement::from(T1, {0.17}));
  for (Model model : {Model::wave, Model::klein_gordon, Model::schrodinger}) {
    const double mass = model == Model::klein_gordon ? 1.0 : 0.0;
    const double lambda = trajectory_lipschitz_bound(b, mass, model, 1.0);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const ModalDatum z = random_datum(model, b, mass, 2, {}, seed);
      const OutputKind kind = natural_output(model);
      const double norm = full_manifold_energy(z, kind, 0.0, 1.0);
      double worst = 0.0;
      const double h = 1e-5;
      for (int k = 0; k < 200; ++k) {
        const double t = k / 200.0;
        const double f0 = observed_mass(G.entries, oracle::output_at(z, kind, t));
        const double f1 = observed_mass(G.entries, oracle::output_at(z, kind, t + h));
        worst = std::max(worst, std::abs(f1 - f0) / h / norm);
      }
      EXPECT_LE(worst, lambda * (1 + 1e-6)) << to_string(model);
    }
  }
}
