#include "cesaro/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cesaro {

namespace {
constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;
}

ModalBasis::ModalBasis(TorusSpace space, int cutoff, std::size_t max_modes)
    : space_(space), cutoff_(cutoff) {
  if (cutoff < 0) throw std::invalid_argument("basis cutoff must be nonnegative");
  std::size_t count = 1;
  for (int a = 0; a < space.dim(); ++a) count *= static_cast<std::size_t>(2 * cutoff + 1);
  if (count > max_modes)
    throw std::invalid_argument("basis with cutoff " + std::to_string(cutoff) + " has " +
                                std::to_string(count) + " modes, above the limit " +
                                std::to_string(max_modes));
  modes_.reserve(count);
  if (space.dim() == 1) {
    for (int n = -cutoff; n <= cutoff; ++n) modes_.push_back({n, 0});
  } else {
    for (int n0 = -cutoff; n0 <= cutoff; ++n0)
      for (int n1 = -cutoff; n1 <= cutoff; ++n1) modes_.push_back({n0, n1});
  }
  eigenvalues_.reserve(count);
  for (const Frequency& n : modes_)
    eigenvalues_.push_back(kFourPiSq * (double(n[0]) * n[0] + double(n[1]) * n[1]));
}

int ModalBasis::block(std::size_t i) const {
  return std::max(std::abs(modes_[i][0]), std::abs(modes_[i][1]));
}

std::ptrdiff_t ModalBasis::index_of(const Frequency& n) const {
  auto it = std::lower_bound(modes_.begin(), modes_.end(), n);
  if (it == modes_.end() || *it != n) return -1;
  return it - modes_.begin();
}

ModalBasis build_basis(TorusSpace space, int cutoff, std::size_t max_modes) {
  return ModalBasis(space, cutoff, max_modes);
}

ObservationMatrix gamma_matrix(const ModalBasis& basis, const PrototypeSet& set,
                               const GroupElement& g) {
  if (!(basis.space() == set.space()))
    throw std::invalid_argument("basis and prototype set live on different tori");
  const PrototypeSet moved = translate_set(set, g);
  const std::size_t n = basis.size();
  // Entries depend only on n_j - n_i; evaluate each distinct difference once.
  std::map<Frequency, std::complex<double>> coefficient;
  Eigen::MatrixXcd entries(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Frequency diff{basis.mode(j)[0] - basis.mode(i)[0], basis.mode(j)[1] - basis.mode(i)[1]};
      auto it = coefficient.find(diff);
      if (it == coefficient.end())
        it = coefficient.emplace(diff, indicator_fourier_coefficient(moved, diff)).first;
      entries(i, j) = it->second;
    }
  }
  return {basis, g, std::move(entries)};
}

double observed_mass(const Eigen::MatrixXcd& gamma, const Eigen::VectorXcd& coefficients) {
  // sum_ij v_i conj(v_j) Gamma_ij
  return (coefficients.transpose() * gamma * coefficients.conjugate()).value().real();
}

std::array<double, 2> temporal_gram_eigenvalues(double rho, double t0, double T0) {
  if (rho == 0.0) return {0.0, T0};
  const double t1 = t0 + T0;
  const double sin_diff = std::sin(2.0 * rho * t1) - std::sin(2.0 * rho * t0);
  const double ss = 0.5 * T0 - sin_diff / (4.0 * rho);
  const double cc = 0.5 * T0 + sin_diff / (4.0 * rho);
  const double s1 = std::sin(rho * t1);
  const double s0 = std::sin(rho * t0);
  const double sc = (s1 * s1 - s0 * s0) / (2.0 * rho);
  const double mean = 0.5 * (ss + cc);
  const double half_gap = std::hypot(0.5 * (ss - cc), sc);
  return {mean - half_gap, mean + half_gap};
}

double temporal_frequency(const ModalBasis& basis, std::size_t i, Model model, double mass) {
  if (model == Model::schrodinger) return basis.eigenvalue(i);
  const double m2 = model == Model::wave ? 0.0 : mass * mass;
  return std::sqrt(basis.eigenvalue(i) + m2);
}

double kinetic_lower_constant(const ModalBasis& basis, double mass, double T0) {
  if (!(T0 > 0.0)) throw std::invalid_argument("T0 must be positive");
  double c = T0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double rho = std::sqrt(basis.eigenvalue(i) + mass * mass);
    if (rho == 0.0) continue;  // velocity-only mode contributes T0
    c = std::min(c, temporal_gram_eigenvalues(rho, 0.0, T0)[0]);
  }
  return c;
}

double lipschitz_from_frequency(double rho_max, double c_eq, double T0) {
  return 2.0 * rho_max * c_eq / T0;
}

double trajectory_lipschitz_bound(const ModalBasis& basis, double mass, Model model, double T0) {
  if (!(T0 > 0.0)) throw std::invalid_argument("T0 must be positive");
  if (basis.size() == 0) throw std::invalid_argument("empty basis");
  double rho_max = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    rho_max = std::max(rho_max, temporal_frequency(basis, i, model, mass));
  if (model == Model::schrodinger) {
    // |v(t)|^2 is conserved, so sup_t F_M = mean_t F_M = 1 / T0.
    return lipschitz_from_frequency(rho_max, 1.0, T0);
  }
  // |v|^2 <= E and |v'|^2 <= rho_max^2 E pointwise; E <= (1/c) int_I F_M = 1/c.
  const double m = model == Model::wave ? 0.0 : mass;
  const double c = kinetic_lower_constant(basis, m, T0);
  return lipschitz_from_frequency(rho_max, T0 / c, T0);
}

}  // namespace cesaro
