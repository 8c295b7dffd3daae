#pragma once

#include <array>
#include <cstddef>
#include <Eigen/Dense>
#include <vector>

#include "cesaro/geometry.hpp"
#include "cesaro/model.hpp"

namespace cesaro {

inline constexpr std::size_t kDefaultMaxModes = 4096;

/// Fourier modes e_n(y) = exp(2 pi i n.y) with |n|_inf <= K, lexicographic order.
class ModalBasis {
 public:
  ModalBasis(TorusSpace space, int cutoff, std::size_t max_modes = kDefaultMaxModes);

  const TorusSpace& space() const noexcept { return space_; }
  int cutoff() const noexcept { return cutoff_; }
  std::size_t size() const noexcept { return modes_.size(); }
  const std::vector<Frequency>& modes() const noexcept { return modes_; }
  const Frequency& mode(std::size_t i) const { return modes_[i]; }
  /// Laplace eigenvalue 4 pi^2 |n|_2^2.
  double eigenvalue(std::size_t i) const { return eigenvalues_[i]; }
  /// Modal block index |n|_inf.
  int block(std::size_t i) const;
  /// Position of n in this basis, or -1.
  std::ptrdiff_t index_of(const Frequency& n) const;

  bool operator==(const ModalBasis& other) const noexcept {
    return space_ == other.space_ && cutoff_ == other.cutoff_;
  }

 private:
  TorusSpace space_;
  int cutoff_;
  std::vector<Frequency> modes_;
  std::vector<double> eigenvalues_;
};

ModalBasis build_basis(TorusSpace space, int cutoff, std::size_t max_modes = kDefaultMaxModes);

/// Gamma(g)_{ij} = integral over g.omega of e_i conj(e_j).
struct ObservationMatrix {
  ModalBasis basis;
  GroupElement shift;
  Eigen::MatrixXcd entries;
};

ObservationMatrix gamma_matrix(const ModalBasis& basis, const PrototypeSet& set,
                               const GroupElement& g);

/// Integral over a set of |f|^2 for f = sum_i v_i e_i, given that set's Gamma.
double observed_mass(const Eigen::MatrixXcd& gamma, const Eigen::VectorXcd& coefficients);

/// Eigenvalues (ascending) of the Gram matrix of sin(rho t), cos(rho t) on
/// [t0, t0 + T0], obtained by integrating the products and diagonalizing.
std::array<double, 2> temporal_gram_eigenvalues(double rho, double t0, double T0);

/// Temporal frequency of mode i: sqrt(lambda + mass^2) for wave/KG, lambda for Schrodinger.
double temporal_frequency(const ModalBasis& basis, std::size_t i, Model model, double mass);

/// inf over the basis of the kinetic lower constant (T0 for a rho = 0 mode).
double kinetic_lower_constant(const ModalBasis& basis, double mass, double T0);

/// 2 rho_max C_eq / T0.
double lipschitz_from_frequency(double rho_max, double c_eq, double T0);

/// Lipschitz constant in t of every windowed density F_{V,j}, F_{V,M} over
/// trajectories normalized by int_I int_M |V|^2 = 1.
double trajectory_lipschitz_bound(const ModalBasis& basis, double mass, Model model, double T0);

}  // namespace cesaro
