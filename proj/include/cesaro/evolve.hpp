#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cesaro/model.hpp"
#include "cesaro/schedule.hpp"
#include "cesaro/spectral.hpp"

namespace cesaro {

/// Modal state of a conservative model on the simulation basis.
/// Wave/KG: u(t) = sum (a_n cos(rho_n t) + b_n sin(rho_n t) / rho_n) e_n.
/// Schrodinger: u(t) = sum c_n exp(i lambda_n t) e_n, stored in `a`; `b` is empty.
struct ModalDatum {
  Model model = Model::schrodinger;
  double mass = 0.0;
  ModalBasis basis;
  Eigen::VectorXcd a;
  Eigen::VectorXcd b;

  ModalDatum(Model model, double mass, ModalBasis basis);
  double frequency(std::size_t i) const;
};

struct EnergyDecomposition {
  double total = 0.0;
  std::vector<double> per_mode;
  std::vector<double> window_sums;  ///< window_sums[K] = E_{<=K}, K = 0..cutoff

  double up_to(int K) const;
};

struct DecayProfile {
  enum class Kind { flat, power };
  Kind kind = Kind::flat;
  double p = 0.0;

  double scale(const Frequency& n) const;
};

/// Seeded complex Gaussian datum on modes with |n|_inf <= window, each mode
/// scaled by the decay profile evaluated at 1 + |n|_2.
ModalDatum random_datum(Model model, const ModalBasis& basis, double mass, int window,
                        const DecayProfile& decay, std::uint64_t seed);

EnergyDecomposition conserved_energy(const ModalDatum& datum);

/// Exact propagation by t.
ModalDatum evolve_to(const ModalDatum& datum, double t);

/// Keeps modes with |n|_inf <= K (truncate) or > K (tail).
ModalDatum truncate(const ModalDatum& datum, int K);
ModalDatum tail(const ModalDatum& datum, int K);

/// v(t) = sum_p amp(k, p) exp(i freq(k, p) t) for output coefficient k.
struct OutputExpansion {
  Eigen::MatrixXcd amp;  ///< size x 2
  Eigen::MatrixXd freq;  ///< size x 2
};

OutputExpansion output_expansion(const ModalDatum& datum, OutputKind kind);
/// Output coefficient vector at time t.
Eigen::VectorXcd output_coefficients(const ModalDatum& datum, OutputKind kind, double t);

/// int_{t_a}^{t_b} v(t)^T gamma conj(v(t)) dt for a fixed observation matrix.
double slot_energy(const ModalDatum& datum, OutputKind kind, const Eigen::MatrixXcd& gamma,
                   double t_a, double t_b);

/// int_{t0}^{t0+T0} int_M |q|^2.
double full_manifold_energy(const ModalDatum& datum, OutputKind kind, double t0, double T0);

/// Observation energy along a periodic timeline; gammas[j] is Gamma at atom j.
/// During a transit segment the set moves with the segment velocity.
double timeline_energy(const ModalDatum& datum, const PeriodicTimeline& timeline,
                       OutputKind kind, std::span<const ObservationMatrix> gammas);

/// int_I int_{omega(t)} |q|^2 for the switching observer.
double windowed_observation_energy(const ModalDatum& datum, const SwitchingSchedule& schedule,
                                   OutputKind kind, std::span<const ObservationMatrix> gammas);

/// Same for the continuous observer.
double windowed_observation_energy(const ModalDatum& datum, const ContinuousPath& path,
                                   OutputKind kind, std::span<const ObservationMatrix> gammas);

}  // namespace cesaro
