#include "cesaro/evolve.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "cesaro/errors.hpp"

namespace cesaro {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
// Frequencies closer than this are treated as coincident in time integrals.
constexpr double kCoincidence = 1e-9;

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// int_a^b exp(i w s) ds
cd interval_kernel(double w, double a, double b) {
  const double len = b - a;
  const cd phase = std::polar(1.0, 0.5 * w * (a + b));
  if (std::abs(w) < kCoincidence) return phase * len;
  return phase * (len * sinc(0.5 * w * len));
}

// sum_{r=0}^{R-1} exp(i w tau r)
cd geometric_sum(double w, double tau, std::int64_t R) {
  if (R == 1) return {1.0, 0.0};
  const double x = 0.5 * w * tau;
  // exp(2 i x r) only depends on x mod pi.
  const double delta = x - kPi * std::nearbyint(x / kPi);
  const double Rd = static_cast<double>(R);
  if (std::abs(delta) < 1e-12) return {Rd, 0.0};
  return std::polar(std::sin(Rd * delta) / std::sin(delta), delta * (Rd - 1.0));
}

struct Term {
  std::size_t mode;
  cd amp;
  double nu;
};

std::vector<Term> active_terms(const OutputExpansion& ex) {
  std::vector<Term> terms;
  for (Eigen::Index k = 0; k < ex.amp.rows(); ++k)
    for (Eigen::Index p = 0; p < 2; ++p)
      if (ex.amp(k, p) != cd(0.0, 0.0))
        terms.push_back({static_cast<std::size_t>(k), ex.amp(k, p), ex.freq(k, p)});
  return terms;
}

double energy_core(const ModalDatum& datum, const PeriodicTimeline& tl, OutputKind kind,
                   const std::vector<const Eigen::MatrixXcd*>& gammas) {
  const std::vector<Term> terms = active_terms(output_expansion(datum, kind));
  const std::size_t T = terms.size();
  const auto& modes = datum.basis.modes();
  const int dim = datum.basis.space().dim();

  // Amplitude, start phase and repetition factor shared by every segment.
  std::vector<cd> periodic(T * T);
  for (std::size_t i = 0; i < T; ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      const double w = terms[i].nu - terms[j].nu;
      periodic[i * T + j] = terms[i].amp * std::conj(terms[j].amp) * std::polar(1.0, w * tl.t0) *
                            geometric_sum(w, tl.period, tl.repeats);
    }
  }

  cd acc{0.0, 0.0};
  for (const TimelineSegment& seg : tl.segments) {
    if (!(seg.end > seg.start)) continue;
    const Eigen::MatrixXcd& G = *gammas.at(static_cast<std::size_t>(seg.atom));
    for (std::size_t i = 0; i < T; ++i) {
      const std::size_t k = terms[i].mode;
      for (std::size_t j = 0; j < T; ++j) {
        const std::size_t l = terms[j].mode;
        const cd g = G(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
        if (g == cd(0.0, 0.0)) continue;
        const double w = terms[i].nu - terms[j].nu;
        double kappa = 0.0;
        if (seg.transit) {
          double dot = 0.0;
          for (int a = 0; a < dim; ++a) dot += double(modes[l][a] - modes[k][a]) * seg.velocity[a];
          kappa = -2.0 * kPi * dot;
        }
        cd contribution = g * periodic[i * T + j] * interval_kernel(w + kappa, seg.start, seg.end);
        if (kappa != 0.0) contribution *= std::polar(1.0, -kappa * seg.start);
        acc += contribution;
      }
    }
  }
  return acc.real();
}

std::vector<const Eigen::MatrixXcd*> checked_gammas(const ModalDatum& datum,
                                                    std::span<const ObservationMatrix> gammas,
                                                    std::size_t atoms) {
  if (gammas.size() < atoms)
    throw std::invalid_argument("expected " + std::to_string(atoms) + " observation matrices, got " +
                                std::to_string(gammas.size()));
  std::vector<const Eigen::MatrixXcd*> out;
  out.reserve(gammas.size());
  for (const ObservationMatrix& g : gammas) {
    if (!(g.basis == datum.basis))
      throw BasisMismatch("observation matrix has cutoff " + std::to_string(g.basis.cutoff()) +
                          ", datum has cutoff " + std::to_string(datum.basis.cutoff()));
    out.push_back(&g.entries);
  }
  return out;
}

PeriodicTimeline single_slot(double t_a, double t_b) {
  PeriodicTimeline tl;
  tl.t0 = t_a;
  tl.period = t_b - t_a;
  tl.repeats = 1;
  TimelineSegment seg;
  seg.start = 0.0;
  seg.end = t_b - t_a;
  tl.segments.push_back(seg);
  return tl;
}

}  // namespace

ModalDatum::ModalDatum(Model model_, double mass_, ModalBasis basis_)
    : model(model_), mass(mass_), basis(std::move(basis_)) {
  if (model != Model::klein_gordon && mass != 0.0)
    throw std::invalid_argument("only the Klein-Gordon model carries a mass");
  if (model == Model::klein_gordon && !(mass > 0.0))
    throw std::invalid_argument("Klein-Gordon mass must be positive");
  const auto n = static_cast<Eigen::Index>(basis.size());
  a = Eigen::VectorXcd::Zero(n);
  if (model != Model::schrodinger) b = Eigen::VectorXcd::Zero(n);
}

double ModalDatum::frequency(std::size_t i) const {
  return temporal_frequency(basis, i, model, mass);
}

double EnergyDecomposition::up_to(int K) const {
  if (K < 0) return 0.0;
  if (window_sums.empty()) return 0.0;
  if (static_cast<std::size_t>(K) >= window_sums.size()) return window_sums.back();
  return window_sums[static_cast<std::size_t>(K)];
}

double DecayProfile::scale(const Frequency& n) const {
  if (kind == Kind::flat) return 1.0;
  const double norm = std::sqrt(double(n[0]) * n[0] + double(n[1]) * n[1]);
  return std::pow(1.0 + norm, -p);
}

ModalDatum random_datum(Model model, const ModalBasis& basis, double mass, int window,
                        const DecayProfile& decay, std::uint64_t seed) {
  if (window < 0 || window > basis.cutoff())
    throw std::invalid_argument("datum window " + std::to_string(window) +
                                " outside the simulation cutoff " + std::to_string(basis.cutoff()));
  ModalDatum datum(model, mass, basis);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis.block(i) > window) continue;
    const double s = decay.scale(basis.mode(i));
    const cd z1(normal(rng), normal(rng));
    const auto k = static_cast<Eigen::Index>(i);
    if (model == Model::schrodinger) {
      datum.a[k] = s * z1;
      continue;
    }
    const cd z2(normal(rng), normal(rng));
    const double rho = datum.frequency(i);
    datum.a[k] = rho > 0.0 ? s * z1 / rho : cd(0.0, 0.0);
    datum.b[k] = s * z2;
  }
  return datum;
}

EnergyDecomposition conserved_energy(const ModalDatum& datum) {
  EnergyDecomposition e;
  const std::size_t n = datum.basis.size();
  e.per_mode.resize(n);
  e.window_sums.assign(static_cast<std::size_t>(datum.basis.cutoff()) + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    double v;
    if (datum.model == Model::schrodinger) {
      v = std::norm(datum.a[k]);
    } else {
      const double rho = datum.frequency(i);
      v = rho * rho * std::norm(datum.a[k]) + std::norm(datum.b[k]);
    }
    e.per_mode[i] = v;
    e.window_sums[static_cast<std::size_t>(datum.basis.block(i))] += v;
  }
  for (std::size_t K = 1; K < e.window_sums.size(); ++K) e.window_sums[K] += e.window_sums[K - 1];
  for (double v : e.per_mode) e.total += v;
  return e;
}

ModalDatum evolve_to(const ModalDatum& datum, double t) {
  ModalDatum out = datum;
  for (std::size_t i = 0; i < datum.basis.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double nu = datum.frequency(i);
    if (datum.model == Model::schrodinger) {
      out.a[k] = datum.a[k] * std::polar(1.0, nu * t);
      continue;
    }
    if (nu == 0.0) continue;  // displacement absent, velocity constant
    const double c = std::cos(nu * t);
    const double s = std::sin(nu * t);
    out.a[k] = datum.a[k] * c + datum.b[k] * (s / nu);
    out.b[k] = -nu * s * datum.a[k] + datum.b[k] * c;
  }
  return out;
}

ModalDatum truncate(const ModalDatum& datum, int K) {
  ModalDatum out = datum;
  for (std::size_t i = 0; i < datum.basis.size(); ++i) {
    if (datum.basis.block(i) <= K) continue;
    const auto k = static_cast<Eigen::Index>(i);
    out.a[k] = 0.0;
    if (out.b.size() > 0) out.b[k] = 0.0;
  }
  return out;
}

ModalDatum tail(const ModalDatum& datum, int K) {
  ModalDatum out = datum;
  for (std::size_t i = 0; i < datum.basis.size(); ++i) {
    if (datum.basis.block(i) > K) continue;
    const auto k = static_cast<Eigen::Index>(i);
    out.a[k] = 0.0;
    if (out.b.size() > 0) out.b[k] = 0.0;
  }
  return out;
}

OutputExpansion output_expansion(const ModalDatum& datum, OutputKind kind) {
  const auto n = static_cast<Eigen::Index>(datum.basis.size());
  OutputExpansion ex{Eigen::MatrixXcd::Zero(n, 2), Eigen::MatrixXd::Zero(n, 2)};
  const cd I(0.0, 1.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double nu = datum.frequency(static_cast<std::size_t>(k));
    if (datum.model == Model::schrodinger) {
      ex.amp(k, 0) = kind == OutputKind::field ? datum.a[k] : I * nu * datum.a[k];
      ex.freq(k, 0) = nu;
      continue;
    }
    const cd a = datum.a[k];
    const cd b = datum.b[k];
    ex.freq(k, 0) = nu;
    ex.freq(k, 1) = -nu;
    if (kind == OutputKind::time_derivative) {
      ex.amp(k, 0) = 0.5 * (b + I * nu * a);
      ex.amp(k, 1) = 0.5 * (b - I * nu * a);
    } else if (nu > 0.0) {
      ex.amp(k, 0) = 0.5 * (a - I * b / nu);
      ex.amp(k, 1) = 0.5 * (a + I * b / nu);
    } else if (b != cd(0.0, 0.0)) {
      throw std::invalid_argument("wave field output is unbounded when the constant mode moves");
    }
  }
  return ex;
}

Eigen::VectorXcd output_coefficients(const ModalDatum& datum, OutputKind kind, double t) {
  const OutputExpansion ex = output_expansion(datum, kind);
  Eigen::VectorXcd v(ex.amp.rows());
  for (Eigen::Index k = 0; k < ex.amp.rows(); ++k)
    v[k] = ex.amp(k, 0) * std::polar(1.0, ex.freq(k, 0) * t) +
           ex.amp(k, 1) * std::polar(1.0, ex.freq(k, 1) * t);
  return v;
}

double slot_energy(const ModalDatum& datum, OutputKind kind, const Eigen::MatrixXcd& gamma,
                   double t_a, double t_b) {
  const auto n = static_cast<Eigen::Index>(datum.basis.size());
  if (gamma.rows() != n || gamma.cols() != n)
    throw BasisMismatch("observation matrix of size " + std::to_string(gamma.rows()) +
                        " for a basis of size " + std::to_string(n));
  if (!(t_b >= t_a)) throw std::invalid_argument("slot end precedes its start");
  return energy_core(datum, single_slot(t_a, t_b), kind, {&gamma});
}

double full_manifold_energy(const ModalDatum& datum, OutputKind kind, double t0, double T0) {
  const auto n = static_cast<Eigen::Index>(datum.basis.size());
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  return energy_core(datum, single_slot(t0, t0 + T0), kind, {&id});
}

double timeline_energy(const ModalDatum& datum, const PeriodicTimeline& timeline,
                       OutputKind kind, std::span<const ObservationMatrix> gammas) {
  int atoms = 0;
  for (const TimelineSegment& seg : timeline.segments) atoms = std::max(atoms, seg.atom + 1);
  return energy_core(datum, timeline, kind,
                     checked_gammas(datum, gammas, static_cast<std::size_t>(atoms)));
}

double windowed_observation_energy(const ModalDatum& datum, const SwitchingSchedule& schedule,
                                   OutputKind kind, std::span<const ObservationMatrix> gammas) {
  return energy_core(datum, schedule.timeline(), kind,
                     checked_gammas(datum, gammas, schedule.design().size()));
}

double windowed_observation_energy(const ModalDatum& datum, const ContinuousPath& path,
                                   OutputKind kind, std::span<const ObservationMatrix> gammas) {
  return energy_core(datum, path.timeline(), kind,
                     checked_gammas(datum, gammas, path.design().size()));
}

}  // namespace cesaro
