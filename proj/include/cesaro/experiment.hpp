#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "cesaro/design.hpp"
#include "cesaro/evolve.hpp"
#include "cesaro/schedule.hpp"

namespace cesaro {

struct GramEntry {
  std::size_t mode = 0;
  double rho = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Full-manifold observation constants on intervals of length T0:
/// c E <= int_I int_M |q|^2 <= C E for data on the simulation basis.
struct CalibrationConstants {
  Model model = Model::schrodinger;
  double T0 = 1.0;
  double c = 0.0;
  double C = 0.0;
  std::vector<GramEntry> gram;  ///< one row per mode with rho > 0 (wave/KG only)
};

CalibrationConstants calibration(Model model, const ModalBasis& basis, double mass, double T0,
                                 double t0 = 0.0);

/// K_m = min(max, ceil(m / stride)) with max defaulting to K_sim - 1, or an explicit list.
struct WindowSequence {
  int stride = 5;
  int max = -1;
  std::vector<int> values;

  int at(int m, int K_sim) const;
};

/// eps_m = L / (m + 1), a constant, or an explicit list.
struct ToleranceSequence {
  enum class Kind { harmonic, constant, values };
  Kind kind = Kind::harmonic;
  double value = 0.0;
  std::vector<double> values;

  double at(int m, double L) const;
};

struct DatumSpec {
  std::uint64_t seed = 1;
  int window = -1;  ///< -1 means K_sim
  DecayProfile decay;
};

struct ProtocolConfig {
  PrototypeSet prototype = PrototypeSet::full(TorusSpace(1));
  Model model = Model::schrodinger;
  double mass = 0.0;
  double T0 = 1.0;
  int K_sim = 8;
  WindowSequence window;
  ToleranceSequence tolerance;
  DatumSpec datum;
  int N_max = 200;
  DesignOptions design;
  int threads = 1;
  bool split = true;  ///< also evaluate Q_m on the truncated datum and on its tail

  double L() const { return prototype.measure(); }
  OutputKind output() const { return natural_output(model); }
};

/// Cross-field checks; throws WindowExceedsSimulation or std::invalid_argument.
void validate(const ProtocolConfig& config);

ModalDatum protocol_datum(const ProtocolConfig& config);

/// Design, observation matrices on the simulation basis and Lipschitz bound for one window.
struct IntervalPlan {
  int K = 0;
  ConvexDesign design;
  std::vector<ObservationMatrix> gammas;
  double lipschitz = 0.0;
};

IntervalPlan prepare_plan(const ProtocolConfig& config, const ModalBasis& simulation, int K);

struct IntervalRecord {
  int m = 0;
  int K = 0;
  double eps = 0.0;  ///< target (switching) or certified (continuous) loss
  double Q = 0.0;
  double full = 0.0;  ///< int_{I_m} int_M |q|^2
  double E_leK = 0.0;
  double A = 0.0;
  std::int64_t macro_count = 0;
  std::size_t atoms = 0;
  double Q_trunc = std::numeric_limits<double>::quiet_NaN();
  double Q_tail = std::numeric_limits<double>::quiet_NaN();
};

struct CesaroSeries {
  Model model = Model::schrodinger;
  double L = 0.0;
  double T0 = 1.0;
  double E = 0.0;
  double c = 0.0;
  double C = 0.0;
  std::optional<double> speed;
  std::vector<IntervalRecord> records;

  double reference() const { return L * c * E; }
  double final_average() const;
  /// Minimum of A_N over the last `count` records.
  double min_recent_average(std::size_t count) const;
  /// Minimum of A_N over the final quarter of the run.
  double liminf_estimate() const;
};

/// Running averages A_N = (1/N) sum_{m <= N} Q_m.
std::vector<double> cesaro_averages(std::span<const IntervalRecord> records);

CesaroSeries run_protocol(const ProtocolConfig& config);
CesaroSeries run_protocol(const ProtocolConfig& config, const ModalDatum& datum);
/// Same pipeline with continuous observers at speed V instead of switching.
CesaroSeries run_continuous_protocol(const ProtocolConfig& config, const ModalDatum& datum,
                                     double speed);

struct EtaBound {
  double eta = 0.0;
  bool split_holds = true;
  double worst_slack = 0.0;  ///< min_m of Q_m - split bound, relative to E
  double averaged_bound = 0.0;  ///< (1/N) sum of the lower bounds implied for Q_m
};

struct TailReport {
  bool upper_holds = true;
  double max_upper_ratio = 0.0;  ///< max_m Q_m / (C E)
  bool lower_holds = true;
  double min_lower_ratio = 0.0;  ///< min_m Q_m(z_{<=K}) / (c (L - eps_m) E_{<=K})
  bool tail_free = false;
  std::vector<EtaBound> etas;
  double best_bound = 0.0;
  double reference = 0.0;
  double tail_average = 0.0;  ///< (1/N) sum (E - E_{<=K_m}), relative to E
};

/// Needs a series produced with `split` enabled.
TailReport tail_reduction_check(const CesaroSeries& series, const CalibrationConstants& constants,
                                std::span<const double> etas);

struct SpeedRun {
  double speed = 0.0;
  CesaroSeries series;
  double min_realized_margin = 0.0;  ///< min_m Q_m / full_m - (L - eps_m)
};

struct ContinuousReport {
  std::vector<SpeedRun> runs;
  bool monotone = true;  ///< L - eps(V, R) nondecreasing in V on every interval
};

ContinuousReport continuous_protocol_delta(const ProtocolConfig& config, const ModalDatum& datum,
                                           std::span<const double> speeds);

/// Runs body(i) for i in [0, count) on up to `threads` workers; rethrows the first failure.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace cesaro
