#include "cesaro/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

#include "cesaro/errors.hpp"

namespace cesaro {

CalibrationConstants calibration(Model model, const ModalBasis& basis, double mass, double T0,
                                 double t0) {
  if (!(T0 > 0.0)) throw std::invalid_argument("T0 must be positive");
  CalibrationConstants k;
  k.model = model;
  k.T0 = T0;
  k.C = T0;
  k.c = T0;
  if (model == Model::schrodinger) return k;  // unitary: int_I ||u||^2 = T0 ||u0||^2
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double rho = temporal_frequency(basis, i, model, mass);
    if (rho == 0.0) continue;  // velocity-only mode: int_I |b|^2 = T0 |b|^2
    const auto ev = temporal_gram_eigenvalues(rho, t0, T0);
    k.gram.push_back({i, rho, ev[0], ev[1]});
    k.c = std::min(k.c, ev[0]);
  }
  return k;
}

int WindowSequence::at(int m, int K_sim) const {
  if (m < 1) throw std::invalid_argument("interval index starts at 1");
  if (!values.empty()) {
    if (static_cast<std::size_t>(m) > values.size())
      throw std::invalid_argument("window list has no entry for interval " + std::to_string(m));
    return values[static_cast<std::size_t>(m - 1)];
  }
  if (stride < 1) throw std::invalid_argument("window stride must be positive");
  const int cap = max < 0 ? K_sim - 1 : max;
  return std::min(cap, (m + stride - 1) / stride);
}

double ToleranceSequence::at(int m, double L) const {
  if (m < 1) throw std::invalid_argument("interval index starts at 1");
  switch (kind) {
    case Kind::harmonic:
      return L / (m + 1.0);
    case Kind::constant:
      return value;
    case Kind::values:
      if (static_cast<std::size_t>(m) > values.size())
        throw std::invalid_argument("tolerance list has no entry for interval " + std::to_string(m));
      return values[static_cast<std::size_t>(m - 1)];
  }
  return value;
}

void validate(const ProtocolConfig& config) {
  const double L = config.L();
  if (!(L > 0.0 && L <= 1.0 + 1e-14)) throw std::invalid_argument("L must lie in (0, 1]");
  if (!(config.T0 > 0.0)) throw std::invalid_argument("T0 must be positive");
  if (config.K_sim < 1) throw std::invalid_argument("K_sim must be at least 1");
  if (config.N_max < 1) throw std::invalid_argument("N_max must be at least 1");
  if (config.model == Model::klein_gordon && !(config.mass > 0.0))
    throw std::invalid_argument("Klein-Gordon mass must be positive");
  if (config.model != Model::klein_gordon && config.mass != 0.0)
    throw std::invalid_argument("mass is only meaningful for Klein-Gordon");
  if (config.datum.window > config.K_sim)
    throw WindowExceedsSimulation("datum window " + std::to_string(config.datum.window) +
                                  " > K_sim = " + std::to_string(config.K_sim));
  for (int m = 1; m <= config.N_max; ++m) {
    const int K = config.window.at(m, config.K_sim);
    if (K < 0) throw std::invalid_argument("negative window at interval " + std::to_string(m));
    if (K >= config.K_sim)
      throw WindowExceedsSimulation("K_" + std::to_string(m) + " = " + std::to_string(K) +
                                    " >= K_sim = " + std::to_string(config.K_sim));
    const double eps = config.tolerance.at(m, L);
    if (!(eps > 0.0 && eps < L))
      throw std::invalid_argument("eps_" + std::to_string(m) + " = " + std::to_string(eps) +
                                  " outside (0, L)");
  }
}

ModalDatum protocol_datum(const ProtocolConfig& config) {
  const ModalBasis basis(config.prototype.space(), config.K_sim);
  const int window = config.datum.window < 0 ? config.K_sim : config.datum.window;
  return random_datum(config.model, basis, config.mass, window, config.datum.decay,
                      config.datum.seed);
}

IntervalPlan prepare_plan(const ProtocolConfig& config, const ModalBasis& simulation, int K) {
  IntervalPlan plan;
  plan.K = K;
  const ModalBasis window(config.prototype.space(), K);
  plan.design = build_design(window, config.prototype, config.design);
  plan.gammas = design_gammas(plan.design, simulation, config.prototype);
  plan.lipschitz = trajectory_lipschitz_bound(window, config.mass, config.model, config.T0);
  return plan;
}

double CesaroSeries::final_average() const {
  return records.empty() ? 0.0 : records.back().A;
}

double CesaroSeries::min_recent_average(std::size_t count) const {
  if (records.empty()) return 0.0;
  const std::size_t first = records.size() > count ? records.size() - count : 0;
  double lo = records[first].A;
  for (std::size_t i = first; i < records.size(); ++i) lo = std::min(lo, records[i].A);
  return lo;
}

double CesaroSeries::liminf_estimate() const {
  return min_recent_average(std::max<std::size_t>(1, records.size() / 4));
}

std::vector<double> cesaro_averages(std::span<const IntervalRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    sum += records[i].Q;
    out.push_back(sum / static_cast<double>(i + 1));
  }
  return out;
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> guard(failure_lock);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

CesaroSeries run_intervals(const ProtocolConfig& config, const ModalDatum& datum,
                           std::optional<double> speed) {
  validate(config);
  const ModalBasis simulation(config.prototype.space(), config.K_sim);
  if (!(datum.basis == simulation))
    throw BasisMismatch("datum cutoff " + std::to_string(datum.basis.cutoff()) +
                        " differs from K_sim = " + std::to_string(config.K_sim));
  if (datum.model != config.model) throw std::invalid_argument("datum model differs from config");

  const CalibrationConstants constants =
      calibration(config.model, simulation, config.mass, config.T0);
  const EnergyDecomposition energy = conserved_energy(datum);
  const double L = config.L();
  const OutputKind kind = config.output();

  std::set<int> windows;
  for (int m = 1; m <= config.N_max; ++m) windows.insert(config.window.at(m, config.K_sim));
  const std::vector<int> window_list(windows.begin(), windows.end());
  std::vector<IntervalPlan> plan_list(window_list.size());
  parallel_for(window_list.size(), config.threads, [&](std::size_t i) {
    plan_list[i] = prepare_plan(config, simulation, window_list[i]);
  });
  std::map<int, const IntervalPlan*> plans;
  for (const IntervalPlan& p : plan_list) plans[p.K] = &p;

  CesaroSeries series;
  series.model = config.model;
  series.L = L;
  series.T0 = config.T0;
  series.E = energy.total;
  series.c = constants.c;
  series.C = constants.C;
  series.speed = speed;
  series.records.resize(static_cast<std::size_t>(config.N_max));

  parallel_for(series.records.size(), config.threads, [&](std::size_t idx) {
    const int m = static_cast<int>(idx) + 1;
    IntervalRecord& rec = series.records[idx];
    rec.m = m;
    rec.K = config.window.at(m, config.K_sim);
    const IntervalPlan& plan = *plans.at(rec.K);
    const double t0 = (m - 1) * config.T0;
    rec.atoms = plan.design.size();
    rec.E_leK = energy.up_to(rec.K);
    rec.full = full_manifold_energy(datum, kind, t0, config.T0);

    auto observe = [&](const ModalDatum& z) -> double {
      if (speed) {
        const ContinuousPath path = build_continuous(plan.design, t0, config.T0, *speed, plan.lipschitz);
        return windowed_observation_energy(z, path, kind, plan.gammas);
      }
      const SwitchingSchedule s =
          build_switching(plan.design, t0, config.T0, plan.lipschitz, rec.eps);
      return windowed_observation_energy(z, s, kind, plan.gammas);
    };
    if (speed) {
      const ContinuousPath path = build_continuous(plan.design, t0, config.T0, *speed, plan.lipschitz);
      rec.eps = path.epsilon();
      rec.macro_count = path.macro_count();
    } else {
      rec.eps = config.tolerance.at(m, L);
      rec.macro_count =
          build_switching(plan.design, t0, config.T0, plan.lipschitz, rec.eps).macro_count();
    }
    rec.Q = observe(datum);
    if (config.split) {
      rec.Q_trunc = observe(truncate(datum, rec.K));
      rec.Q_tail = observe(tail(datum, rec.K));
    }
  });

  const std::vector<double> averages = cesaro_averages(series.records);
  for (std::size_t i = 0; i < averages.size(); ++i) series.records[i].A = averages[i];
  return series;
}

}  // namespace

CesaroSeries run_protocol(const ProtocolConfig& config) {
  return run_protocol(config, protocol_datum(config));
}

CesaroSeries run_protocol(const ProtocolConfig& config, const ModalDatum& datum) {
  return run_intervals(config, datum, std::nullopt);
}

CesaroSeries run_continuous_protocol(const ProtocolConfig& config, const ModalDatum& datum,
                                     double speed) {
  return run_intervals(config, datum, speed);
}

TailReport tail_reduction_check(const CesaroSeries& series, const CalibrationConstants& constants,
                                std::span<const double> etas) {
  TailReport report;
  const double E = series.E;
  const double c = constants.c;
  const double C = constants.C;
  const double L = series.L;
  const double slack = 1e-10 * E;
  report.reference = L * c * E;
  if (series.records.empty()) return report;
  report.min_lower_ratio = std::numeric_limits<double>::infinity();
  report.tail_free = true;
  double tail_sum = 0.0;
  for (const IntervalRecord& r : series.records) {
    if (std::isnan(r.Q_trunc) || std::isnan(r.Q_tail))
      throw std::invalid_argument("series lacks truncated recomputations");
    const double upper = r.Q / (C * E);
    report.max_upper_ratio = std::max(report.max_upper_ratio, upper);
    if (r.Q > C * E * (1.0 + 1e-10)) report.upper_holds = false;
    const double lower = c * (L - r.eps) * r.E_leK;
    if (lower > 0.0) report.min_lower_ratio = std::min(report.min_lower_ratio, r.Q_trunc / lower);
    if (r.Q_trunc < lower * (1.0 - 1e-10)) report.lower_holds = false;
    const double tail_energy = std::max(0.0, E - r.E_leK);
    if (tail_energy > 1e-14 * E) report.tail_free = false;
    tail_sum += tail_energy;
  }
  const double N = static_cast<double>(series.records.size());
  report.tail_average = E > 0.0 ? tail_sum / N / E : 0.0;

  report.best_bound = -std::numeric_limits<double>::infinity();
  for (double eta : etas) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
    EtaBound row;
    row.eta = eta;
    row.worst_slack = std::numeric_limits<double>::infinity();
    double bound_sum = 0.0;
    for (const IntervalRecord& r : series.records) {
      // 2ab <= eta a^2 + b^2 / eta applied to |q(z_{<=K}) + q(z_{>K})|^2
      const double split = (1.0 - eta) * r.Q_trunc - (1.0 / eta - 1.0) * r.Q_tail;
      row.worst_slack = std::min(row.worst_slack, E > 0.0 ? (r.Q - split) / E : 0.0);
      if (r.Q < split - slack) row.split_holds = false;
      bound_sum += (1.0 - eta) * c * (L - r.eps) * r.E_leK -
                   (1.0 / eta - 1.0) * C * std::max(0.0, E - r.E_leK);
    }
    row.averaged_bound = bound_sum / N;
    report.best_bound = std::max(report.best_bound, row.averaged_bound);
    report.etas.push_back(row);
  }
  return report;
}

ContinuousReport continuous_protocol_delta(const ProtocolConfig& config, const ModalDatum& datum,
                                           std::span<const double> speeds) {
  ContinuousReport report;
  std::vector<double> sorted(speeds.begin(), speeds.end());
  std::sort(sorted.begin(), sorted.end());
  for (double V : sorted) {
    SpeedRun run;
    run.speed = V;
    run.series = run_continuous_protocol(config, datum, V);
    run.min_realized_margin = std::numeric_limits<double>::infinity();
    for (const IntervalRecord& r : run.series.records) {
      if (r.full > 0.0)
        run.min_realized_margin = std::min(run.min_realized_margin, r.Q / r.full - (run.series.L - r.eps));
    }
    if (!report.runs.empty()) {
      const auto& prev = report.runs.back().series.records;
      for (std::size_t i = 0; i < prev.size(); ++i)
        if (run.series.records[i].eps > prev[i].eps) report.monotone = false;
    }
    report.runs.push_back(std::move(run));
  }
  return report;
}

}  // namespace cesaro
