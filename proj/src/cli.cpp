#include "cesaro/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "cesaro/config.hpp"
#include "cesaro/errors.hpp"

namespace cesaro {

namespace {

namespace fs = std::filesystem;

struct Context {
  RunConfig config;
  fs::path out_dir;
  bool check = false;
  std::ostream& out;
};

// A failed --check means an emitted artifact does not reproduce.
[[noreturn]] void check_failed(const std::string& what) { throw Error("check failed: " + what); }

ModalBasis simulation_basis(const RunConfig& cfg) {
  return ModalBasis(cfg.protocol.prototype.space(), cfg.protocol.K_sim);
}

ConvexDesign design_for(const RunConfig& cfg, int K) {
  const ModalBasis basis(cfg.protocol.prototype.space(), K);
  return build_design(basis, cfg.protocol.prototype, cfg.protocol.design);
}

double recomputed_residual(const ConvexDesign& design, const PrototypeSet& set) {
  const ModalBasis basis(set.space(), design.K);
  const auto gammas = design_gammas(design, basis, set);
  const Eigen::MatrixXcd moment = design_moment(design, gammas);
  const auto n = static_cast<Eigen::Index>(basis.size());
  return (moment - design.L * Eigen::MatrixXcd::Identity(n, n)).norm();
}

void check_design_file(const fs::path& file, const PrototypeSet& set) {
  const ConvexDesign d = design_from_json(Json::parse(read_text(file)));
  const double r = recomputed_residual(d, set);
  if (std::abs(r - d.residual) > 1e-12 + 1e-9 * d.residual)
    check_failed(file.string() + ": residual " + format_real(r) + " differs from stored " +
                 format_real(d.residual));
  if (std::abs(d.weight_sum() - 1.0) > 1e-12) check_failed(file.string() + ": weights do not sum to 1");
}

void check_schedule_file(const fs::path& file, std::size_t atoms, std::int64_t expected_rows) {
  std::istringstream in(read_text(file));
  std::string line;
  std::getline(in, line);
  if (line != kScheduleHeader) check_failed(file.string() + ": missing version header");
  std::getline(in, line);
  std::int64_t rows = 0;
  double prev_end = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string a, b, c;
    std::getline(cells, a, ',');
    std::getline(cells, b, ',');
    std::getline(cells, c, ',');
    const double t0 = parse_real(a);
    const double t1 = parse_real(b);
    const int atom = std::stoi(c);
    if (!(t1 >= t0)) check_failed(file.string() + ": slot ends before it starts");
    if (rows > 0 && t0 != prev_end) check_failed(file.string() + ": slots are not contiguous");
    if (atom < 0 || static_cast<std::size_t>(atom) >= atoms) check_failed(file.string() + ": bad atom index");
    prev_end = t1;
    ++rows;
  }
  if (rows != expected_rows) check_failed(file.string() + ": unexpected row count");
}

int cmd_design(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const ModalBasis basis(cfg.protocol.prototype.space(), cfg.design_K);
  const ConvexDesign design = design_for(cfg, cfg.design_K);
  const DesignReport report =
      verify_design(design, basis, cfg.protocol.prototype, cfg.verify_trials, cfg.verify_seed);
  const fs::path file = ctx.out_dir / ("design_K" + std::to_string(cfg.design_K) + ".json");
  write_text(file, to_json(design).dump(2) + "\n");
  write_text(ctx.out_dir / ("design_K" + std::to_string(cfg.design_K) + "_report.json"),
             to_json(report).dump(2) + "\n");
  ctx.out << "design K=" << cfg.design_K << " atoms=" << design.size()
          << " residual=" << format_real(design.residual)
          << " max_deviation=" << format_real(report.max_deviation) << "\n";
  if (ctx.check) check_design_file(file, cfg.protocol.prototype);
  return kExitOk;
}

int cmd_calibrate(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const CalibrationConstants k =
      calibration(cfg.protocol.model, simulation_basis(cfg), cfg.protocol.mass, cfg.protocol.T0);
  const fs::path file = ctx.out_dir / "calibration.json";
  write_text(file, to_json(k).dump(2) + "\n");
  ctx.out << "c_T0=" << format_real(k.c) << " C_T0=" << format_real(k.C) << "\n";
  if (ctx.check) {
    const Json j = Json::parse(read_text(file));
    if (j.at("c_T0").get<double>() != k.c || j.at("C_T0").get<double>() != k.C)
      check_failed("calibration.json does not round-trip");
    if (!(k.c > 0.0 && k.c <= k.C)) check_failed("calibration constants out of order");
  }
  return kExitOk;
}

int cmd_schedule(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const ProtocolConfig& p = cfg.protocol;
  const ModalBasis window(p.prototype.space(), cfg.design_K);
  const ConvexDesign design = design_for(cfg, cfg.design_K);
  const double lipschitz = trajectory_lipschitz_bound(window, p.mass, p.model, p.T0);
  const int m = cfg.schedule_interval;
  const SwitchingSchedule s =
      build_switching(design, (m - 1) * p.T0, p.T0, lipschitz, cfg.schedule_epsilon);
  const std::string stem = "schedule_m" + std::to_string(m);
  const std::int64_t rows = std::min(s.micro_count(), cfg.schedule_rows);
  write_text(ctx.out_dir / (stem + ".csv"), schedule_csv(s, cfg.schedule_rows));
  const Json meta = {{"interval", m},
                     {"t0", s.t0()},
                     {"T0", s.length()},
                     {"epsilon", s.epsilon()},
                     {"lipschitz", s.lipschitz()},
                     {"macro_count", s.macro_count()},
                     {"micro_count", s.micro_count()},
                     {"rows_written", rows},
                     {"truncated", rows < s.micro_count()},
                     {"design", to_json(design)}};
  write_text(ctx.out_dir / (stem + ".json"), meta.dump(2) + "\n");
  ctx.out << "schedule m=" << m << " R=" << s.macro_count() << " micro=" << s.micro_count()
          << " lipschitz=" << format_real(lipschitz) << "\n";
  if (ctx.check) check_schedule_file(ctx.out_dir / (stem + ".csv"), design.size(), rows);
  return kExitOk;
}

int cmd_experiment(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const ProtocolConfig& p = cfg.protocol;
  const ModalDatum datum = protocol_datum(p);
  const CesaroSeries series = run_protocol(p, datum);
  const CalibrationConstants k = calibration(p.model, datum.basis, p.mass, p.T0);
  const std::vector<double> etas{0.5, 0.1, 0.01};
  const TailReport tail = tail_reduction_check(series, k, etas);

  write_text(ctx.out_dir / "series.csv", series_csv(series));
  write_text(ctx.out_dir / "calibration.json", to_json(k).dump(2) + "\n");
  write_text(ctx.out_dir / "tail.json", to_json(tail).dump(2) + "\n");
  write_text(ctx.out_dir / "summary.json", series_summary(series).dump(2) + "\n");

  std::map<int, ConvexDesign> designs;
  for (const IntervalRecord& r : series.records)
    if (!designs.count(r.K)) designs.emplace(r.K, design_for(cfg, r.K));
  for (const auto& [K, d] : designs)
    write_text(ctx.out_dir / ("design_K" + std::to_string(K) + ".json"), to_json(d).dump(2) + "\n");
  if (cfg.schedule_rows > 0) {
    for (const IntervalRecord& r : series.records) {
      const ModalBasis window(p.prototype.space(), r.K);
      const double lipschitz = trajectory_lipschitz_bound(window, p.mass, p.model, p.T0);
      const SwitchingSchedule s = build_switching(designs.at(r.K), (r.m - 1) * p.T0, p.T0, lipschitz, r.eps);
      write_text(ctx.out_dir / ("schedule_m" + std::to_string(r.m) + ".csv"),
                 schedule_csv(s, cfg.schedule_rows));
    }
  }

  const double ratio = series.reference() > 0.0 ? series.final_average() / series.reference() : 0.0;
  ctx.out << "intervals=" << series.records.size() << " E=" << format_real(series.E)
          << " c_T0=" << format_real(series.c) << "\n";
  ctx.out << "final A_N/(L c_T0 E) = " << format_real(ratio) << "\n";
  ctx.out << "tail hypotheses: upper=" << (tail.upper_holds ? "ok" : "FAIL")
          << " lower=" << (tail.lower_holds ? "ok" : "FAIL")
          << " tail_average=" << format_real(tail.tail_average) << "\n";

  if (ctx.check) {
    const auto rows = parse_series_csv(read_text(ctx.out_dir / "series.csv"));
    if (rows.size() != series.records.size()) check_failed("series.csv row count");
    double sum = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      sum += rows[i].Q;
      const double A = sum / static_cast<double>(i + 1);
      if (std::abs(A - rows[i].A) > 1e-12 * std::max(1.0, std::abs(A)))
        check_failed("series.csv A_N does not match its Q_m column at m=" + std::to_string(rows[i].m));
      if (rows[i].Q < 0.0) check_failed("negative Q_m");
      if (rows[i].Q > k.C * series.E * (1.0 + 1e-10)) check_failed("Q_m above C_T0 E");
    }
    for (const auto& entry : designs)
      check_design_file(ctx.out_dir / ("design_K" + std::to_string(entry.first) + ".json"), p.prototype);
  }
  return kExitOk;
}

int cmd_continuous(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const ProtocolConfig& p = cfg.protocol;
  const ModalDatum datum = protocol_datum(p);
  const ContinuousReport report = continuous_protocol_delta(p, datum, cfg.speeds);
  write_text(ctx.out_dir / "continuous.json", to_json(report).dump(2) + "\n");
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const SpeedRun& run = report.runs[i];
    double worst = 0.0;
    for (const IntervalRecord& r : run.series.records) worst = std::max(worst, r.eps);
    ctx.out << "V=" << format_real(run.speed) << " final_A=" << format_real(run.series.final_average())
            << " max_eps=" << format_real(worst) << "\n";
    const ModalBasis window(p.prototype.space(), p.window.at(1, p.K_sim));
    const ContinuousPath path =
        build_continuous(design_for(cfg, window.cutoff()), 0.0, p.T0, run.speed,
                         trajectory_lipschitz_bound(window, p.mass, p.model, p.T0));
    write_text(ctx.out_dir / ("path_V" + std::to_string(i) + "_m1.csv"), path_csv(path));
  }
  ctx.out << "certified factor monotone in V: " << (report.monotone ? "yes" : "no") << "\n";
  if (ctx.check) {
    const Json j = Json::parse(read_text(ctx.out_dir / "continuous.json"));
    if (j.at("runs").size() != report.runs.size()) check_failed("continuous.json run count");
  }
  return kExitOk;
}

int cmd_verify(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const ProtocolConfig& p = cfg.protocol;
  const ModalBasis window(p.prototype.space(), cfg.design_K);
  const ConvexDesign design = design_for(cfg, cfg.design_K);
  const DesignReport dr = verify_design(design, window, p.prototype, cfg.verify_trials, cfg.verify_seed);

  const ModalBasis simulation = simulation_basis(cfg);
  if (cfg.design_K > p.K_sim)
    throw WindowExceedsSimulation("design K above K_sim");
  const auto gammas = design_gammas(design, simulation, p.prototype);
  const double lipschitz = trajectory_lipschitz_bound(window, p.mass, p.model, p.T0);
  const int m = cfg.schedule_interval;
  const double t0 = (m - 1) * p.T0;
  const SwitchingSchedule s = build_switching(design, t0, p.T0, lipschitz, cfg.schedule_epsilon);
  const OutputKind kind = p.output();
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < cfg.verify_trials; ++t) {
    const ModalDatum z = random_datum(p.model, simulation, p.mass, cfg.design_K, p.datum.decay,
                                      cfg.verify_seed + static_cast<std::uint64_t>(t));
    const double full = full_manifold_energy(z, kind, t0, p.T0);
    if (full <= 0.0) continue;
    worst = std::min(worst, windowed_observation_energy(z, s, kind, gammas) / full);
  }
  const double target = (design.L - cfg.schedule_epsilon) * (1.0 - 1e-9);
  const bool ok = worst >= target;
  const Json j = {{"design", to_json(dr)},
                  {"epsilon", cfg.schedule_epsilon},
                  {"macro_count", s.macro_count()},
                  {"min_ratio", worst},
                  {"target", target},
                  {"realization_holds", ok}};
  write_text(ctx.out_dir / "verify.json", j.dump(2) + "\n");
  ctx.out << "design max_deviation=" << format_real(dr.max_deviation)
          << " min observed/full=" << format_real(worst) << " target=" << format_real(target)
          << (ok ? " ok" : " FAIL") << "\n";
  if (!ok) throw Error("realization inequality violated");
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cesaro asymptotic observability experiments"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool check = false;

  using Handler = int (*)(Context&);
  const std::vector<std::pair<std::string, Handler>> commands{
      {"design", cmd_design},         {"calibrate", cmd_calibrate},   {"schedule", cmd_schedule},
      {"experiment", cmd_experiment}, {"continuous", cmd_continuous}, {"verify", cmd_verify}};
  const std::map<std::string, std::string> help{
      {"design", "build and verify a convex design for one window"},
      {"calibrate", "write the calibration constants and Gram table"},
      {"schedule", "write a switching schedule for one interval"},
      {"experiment", "run the Cesaro protocol and the tail-reduction check"},
      {"continuous", "rerun the protocol with speed-bounded continuous observers"},
      {"verify", "check the design identity and the switching realization bound"}};
  for (const auto& [name, handler] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::NonNegativeNumber);
    sub->add_flag("--check", check, "re-read and revalidate emitted artifacts");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    Context ctx{load_config(config_path), {}, check, out};
    ctx.out_dir = out_dir.empty() ? fs::path(ctx.config.output_dir) : fs::path(out_dir);
    if (threads > 0) ctx.config.protocol.threads = threads;
    for (const auto& [name, handler] : commands)
      if (app.got_subcommand(name)) return handler(ctx);
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.numeric() ? kExitNumeric : kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace cesaro
