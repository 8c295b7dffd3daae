#include "cesaro/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cesaro/errors.hpp"

namespace cesaro {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument("not a real: '" + text + "'");
  return x;
}

namespace {

Json point_json(const Point& p, int dim) {
  Json a = Json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[static_cast<std::size_t>(i)]);
  return a;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  return out;
}

}  // namespace

Json to_json(const ConvexDesign& design) {
  Json atoms = Json::array();
  for (const DesignAtom& a : design.atoms)
    atoms.push_back({{"shift", point_json(a.shift.shift, design.dim)}, {"weight", a.weight}});
  return {{"dim", design.dim},
          {"L", design.L},
          {"K", design.K},
          {"residual", design.residual},
          {"atoms", atoms}};
}

ConvexDesign design_from_json(const Json& j) {
  ConvexDesign d;
  d.L = j.at("L").get<double>();
  d.K = j.at("K").get<int>();
  d.residual = j.at("residual").get<double>();
  d.dim = j.contains("dim") ? j.at("dim").get<int>() : 0;
  for (const Json& a : j.at("atoms")) {
    const auto shift = a.at("shift").get<std::vector<double>>();
    if (d.dim == 0) d.dim = static_cast<int>(shift.size());
    if (static_cast<int>(shift.size()) != d.dim) throw std::invalid_argument("atom shift has wrong dimension");
    DesignAtom atom;
    atom.shift = GroupElement::from(TorusSpace(d.dim), shift);
    atom.weight = a.at("weight").get<double>();
    d.atoms.push_back(atom);
  }
  if (d.atoms.empty()) throw std::invalid_argument("design has no atoms");
  return d;
}

Json to_json(const CalibrationConstants& k) {
  Json gram = Json::array();
  for (const GramEntry& g : k.gram)
    gram.push_back({{"mode", g.mode}, {"rho", g.rho}, {"lower", g.lower}, {"upper", g.upper}});
  return {{"model", std::string(to_string(k.model))},
          {"T0", k.T0},
          {"c_T0", k.c},
          {"C_T0", k.C},
          {"spectrum", "infimum over the simulation basis only"},
          {"gram", gram}};
}

Json to_json(const DesignReport& r) {
  return {{"trials", r.trials}, {"max_deviation", r.max_deviation}, {"matrix_residual", r.matrix_residual}};
}

Json to_json(const TailReport& r) {
  Json etas = Json::array();
  for (const EtaBound& e : r.etas)
    etas.push_back({{"eta", e.eta},
                    {"split_holds", e.split_holds},
                    {"worst_slack", e.worst_slack},
                    {"averaged_bound", e.averaged_bound}});
  return {{"upper_holds", r.upper_holds},
          {"max_upper_ratio", r.max_upper_ratio},
          {"lower_holds", r.lower_holds},
          {"min_lower_ratio", r.min_lower_ratio},
          {"tail_free", r.tail_free},
          {"etas", etas},
          {"best_bound", r.best_bound},
          {"reference", r.reference},
          {"tail_average", r.tail_average}};
}

Json series_summary(const CesaroSeries& s) {
  Json j = {{"model", std::string(to_string(s.model))},
            {"L", s.L},
            {"T0", s.T0},
            {"E", s.E},
            {"c_T0", s.c},
            {"C_T0", s.C},
            {"intervals", s.records.size()},
            {"reference", s.reference()},
            {"final_A", s.final_average()},
            {"final_ratio", s.reference() > 0.0 ? s.final_average() / s.reference() : 0.0},
            {"liminf_estimate", s.liminf_estimate()}};
  if (s.speed) j["speed"] = *s.speed;
  return j;
}

Json to_json(const ContinuousReport& r) {
  Json runs = Json::array();
  for (const SpeedRun& run : r.runs) {
    Json eps = Json::array();
    Json macros = Json::array();
    for (const IntervalRecord& rec : run.series.records) {
      eps.push_back(rec.eps);
      macros.push_back(rec.macro_count);
    }
    Json j = series_summary(run.series);
    j["min_realized_margin"] = run.min_realized_margin;
    j["certified_eps"] = eps;
    j["macro_count"] = macros;
    runs.push_back(j);
  }
  return {{"monotone", r.monotone}, {"runs", runs}};
}

std::string series_csv(const CesaroSeries& series) {
  std::string out = std::string(kSeriesHeader) + "\nm,K_m,eps_m,Q_m,A_N,E_leK\n";
  for (const IntervalRecord& r : series.records) {
    out += std::to_string(r.m) + ',' + std::to_string(r.K) + ',' + format_real(r.eps) + ',' +
           format_real(r.Q) + ',' + format_real(r.A) + ',' + format_real(r.E_leK) + '\n';
  }
  return out;
}

std::vector<SeriesRow> parse_series_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSeriesHeader)
    throw std::invalid_argument("series CSV: missing version header");
  if (!std::getline(in, line) || line != "m,K_m,eps_m,Q_m,A_N,E_leK")
    throw std::invalid_argument("series CSV: unexpected column header");
  std::vector<SeriesRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 6) throw std::invalid_argument("series CSV: bad row '" + line + "'");
    SeriesRow r;
    r.m = std::stoi(cells[0]);
    r.K = std::stoi(cells[1]);
    r.eps = parse_real(cells[2]);
    r.Q = parse_real(cells[3]);
    r.A = parse_real(cells[4]);
    r.E_leK = parse_real(cells[5]);
    rows.push_back(r);
  }
  return rows;
}

std::string schedule_csv(const SwitchingSchedule& schedule, std::int64_t max_rows) {
  const int dim = schedule.design().dim;
  std::string out = std::string(kScheduleHeader) + "\nt_start,t_end,atom";
  for (int a = 0; a < dim; ++a) out += ",shift_" + std::to_string(a);
  out += '\n';
  const std::int64_t rows = std::min(schedule.micro_count(), std::max<std::int64_t>(0, max_rows));
  for (std::int64_t i = 0; i < rows; ++i) {
    const MicroInterval mi = schedule.micro(i);
    out += format_real(mi.t_start) + ',' + format_real(mi.t_end) + ',' + std::to_string(mi.atom);
    const Point& g = schedule.design().atoms[static_cast<std::size_t>(mi.atom)].shift.shift;
    for (int a = 0; a < dim; ++a) out += ',' + format_real(g[static_cast<std::size_t>(a)]);
    out += '\n';
  }
  return out;
}

std::string path_csv(const ContinuousPath& path) {
  const int dim = path.design().dim;
  std::string out = std::string(kPathHeader) + "\nt_start,t_end,atom,transit";
  for (int a = 0; a < dim; ++a) out += ",shift_" + std::to_string(a);
  for (int a = 0; a < dim; ++a) out += ",velocity_" + std::to_string(a);
  out += '\n';
  for (const TimelineSegment& seg : path.pattern()) {
    out += format_real(path.t0() + seg.start) + ',' + format_real(path.t0() + seg.end) + ',' +
           std::to_string(seg.atom) + ',' + (seg.transit ? "1" : "0");
    const Point& g = path.design().atoms[static_cast<std::size_t>(seg.atom)].shift.shift;
    for (int a = 0; a < dim; ++a) out += ',' + format_real(g[static_cast<std::size_t>(a)]);
    for (int a = 0; a < dim; ++a) out += ',' + format_real(seg.velocity[static_cast<std::size_t>(a)]);
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string(), false);
  out << content;
  if (!out) throw Error("failed writing " + path.string(), false);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string(), false);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cesaro
