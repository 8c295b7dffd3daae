#include "cesaro/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cesaro/errors.hpp"

namespace cesaro {

namespace {
// Beyond this the macro count is no longer exactly representable in a double.
constexpr double kMaxMacroCount = 9.0e15;
}  // namespace

SwitchingSchedule::SwitchingSchedule(ConvexDesign design, double t0, double T0,
                                     std::int64_t macro_count, double epsilon, double lipschitz)
    : design_(std::move(design)),
      t0_(t0),
      T0_(T0),
      macro_count_(macro_count),
      epsilon_(epsilon),
      lipschitz_(lipschitz) {
  if (design_.atoms.empty()) throw std::invalid_argument("schedule needs a nonempty design");
  if (macro_count_ < 1) throw std::invalid_argument("macro count must be at least 1");
  if (!(T0_ > 0.0)) throw std::invalid_argument("interval length must be positive");
  cumulative_.reserve(design_.atoms.size() + 1);
  cumulative_.push_back(0.0);
  double c = 0.0;
  for (const DesignAtom& a : design_.atoms) {
    c += a.weight;
    cumulative_.push_back(c);
  }
  cumulative_.back() = 1.0;
}

std::int64_t SwitchingSchedule::micro_count() const noexcept {
  return macro_count_ * static_cast<std::int64_t>(design_.atoms.size());
}

double SwitchingSchedule::breakpoint(std::int64_t r, std::size_t j) const {
  if (j >= design_.atoms.size()) {
    ++r;
    j = 0;
  }
  if (r >= macro_count_) return t0_ + T0_;
  return t0_ + (static_cast<double>(r) + cumulative_[j]) * T0_ / static_cast<double>(macro_count_);
}

MicroInterval SwitchingSchedule::micro(std::int64_t index) const {
  const auto J = static_cast<std::int64_t>(design_.atoms.size());
  if (index < 0 || index >= micro_count()) throw std::out_of_range("micro interval index");
  const std::int64_t r = index / J;
  const auto j = static_cast<std::size_t>(index % J);
  return {breakpoint(r, j), breakpoint(r, j + 1), static_cast<int>(j)};
}

std::vector<MicroInterval> SwitchingSchedule::materialize() const {
  std::vector<MicroInterval> out;
  out.reserve(static_cast<std::size_t>(micro_count()));
  for (std::int64_t i = 0; i < micro_count(); ++i) out.push_back(micro(i));
  return out;
}

PeriodicTimeline SwitchingSchedule::timeline() const {
  PeriodicTimeline tl;
  tl.t0 = t0_;
  tl.period = macro_length();
  tl.repeats = macro_count_;
  for (std::size_t j = 0; j < design_.atoms.size(); ++j) {
    TimelineSegment seg;
    seg.start = cumulative_[j] * tl.period;
    seg.end = cumulative_[j + 1] * tl.period;
    seg.atom = static_cast<int>(j);
    tl.segments.push_back(seg);
  }
  return tl;
}

std::int64_t switching_macro_count(double L, double lipschitz, double T0, double epsilon) {
  const double x = (L + 1.0) * lipschitz * T0 * T0 / epsilon;
  if (!(x <= kMaxMacroCount))
    throw Error("switching mesh needs more than 9e15 macro intervals (Lipschitz " +
                std::to_string(lipschitz) + ", epsilon " + std::to_string(epsilon) + ")");
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(x)));
}

SwitchingSchedule build_switching(const ConvexDesign& design, double t0, double T0,
                                  double lipschitz, double epsilon) {
  if (!(T0 > 0.0)) throw std::invalid_argument("T0 must be positive");
  if (!(lipschitz >= 0.0)) throw std::invalid_argument("Lipschitz constant must be nonnegative");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(epsilon < design.L))
    throw std::invalid_argument("epsilon " + std::to_string(epsilon) +
                                " must be below L = " + std::to_string(design.L));
  if (design.atoms.empty()) throw std::invalid_argument("design has no atoms");
  // A single atom never moves: F_1 = L F_M pointwise and no mesh is needed.
  const std::int64_t R =
      design.atoms.size() == 1 ? 1 : switching_macro_count(design.L, lipschitz, T0, epsilon);
  return SwitchingSchedule(design, t0, T0, R, epsilon, lipschitz);
}

int observer_at(const SwitchingSchedule& s, double t) {
  if (!(t >= s.t0() && t <= s.t_end()))
    throw OutOfInterval("t = " + std::to_string(t) + " not in [" + std::to_string(s.t0()) + ", " +
                        std::to_string(s.t_end()) + "]");
  const std::size_t J = s.design().atoms.size();
  if (t == s.t_end()) return static_cast<int>(J - 1);
  const std::int64_t R = s.macro_count();
  auto r = static_cast<std::int64_t>(std::floor((t - s.t0()) / s.macro_length()));
  r = std::clamp<std::int64_t>(r, 0, R - 1);
  while (r > 0 && t < s.breakpoint(r, 0)) --r;
  while (r < R - 1 && t >= s.breakpoint(r + 1, 0)) ++r;
  // Largest j with breakpoint(r, j) <= t.
  std::size_t lo = 0;
  std::size_t hi = J;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (s.breakpoint(r, mid) <= t)
      lo = mid;
    else
      hi = mid;
  }
  return static_cast<int>(lo);
}

double cycle_length(const ConvexDesign& design) {
  const std::size_t J = design.atoms.size();
  if (J < 2) return 0.0;
  const TorusSpace space(design.dim);
  double D = 0.0;
  for (std::size_t j = 0; j < J; ++j)
    D += torus_distance(space, design.atoms[j].shift, design.atoms[(j + 1) % J].shift);
  return D;
}

double continuous_loss(double L, double cycle, std::int64_t R, double speed, double T0,
                       double lipschitz) {
  const double tau = T0 / static_cast<double>(R);
  return L * cycle * static_cast<double>(R) / (speed * T0) + (L + 1.0) * T0 * (lipschitz * tau);
}

PeriodicTimeline ContinuousPath::timeline() const {
  PeriodicTimeline tl;
  tl.t0 = t0_;
  tl.period = T0_ / static_cast<double>(macro_count_);
  tl.repeats = macro_count_;
  tl.segments = pattern_;
  return tl;
}

GroupElement ContinuousPath::position_at(double t) const {
  if (!(t >= t0_ && t <= t0_ + T0_))
    throw OutOfInterval("t = " + std::to_string(t) + " outside continuous path interval");
  const double tau = T0_ / static_cast<double>(macro_count_);
  auto r = static_cast<std::int64_t>(std::floor((t - t0_) / tau));
  r = std::clamp<std::int64_t>(r, 0, macro_count_ - 1);
  const double s = t - t0_ - static_cast<double>(r) * tau;
  auto it = std::upper_bound(pattern_.begin(), pattern_.end(), s,
                             [](double v, const TimelineSegment& seg) { return v < seg.start; });
  const TimelineSegment& seg = it == pattern_.begin() ? pattern_.front() : *std::prev(it);
  const TorusSpace space(design_.dim);
  GroupElement g = design_.atoms[static_cast<std::size_t>(seg.atom)].shift;
  const double ds = std::max(0.0, s - seg.start);
  for (int a = 0; a < space.dim(); ++a) g.shift[a] = wrap_unit(g.shift[a] + seg.velocity[a] * ds);
  return g;
}

ContinuousPath build_continuous(const ConvexDesign& design, double t0, double T0, double speed,
                                double lipschitz) {
  if (!(T0 > 0.0)) throw std::invalid_argument("T0 must be positive");
  if (!(lipschitz >= 0.0)) throw std::invalid_argument("Lipschitz constant must be nonnegative");
  if (!(speed > 0.0)) throw SpeedTooLow("speed must be positive");
  if (design.atoms.empty()) throw std::invalid_argument("design has no atoms");
  const double L = design.L;
  const double D = cycle_length(design);

  std::int64_t R;
  if (D > 0.0) {
    const double ratio = speed * T0 / D;
    if (!(ratio > 1.0))
      throw SpeedTooLow("V = " + std::to_string(speed) + " <= D / T0 = " + std::to_string(D / T0));
    const double r_max_real = std::ceil(ratio) - 1.0;
    if (r_max_real < 1.0 || r_max_real > kMaxMacroCount)
      throw SpeedTooLow("no admissible macro count for V = " + std::to_string(speed));
    const auto r_max = static_cast<std::int64_t>(r_max_real);
    // The loss is convex in R; the best integer is next to the balancing point.
    const double balanced = std::sqrt(speed * T0 * lipschitz * (L + 1.0) * T0 / (L * D));
    auto admissible = [&](double r) {
      return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::min(r, r_max_real)), 1, r_max);
    };
    const std::int64_t lo = admissible(std::floor(balanced));
    const std::int64_t hi = admissible(std::ceil(balanced));
    R = continuous_loss(L, D, hi, speed, T0, lipschitz) < continuous_loss(L, D, lo, speed, T0, lipschitz)
            ? hi
            : lo;
  } else {
    // No transit: the first loss term vanishes for every R.
    const double r = std::ceil(speed * T0);
    R = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::min(r, kMaxMacroCount)));
  }

  ContinuousPath path;
  path.design_ = design;
  path.t0_ = t0;
  path.T0_ = T0;
  path.speed_ = speed;
  path.cycle_ = D;
  path.macro_count_ = R;
  path.lipschitz_ = lipschitz;
  path.epsilon_ = continuous_loss(L, D, R, speed, T0, lipschitz);

  const TorusSpace space(design.dim);
  const double tau = T0 / static_cast<double>(R);
  const double dwell_budget = tau - D / speed;
  const std::size_t J = design.atoms.size();
  double s = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    TimelineSegment dwell;
    dwell.start = s;
    dwell.end = s + design.atoms[j].weight * dwell_budget;
    dwell.atom = static_cast<int>(j);
    path.pattern_.push_back(dwell);
    s = dwell.end;
    if (J == 1) break;
    const GroupElement& from = design.atoms[j].shift;
    const GroupElement& to = design.atoms[(j + 1) % J].shift;
    const Point delta = wrapped_displacement(space, from, to);
    const double dist = torus_distance(space, from, to);
    if (dist == 0.0) continue;
    TimelineSegment transit;
    transit.start = s;
    transit.end = s + dist / speed;
    transit.atom = static_cast<int>(j);
    transit.transit = true;
    for (int a = 0; a < space.dim(); ++a) transit.velocity[a] = delta[a] / dist * speed;
    path.pattern_.push_back(transit);
    s = transit.end;
  }
  path.pattern_.back().end = tau;
  return path;
}

}  // namespace cesaro
