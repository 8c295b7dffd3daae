#pragma once

#include <cstdint>
#include <vector>

#include "cesaro/design.hpp"

namespace cesaro {

/// One piece of a macro-interval template, in offsets relative to the start
/// of its macro interval. The observer sits at atom `atom` at the piece start
/// and drifts with constant `velocity` (zero while dwelling).
struct TimelineSegment {
  double start = 0.0;
  double end = 0.0;
  int atom = 0;
  Point velocity{};
  bool transit = false;
};

/// An observer that repeats one template R times on [t0, t0 + T0].
struct PeriodicTimeline {
  double t0 = 0.0;
  double period = 0.0;
  std::int64_t repeats = 1;
  std::vector<TimelineSegment> segments;
};

struct MicroInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  int atom = 0;
};

/// Piecewise constant moving observer: R macro intervals of length T0/R, each
/// split into consecutive slots of length theta_j T0/R in atom order.
/// Micro intervals are generated on demand; R can be in the millions.
class SwitchingSchedule {
 public:
  SwitchingSchedule(ConvexDesign design, double t0, double T0, std::int64_t macro_count,
                    double epsilon, double lipschitz);

  const ConvexDesign& design() const noexcept { return design_; }
  double t0() const noexcept { return t0_; }
  double length() const noexcept { return T0_; }
  double t_end() const noexcept { return t0_ + T0_; }
  std::int64_t macro_count() const noexcept { return macro_count_; }
  double macro_length() const noexcept { return T0_ / static_cast<double>(macro_count_); }
  double epsilon() const noexcept { return epsilon_; }
  double lipschitz() const noexcept { return lipschitz_; }
  std::int64_t micro_count() const noexcept;

  /// Breakpoint t0 + (r + c_j) T0 / R with c_j the cumulative weight before atom j.
  double breakpoint(std::int64_t r, std::size_t j) const;
  MicroInterval micro(std::int64_t index) const;
  std::vector<MicroInterval> materialize() const;
  PeriodicTimeline timeline() const;

 private:
  ConvexDesign design_;
  double t0_;
  double T0_;
  std::int64_t macro_count_;
  double epsilon_;
  double lipschitz_;
  std::vector<double> cumulative_;
};

/// R = max(1, ceil((L + 1) Lambda T0^2 / epsilon)); R = 1 when the design has
/// a single atom. Rejects epsilon outside (0, L), Lambda < 0, T0 <= 0.
SwitchingSchedule build_switching(const ConvexDesign& design, double t0, double T0,
                                  double lipschitz, double epsilon);

std::int64_t switching_macro_count(double L, double lipschitz, double T0, double epsilon);

/// Atom index active at t; micro intervals are half-open, the final endpoint
/// belongs to the last slot. Throws OutOfInterval outside [t0, t0 + T0].
int observer_at(const SwitchingSchedule& schedule, double t);

/// Length of the closed cycle g_1 -> g_2 -> ... -> g_J -> g_1 (shortest arcs).
double cycle_length(const ConvexDesign& design);

/// L D R / (V T0) + (L + 1) T0 * (Lambda T0 / R).
double continuous_loss(double L, double cycle, std::int64_t R, double speed, double T0,
                       double lipschitz);

/// Continuous observer moving at speed V between dwell phases.
class ContinuousPath {
 public:
  const ConvexDesign& design() const noexcept { return design_; }
  double t0() const noexcept { return t0_; }
  double length() const noexcept { return T0_; }
  double speed() const noexcept { return speed_; }
  double cycle() const noexcept { return cycle_; }
  std::int64_t macro_count() const noexcept { return macro_count_; }
  double epsilon() const noexcept { return epsilon_; }
  double lipschitz() const noexcept { return lipschitz_; }
  const std::vector<TimelineSegment>& pattern() const noexcept { return pattern_; }

  PeriodicTimeline timeline() const;
  /// Observer position g(t) for t in [t0, t0 + T0].
  GroupElement position_at(double t) const;

 private:
  friend ContinuousPath build_continuous(const ConvexDesign&, double, double, double, double);
  ConvexDesign design_;
  double t0_ = 0.0;
  double T0_ = 0.0;
  double speed_ = 0.0;
  double cycle_ = 0.0;
  std::int64_t macro_count_ = 1;
  double epsilon_ = 0.0;
  double lipschitz_ = 0.0;
  std::vector<TimelineSegment> pattern_;
};

/// Throws SpeedTooLow when V <= D / T0.
ContinuousPath build_continuous(const ConvexDesign& design, double t0, double T0, double speed,
                                double lipschitz);

}  // namespace cesaro
