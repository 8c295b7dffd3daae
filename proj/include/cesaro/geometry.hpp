#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace cesaro {

inline constexpr int kMaxDim = 2;

using Point = std::array<double, kMaxDim>;
using Frequency = std::array<int, kMaxDim>;

/// Flat torus T^d = R^d / Z^d, d in {1, 2}, with normalized Lebesgue measure.
/// The translation group acts on itself; unused trailing coordinates are 0.
class TorusSpace {
 public:
  explicit TorusSpace(int dim);

  int dim() const noexcept { return dim_; }
  bool operator==(const TorusSpace&) const = default;

 private:
  int dim_;
};

/// Reduce a real number into [0, 1).
double wrap_unit(double x) noexcept;

/// A translation of the torus. Components are kept in [0, 1).
struct GroupElement {
  Point shift{};

  static GroupElement identity() { return {}; }
  /// Builds a shift from arbitrary reals, reducing each component mod 1.
  static GroupElement from(const TorusSpace& space, std::span<const double> components);
  static GroupElement from(const TorusSpace& space, std::initializer_list<double> components);

  bool operator==(const GroupElement&) const = default;
};

/// Half-open box prod [lo_a, hi_a) with 0 <= lo_a < hi_a <= 1 on each used axis.
struct Box {
  Point lo{};
  Point hi{};

  double volume(int dim) const noexcept;
  bool operator==(const Box&) const = default;
};

/// Finite union of pairwise disjoint boxes mod 1: the prototype observation set.
class PrototypeSet {
 public:
  /// Accepts boxes with 0 < hi_a - lo_a <= 1 on every axis and arbitrary real
  /// endpoints; they are reduced mod 1 and split at the wrap boundary.
  /// Throws std::invalid_argument on degenerate or overlapping pieces.
  PrototypeSet(TorusSpace space, const std::vector<Box>& pieces);

  static PrototypeSet full(TorusSpace space);
  /// Convenience for T^1: the arc [a, b) mod 1.
  static PrototypeSet interval(double a, double b);

  const TorusSpace& space() const noexcept { return space_; }
  const std::vector<Box>& pieces() const noexcept { return pieces_; }
  double measure() const noexcept { return measure_; }
  bool is_full() const noexcept;

 private:
  struct Normalized {};
  PrototypeSet(TorusSpace space, std::vector<Box> pieces, Normalized);

  TorusSpace space_;
  std::vector<Box> pieces_;
  double measure_ = 0.0;

  friend PrototypeSet translate_set(const PrototypeSet&, const GroupElement&);
};

/// g . omega, re-split at the wrap boundary so every piece stays inside [0,1)^d.
PrototypeSet translate_set(const PrototypeSet& set, const GroupElement& g);

/// Exact integral of exp(-2 pi i n.y) over the set.
std::complex<double> indicator_fourier_coefficient(const PrototypeSet& set,
                                                   const Frequency& freq);

double set_measure(const PrototypeSet& set);

/// Per-axis shortest displacement from a to b, each component in [-1/2, 1/2).
Point wrapped_displacement(const TorusSpace& space, const GroupElement& a,
                           const GroupElement& b);

/// Flat geodesic distance on the torus.
double torus_distance(const TorusSpace& space, const GroupElement& a, const GroupElement& b);

}  // namespace cesaro
