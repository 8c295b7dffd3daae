#include "cesaro/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cesaro {

namespace {

constexpr double kOverlapTolerance = 1e-14;

struct Arc {
  double lo;
  double hi;
};

// Splits [lo, hi) (width in (0, 1]) into at most two arcs inside [0, 1).
int split_arc(double lo, double hi, Arc out[2]) {
  const double k = std::floor(lo);
  lo -= k;
  hi -= k;
  if (hi <= 1.0) {
    out[0] = {lo, hi};
    return 1;
  }
  int n = 0;
  if (lo < 1.0) out[n++] = {lo, 1.0};
  if (hi - 1.0 > 0.0) out[n++] = {0.0, hi - 1.0};
  return n;
}

std::vector<Box> split_box(const Box& box, int dim) {
  Arc arcs[kMaxDim][2];
  int counts[kMaxDim] = {1, 1};
  for (int a = 0; a < dim; ++a) counts[a] = split_arc(box.lo[a], box.hi[a], arcs[a]);
  std::vector<Box> out;
  for (int i = 0; i < counts[0]; ++i) {
    for (int j = 0; j < (dim > 1 ? counts[1] : 1); ++j) {
      Box b;
      b.lo[0] = arcs[0][i].lo;
      b.hi[0] = arcs[0][i].hi;
      if (dim > 1) {
        b.lo[1] = arcs[1][j].lo;
        b.hi[1] = arcs[1][j].hi;
      }
      out.push_back(b);
    }
  }
  return out;
}

double overlap(const Box& a, const Box& b, int dim) {
  double v = 1.0;
  for (int ax = 0; ax < dim; ++ax) {
    const double w = std::min(a.hi[ax], b.hi[ax]) - std::max(a.lo[ax], b.lo[ax]);
    if (w <= 0.0) return 0.0;
    v *= w;
  }
  return v;
}

// Integral of exp(-2 pi i n y) over [lo, hi).
std::complex<double> arc_integral(double lo, double hi, int n) {
  const double w = hi - lo;
  if (n == 0) return w;
  if (w == 1.0) return 0.0;
  const double x = std::numbers::pi * n * w;
  const double sinc = std::sin(x) / x;
  return std::polar(w * sinc, -std::numbers::pi * n * (lo + hi));
}

}  // namespace

TorusSpace::TorusSpace(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("torus dimension must be 1 or 2, got " + std::to_string(dim));
}

double wrap_unit(double x) noexcept {
  double r = x - std::floor(x);
  // x slightly below an integer can round up to exactly 1.
  if (r >= 1.0) r = 0.0;
  return r;
}

GroupElement GroupElement::from(const TorusSpace& space, std::span<const double> components) {
  if (static_cast<int>(components.size()) != space.dim())
    throw std::invalid_argument("shift has " + std::to_string(components.size()) +
                                " components, torus dimension is " +
                                std::to_string(space.dim()));
  GroupElement g;
  for (int a = 0; a < space.dim(); ++a) {
    if (!std::isfinite(components[a])) throw std::invalid_argument("non-finite shift");
    g.shift[a] = wrap_unit(components[a]);
  }
  return g;
}

GroupElement GroupElement::from(const TorusSpace& space, std::initializer_list<double> components) {
  return from(space, std::span<const double>(components.begin(), components.size()));
}

double Box::volume(int dim) const noexcept {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= hi[a] - lo[a];
  return v;
}

PrototypeSet::PrototypeSet(TorusSpace space, const std::vector<Box>& pieces) : space_(space) {
  const int d = space.dim();
  if (pieces.empty()) throw std::invalid_argument("prototype set needs at least one box");
  for (const Box& b : pieces) {
    for (int a = 0; a < d; ++a) {
      const double w = b.hi[a] - b.lo[a];
      if (!std::isfinite(b.lo[a]) || !std::isfinite(b.hi[a]) || !(w > 0.0) || w > 1.0)
        throw std::invalid_argument("box side must have width in (0, 1]");
    }
    for (const Box& piece : split_box(b, d)) pieces_.push_back(piece);
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    for (std::size_t j = i + 1; j < pieces_.size(); ++j)
      if (overlap(pieces_[i], pieces_[j], d) > kOverlapTolerance)
        throw std::invalid_argument("prototype boxes overlap after reduction mod 1");
  for (const Box& b : pieces_) measure_ += b.volume(d);
}

PrototypeSet::PrototypeSet(TorusSpace space, std::vector<Box> pieces, Normalized)
    : space_(space), pieces_(std::move(pieces)) {
  for (const Box& b : pieces_) measure_ += b.volume(space_.dim());
}

PrototypeSet PrototypeSet::full(TorusSpace space) {
  Box b;
  for (int a = 0; a < space.dim(); ++a) b.hi[a] = 1.0;
  return PrototypeSet(space, {b});
}

PrototypeSet PrototypeSet::interval(double a, double b) {
  Box box;
  box.lo[0] = a;
  box.hi[0] = b;
  return PrototypeSet(TorusSpace(1), {box});
}

bool PrototypeSet::is_full() const noexcept { return std::abs(measure_ - 1.0) <= 1e-14; }

PrototypeSet translate_set(const PrototypeSet& set, const GroupElement& g) {
  const int d = set.space().dim();
  std::vector<Box> out;
  out.reserve(set.pieces().size() * 2);
  for (const Box& b : set.pieces()) {
    Box moved = b;
    for (int a = 0; a < d; ++a) {
      moved.lo[a] += g.shift[a];
      moved.hi[a] += g.shift[a];
    }
    for (const Box& piece : split_box(moved, d)) out.push_back(piece);
  }
  return PrototypeSet(set.space(), std::move(out), PrototypeSet::Normalized{});
}

std::complex<double> indicator_fourier_coefficient(const PrototypeSet& set, const Frequency& freq) {
  const int d = set.space().dim();
  std::complex<double> total = 0.0;
  for (const Box& b : set.pieces()) {
    std::complex<double> term = 1.0;
    for (int a = 0; a < d; ++a) term *= arc_integral(b.lo[a], b.hi[a], freq[a]);
    total += term;
  }
  return total;
}

double set_measure(const PrototypeSet& set) { return set.measure(); }

Point wrapped_displacement(const TorusSpace& space, const GroupElement& a, const GroupElement& b) {
  Point delta{};
  for (int ax = 0; ax < space.dim(); ++ax) {
    double x = b.shift[ax] - a.shift[ax];
    x -= std::floor(x + 0.5);
    delta[ax] = x;
  }
  return delta;
}

double torus_distance(const TorusSpace& space, const GroupElement& a, const GroupElement& b) {
  const Point delta = wrapped_displacement(space, a, b);
  double s = 0.0;
  for (int ax = 0; ax < space.dim(); ++ax) s += delta[ax] * delta[ax];
  return std::sqrt(s);
}

}  // namespace cesaro
