#pragma once

// Independent reference computations used by the tests: dense quadrature
// instead of the closed forms used in the library.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "cesaro/evolve.hpp"
#include "cesaro/geometry.hpp"

namespace oracle {

inline bool contains(const cesaro::PrototypeSet& set, const cesaro::Point& y) {
  const int dim = set.space().dim();
  for (const cesaro::Box& b : set.pieces()) {
    bool in = true;
    for (int a = 0; a < dim; ++a) in = in && y[a] >= b.lo[a] && y[a] < b.hi[a];
    if (in) return true;
  }
  return false;
}

/// Gauss-Legendre nodes and weights on [0, 1] (Golub-Welsch).
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    x[k] = 0.5 * (es.eigenvalues()(k) + 1.0);
    const double v = es.eigenvectors()(0, k);
    w[k] = v * v;  // 2 v^2 on [-1, 1], halved for [0, 1]
  }
}

/// Quadrature of 1_set(y) exp(-2 pi i n.y) piece by piece: a midpoint Riemann
/// sum with `nodes` points on T^1, a nodes x nodes Gauss-Legendre product on T^2.
inline std::complex<double> fourier(const cesaro::PrototypeSet& set, const cesaro::Frequency& n,
                                    int nodes) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::complex<double> sum = 0.0;
  if (set.space().dim() == 1) {
    for (const cesaro::Box& b : set.pieces()) {
      const double h = (b.hi[0] - b.lo[0]) / nodes;
      std::complex<double> part = 0.0;
      for (int j = 0; j < nodes; ++j) part += std::polar(1.0, -two_pi * n[0] * (b.lo[0] + (j + 0.5) * h));
      sum += part * h;
    }
    return sum;
  }
  std::vector<double> x, w;
  gauss_legendre(nodes, x, w);
  for (const cesaro::Box& b : set.pieces()) {
    const double w0 = b.hi[0] - b.lo[0];
    const double w1 = b.hi[1] - b.lo[1];
    for (int i = 0; i < nodes; ++i)
      for (int j = 0; j < nodes; ++j) {
        const double y0 = b.lo[0] + x[i] * w0;
        const double y1 = b.lo[1] + x[j] * w1;
        sum += w[i] * w[j] * w0 * w1 * std::polar(1.0, -two_pi * (n[0] * y0 + n[1] * y1));
      }
  }
  return sum;
}

/// Composite Simpson rule with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int k = 1; k < panels; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Output coefficients at time t evaluated by summing modal trigonometric series directly.
inline Eigen::VectorXcd output_at(const cesaro::ModalDatum& z, cesaro::OutputKind kind, double t) {
  const auto n = static_cast<Eigen::Index>(z.basis.size());
  Eigen::VectorXcd v(n);
  const std::complex<double> I(0.0, 1.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double nu = z.frequency(static_cast<std::size_t>(k));
    if (z.model == cesaro::Model::schrodinger) {
      const std::complex<double> u = z.a[k] * std::exp(I * nu * t);
      v[k] = kind == cesaro::OutputKind::field ? u : I * nu * u;
    } else if (kind == cesaro::OutputKind::time_derivative) {
      v[k] = -nu * z.a[k] * std::sin(nu * t) + z.b[k] * std::cos(nu * t);
    } else {
      v[k] = nu > 0.0 ? z.a[k] * std::cos(nu * t) + z.b[k] * std::sin(nu * t) / nu : z.a[k];
    }
  }
  return v;
}

}  // namespace oracle
