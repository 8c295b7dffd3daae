#include "cesaro/design.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cesaro/errors.hpp"

namespace cesaro {

namespace {

// Dependency threshold for the Carathéodory step, relative to the largest
// singular value of the lifted moment matrix.
constexpr double kRankTolerance = 1e-12;
constexpr int kCorrectiveEvery = 16;
constexpr int kStallWindow = 400;

// Frobenius-isometric real coordinates of a Hermitian matrix.
Eigen::VectorXd moment_vector(const Eigen::MatrixXcd& h) {
  const Eigen::Index n = h.rows();
  Eigen::VectorXd out(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) out(k++) = h(i, i).real();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out(k++) = std::numbers::sqrt2 * h(i, j).real();
      out(k++) = std::numbers::sqrt2 * h(i, j).imag();
    }
  }
  return out;
}

Eigen::VectorXd identity_target(std::size_t n, double L) {
  return moment_vector(L * Eigen::MatrixXcd::Identity(n, n));
}

double design_residual(const ConvexDesign& design, std::span<const ObservationMatrix> gammas) {
  const Eigen::MatrixXcd moment = design_moment(design, gammas);
  const auto n = moment.rows();
  return (moment - design.L * Eigen::MatrixXcd::Identity(n, n)).norm();
}

void prune_and_normalize(ConvexDesign& design, std::vector<ObservationMatrix>* gammas) {
  std::vector<DesignAtom> kept;
  std::vector<ObservationMatrix> kept_gammas;
  for (std::size_t j = 0; j < design.atoms.size(); ++j) {
    if (design.atoms[j].weight >= kWeightFloor) {
      kept.push_back(design.atoms[j]);
      if (gammas) kept_gammas.push_back(std::move((*gammas)[j]));
    }
  }
  double total = 0.0;
  for (const DesignAtom& a : kept) total += a.weight;
  for (DesignAtom& a : kept) a.weight /= total;
  design.atoms = std::move(kept);
  if (gammas) *gammas = std::move(kept_gammas);
}

// Minimizer of ||A_S w - b|| subject to sum w = 1 on the support `support`.
Eigen::VectorXd affine_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                     const std::vector<Eigen::Index>& support) {
  const Eigen::Index s = static_cast<Eigen::Index>(support.size());
  Eigen::VectorXd w(s);
  if (s == 1) {
    w(0) = 1.0;
    return w;
  }
  const Eigen::VectorXd last = A.col(support.back());
  Eigen::MatrixXd B(A.rows(), s - 1);
  for (Eigen::Index k = 0; k + 1 < s; ++k) B.col(k) = A.col(support[k]) - last;
  const Eigen::VectorXd rhs = b - last;
  const Eigen::VectorXd head = B.completeOrthogonalDecomposition().solve(rhs);
  w.head(s - 1) = head;
  w(s - 1) = 1.0 - head.sum();
  return w;
}

}  // namespace

double ConvexDesign::weight_sum() const noexcept {
  double s = 0.0;
  for (const DesignAtom& a : atoms) s += a.weight;
  return s;
}

Eigen::MatrixXcd design_moment(const ConvexDesign& design,
                               std::span<const ObservationMatrix> gammas) {
  if (gammas.size() != design.atoms.size())
    throw std::invalid_argument("one observation matrix per atom is required");
  if (gammas.empty()) return {};
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(gammas[0].entries.rows(), gammas[0].entries.cols());
  for (std::size_t j = 0; j < gammas.size(); ++j) sum += design.atoms[j].weight * gammas[j].entries;
  return sum;
}

std::vector<ObservationMatrix> design_gammas(const ConvexDesign& design, const ModalBasis& basis,
                                             const PrototypeSet& set) {
  std::vector<ObservationMatrix> out;
  out.reserve(design.atoms.size());
  for (const DesignAtom& a : design.atoms) out.push_back(gamma_matrix(basis, set, a.shift));
  return out;
}

std::vector<GroupElement> grid_candidates(const TorusSpace& space, int per_axis) {
  if (per_axis < 1) throw std::invalid_argument("grid needs at least one point per axis");
  std::vector<GroupElement> out;
  if (space.dim() == 1) {
    for (int i = 0; i < per_axis; ++i) out.push_back(GroupElement::from(space, {double(i) / per_axis}));
  } else {
    for (int i = 0; i < per_axis; ++i)
      for (int j = 0; j < per_axis; ++j)
        out.push_back(GroupElement::from(space, {double(i) / per_axis, double(j) / per_axis}));
  }
  return out;
}

std::vector<GroupElement> random_candidates(const TorusSpace& space, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GroupElement> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    GroupElement g;
    for (int a = 0; a < space.dim(); ++a) g.shift[a] = wrap_unit(unit(rng));
    out.push_back(g);
  }
  return out;
}

ConvexDesign equispaced_design(const ModalBasis& basis, const PrototypeSet& set) {
  ConvexDesign design;
  design.dim = basis.space().dim();
  design.K = basis.cutoff();
  design.L = set.measure();
  if (set.is_full() || basis.cutoff() == 0) {
    design.atoms.push_back({GroupElement::identity(), 1.0});
  } else {
    const auto grid = grid_candidates(basis.space(), 4 * basis.cutoff() + 1);
    const double w = 1.0 / static_cast<double>(grid.size());
    for (const GroupElement& g : grid) design.atoms.push_back({g, w});
  }
  design.residual = design_residual(design, design_gammas(design, basis, set));
  return design;
}

ConvexDesign solve_design(const ModalBasis& basis, const PrototypeSet& set,
                          std::span<const GroupElement> candidates, double tol, int max_iter,
                          SolverTrace* trace) {
  if (candidates.empty()) throw EmptyCandidates();
  if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  const double L = set.measure();
  const Eigen::Index N = static_cast<Eigen::Index>(candidates.size());

  std::vector<ObservationMatrix> gammas;
  gammas.reserve(candidates.size());
  for (const GroupElement& g : candidates) gammas.push_back(gamma_matrix(basis, set, g));
  const Eigen::VectorXd b = identity_target(basis.size(), L);
  Eigen::MatrixXd A(b.size(), N);
  for (Eigen::Index j = 0; j < N; ++j) A.col(j) = moment_vector(gammas[j].entries);

  // Start at the single best vertex.
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(N);
  {
    Eigen::Index best = 0;
    double best_dist = (A.col(0) - b).squaredNorm();
    for (Eigen::Index j = 1; j < N; ++j) {
      const double d = (A.col(j) - b).squaredNorm();
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    theta(best) = 1.0;
  }

  auto objective = [&](const Eigen::VectorXd& t) { return 0.5 * (A * t - b).squaredNorm(); };
  const double target = 0.5 * tol * tol;
  double f = objective(theta);
  double best_f = f;
  int since_improvement = 0;
  bool proven_infeasible = false;
  int it = 0;
  SolverTrace local;
  SolverTrace& tr = trace ? *trace : local;
  tr = SolverTrace{};

  for (; it < max_iter && f > target; ++it) {
    const Eigen::VectorXd x = A * theta;
    const Eigen::VectorXd r = x - b;
    const Eigen::VectorXd grad = A.transpose() * r;
    const double g_theta = grad.dot(theta);

    Eigen::Index s = 0;
    for (Eigen::Index j = 1; j < N; ++j)
      if (grad(j) < grad(s)) s = j;
    Eigen::Index v = -1;
    for (Eigen::Index j = 0; j < N; ++j)
      if (theta(j) > 0.0 && (v < 0 || grad(j) > grad(v))) v = j;

    const double fw_gap = g_theta - grad(s);
    // f - f* <= fw_gap: the optimum cannot reach the tolerance.
    if (f - fw_gap > target * (1.0 + 1e-9) && f - fw_gap > 0.0) {
      proven_infeasible = true;
      break;
    }
    const double away_gap = grad(v) - g_theta;

    Eigen::VectorXd direction;
    double gamma_max;
    bool away = false;
    if (fw_gap >= away_gap || theta(v) >= 1.0) {
      direction = A.col(s) - x;
      gamma_max = 1.0;
    } else {
      direction = x - A.col(v);
      gamma_max = theta(v) / (1.0 - theta(v));
      away = true;
    }
    const double dd = direction.squaredNorm();
    if (dd > 0.0) {
      const double gamma = std::clamp(-r.dot(direction) / dd, 0.0, gamma_max);
      Eigen::VectorXd next = theta;
      if (away) {
        next *= (1.0 + gamma);
        next(v) -= gamma;
        if (gamma == gamma_max) next(v) = 0.0;
        ++tr.away_steps;
      } else {
        next *= (1.0 - gamma);
        next(s) += gamma;
      }
      next = next.cwiseMax(0.0);
      const double f_next = objective(next);
      if (f_next <= f) {
        theta = next;
        f = f_next;
      }
    }

    if ((it + 1) % kCorrectiveEvery == 0) {
      // Fully corrective minor cycles on the active set.
      std::vector<Eigen::Index> support;
      for (Eigen::Index j = 0; j < N; ++j)
        if (theta(j) > 0.0) support.push_back(j);
      Eigen::VectorXd work = theta;
      while (!support.empty()) {
        const Eigen::VectorXd w = affine_least_squares(A, b, support);
        double t = 1.0;
        std::size_t exit = support.size();
        for (std::size_t k = 0; k < support.size(); ++k) {
          const double cur = work(support[k]);
          if (w(k) <= 0.0 && cur - w(k) > 0.0) {
            const double tk = cur / (cur - w(k));
            if (tk < t) {
              t = tk;
              exit = k;
            }
          }
        }
        Eigen::VectorXd trial = work;
        for (std::size_t k = 0; k < support.size(); ++k)
          trial(support[k]) = work(support[k]) + t * (w(k) - work(support[k]));
        if (exit < support.size()) trial(support[exit]) = 0.0;
        trial = trial.cwiseMax(0.0);
        trial /= trial.sum();
        work = trial;
        if (exit == support.size()) break;
        support.erase(support.begin() + static_cast<std::ptrdiff_t>(exit));
      }
      const double f_work = objective(work);
      if (f_work <= f) {
        theta = work;
        f = f_work;
        ++tr.corrective_steps;
      }
    }

    tr.objective.push_back(f);
    if (f < best_f * (1.0 - 1e-12)) {
      best_f = f;
      since_improvement = 0;
    } else if (++since_improvement > kStallWindow) {
      ++it;
      break;
    }
  }
  tr.iterations = it;

  ConvexDesign design;
  design.dim = basis.space().dim();
  design.K = basis.cutoff();
  design.L = L;
  for (Eigen::Index j = 0; j < N; ++j) design.atoms.push_back({candidates[j], theta(j)});
  prune_and_normalize(design, &gammas);
  design.residual = design_residual(design, gammas);
  if (design.residual > tol) {
    const std::string why = proven_infeasible ? "duality gap proves residual stays above tolerance"
                                              : "iteration budget exhausted";
    throw DesignInfeasible(why + " (residual " + std::to_string(design.residual) + ", tol " +
                               std::to_string(tol) + ")",
                           design.residual);
  }
  return design;
}

ConvexDesign caratheodory_reduce(const ConvexDesign& design,
                                 std::span<const ObservationMatrix> gammas) {
  if (gammas.size() != design.atoms.size())
    throw std::invalid_argument("one observation matrix per atom is required");
  ConvexDesign out = design;
  std::vector<ObservationMatrix> mats(gammas.begin(), gammas.end());
  if (mats.empty()) return out;

  const Eigen::Index D = mats[0].entries.rows() * mats[0].entries.rows();
  std::vector<Eigen::VectorXd> moments;
  moments.reserve(mats.size());
  for (const auto& m : mats) moments.push_back(moment_vector(m.entries));

  while (out.atoms.size() > 1) {
    const Eigen::Index J = static_cast<Eigen::Index>(out.atoms.size());
    // Any D + 2 lifted moment vectors are affinely dependent.
    const Eigen::Index cols = std::min<Eigen::Index>(J, D + 2);
    Eigen::MatrixXd lifted(D + 1, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      lifted.col(j).head(D) = moments[j];
      lifted(D, j) = 1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lifted, Eigen::ComputeFullV);
    const Eigen::VectorXd sigma = svd.singularValues();
    const bool forced = cols > D + 1;
    const double sigma_min = forced ? 0.0 : sigma(sigma.size() - 1);
    const double scale = std::max(1.0, sigma(0));
    if (!forced && sigma_min > kRankTolerance * scale) break;  // affinely independent

    Eigen::VectorXd lambda = svd.matrixV().col(cols - 1);
    const double defect = (lifted * lambda).norm();
    if (defect > 1e3 * kRankTolerance * scale) {
      if (forced)
        throw NumericalRankFailure("null vector residual " + std::to_string(defect) +
                                   " for " + std::to_string(cols) + " atoms in dimension " +
                                   std::to_string(D));
      break;
    }
    if (lambda.maxCoeff() <= 0.0) lambda = -lambda;

    double alpha = std::numeric_limits<double>::infinity();
    Eigen::Index exit = -1;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (lambda(j) <= 0.0) continue;
      const double a = out.atoms[j].weight / lambda(j);
      if (a < alpha) {
        alpha = a;
        exit = j;
      }
    }
    if (exit < 0) throw NumericalRankFailure("dependency without positive coefficients");
    for (Eigen::Index j = 0; j < cols; ++j) out.atoms[j].weight -= alpha * lambda(j);
    out.atoms[exit].weight = 0.0;

    std::vector<DesignAtom> atoms;
    std::vector<ObservationMatrix> kept;
    std::vector<Eigen::VectorXd> kept_moments;
    for (std::size_t j = 0; j < out.atoms.size(); ++j) {
      if (out.atoms[j].weight > 0.0) {
        atoms.push_back(out.atoms[j]);
        kept.push_back(std::move(mats[j]));
        kept_moments.push_back(std::move(moments[j]));
      }
    }
    out.atoms = std::move(atoms);
    mats = std::move(kept);
    moments = std::move(kept_moments);
  }
  prune_and_normalize(out, &mats);
  out.residual = design_residual(out, mats);
  return out;
}

DesignReport verify_design(const ConvexDesign& design, const ModalBasis& basis,
                           const PrototypeSet& set, int trials, std::uint64_t seed) {
  const auto gammas = design_gammas(design, basis, set);
  DesignReport report;
  report.trials = trials;
  report.matrix_residual = design_residual(design, gammas);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXcd f(n);
    for (Eigen::Index i = 0; i < n; ++i) f(i) = {normal(rng), normal(rng)};
    double lhs = 0.0;
    for (std::size_t j = 0; j < gammas.size(); ++j)
      lhs += design.atoms[j].weight * observed_mass(gammas[j].entries, f);
    const double norm2 = f.squaredNorm();
    const double rhs = design.L * norm2;
    report.max_deviation = std::max(report.max_deviation, std::abs(lhs - rhs) / norm2);
  }
  return report;
}

ConvexDesign build_design(const ModalBasis& basis, const PrototypeSet& set,
                          const DesignOptions& options) {
  if (options.method == DesignMethod::equispaced) return equispaced_design(basis, set);
  std::vector<GroupElement> candidates;
  if (options.candidates == CandidateKind::random) {
    candidates = random_candidates(basis.space(), options.random_count, options.seed);
  } else {
    const int per_axis = options.grid_per_axis > 0 ? options.grid_per_axis : 4 * basis.cutoff() + 2;
    candidates = grid_candidates(basis.space(), per_axis);
  }
  const ConvexDesign solved = solve_design(basis, set, candidates, options.tol, options.max_iter);
  return caratheodory_reduce(solved, design_gammas(solved, basis, set));
}

}  // namespace cesaro
