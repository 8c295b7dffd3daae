#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cesaro/geometry.hpp"
#include "cesaro/spectral.hpp"

namespace cesaro {

inline constexpr double kWeightFloor = 1e-13;

struct DesignAtom {
  GroupElement shift;
  double weight = 0.0;
};

/// Convex combination sum_j theta_j Gamma(g_j) approximating L Id on E_K.
struct ConvexDesign {
  int dim = 1;
  int K = 0;
  double L = 0.0;
  double residual = 0.0;  ///< ||sum theta_j Gamma(g_j) - L Id||_F
  std::vector<DesignAtom> atoms;

  std::size_t size() const noexcept { return atoms.size(); }
  double weight_sum() const noexcept;
};

/// Equal-weight grid of (4K+1)^d shifts; exact on E_K. A single atom when
/// the prototype is the whole torus or K = 0.
ConvexDesign equispaced_design(const ModalBasis& basis, const PrototypeSet& set);

/// Regular grid of `per_axis`^d shifts.
std::vector<GroupElement> grid_candidates(const TorusSpace& space, int per_axis);
std::vector<GroupElement> random_candidates(const TorusSpace& space, int count,
                                            std::uint64_t seed);

struct SolverTrace {
  std::vector<double> objective;  ///< 0.5 ||residual||_F^2 after each iteration
  int iterations = 0;
  int away_steps = 0;
  int corrective_steps = 0;
};

/// Minimizes ||sum theta_j Gamma(g_j) - L Id||_F over the simplex on the
/// candidates with away-step Frank-Wolfe. Throws EmptyCandidates, or
/// DesignInfeasible when the residual is still above `tol` after `max_iter`
/// iterations (or when the duality gap already proves it cannot reach `tol`).
ConvexDesign solve_design(const ModalBasis& basis, const PrototypeSet& set,
                          std::span<const GroupElement> candidates, double tol, int max_iter,
                          SolverTrace* trace = nullptr);

/// Carathéodory pruning: removes atoms along affine dependencies of their
/// moment vectors until the remaining atoms are affinely independent.
/// `gammas[j]` must be Gamma(g_j) for atom j.
ConvexDesign caratheodory_reduce(const ConvexDesign& design,
                                 std::span<const ObservationMatrix> gammas);

/// sum_j theta_j Gamma(g_j).
Eigen::MatrixXcd design_moment(const ConvexDesign& design,
                               std::span<const ObservationMatrix> gammas);

std::vector<ObservationMatrix> design_gammas(const ConvexDesign& design, const ModalBasis& basis,
                                             const PrototypeSet& set);

struct DesignReport {
  int trials = 0;
  double max_deviation = 0.0;    ///< max |sum theta_j int_{g_j w}|f|^2 - L int_M |f|^2| / ||f||^2
  double matrix_residual = 0.0;  ///< Frobenius residual recomputed from scratch
};

DesignReport verify_design(const ConvexDesign& design, const ModalBasis& basis,
                           const PrototypeSet& set, int trials, std::uint64_t seed);

enum class DesignMethod { equispaced, solve };
enum class CandidateKind { grid, random };

struct DesignOptions {
  DesignMethod method = DesignMethod::equispaced;
  CandidateKind candidates = CandidateKind::grid;
  int grid_per_axis = 0;  ///< 0 means 4K + 2
  int random_count = 64;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int max_iter = 20000;
};

/// Equispaced construction, or a solve over grid or random candidates followed by
/// Carathéodory reduction.
ConvexDesign build_design(const ModalBasis& basis, const PrototypeSet& set,
                          const DesignOptions& options);

}  // namespace cesaro
