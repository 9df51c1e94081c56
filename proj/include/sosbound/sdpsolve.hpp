#pragma once

// Dense primal-dual interior-point solver for small block-diagonal SDPs with
// free scalar variables:
//
//   min  c_y' y   s.t.  <A_ik, X_k> + (B y)_i = b_i,   X_k >= 0,  y free.
//
// Mehrotra predictor-corrector with Nesterov-Todd scaling.  The NT scaling
// point W_k = R_k R_k' satisfies W Z W = X; in scaled coordinates
// X_hat = R^-1 X R^-T and Z_hat = R' Z R are equal and diagonal, which makes
// the linearized complementarity a diagonal system.  Each iteration solves
// the Schur complement M = [ <A_i W A_j W> ] augmented by the free-variable
// columns.  Problems here are tiny (Gram dimension <= ~60), so robustness is
// preferred over sparsity.

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

#include "sosbound/sosform.hpp"

namespace sosbound::sdpsolve {

using sosform::SDPInstance;

struct SolverSettings {
  int max_iterations = 200;
  double gap_tolerance = 1e-9;
  double feasibility_tolerance = 1e-9;
  double step_fraction = 0.98;
};

enum class SolveStatus { Optimal, Marginal, Infeasible, NumericalFailure };

inline const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Marginal: return "marginal";
    case SolveStatus::Infeasible: return "infeasible";
    default: return "numerical-failure";
  }
}

struct IterateRecord {
  double pobj, dobj;  // internal minimize convention
  double gap;         // <X, Z> >= 0 along the whole path
  double infeas_corr; // <R_d, X> + r_y.y + lam.r_p; pobj - dobj = gap + corr exactly
};

struct SDPSolution {
  std::vector<Eigen::MatrixXd> gram_blocks;
  std::map<std::string, double> free_scalars;
  double objective_value = 0.0;  // in the instance's stated sense
  double duality_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double min_block_eigenvalue = 0.0;
  SolveStatus status = SolveStatus::NumericalFailure;
  int iterations = 0;
  std::vector<std::string> trace;
  std::vector<IterateRecord> iterate_log;
};

SDPSolution solve(const SDPInstance& inst, const SolverSettings& settings = {});

// Diagonal change of variables induced by the state rescaling x -> x/s: row
// coefficients, right-hand sides and free-variable columns pick up powers of
// s determined by the stored monomial degrees.  The map converts solved
// values back to original coordinates (a moment of degree d scales by s^d).
struct UnscaleMap {
  double scale = 1.0;
  int phi_degree = 0;
  std::vector<int> free_weights;                 // value_orig = value * s^w
  std::vector<std::vector<double>> gram_factors; // per block: s^(D - |b_i| - |b_j|) as factor grid? kept per element degree
  std::vector<std::vector<int>> basis_degrees;

  double unscale_bound(double v) const { return v * std::pow(scale, phi_degree); }
  void apply(SDPSolution& sol, const SDPInstance& scaled_inst) const;
};

std::pair<SDPInstance, UnscaleMap> rescale_problem(const SDPInstance& inst, double state_scale);

// Full values of the ansatz coefficients eliminated during to_sdp.
std::map<std::string, double> recover_free_scalars(const sosform::SdpConversion& conv,
                                                   const SDPSolution& sol);

}  // namespace sosbound::sdpsolve
