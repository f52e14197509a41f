// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_NONLINEAR_SOLVER_HPP
#define NOPC_NONLINEAR_SOLVER_HPP

#include <span>
#include <string>
#include <vector>

#include "nopc/fem.hpp"
#include "nopc/sparse.hpp"

namespace nopc
{

enum class LinearMethod
{
  ConjugateGradient,  // Jacobi-preconditioned
  DenseLdlt           // debugging fallback for small systems
};

struct LinearSolveConfig
{
  LinearMethod method = LinearMethod::ConjugateGradient;
  double rel_tol = 1e-10;
  // converged once ||Ax - b|| <= max(rel_tol ||b||, abs_tol)
  double abs_tol = 0.0;
  // 0 means 10 * n
  std::size_t max_iter = 0;
};

struct LinearSolveStats
{
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

// Solves A x = b for symmetric A (positive definite for CG). Throws NumericalError when
// the residual tolerance is not reached.
std::vector<double> solve_linear(const CsrMatrix &a, std::span<const double> b,
                                 const LinearSolveConfig &cfg = {},
                                 LinearSolveStats *stats = nullptr);

inline constexpr std::size_t dense_fallback_limit = 2000;

struct NewtonConfig
{
  // absolute, on the l2 norm of the free-dof residual
  double residual_tol = 1e-10;
  std::size_t max_iter = 25;
  bool line_search = true;
  double backtrack_factor = 0.5;
  std::size_t max_halvings = 20;
  bool keep_iterates = false;
  LinearSolveConfig linear;
};

struct NewtonResult
{
  Field u;
  // residual norm at the initial guess followed by one entry per accepted update; the norm
  // covers the free dofs plus any violation of the Dirichlet values
  std::vector<double> residual_norms;
  std::vector<double> step_lengths;
  // accepted iterates after each update, filled when keep_iterates is set
  std::vector<Field> iterates;

  std::size_t updates() const { return step_lengths.size(); }
};

// Solution e of delta_u R(m,u) e = -R(m,u) with e = -u on the Dirichlet dofs, so that
// u + e satisfies the boundary conditions exactly. Both Newton and the corrector take
// their steps through this function.
std::vector<double> linearized_update(const ProblemDef &problem, const Field &m, const Field &u,
                                      const LinearSolveConfig &cfg);

// Newton iteration for R(m,u) = 0 from u0 with backtracking on the free-dof residual.
NewtonResult newton_solve(const ProblemDef &problem, const Field &m, const Field &u0,
                          const NewtonConfig &cfg = {});

// "iter,residual" rows
std::string newton_stats_csv(const NewtonResult &result);

}  // namespace nopc

#endif  // NOPC_NONLINEAR_SOLVER_HPP
