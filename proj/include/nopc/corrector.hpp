// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_CORRECTOR_HPP
#define NOPC_CORRECTOR_HPP

#include <span>
#include <string>
#include <vector>

#include "nopc/fem.hpp"
#include "nopc/nonlinear_solver.hpp"

namespace nopc
{

struct CorrectionResult
{
  Field u_c;
  // the update e with u_c = u_tilde + e
  std::vector<double> e;
  double e_l2coeff = 0.0;
  double e_l2 = 0.0;
  double e_h1 = 0.0;
  // free-dof residual norms at u_tilde and at u_c
  double residual_before = 0.0;
  double residual_after = 0.0;
};

// One linearized solve delta_u R(m, u~) e = -R(m, u~), e = -u~ on Dirichlet dofs.
CorrectionResult correct(const ProblemDef &problem, const Field &m, const Field &u_tilde,
                         const LinearSolveConfig &cfg = {});

// k successive corrections starting from u_tilde.
std::vector<CorrectionResult> correct_k(const ProblemDef &problem, const Field &m,
                                        const Field &u_tilde, std::size_t k,
                                        const LinearSolveConfig &cfg = {});

// Corrections of many (m, u~) pairs, in parallel.
std::vector<CorrectionResult> correct_batch(const ProblemDef &problem, std::span<const Field> m,
                                            std::span<const Field> u_tilde,
                                            const LinearSolveConfig &cfg = {});

// Compliance error estimate Q(u) - Q(u~) ~ int_{flux_tag} g e dS for the flux problem.
double estimate_qoi_error(const ProblemDef &problem, const Field &m, const Field &u_tilde,
                          const LinearSolveConfig &cfg = {});

struct ProbeRow
{
  double eps = 0.0;
  double err_before = 0.0;
  double err_after = 0.0;
};

// For each eps: u~ = u_star + eps w, err_before = ||u~ - u_star||, err_after =
// ||correct(u~) - u_star|| (coefficient l2 norms).
std::vector<ProbeRow> error_scaling_probe(const ProblemDef &problem, const Field &m,
                                          const Field &u_star, const Field &w,
                                          std::span<const double> eps_list,
                                          const LinearSolveConfig &cfg = {});

// Least-squares slope of log(err_after) against log(err_before), rows with eps = 0 skipped.
double loglog_slope(std::span<const ProbeRow> rows);

// "eps,err_before,err_after" rows
std::string probe_csv(std::span<const ProbeRow> rows);

}  // namespace nopc

#endif  // NOPC_CORRECTOR_HPP
