// SPDX-License-Identifier: Apache-2.0

#include "nopc/corrector.hpp"

#include <cmath>
#include <exception>

#include "nopc/error.hpp"
#include "nopc/kernels.hpp"
#include "nopc/text_format.hpp"

namespace nopc
{

CorrectionResult correct(const ProblemDef &problem, const Field &m, const Field &u_tilde,
                         const LinearSolveConfig &cfg)
{
  NOPC_REQUIRE(u_tilde.space != nullptr, "field without a space");
  const auto &space = *u_tilde.space;
  CorrectionResult r;
  r.residual_before = free_norm(space, assemble_residual(problem, m, u_tilde));
  r.e = linearized_update(problem, m, u_tilde, cfg);
  r.u_c = u_tilde;
  for (std::size_t i = 0; i < r.e.size(); ++i)
  {
    r.u_c.values[i] += r.e[i];
  }
  r.residual_after = free_norm(space, assemble_residual(problem, m, r.u_c));
  r.e_l2coeff = norm(space, r.e, NormKind::L2Coeff);
  r.e_l2 = norm(space, r.e, NormKind::L2);
  r.e_h1 = norm(space, r.e, NormKind::H1);
  return r;
}

std::vector<CorrectionResult> correct_k(const ProblemDef &problem, const Field &m,
                                        const Field &u_tilde, std::size_t k,
                                        const LinearSolveConfig &cfg)
{
  NOPC_REQUIRE(k >= 1, "k must be at least 1");
  std::vector<CorrectionResult> out;
  out.reserve(k);
  out.push_back(correct(problem, m, u_tilde, cfg));
  for (std::size_t i = 1; i < k; ++i)
  {
    out.push_back(correct(problem, m, out.back().u_c, cfg));
  }
  return out;
}

std::vector<CorrectionResult> correct_batch(const ProblemDef &problem, std::span<const Field> m,
                                            std::span<const Field> u_tilde,
                                            const LinearSolveConfig &cfg)
{
  NOPC_REQUIRE(m.size() == u_tilde.size(), "parameter and state counts differ");
  std::vector<CorrectionResult> out(m.size());
  std::vector<std::exception_ptr> errors(m.size());
  const auto n = static_cast<std::int64_t>(m.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t j = 0; j < n; ++j)
  {
    try
    {
      out[j] = correct(problem, m[j], u_tilde[j], cfg);
    }
    catch (...)
    {
      errors[j] = std::current_exception();
    }
  }
  for (const auto &e : errors)
  {
    if (e)
    {
      std::rethrow_exception(e);
    }
  }
  return out;
}

double estimate_qoi_error(const ProblemDef &problem, const Field &m, const Field &u_tilde,
                          const LinearSolveConfig &cfg)
{
  NOPC_REQUIRE(problem.id == ProblemId::Flux, "the compliance estimate needs the flux problem");
  const auto r = correct(problem, m, u_tilde, cfg);
  return boundary_integral(Field(u_tilde.space, r.e), problem.flux_tag, problem.boundary_flux);
}

std::vector<ProbeRow> error_scaling_probe(const ProblemDef &problem, const Field &m,
                                          const Field &u_star, const Field &w,
                                          std::span<const double> eps_list,
                                          const LinearSolveConfig &cfg)
{
  NOPC_REQUIRE(w.space == u_star.space, "direction and solution live on different spaces");
  NOPC_REQUIRE(kernels::norm2(w.values) > 0.0, "direction must be nonzero");
  for (auto d : w.space->dirichlet_dofs())
  {
    NOPC_REQUIRE(w.values[d] == 0.0, "direction must vanish on the Dirichlet dofs");
  }
  std::vector<ProbeRow> rows;
  for (double eps : eps_list)
  {
    Field ut = u_star;
    for (std::size_t i = 0; i < ut.size(); ++i)
    {
      ut.values[i] += eps * w.values[i];
    }
    const auto r = correct(problem, m, ut, cfg);
    std::vector<double> before(ut.size()), after(ut.size());
    for (std::size_t i = 0; i < ut.size(); ++i)
    {
      before[i] = ut.values[i] - u_star.values[i];
      after[i] = r.u_c.values[i] - u_star.values[i];
    }
    rows.push_back({eps, kernels::norm2(before), kernels::norm2(after)});
  }
  return rows;
}

double loglog_slope(std::span<const ProbeRow> rows)
{
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto &r : rows)
  {
    if (r.eps == 0.0)
    {
      continue;
    }
    NOPC_REQUIRE(r.err_before > 0.0 && r.err_after > 0.0, "errors must be positive for a log fit");
    const double x = std::log(r.err_before), y = std::log(r.err_after);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  NOPC_REQUIRE(n >= 2, "need at least two nonzero eps values");
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

std::string probe_csv(std::span<const ProbeRow> rows)
{
  std::string out = "eps,err_before,err_after\n";
  for (const auto &r : rows)
  {
    append_double(out, r.eps);
    out += ',';
    append_double(out, r.err_before);
    out += ',';
    append_double(out, r.err_after);
    out += '\n';
  }
  return out;
}

}  // namespace nopc
