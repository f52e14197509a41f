// SPDX-License-Identifier: Apache-2.0

#include "nopc/grf.hpp"

#include <cmath>
#include <exception>
#include <random>

#include "nopc/error.hpp"
#include "nopc/nonlinear_solver.hpp"

namespace nopc
{

void validate(const PriorConfig &cfg)
{
  NOPC_REQUIRE(cfg.gamma > 0.0 && cfg.delta > 0.0 && cfg.eta_robin > 0.0,
               "prior coefficients must be positive");
  NOPC_REQUIRE(cfg.d == 2, "only d = 2 is supported");
}

CsrMatrix assemble_prior_operator(const FunctionSpace &space, const PriorConfig &cfg)
{
  NOPC_REQUIRE(cfg.gamma >= 0.0 && cfg.delta >= 0.0 && cfg.eta_robin >= 0.0,
               "prior coefficients must be nonnegative");
  const CsrMatrix a = space.stiffness().combine(cfg.gamma, space.mass(), cfg.delta);
  return a.combine(1.0, assemble_boundary_mass(space, std::nullopt), cfg.eta_robin);
}

PriorSampler::PriorSampler(SpacePtr space, const PriorConfig &cfg)
    : space_(std::move(space)), cfg_(cfg)
{
  NOPC_REQUIRE(space_ != nullptr, "null space");
  validate(cfg_);
  op_ = assemble_prior_operator(*space_, cfg_);
  const auto lumped = space_->lumped_mass();
  noise_scale_.resize(lumped.size());
  for (std::size_t i = 0; i < lumped.size(); ++i)
  {
    noise_scale_[i] = std::sqrt(lumped[i]);
  }
}

Field PriorSampler::draw(std::uint64_t index) const
{
  std::mt19937_64 rng(stream_seed(cfg_.seed, index));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> rhs(noise_scale_.size());
  for (std::size_t i = 0; i < rhs.size(); ++i)
  {
    rhs[i] = noise_scale_[i] * normal(rng);
  }
  LinearSolveConfig lin;
  lin.rel_tol = 1e-12;
  return {space_, solve_linear(op_, rhs, lin)};
}

std::vector<Field> PriorSampler::draw(std::uint64_t first, std::size_t count) const
{
  NOPC_REQUIRE(count >= 1, "sample count must be positive");
  std::vector<Field> out(count);
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t j = 0; j < n; ++j)
  {
    try
    {
      out[j] = draw(first + static_cast<std::uint64_t>(j));
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

std::vector<Field> sample(SpacePtr space, const PriorConfig &cfg, std::size_t count)
{
  return PriorSampler(std::move(space), cfg).draw(0, count);
}

Field transform_parameter(const Field &w, ProblemId problem, double m_lower)
{
  NOPC_REQUIRE(w.space != nullptr, "field without a space");
  Field m = w;
  if (problem == ProblemId::Flux)
  {
    NOPC_REQUIRE(m_lower > 0.0, "m_lower must be positive");
    for (double &v : m.values)
    {
      v = std::max(m_lower, 0.25 * std::exp(v));
    }
  }
  return m;
}

}  // namespace nopc
