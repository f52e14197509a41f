// SPDX-License-Identifier: Apache-2.0

#include "nopc/topopt.hpp"

#include <cmath>

#include "nopc/error.hpp"
#include "nopc/text_format.hpp"

namespace nopc
{

namespace
{

constexpr std::size_t max_bracket_steps = 60;
constexpr std::size_t max_bisections = 200;

Field nodal_map(const Field &f, const std::function<double(double)> &fn)
{
  Field out = f;
  for (double &v : out.values)
  {
    v = fn(v);
  }
  return out;
}

}  // namespace

std::string to_string(ForwardMode mode)
{
  switch (mode)
  {
  case ForwardMode::Fem:
    return "fem";
  case ForwardMode::Nn:
    return "nn";
  case ForwardMode::NnCorrected:
    return "nn_corrected";
  }
  return "fem";
}

ForwardMode parse_forward_mode(const std::string &s)
{
  if (s == "fem")
  {
    return ForwardMode::Fem;
  }
  if (s == "nn")
  {
    return ForwardMode::Nn;
  }
  if (s == "nn_corrected")
  {
    return ForwardMode::NnCorrected;
  }
  throw std::invalid_argument("unknown forward mode '" + s + "' (fem, nn, nn_corrected)");
}

void validate(const TopOptConfig &cfg)
{
  NOPC_REQUIRE(cfg.m_lower > 0.0 && cfg.m_lower < cfg.eta && cfg.eta <= 1.0,
               "need 0 < m_lower < eta <= 1");
  NOPC_REQUIRE(cfg.m_tol > 0.0 && cfg.gamma_tol > 0.0, "tolerances must be positive");
  NOPC_REQUIRE(cfg.lambda0 > 0.0, "lambda0 must be positive");
  NOPC_REQUIRE(cfg.m0 >= cfg.m_lower && cfg.m0 <= 1.0, "m0 must lie in [m_lower, 1]");
}

double compliance(const ProblemDef &problem, const Field &u)
{
  return boundary_integral(u, problem.flux_tag, problem.boundary_flux);
}

double volumetric_compliance(const ProblemDef &problem, const Field &m, const Field &u)
{
  NOPC_REQUIRE(m.space && u.space && m.size() == u.size(), "fields do not match");
  const auto &s = *u.space;
  const auto &mesh = s.mesh();
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
  {
    const auto el = mesh.element(e);
    const auto pts = s.element_points(e);
    for (std::size_t q = 0; q < pts.size(); ++q)
    {
      double mq = 0.0, uq = 0.0, gx = 0.0, gy = 0.0;
      for (std::size_t a = 0; a < el.size(); ++a)
      {
        mq += pts[q].n[a] * m.values[el[a]];
        uq += pts[q].n[a] * u.values[el[a]];
        gx += pts[q].grad[a][0] * u.values[el[a]];
        gy += pts[q].grad[a][1] * u.values[el[a]];
      }
      total += s.weight(e, q) *
               (diffusivity_value(problem, mq) * (gx * gx + gy * gy) + problem.alpha * uq * uq * uq * uq);
    }
  }
  return total;
}

Field flux_energy(const Field &m, const Field &u)
{
  NOPC_REQUIRE(m.space && u.space && m.size() == u.size(), "fields do not match");
  const auto &s = *u.space;
  const auto &mesh = s.mesh();
  const double xi = mesh.kind() == ElementKind::Tri3 ? 1.0 / 3.0 : 0.0;
  std::vector<Vec2> verts(mesh.nodes_per_element());
  std::vector<double> acc(s.size(), 0.0);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
  {
    const auto el = mesh.element(e);
    for (std::size_t a = 0; a < el.size(); ++a)
    {
      verts[a] = mesh.nodes()[el[a]];
    }
    const auto c = evaluate_element(mesh.kind(), verts, xi, xi);
    double mc = 0.0, gx = 0.0, gy = 0.0;
    for (std::size_t a = 0; a < el.size(); ++a)
    {
      mc += c.n[a] * m.values[el[a]];
      gx += c.grad[a][0] * u.values[el[a]];
      gy += c.grad[a][1] * u.values[el[a]];
    }
    const double energy = mc * mc * (gx * gx + gy * gy);
    const auto pts = s.element_points(e);
    for (std::size_t q = 0; q < pts.size(); ++q)
    {
      const double w = s.weight(e, q);
      for (std::size_t a = 0; a < el.size(); ++a)
      {
        acc[el[a]] += energy * w * pts[q].n[a];
      }
    }
  }
  const auto lumped = s.lumped_mass();
  for (std::size_t i = 0; i < acc.size(); ++i)
  {
    acc[i] /= lumped[i];
  }
  return {u.space, std::move(acc)};
}

Field update_m(const Field &e, double lambda, double m_lower)
{
  NOPC_REQUIRE(lambda > 0.0, "lambda must be positive");
  return nodal_map(e, [&](double v) {
    NOPC_REQUIRE(v >= 0.0, "flux energy must be nonnegative");
    return std::min(1.0, std::max(m_lower, std::sqrt(v / lambda)));
  });
}

double volume_average(const Field &m)
{
  const auto lumped = m.space->lumped_mass();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
  {
    num += lumped[i] * m.values[i];
    den += lumped[i];
  }
  return num / den;
}

InnerResult inner_iteration(const Field &m_k, double lambda_k, const Field &e,
                            const TopOptConfig &cfg)
{
  validate(cfg);
  NOPC_REQUIRE(lambda_k > 0.0, "lambda must be positive");
  InnerResult r{m_k, lambda_k, 0};
  auto set = [&](double lambda) {
    r.lambda = lambda;
    r.m = update_m(e, lambda, cfg.m_lower);
    ++r.updates;
    return volume_average(r.m);
  };
  auto fail = [&]() {
    throw NumericalError("volume bracket not found; the flux energy is degenerate");
  };

  // mbar(lambda) is nonincreasing: lo keeps mbar >= eta, hi keeps mbar <= eta.
  double mbar = volume_average(m_k);
  double lo = 0.0, hi = 0.0;
  if (mbar < cfg.eta)
  {
    hi = lambda_k;
    for (std::size_t k = 0; mbar < cfg.eta; ++k)
    {
      if (k == max_bracket_steps)
      {
        fail();
      }
      mbar = set(r.lambda / 2.0);
    }
    lo = r.lambda;
  }
  else
  {
    lo = lambda_k;
    for (std::size_t k = 0; mbar > cfg.eta; ++k)
    {
      if (k == max_bracket_steps)
      {
        fail();
      }
      mbar = set(r.lambda * 2.0);
    }
    hi = r.lambda;
  }
  if (r.updates == 0)
  {
    mbar = set(lambda_k);
  }
  // The branch was chosen from m_k, so the far end of the bracket is unverified.
  for (std::size_t k = 0; volume_average(update_m(e, hi, cfg.m_lower)) > cfg.eta; ++k)
  {
    if (k == max_bracket_steps)
    {
      fail();
    }
    hi *= 2.0;
  }
  for (std::size_t k = 0; volume_average(update_m(e, lo, cfg.m_lower)) < cfg.eta; ++k)
  {
    if (k == max_bracket_steps)
    {
      fail();
    }
    lo /= 2.0;
  }

  for (std::size_t k = 0; std::abs(mbar - cfg.eta) > cfg.eta * cfg.m_tol; ++k)
  {
    if (k == max_bisections)
    {
      throw NumericalError("lambda bisection did not meet the volume tolerance");
    }
    mbar = set(0.5 * (lo + hi));
    if (mbar < cfg.eta)
    {
      hi = r.lambda;
    }
    else
    {
      lo = r.lambda;
    }
  }
  return r;
}

ForwardFn fem_forward(const ProblemDef &problem, const NewtonConfig &cfg)
{
  return [problem, cfg](const Field &m, const Field *previous) {
    const Field start = previous ? *previous : Field::zeros(m.space);
    return newton_solve(problem, m, start, cfg).u;
  };
}

ForwardFn nn_forward(std::shared_ptr<const Surrogate> net, SpacePtr space)
{
  NOPC_REQUIRE(net && space, "missing surrogate or space");
  NOPC_REQUIRE(net->output_dim() == space->size() && net->input_dim() == space->size(),
               "surrogate dimensions do not match the space");
  return [net, space](const Field &m, const Field *) { return Field(space, net->forward(m.values)); };
}

ForwardFn corrected_forward(const ProblemDef &problem, std::shared_ptr<const Surrogate> net,
                            SpacePtr space, const LinearSolveConfig &cfg)
{
  auto nn = nn_forward(net, space);
  return [problem, nn, cfg](const Field &m, const Field *) {
    return correct(problem, m, nn(m, nullptr), cfg).u_c;
  };
}

TopOptResult outer_iteration(const TopOptConfig &cfg, const ProblemDef &problem, SpacePtr space,
                             const ForwardFn &forward, const TopOptObserver &observer)
{
  validate(cfg);
  NOPC_REQUIRE(space != nullptr, "null space");
  NOPC_REQUIRE(forward != nullptr, "missing forward map");
  TopOptResult r;
  r.m = Field::constant(space, cfg.m0);
  r.lambda = cfg.lambda0;
  r.u = forward(r.m, nullptr);
  r.history.push_back({0, compliance(problem, r.u), volume_average(r.m), r.lambda, 0.0});
  if (observer)
  {
    observer(0, r.m, r.u);
  }
  for (std::size_t k = 1; k <= cfg.n_max; ++k)
  {
    const auto e = flux_energy(r.m, r.u);
    auto inner = inner_iteration(r.m, r.lambda, e, cfg);
    std::vector<double> diff(r.m.size());
    for (std::size_t i = 0; i < diff.size(); ++i)
    {
      diff[i] = inner.m.values[i] - r.m.values[i];
    }
    const double change = norm(*space, diff, NormKind::L2);
    r.u = forward(inner.m, &r.u);
    r.m = std::move(inner.m);
    r.lambda = inner.lambda;
    r.history.push_back({k, compliance(problem, r.u), volume_average(r.m), r.lambda, change});
    if (observer)
    {
      observer(k, r.m, r.u);
    }
    if (change < cfg.gamma_tol)
    {
      r.converged = true;
      break;
    }
  }
  return r;
}

std::string history_csv(const TopOptResult &result)
{
  std::string out = "iter,J,mbar,lambda,change\n";
  for (const auto &h : result.history)
  {
    out += std::to_string(h.iter);
    for (double v : {h.compliance, h.volume, h.lambda, h.change})
    {
      out += ',';
      append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

MinimizerErrors minimizer_errors(const Field &m_ref, const Field &m_nn, const Field &m_cnn,
                                 const Field &u_ref, const Field &u_nn, const Field &u_cnn)
{
  return {relative_error_percent(m_ref.values, m_nn.values),
          relative_error_percent(m_ref.values, m_cnn.values),
          relative_error_percent(u_ref.values, u_nn.values),
          relative_error_percent(u_ref.values, u_cnn.values)};
}

}  // namespace nopc
