// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_TOPOPT_HPP
#define NOPC_TOPOPT_HPP

#include <functional>
#include <string>
#include <vector>

#include "nopc/corrector.hpp"
#include "nopc/fem.hpp"
#include "nopc/neural_operator.hpp"
#include "nopc/nonlinear_solver.hpp"

namespace nopc
{

enum class ForwardMode
{
  Fem,
  Nn,
  NnCorrected
};

std::string to_string(ForwardMode mode);
ForwardMode parse_forward_mode(const std::string &s);

struct TopOptConfig
{
  double eta = 0.4;        // target volume average
  double m_lower = 0.001;
  double m_tol = 0.005;    // |mbar - eta| <= eta m_tol
  double gamma_tol = 1e-3; // outer stop on ||m_{k+1} - m_k||_{L2}
  std::size_t n_max = 200;
  double lambda0 = 1.0;
  double m0 = 0.1;
  ForwardMode mode = ForwardMode::Fem;
};

void validate(const TopOptConfig &cfg);

// int_{flux_tag} g u dS
double compliance(const ProblemDef &problem, const Field &u);
// int kappa(m) |grad u|^2 + alpha u^4 dx with the residual's quadrature; equals the
// compliance at a solved state.
double volumetric_compliance(const ProblemDef &problem, const Field &m, const Field &u);

// |m grad u|^2 per element (m and grad u at the element center), projected to the nodes
// with the lumped mass.
Field flux_energy(const Field &m, const Field &u);

// min(1, max(m_lower, sqrt(e / lambda))) nodewise
Field update_m(const Field &e, double lambda, double m_lower);

// int m dx / |Omega|
double volume_average(const Field &m);

struct InnerResult
{
  Field m;
  double lambda = 0.0;
  std::size_t updates = 0;
};

// Bracketing by halving or doubling lambda, then bisection until |mbar - eta| <= eta m_tol.
InnerResult inner_iteration(const Field &m_k, double lambda_k, const Field &e,
                            const TopOptConfig &cfg);

// Forward map m -> u; `previous` is the last state (may be null) for warm starts.
using ForwardFn = std::function<Field(const Field &m, const Field *previous)>;

ForwardFn fem_forward(const ProblemDef &problem, const NewtonConfig &cfg = {});
ForwardFn nn_forward(std::shared_ptr<const Surrogate> net, SpacePtr space);
ForwardFn corrected_forward(const ProblemDef &problem, std::shared_ptr<const Surrogate> net,
                            SpacePtr space, const LinearSolveConfig &cfg = {});

struct TopOptRecord
{
  std::size_t iter = 0;
  double compliance = 0.0;
  double volume = 0.0;
  double lambda = 0.0;
  double change = 0.0;  // ||m_k - m_{k-1}||_{L2}, 0 for the initial state
};

struct TopOptResult
{
  Field m;
  Field u;
  double lambda = 0.0;
  std::vector<TopOptRecord> history;
  bool converged = false;
};

// Called with (iteration, m_k, u_k) for the initial state and after every outer step.
using TopOptObserver = std::function<void(std::size_t, const Field &, const Field &)>;

TopOptResult outer_iteration(const TopOptConfig &cfg, const ProblemDef &problem, SpacePtr space,
                             const ForwardFn &forward, const TopOptObserver &observer = {});

// "iter,J,mbar,lambda,change" rows
std::string history_csv(const TopOptResult &result);

struct MinimizerErrors
{
  double eps_nn = 0.0;   // 100 ||m - m_nn|| / ||m||
  double eps_cnn = 0.0;
  double e_nn = 0.0;     // state analogs
  double e_cnn = 0.0;
};

MinimizerErrors minimizer_errors(const Field &m_ref, const Field &m_nn, const Field &m_cnn,
                                 const Field &u_ref, const Field &u_nn, const Field &u_cnn);

}  // namespace nopc

#endif  // NOPC_TOPOPT_HPP
