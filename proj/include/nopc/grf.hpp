// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_GRF_HPP
#define NOPC_GRF_HPP

#include <cstdint>
#include <vector>

#include "nopc/fem.hpp"
#include "nopc/random.hpp"
#include "nopc/sparse.hpp"

namespace nopc
{

// Gaussian prior N(0, C) with C = (-gamma div grad + delta)^(-d) and a Robin term
// gamma n.grad + eta on the boundary.
struct PriorConfig
{
  double gamma = 0.08;
  double delta = 2.0;
  double eta_robin = 1.0 / 1.42;
  int d = 2;
  std::uint64_t seed = 0;
};

void validate(const PriorConfig &cfg);

// A = gamma K + delta M + eta_robin M_boundary, boundary mass over every facet.
CsrMatrix assemble_prior_operator(const FunctionSpace &space, const PriorConfig &cfg);

class PriorSampler
{
public:
  PriorSampler(SpacePtr space, const PriorConfig &cfg);

  // w = A^{-1} L xi with L = diag(sqrt(lumped mass)) and xi drawn from stream `index`.
  Field draw(std::uint64_t index) const;
  // Samples first .. first + count - 1, computed in parallel.
  std::vector<Field> draw(std::uint64_t first, std::size_t count) const;

  const CsrMatrix &op() const { return op_; }
  const PriorConfig &config() const { return cfg_; }

private:
  SpacePtr space_;
  PriorConfig cfg_;
  CsrMatrix op_;
  std::vector<double> noise_scale_;
};

std::vector<Field> sample(SpacePtr space, const PriorConfig &cfg, std::size_t count);

// Source problem: m = w. Flux problem: m = max(m_lower, 0.25 exp(w)).
Field transform_parameter(const Field &w, ProblemId problem, double m_lower = 0.001);

}  // namespace nopc

#endif  // NOPC_GRF_HPP
