// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_HARNESS_HPP
#define NOPC_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nopc/fem.hpp"
#include "nopc/grf.hpp"
#include "nopc/neural_operator.hpp"
#include "nopc/nonlinear_solver.hpp"
#include "nopc/reduction.hpp"
#include "nopc/topopt.hpp"

namespace nopc
{

struct ExperimentConfig
{
  ProblemId problem = ProblemId::Source;
  int mesh_n = 32;          // unit square, n x n quads
  double mesh_h = 0.03;     // voided square, target spacing
  std::string mesh_file;    // Gmsh or text mesh replacing the built-in geometry
  PriorConfig prior;
  std::size_t n_train = 256;
  std::size_t n_eval = 20;  // test samples used by the evaluation
  NetConfig net;
  TrainConfig train;
  TopOptConfig topopt;
  NewtonConfig newton;
  std::uint64_t data_seed = 1;
  std::uint64_t init_seed = 2;
  std::uint64_t shuffle_seed = 3;
  std::filesystem::path output_dir = "out";
};

std::string to_string(ProblemId id);
ProblemId parse_problem(const std::string &s);

// Checks ranges and that mesh_file exists when given.
void validate(const ExperimentConfig &cfg);

Mesh build_mesh(const ExperimentConfig &cfg);
SpacePtr build_space(const ExperimentConfig &cfg);
SpacePtr build_space(std::shared_ptr<const Mesh> mesh, ProblemId problem);

// floor(n / 4)
std::size_t test_size(std::size_t n_train);

// Prior draws with indices first .. first + count - 1 (stream seeds derived from
// cfg.data_seed), transformed and solved from u0 = 0 in parallel.
DataSet generate_samples(SpacePtr space, const ExperimentConfig &cfg, std::uint64_t first,
                         std::size_t count);

struct GeneratedData
{
  DataSet train;  // indices 0 .. N-1
  DataSet test;   // indices N .. N + floor(N/4) - 1
};

GeneratedData generate_data(SpacePtr space, const ExperimentConfig &cfg);

// Projectors from the training part of split_indices(N, shuffle_seed), Glorot init from
// init_seed, then Adam with the shuffle seed.
TrainResult train_surrogate(const ExperimentConfig &cfg, const DataSet &data);

struct EvalReport
{
  ErrorSummary nn;
  ErrorSummary corrected;
};

// Relative errors of the first `count` test samples, before and after one correction.
EvalReport evaluate_with_correction(const ProblemDef &problem, SpacePtr space,
                                    const Surrogate &net, const DataSet &test, std::size_t count,
                                    const LinearSolveConfig &linear = {});

struct EvalRow
{
  std::size_t number = 0;
  std::size_t r_m = 0;
  std::size_t r_u = 0;
  std::size_t n = 0;
  EvalReport report;
};

inline constexpr const char *eval_csv_header =
    "number,r_m,r_u,N,enn_min,enn_max,enn_mean,ecnn_min,ecnn_max,ecnn_mean";
std::string eval_csv(std::span<const EvalRow> rows);

struct TopOptComparison
{
  TopOptResult fem;
  TopOptResult nn;
  TopOptResult corrected;
  // FEM states at the nn and corrected minimizers
  Field u_fem_at_nn;
  Field u_fem_at_corrected;
  MinimizerErrors errors;
};

// Runs the three forward modes and compares the surrogate minimizers with the FEM one.
// The state errors compare each surrogate's own prediction at its minimizer with the
// reference state.
TopOptComparison compare_topopt(const ExperimentConfig &cfg, SpacePtr space,
                                std::shared_ptr<const Surrogate> net);

inline constexpr const char *topopt_errors_header = "eps_nn,eps_cnn,e_nn,e_cnn";
std::string topopt_errors_csv(const MinimizerErrors &e);

// "j,sigma,normalized" rows plus the indices nearest 0.1 and 0.01.
struct SpectrumReport
{
  std::vector<double> normalized;
  std::size_t index_01 = 0;
  std::size_t index_001 = 0;
};
SpectrumReport spectrum_report(std::span<const double> singular_values);
std::string spectrum_csv(std::span<const double> singular_values);

// Maps t in [0, 1] to one of 256 colors of a perceptually ordered ramp, as "#rrggbb".
std::string color_ramp(double t);

struct RenderOutput
{
  std::string svg;
  std::string csv;  // x,y,value
  double min = 0.0;
  double max = 0.0;
};

// Per-element fill from the element mean of the nodal values.
RenderOutput render_field(const Mesh &mesh, std::span<const double> values,
                          const std::string &title);

}  // namespace nopc

#endif  // NOPC_HARNESS_HPP
