// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

#include "nopc/error.hpp"
#include "nopc/harness.hpp"
#include "nopc/io.hpp"
#include "nopc/text_format.hpp"

using namespace nopc;

namespace
{

ExperimentConfig small_source()
{
  ExperimentConfig cfg;
  cfg.problem = ProblemId::Source;
  cfg.mesh_n = 6;
  cfg.n_train = 4;
  return cfg;
}

}  // namespace

TEST(Harness, ProblemNames)
{
  EXPECT_EQ(parse_problem("flux"), ProblemId::Flux);
  EXPECT_EQ(parse_problem(to_string(ProblemId::Source)), ProblemId::Source);
  EXPECT_THROW(parse_problem("heat"), std::invalid_argument);
}

TEST(Harness, ConfigValidation)
{
  auto cfg = small_source();
  EXPECT_NO_THROW(validate(cfg));
  cfg.mesh_file = "/nonexistent/mesh.msh";
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = small_source();
  cfg.n_train = 0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
}

TEST(Harness, TestSplitIsAQuarter)
{
  EXPECT_EQ(test_size(256), 64u);
  EXPECT_EQ(test_size(4), 1u);
  EXPECT_EQ(test_size(3), 0u);
}

TEST(Harness, SmokeDataGenerationIsDeterministic)
{
  const auto cfg = small_source();
  const auto space = build_space(cfg);
  const auto a = generate_data(space, cfg);
  const auto b = generate_data(space, cfg);
  EXPECT_EQ(a.train.size(), 4u);
  EXPECT_EQ(a.test.size(), 1u);
  const auto bytes = write_dataset(a.train);
  EXPECT_EQ(bytes, write_dataset(b.train));
  EXPECT_NO_THROW(read_dataset(bytes));
  // Test samples continue the index sequence instead of repeating training draws.
  const auto more = generate_samples(space, cfg, 0, 5);
  for (std::size_t i = 0; i < space->size(); ++i)
  {
    EXPECT_EQ(more.m_data(i, 4), a.test.m_data(i, 0));
  }
  // Every stored state solves its parameter.
  const auto problem = ProblemDef::source_problem();
  for (std::size_t j = 0; j < a.train.size(); ++j)
  {
    const auto mc = a.train.m_data.col(j);
    const auto uc = a.train.u_data.col(j);
    const Field m(space, {mc.begin(), mc.end()});
    const Field u(space, {uc.begin(), uc.end()});
    EXPECT_LE(free_norm(*space, assemble_residual(problem, m, u)), 1e-10);
  }
}

TEST(Harness, SolveFailureNamesTheSampleSeed)
{
  auto cfg = small_source();
  cfg.newton.max_iter = 1;
  cfg.newton.residual_tol = 1e-30;
  const auto space = build_space(cfg);
  try
  {
    generate_samples(space, cfg, 3, 2);
    FAIL() << "expected a solve failure";
  }
  catch (const NumericalError &e)
  {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("sample 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("stream seed 0x"), std::string::npos) << msg;
  }
}

TEST(Harness, EvalCsvSchema)
{
  EvalRow row;
  row.number = 1;
  row.r_m = 50;
  row.r_u = 25;
  row.n = 256;
  row.report.nn = summarize({1.0, 3.0});
  row.report.corrected = summarize({0.5, 0.25});
  const std::vector<EvalRow> rows{row};
  const auto csv = eval_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "number,r_m,r_u,N,enn_min,enn_max,enn_mean,ecnn_min,ecnn_max,ecnn_mean");
  EXPECT_EQ(csv.substr(csv.find('\n') + 1), "1,50,25,256,1,3,2,0.25,0.5,0.375\n");
}

TEST(Harness, TrainAndEvaluatePipeline)
{
  auto cfg = small_source();
  cfg.n_train = 24;
  cfg.net = {4, 3, 1, 4};
  cfg.train.epochs = 30;
  const auto space = build_space(cfg);
  const auto data = generate_data(space, cfg);
  const auto trained = train_surrogate(cfg, data.train);
  EXPECT_EQ(trained.net.input_dim(), space->size());
  const auto again = train_surrogate(cfg, data.train);
  EXPECT_EQ(write_model(trained.net), write_model(again.net));
  const auto rep = evaluate_with_correction(ProblemDef::source_problem(), space, trained.net,
                                            data.test, 20);
  EXPECT_EQ(rep.nn.per_sample.size(), data.test.size());
  EXPECT_LT(rep.corrected.mean, rep.nn.mean);

  cfg.net.r_m = 30;
  EXPECT_THROW(train_surrogate(cfg, data.train), std::invalid_argument);
}

TEST(Harness, SpectrumAnnotations)
{
  const std::vector<double> s{10.0, 5.0, 1.2, 0.5, 0.11, 0.0};
  const auto rep = spectrum_report(s);
  EXPECT_EQ(rep.index_01, 2u);
  EXPECT_EQ(rep.index_001, 4u);
  const auto csv = spectrum_csv(s);
  EXPECT_EQ(csv.rfind("j,sigma,normalized\n1,10,1\n", 0), 0u);
  EXPECT_NE(csv.find("nearest 0.1: j=3, nearest 0.01: j=5"), std::string::npos);
}

TEST(Harness, ColorRampEnds)
{
  EXPECT_EQ(color_ramp(0.0), "#440154");
  EXPECT_EQ(color_ramp(1.0), "#fde725");
  EXPECT_EQ(color_ramp(-3.0), color_ramp(0.0));
  EXPECT_EQ(color_ramp(7.0), color_ramp(1.0));
  std::set<std::string> colors;
  for (int k = 0; k < 256; ++k)
  {
    colors.insert(color_ramp(k / 255.0));
  }
  EXPECT_GE(colors.size(), 250u);
}

TEST(Harness, RenderConstantFieldUsesOneColor)
{
  const auto mesh = build_unit_square_quad(4);
  const std::vector<double> v(mesh.num_nodes(), 2.5);
  const auto r = render_field(mesh, v, "c");
  const std::regex fill("fill=\"(#[0-9a-f]{6})\"");
  std::set<std::string> fills;
  for (auto it = std::sregex_iterator(r.svg.begin(), r.svg.end(), fill);
       it != std::sregex_iterator(); ++it)
  {
    fills.insert((*it)[1]);
  }
  EXPECT_EQ(fills.size(), 1u);
  EXPECT_EQ(r.min, 2.5);
  EXPECT_EQ(r.max, 2.5);
}

TEST(Harness, RenderCsvAndExtrema)
{
  const auto mesh = build_voided_square_tri(0.08, default_voids());
  std::vector<double> v(mesh.num_nodes());
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    const auto p = mesh.nodes()[i];
    v[i] = p.x * p.x - 3.0 * p.y;
  }
  const auto r = render_field(mesh, v, "q");
  EXPECT_EQ(static_cast<std::size_t>(std::count(r.csv.begin(), r.csv.end(), '\n')),
            mesh.num_nodes() + 1);
  EXPECT_EQ(r.min, *std::min_element(v.begin(), v.end()));
  EXPECT_EQ(r.max, *std::max_element(v.begin(), v.end()));
  EXPECT_NE(r.svg.find("min " + format_double(r.min)), std::string::npos);
  std::size_t polygons = 0;
  for (auto pos = r.svg.find("<polygon"); pos != std::string::npos;
       pos = r.svg.find("<polygon", pos + 1))
  {
    ++polygons;
  }
  EXPECT_EQ(polygons, mesh.num_elements());
  v[3] = std::nan("");
  EXPECT_THROW(render_field(mesh, v, "q"), FormatError);
  v.pop_back();
  EXPECT_THROW(render_field(mesh, v, "q"), std::invalid_argument);
}
