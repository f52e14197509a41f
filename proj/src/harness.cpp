// SPDX-License-Identifier: Apache-2.0

#include "nopc/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <stdexcept>

#include "nopc/corrector.hpp"
#include "nopc/error.hpp"
#include "nopc/io.hpp"
#include "nopc/random.hpp"
#include "nopc/text_format.hpp"

namespace nopc
{

namespace fs = std::filesystem;

std::string to_string(ProblemId id)
{
  return id == ProblemId::Source ? "source" : "flux";
}

ProblemId parse_problem(const std::string &s)
{
  if (s == "source" || s == "1")
  {
    return ProblemId::Source;
  }
  if (s == "flux" || s == "2")
  {
    return ProblemId::Flux;
  }
  throw std::invalid_argument("unknown problem '" + s + "' (expected source or flux)");
}

void validate(const ExperimentConfig &cfg)
{
  NOPC_REQUIRE(cfg.mesh_n >= 1, "mesh_n must be positive");
  NOPC_REQUIRE(cfg.mesh_h > 0.0 && cfg.mesh_h < 0.5, "mesh_h must be in (0, 0.5)");
  NOPC_REQUIRE(cfg.n_train >= 1, "N must be positive");
  NOPC_REQUIRE(cfg.mesh_file.empty() || fs::exists(cfg.mesh_file),
               "mesh file '" + cfg.mesh_file + "' does not exist");
  validate(cfg.prior);
  validate(cfg.net);
  validate(cfg.topopt);
}

Mesh build_mesh(const ExperimentConfig &cfg)
{
  if (!cfg.mesh_file.empty())
  {
    const auto text = read_file(cfg.mesh_file);
    if (fs::path(cfg.mesh_file).extension() != ".msh")
    {
      return read_mesh_text(text);
    }
    const auto raw = import_gmsh_ascii(text);
    double longest = 0.0;
    for (const auto &f : raw.facets())
    {
      const auto a = raw.nodes()[static_cast<std::size_t>(f.nodes[0])];
      const auto b = raw.nodes()[static_cast<std::size_t>(f.nodes[1])];
      longest = std::max(longest, std::hypot(a.x - b.x, a.y - b.y));
    }
    return classify_boundary(raw, cfg.problem, 0.5 * longest);
  }
  if (cfg.problem == ProblemId::Source)
  {
    return build_unit_square_quad(cfg.mesh_n);
  }
  return build_voided_square_tri(cfg.mesh_h, default_voids());
}

SpacePtr build_space(std::shared_ptr<const Mesh> mesh, ProblemId problem)
{
  return FunctionSpace::create(std::move(mesh), problem == ProblemId::Source
                                                    ? BoundaryTag::GammaBottom
                                                    : BoundaryTag::GammaIn);
}

SpacePtr build_space(const ExperimentConfig &cfg)
{
  return build_space(std::make_shared<const Mesh>(build_mesh(cfg)), cfg.problem);
}

std::size_t test_size(std::size_t n_train)
{
  return n_train / 4;
}

DataSet generate_samples(SpacePtr space, const ExperimentConfig &cfg, std::uint64_t first,
                         std::size_t count)
{
  auto prior = cfg.prior;
  prior.seed = cfg.data_seed;
  const PriorSampler sampler(space, prior);
  const auto problem = ProblemDef::for_id(cfg.problem);
  const std::size_t q = space->size();
  Matrix m_data(q, count);
  Matrix u_data(q, count);
  std::vector<std::exception_ptr> errors(count);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < count; ++i)
  {
    try
    {
      const auto m = transform_parameter(sampler.draw(first + i), cfg.problem,
                                         cfg.topopt.m_lower);
      const auto sol = newton_solve(problem, m, Field::zeros(space), cfg.newton);
      std::copy(m.values.begin(), m.values.end(), m_data.col(i).begin());
      std::copy(sol.u.values.begin(), sol.u.values.end(), u_data.col(i).begin());
    }
    catch (...)
    {
      errors[i] = std::current_exception();
    }
  }

  for (std::size_t i = 0; i < count; ++i)
  {
    if (!errors[i])
    {
      continue;
    }
    std::string what = "unknown error";
    try
    {
      std::rethrow_exception(errors[i]);
    }
    catch (const std::exception &e)
    {
      what = e.what();
    }
    char seed_hex[32];
    std::snprintf(seed_hex, sizeof seed_hex, "%016llx",
                  static_cast<unsigned long long>(stream_seed(cfg.data_seed, first + i)));
    throw NumericalError("sample " + std::to_string(first + i) + " (data seed " +
                         std::to_string(cfg.data_seed) + ", stream seed 0x" + seed_hex +
                         ") failed: " + what);
  }
  return make_dataset(std::move(m_data), std::move(u_data), cfg.problem, cfg.data_seed);
}

GeneratedData generate_data(SpacePtr space, const ExperimentConfig &cfg)
{
  GeneratedData out;
  out.train = generate_samples(space, cfg, 0, cfg.n_train);
  out.test = generate_samples(space, cfg, cfg.n_train, test_size(cfg.n_train));
  return out;
}

TrainResult train_surrogate(const ExperimentConfig &cfg, const DataSet &data)
{
  validate(cfg.net);
  const auto split = split_indices(data.size(), cfg.shuffle_seed);
  const auto fit = subset(data, split.training);
  NOPC_REQUIRE(fit.size() >= std::max(cfg.net.r_m, cfg.net.r_u),
               "training split has " + std::to_string(fit.size()) +
                   " samples, fewer than the requested ranks");
  auto pin = build_projector(fit.m_data, cfg.net.r_m);
  auto pout = build_projector(fit.u_data, cfg.net.r_u);
  NOPC_REQUIRE(pin.rank() == cfg.net.r_m && pout.rank() == cfg.net.r_u,
               "data rank is below the requested reduced dimension");
  const auto initial = Surrogate::init(cfg.net, std::move(pin), std::move(pout), cfg.init_seed);
  auto tc = cfg.train;
  tc.seed = cfg.shuffle_seed;
  return train(initial, tc, data);
}

EvalReport evaluate_with_correction(const ProblemDef &problem, SpacePtr space,
                                    const Surrogate &net, const DataSet &test, std::size_t count,
                                    const LinearSolveConfig &linear)
{
  count = std::min(count, test.size());
  NOPC_REQUIRE(count >= 1, "no test samples");
  NOPC_REQUIRE(test.m_data.rows() == space->size() && test.u_data.rows() == space->size(),
               "test data does not match the mesh");
  std::vector<Field> ms, preds;
  ms.reserve(count);
  preds.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
  {
    const auto col = test.m_data.col(i);
    ms.emplace_back(space, std::vector<double>(col.begin(), col.end()));
    preds.emplace_back(space, net.forward(col));
  }
  const auto corrected = correct_batch(problem, ms, preds, linear);
  std::vector<double> enn(count), ecnn(count);
  for (std::size_t i = 0; i < count; ++i)
  {
    const auto u = test.u_data.col(i);
    enn[i] = relative_error_percent(u, preds[i].values);
    ecnn[i] = relative_error_percent(u, corrected[i].u_c.values);
  }
  return {summarize(std::move(enn)), summarize(std::move(ecnn))};
}

std::string eval_csv(std::span<const EvalRow> rows)
{
  std::string out = eval_csv_header;
  out += '\n';
  for (const auto &r : rows)
  {
    out += std::to_string(r.number) + "," + std::to_string(r.r_m) + "," + std::to_string(r.r_u) +
           "," + std::to_string(r.n);
    for (double v : {r.report.nn.min, r.report.nn.max, r.report.nn.mean, r.report.corrected.min,
                     r.report.corrected.max, r.report.corrected.mean})
    {
      out += ',';
      append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

TopOptComparison compare_topopt(const ExperimentConfig &cfg, SpacePtr space,
                                std::shared_ptr<const Surrogate> net)
{
  NOPC_REQUIRE(cfg.problem == ProblemId::Flux, "topology optimization needs the flux problem");
  NOPC_REQUIRE(net != nullptr, "a trained surrogate is required");
  const auto problem = ProblemDef::flux_problem();
  auto run = [&](ForwardMode mode, const ForwardFn &fwd) {
    auto tc = cfg.topopt;
    tc.mode = mode;
    return outer_iteration(tc, problem, space, fwd);
  };
  TopOptComparison out;
  const auto fem = fem_forward(problem, cfg.newton);
  out.fem = run(ForwardMode::Fem, fem);
  out.nn = run(ForwardMode::Nn, nn_forward(net, space));
  out.corrected =
      run(ForwardMode::NnCorrected, corrected_forward(problem, net, space, cfg.newton.linear));
  out.u_fem_at_nn = fem(out.nn.m, nullptr);
  out.u_fem_at_corrected = fem(out.corrected.m, nullptr);
  out.errors = minimizer_errors(out.fem.m, out.nn.m, out.corrected.m, out.fem.u, out.nn.u,
                                out.corrected.u);
  return out;
}

std::string topopt_errors_csv(const MinimizerErrors &e)
{
  std::string out = topopt_errors_header;
  out += '\n';
  bool first = true;
  for (double v : {e.eps_nn, e.eps_cnn, e.e_nn, e.e_cnn})
  {
    if (!first)
    {
      out += ',';
    }
    first = false;
    append_double(out, v);
  }
  out += '\n';
  return out;
}

SpectrumReport spectrum_report(std::span<const double> singular_values)
{
  SpectrumReport r;
  r.normalized = normalized_spectrum(singular_values);
  if (!r.normalized.empty())
  {
    r.index_01 = index_nearest(r.normalized, 0.1);
    r.index_001 = index_nearest(r.normalized, 0.01);
  }
  return r;
}

std::string spectrum_csv(std::span<const double> singular_values)
{
  const auto rep = spectrum_report(singular_values);
  std::string out = "j,sigma,normalized\n";
  for (std::size_t j = 0; j < singular_values.size(); ++j)
  {
    out += std::to_string(j + 1) + ",";
    append_double(out, singular_values[j]);
    out += ',';
    append_double(out, rep.normalized[j]);
    out += '\n';
  }
  if (!singular_values.empty())
  {
    out += "# nearest 0.1: j=" + std::to_string(rep.index_01 + 1) +
           ", nearest 0.01: j=" + std::to_string(rep.index_001 + 1) + "\n";
  }
  return out;
}

namespace
{

// viridis at t = 0, 1/8, ..., 1
constexpr std::array<std::array<double, 3>, 9> ramp_anchors{{
    {0.267004, 0.004874, 0.329415},
    {0.278826, 0.175490, 0.483397},
    {0.229739, 0.322361, 0.545706},
    {0.172719, 0.448791, 0.557885},
    {0.127568, 0.566949, 0.550556},
    {0.157851, 0.683765, 0.501686},
    {0.369214, 0.788888, 0.382914},
    {0.678489, 0.863742, 0.189503},
    {0.993248, 0.906157, 0.143936},
}};

const std::array<std::string, 256> &ramp_table()
{
  static const auto table = [] {
    std::array<std::string, 256> t;
    for (int k = 0; k < 256; ++k)
    {
      const double s = 8.0 * k / 255.0;
      const int i = std::min(7, static_cast<int>(s));
      const double f = s - i;
      char buf[8];
      int rgb[3];
      for (int c = 0; c < 3; ++c)
      {
        const double v = (1.0 - f) * ramp_anchors[i][c] + f * ramp_anchors[i + 1][c];
        rgb[c] = static_cast<int>(std::lround(255.0 * v));
      }
      std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
      t[static_cast<std::size_t>(k)] = buf;
    }
    return t;
  }();
  return table;
}

std::string fixed(double v, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string color_ramp(double t)
{
  if (!(t >= 0.0))
  {
    t = 0.0;
  }
  const auto k = std::min<long>(255, std::lround(std::min(t, 1.0) * 255.0));
  return ramp_table()[static_cast<std::size_t>(k)];
}

RenderOutput render_field(const Mesh &mesh, std::span<const double> values,
                          const std::string &title)
{
  NOPC_REQUIRE(values.size() == mesh.num_nodes(), "field size does not match the mesh");
  RenderOutput out;
  for (double v : values)
  {
    if (!std::isfinite(v))
    {
      throw FormatError("field contains non-finite values");
    }
  }
  if (values.empty())
  {
    throw FormatError("empty field");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  out.min = *lo;
  out.max = *hi;
  const double span = out.max - out.min;

  out.csv = "x,y,value\n";
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
  {
    const auto p = mesh.nodes()[i];
    append_double(out.csv, p.x);
    out.csv += ',';
    append_double(out.csv, p.y);
    out.csv += ',';
    append_double(out.csv, values[i]);
    out.csv += '\n';
  }

  constexpr double size = 512.0;
  constexpr double pad = 16.0;
  constexpr double legend = 40.0;
  out.svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(size + 2 * pad, 0) +
            "\" height=\"" + fixed(size + 2 * pad + legend, 0) + "\">\n";
  out.svg += "<title>" + title + "</title>\n<g stroke-width=\"0.3\">\n";
  const auto npe = mesh.nodes_per_element();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
  {
    const auto nodes = mesh.element(e);
    double mean = 0.0;
    std::string pts;
    for (std::size_t a = 0; a < npe; ++a)
    {
      const auto i = static_cast<std::size_t>(nodes[a]);
      mean += values[i];
      const auto p = mesh.nodes()[i];
      pts += fixed(pad + size * p.x, 2) + "," + fixed(pad + size * (1.0 - p.y), 2);
      pts += a + 1 < npe ? " " : "";
    }
    mean /= static_cast<double>(npe);
    const auto color = color_ramp(span > 0.0 ? (mean - out.min) / span : 0.0);
    out.svg += "<polygon points=\"" + pts + "\" fill=\"" + color + "\" stroke=\"" + color +
               "\"/>\n";
  }
  out.svg += "</g>\n";
  const double ty = size + 2 * pad + 24.0;
  out.svg += "<text x=\"" + fixed(pad, 0) + "\" y=\"" + fixed(ty, 0) +
             "\" font-family=\"monospace\" font-size=\"14\">min " + format_double(out.min) +
             "  max " + format_double(out.max) + "</text>\n";
  out.svg += "</svg>\n";
  return out;
}

}  // namespace nopc
