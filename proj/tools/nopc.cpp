// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <tuple>

#include <omp.h>

#include "nopc/corrector.hpp"
#include "nopc/error.hpp"
#include "nopc/harness.hpp"
#include "nopc/io.hpp"
#include "nopc/kernels.hpp"
#include "nopc/text_format.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace nopc;

namespace
{

// Bad input from the user: missing files, inconsistent artifacts.
class UserError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// INI reader that flattens "[mesh] n = 32" into the option "--mesh-n".
class SectionedIni : public CLI::ConfigINI
{
public:
  std::vector<CLI::ConfigItem> from_config(std::istream &input) const override
  {
    auto items = CLI::ConfigINI::from_config(input);
    std::vector<CLI::ConfigItem> out;
    for (auto &item : items)
    {
      if (item.name == "++" || item.name == "--")
      {
        continue;
      }
      std::string prefix;
      for (const auto &p : item.parents)
      {
        if (p != "default")
        {
          prefix += p + "-";
        }
      }
      std::replace(item.name.begin(), item.name.end(), '_', '-');
      item.name = prefix + item.name;
      item.parents.clear();
      out.push_back(std::move(item));
    }
    return out;
  }
};

struct Options
{
  ExperimentConfig cfg;
  std::string problem = "source";
  std::string mesh_format = "text";
  std::string data_file;
  std::string test_file;
  std::string model_file;
  std::string field_file;
  std::string m_file;
  std::string u_file;
  std::string mode = "all";
  std::string tag;
  std::size_t number = 1;
  std::size_t probe_index = 0;
  std::size_t probe_directions = 5;
  std::vector<std::string> grid_ranks{"50x25", "50x50", "100x25", "100x50"};
  std::vector<std::size_t> grid_n{256, 512, 1024, 2048, 4096};
  int threads = 0;
};

fs::path out_path(const Options &o, const std::string &name)
{
  return o.cfg.output_dir / name;
}

fs::path input_path(const Options &o, const std::string &given, const std::string &fallback)
{
  const fs::path p = given.empty() ? out_path(o, fallback) : fs::path(given);
  if (!fs::exists(p))
  {
    throw UserError("input file '" + p.string() + "' does not exist");
  }
  return p;
}

ordered_json config_json(const ExperimentConfig &c)
{
  ordered_json j;
  j["problem"] = to_string(c.problem);
  j["mesh"] = {{"n", c.mesh_n}, {"h", c.mesh_h}, {"file", c.mesh_file}};
  j["prior"] = {{"gamma", c.prior.gamma}, {"delta", c.prior.delta}, {"eta", c.prior.eta_robin}};
  j["data"] = {{"n", c.n_train}, {"n_eval", c.n_eval}};
  j["net"] = {{"r_m", c.net.r_m},
              {"r_u", c.net.r_u},
              {"blocks", c.net.n_blocks},
              {"rank", c.net.block_rank}};
  j["train"] = {{"epochs", c.train.epochs},
                {"batch", c.train.batch_size},
                {"lr", c.train.learning_rate}};
  j["topopt"] = {{"eta", c.topopt.eta},       {"m_lower", c.topopt.m_lower},
                 {"m_tol", c.topopt.m_tol},   {"gamma_tol", c.topopt.gamma_tol},
                 {"n_max", c.topopt.n_max},   {"lambda0", c.topopt.lambda0},
                 {"m0", c.topopt.m0}};
  j["newton"] = {{"tol", c.newton.residual_tol}, {"max_iter", c.newton.max_iter}};
  j["seed"] = {{"data", c.data_seed}, {"init", c.init_seed}, {"shuffle", c.shuffle_seed}};
  return j;
}

// Writes the artifacts and a manifest listing them with the config, seeds and CRC-32s.
class Artifacts
{
public:
  Artifacts(const Options &o, std::string command) : o_(o), command_(std::move(command)) {}

  void write(const std::string &name, std::string_view contents)
  {
    write_file(out_path(o_, name), contents);
    char crc[16];
    std::snprintf(crc, sizeof crc, "%08x", crc32(contents));
    files_.push_back({{"file", name}, {"bytes", contents.size()}, {"crc32", crc}});
  }

  void note(const std::string &key, ordered_json value) { extra_[key] = std::move(value); }

  void finish()
  {
    ordered_json m;
    m["command"] = command_;
    m["config"] = config_json(o_.cfg);
    if (!extra_.empty())
    {
      m["results"] = extra_;
    }
    m["artifacts"] = files_;
    write_file(out_path(o_, command_ + ".manifest.json"), m.dump(2) + "\n");
  }

private:
  const Options &o_;
  std::string command_;
  ordered_json files_ = ordered_json::array();
  ordered_json extra_ = ordered_json::object();
};

SpacePtr space_for(const Options &o)
{
  return build_space(o.cfg);
}

DataSet load_dataset(const Options &o, const std::string &given, const std::string &fallback,
                     const SpacePtr &space)
{
  const auto path = input_path(o, given, fallback);
  auto d = read_dataset(read_file(path), o.cfg.problem, o.cfg.data_seed);
  if (d.m_data.rows() != space->size())
  {
    throw UserError("dataset '" + path.string() + "' has " + std::to_string(d.m_data.rows()) +
                    " nodes per sample, the configured mesh has " +
                    std::to_string(space->size()));
  }
  return d;
}

std::shared_ptr<const Surrogate> load_model(const Options &o, const SpacePtr &space)
{
  const auto path = input_path(o, o.model_file, "model.txt");
  auto net = std::make_shared<const Surrogate>(read_model(read_file(path)));
  if (net->input_dim() != space->size())
  {
    throw UserError("model '" + path.string() + "' does not match the configured mesh");
  }
  return net;
}

Field load_field(const SpacePtr &space, const fs::path &path)
{
  if (!fs::exists(path))
  {
    throw UserError("input file '" + path.string() + "' does not exist");
  }
  auto v = read_field_text(read_file(path));
  if (v.size() != space->size())
  {
    throw UserError("field '" + path.string() + "' has " + std::to_string(v.size()) +
                    " values, the configured mesh has " + std::to_string(space->size()));
  }
  return Field(space, std::move(v));
}

std::string number(double v)
{
  return format_double(v);
}

void cmd_gen_mesh(const Options &o)
{
  Artifacts out(o, "gen-mesh");
  const auto mesh = build_mesh(o.cfg);
  if (o.mesh_format == "gmsh")
  {
    out.write("mesh.msh", export_gmsh_ascii(mesh));
  }
  else
  {
    out.write("mesh.txt", write_mesh_text(mesh));
  }
  out.note("nodes", mesh.num_nodes());
  out.note("elements", mesh.num_elements());
  out.finish();
  std::cout << "mesh: " << mesh.num_nodes() << " nodes, " << mesh.num_elements()
            << " elements\n";
}

void cmd_gen_data(const Options &o)
{
  Artifacts out(o, "gen-data");
  const auto space = space_for(o);
  const auto data = generate_data(space, o.cfg);
  out.write("data_train.nod", write_dataset(data.train));
  out.write("data_test.nod", write_dataset(data.test));
  out.note("train_samples", data.train.size());
  out.note("test_samples", data.test.size());
  out.finish();
  std::cout << "generated " << data.train.size() << " training and " << data.test.size()
            << " test samples on " << space->size() << " nodes\n";
}

void cmd_svd(const Options &o)
{
  Artifacts out(o, "svd");
  const auto space = space_for(o);
  const auto data = load_dataset(o, o.data_file, "data_train.nod", space);
  const auto split = split_indices(data.size(), o.cfg.shuffle_seed);
  const auto fit = subset(data, split.training);
  const auto pm = build_projector(fit.m_data, std::min(o.cfg.net.r_m, fit.size()));
  const auto pu = build_projector(fit.u_data, std::min(o.cfg.net.r_u, fit.size()));
  out.write("proj_m.txt", write_projector(pm));
  out.write("proj_u.txt", write_projector(pu));
  out.write("spectrum_m.csv", spectrum_csv(pm.singular_values));
  out.write("spectrum_u.csv", spectrum_csv(pu.singular_values));
  const auto sm = spectrum_report(pm.singular_values);
  const auto su = spectrum_report(pu.singular_values);
  out.note("reconstruction_error_m", reconstruction_error(pm, fit.m_data));
  out.note("reconstruction_error_u", reconstruction_error(pu, fit.u_data));
  out.note("m_index_near_0.1", sm.index_01 + 1);
  out.note("m_index_near_0.01", sm.index_001 + 1);
  out.note("u_index_near_0.1", su.index_01 + 1);
  out.note("u_index_near_0.01", su.index_001 + 1);
  out.finish();
  std::cout << "m spectrum: sigma_j/sigma_1 nearest 0.1 at j=" << sm.index_01 + 1
            << ", nearest 0.01 at j=" << sm.index_001 + 1 << "\n"
            << "u spectrum: sigma_j/sigma_1 nearest 0.1 at j=" << su.index_01 + 1
            << ", nearest 0.01 at j=" << su.index_001 + 1 << "\n";
}

void cmd_train(const Options &o)
{
  Artifacts out(o, "train");
  const auto space = space_for(o);
  const auto data = load_dataset(o, o.data_file, "data_train.nod", space);
  const auto result = train_surrogate(o.cfg, data);
  out.write("model.txt", write_model(result.net));
  std::string hist = "epoch,train_loss,val_loss\n";
  for (const auto &r : result.history)
  {
    hist += std::to_string(r.epoch) + "," + number(r.train_loss) + "," + number(r.val_loss) +
            "\n";
  }
  out.write("train_history.csv", hist);
  const auto &best = result.history[result.best_epoch];
  out.note("best_epoch", result.best_epoch);
  out.note("best_val_loss", best.val_loss);
  out.finish();
  std::cout << "best epoch " << result.best_epoch << ": train loss " << best.train_loss
            << ", validation loss " << best.val_loss << "\n";
}

EvalRow eval_row(const Options &o, const SpacePtr &space, const Surrogate &net,
                 const DataSet &test, std::size_t n_train)
{
  EvalRow row;
  row.number = o.number;
  row.r_m = net.config().r_m;
  row.r_u = net.config().r_u;
  row.n = n_train;
  row.report = evaluate_with_correction(ProblemDef::for_id(o.cfg.problem), space, net, test,
                                        o.cfg.n_eval, o.cfg.newton.linear);
  return row;
}

void cmd_eval(const Options &o)
{
  Artifacts out(o, "eval");
  const auto space = space_for(o);
  const auto net = load_model(o, space);
  const auto test = load_dataset(o, o.test_file, "data_test.nod", space);
  const auto row = eval_row(o, space, *net, test, o.cfg.n_train);
  const std::vector<EvalRow> rows{row};
  out.write("eval.csv", eval_csv(rows));
  out.note("enn_mean", row.report.nn.mean);
  out.note("ecnn_mean", row.report.corrected.mean);
  out.finish();
  std::cout << "mean relative error: surrogate " << row.report.nn.mean << "%, corrected "
            << row.report.corrected.mean << "%\n";
}

void cmd_correct(const Options &o)
{
  Artifacts out(o, "correct");
  const auto space = space_for(o);
  if (o.m_file.empty())
  {
    throw UserError("correct needs --m FILE (a parameter field dump)");
  }
  const auto m = load_field(space, o.m_file);
  Field u_tilde;
  if (o.u_file.empty())
  {
    const auto net = load_model(o, space);
    u_tilde = Field(space, net->forward(m.values));
  }
  else
  {
    u_tilde = load_field(space, o.u_file);
  }
  const auto problem = ProblemDef::for_id(o.cfg.problem);
  const auto r = correct(problem, m, u_tilde, o.cfg.newton.linear);
  out.write("u_tilde.field", write_field_text(u_tilde.values));
  out.write("u_corrected.field", write_field_text(r.u_c.values));
  std::string csv = "residual_before,residual_after,e_l2coeff,e_l2,e_h1\n";
  csv += number(r.residual_before) + "," + number(r.residual_after) + "," + number(r.e_l2coeff) +
         "," + number(r.e_l2) + "," + number(r.e_h1) + "\n";
  out.write("correction.csv", csv);
  if (o.cfg.problem == ProblemId::Flux)
  {
    out.note("compliance_error_estimate",
             estimate_qoi_error(problem, m, u_tilde, o.cfg.newton.linear));
  }
  out.finish();
  std::cout << "residual " << r.residual_before << " -> " << r.residual_after
            << ", ||e||_L2 = " << r.e_l2 << "\n";
}

void cmd_probe(const Options &o)
{
  Artifacts out(o, "probe");
  const auto space = space_for(o);
  const auto problem = ProblemDef::for_id(o.cfg.problem);
  auto prior = o.cfg.prior;
  prior.seed = o.cfg.data_seed;
  const PriorSampler sampler(space, prior);
  const auto m = transform_parameter(sampler.draw(o.probe_index), o.cfg.problem,
                                     o.cfg.topopt.m_lower);
  auto newton = o.cfg.newton;
  newton.residual_tol = std::min(newton.residual_tol, 1e-12);
  const auto u_star = newton_solve(problem, m, Field::zeros(space), newton).u;
  const std::vector<double> eps{1e-1, 5e-2, 2.5e-2, 1e-2, 5e-3, 3e-3};
  // Directions are unit-l2 prior draws from a stream disjoint from the data indices.
  const std::uint64_t base = std::uint64_t{1} << 40;
  std::string summary = "direction,slope\n";
  std::vector<double> slopes;
  for (std::size_t k = 0; k < o.probe_directions; ++k)
  {
    auto w = sampler.draw(base + k);
    for (auto d : space->dirichlet_dofs())
    {
      w.values[static_cast<std::size_t>(d)] = 0.0;
    }
    const double n = kernels::norm2(w.values);
    for (auto &x : w.values)
    {
      x /= n;
    }
    const auto rows = error_scaling_probe(problem, m, u_star, w, eps, newton.linear);
    out.write("probe_" + std::to_string(k) + ".csv", probe_csv(rows));
    slopes.push_back(loglog_slope(rows));
    summary += std::to_string(k) + "," + number(slopes.back()) + "\n";
  }
  out.write("probe_slopes.csv", summary);
  out.note("slopes", slopes);
  out.finish();
  for (std::size_t k = 0; k < slopes.size(); ++k)
  {
    std::cout << "direction " << k << ": log-log slope " << slopes[k] << "\n";
  }
}

void write_topopt_run(Artifacts &out, const std::string &mode, const TopOptResult &r)
{
  out.write("topopt_" + mode + "_history.csv", history_csv(r));
  out.write("topopt_" + mode + "_m.field", write_field_text(r.m.values));
  out.write("topopt_" + mode + "_u.field", write_field_text(r.u.values));
}

void cmd_topopt(const Options &o)
{
  Artifacts out(o, "topopt");
  if (o.cfg.problem != ProblemId::Flux)
  {
    throw UserError("topopt needs --problem flux");
  }
  const auto space = space_for(o);
  const auto problem = ProblemDef::flux_problem();
  if (o.mode == "all")
  {
    const auto net = load_model(o, space);
    const auto c = compare_topopt(o.cfg, space, net);
    write_topopt_run(out, "fem", c.fem);
    write_topopt_run(out, "nn", c.nn);
    write_topopt_run(out, "nn_corrected", c.corrected);
    out.write("topopt_errors.csv", topopt_errors_csv(c.errors));
    out.note("converged", {{"fem", c.fem.converged},
                           {"nn", c.nn.converged},
                           {"nn_corrected", c.corrected.converged}});
    out.finish();
    std::cout << "minimizer error: nn " << c.errors.eps_nn << "%, corrected "
              << c.errors.eps_cnn << "%; state error: nn " << c.errors.e_nn << "%, corrected "
              << c.errors.e_cnn << "%\n";
    return;
  }
  auto tc = o.cfg.topopt;
  tc.mode = parse_forward_mode(o.mode);
  ForwardFn fwd;
  switch (tc.mode)
  {
  case ForwardMode::Fem:
    fwd = fem_forward(problem, o.cfg.newton);
    break;
  case ForwardMode::Nn:
    fwd = nn_forward(load_model(o, space), space);
    break;
  case ForwardMode::NnCorrected:
    fwd = corrected_forward(problem, load_model(o, space), space, o.cfg.newton.linear);
    break;
  }
  const auto r = outer_iteration(tc, problem, space, fwd);
  write_topopt_run(out, o.mode, r);
  out.note("converged", r.converged);
  out.note("iterations", r.history.size() - 1);
  out.finish();
  std::cout << o.mode << ": " << r.history.size() - 1 << " iterations, compliance "
            << r.history.back().compliance << (r.converged ? "" : " (not converged)") << "\n";
}

void cmd_render(const Options &o)
{
  Artifacts out(o, "render");
  if (o.field_file.empty())
  {
    throw UserError("render needs --field FILE");
  }
  const auto mesh = build_mesh(o.cfg);
  const fs::path path(o.field_file);
  if (!fs::exists(path))
  {
    throw UserError("input file '" + path.string() + "' does not exist");
  }
  const auto values = read_field_text(read_file(path));
  if (values.size() != mesh.num_nodes())
  {
    throw UserError("field has " + std::to_string(values.size()) + " values, the mesh has " +
                    std::to_string(mesh.num_nodes()) + " nodes");
  }
  const auto stem = o.tag.empty() ? path.stem().string() : o.tag;
  const auto r = render_field(mesh, values, stem);
  out.write(stem + ".svg", r.svg);
  out.write(stem + ".csv", r.csv);
  out.note("min", r.min);
  out.note("max", r.max);
  out.finish();
  std::cout << stem << ": min " << r.min << ", max " << r.max << "\n";
}

// Train/evaluate sweep over rank pairs and sample counts.
void cmd_report(const Options &o)
{
  Artifacts out(o, "report");
  const auto space = space_for(o);
  std::vector<EvalRow> rows;
  std::size_t number = o.number;
  for (const auto n : o.grid_n)
  {
    auto cfg = o.cfg;
    cfg.n_train = n;
    const auto data = generate_data(space, cfg);
    for (const auto &pair : o.grid_ranks)
    {
      const auto x = pair.find('x');
      if (x == std::string::npos)
      {
        throw UserError("rank pair '" + pair + "' is not of the form RMxRU");
      }
      cfg.net.r_m = std::stoul(pair.substr(0, x));
      cfg.net.r_u = std::stoul(pair.substr(x + 1));
      const auto trained = train_surrogate(cfg, data.train);
      auto row_opts = o;
      row_opts.cfg = cfg;
      row_opts.number = number++;
      rows.push_back(eval_row(row_opts, space, trained.net, data.test, n));
      std::cout << "N=" << n << " (" << cfg.net.r_m << "," << cfg.net.r_u
                << "): mean e_NN " << rows.back().report.nn.mean << "%, mean e_CNN "
                << rows.back().report.corrected.mean << "%\n";
    }
  }
  out.write("report.csv", eval_csv(rows));
  out.finish();
}

void add_options(CLI::App &app, Options &o)
{
  auto &c = o.cfg;
  app.add_option("--problem", o.problem, "source or flux")->capture_default_str();
  app.add_option("--mesh-n", c.mesh_n, "unit square cells per side")->capture_default_str();
  app.add_option("--mesh-h", c.mesh_h, "voided square mesh spacing")->capture_default_str();
  app.add_option("--mesh-file", c.mesh_file, "Gmsh .msh or text mesh to use instead");
  app.add_option("--mesh-format", o.mesh_format, "gen-mesh output: text or gmsh")
      ->check(CLI::IsMember({"text", "gmsh"}))
      ->capture_default_str();
  app.add_option("--prior-gamma", c.prior.gamma)->capture_default_str();
  app.add_option("--prior-delta", c.prior.delta)->capture_default_str();
  app.add_option("--prior-eta", c.prior.eta_robin)->capture_default_str();
  app.add_option("--data-n", c.n_train, "training samples N")->capture_default_str();
  app.add_option("--data-n-eval", c.n_eval, "test samples used by eval")->capture_default_str();
  app.add_option("--net-r-m", c.net.r_m)->capture_default_str();
  app.add_option("--net-r-u", c.net.r_u)->capture_default_str();
  app.add_option("--net-blocks", c.net.n_blocks)->capture_default_str();
  app.add_option("--net-rank", c.net.block_rank)->capture_default_str();
  app.add_option("--train-epochs", c.train.epochs)->capture_default_str();
  app.add_option("--train-batch", c.train.batch_size)->capture_default_str();
  app.add_option("--train-lr", c.train.learning_rate)->capture_default_str();
  app.add_option("--topopt-eta", c.topopt.eta)->capture_default_str();
  app.add_option("--topopt-m-lower", c.topopt.m_lower)->capture_default_str();
  app.add_option("--topopt-m-tol", c.topopt.m_tol)->capture_default_str();
  app.add_option("--topopt-gamma-tol", c.topopt.gamma_tol)->capture_default_str();
  app.add_option("--topopt-n-max", c.topopt.n_max)->capture_default_str();
  app.add_option("--topopt-mode", o.mode, "fem, nn, nn_corrected or all")
      ->check(CLI::IsMember({"fem", "nn", "nn_corrected", "all"}))
      ->capture_default_str();
  app.add_option("--newton-tol", c.newton.residual_tol)->capture_default_str();
  app.add_option("--newton-max-iter", c.newton.max_iter)->capture_default_str();
  app.add_option("--seed-data", c.data_seed)->capture_default_str();
  app.add_option("--seed-init", c.init_seed)->capture_default_str();
  app.add_option("--seed-shuffle", c.shuffle_seed)->capture_default_str();
  app.add_option("--output-dir", c.output_dir, "overrides NOPC_OUTPUT_DIR and the config file")
      ->capture_default_str();
  app.add_option("--threads", o.threads, "OpenMP threads (0 keeps the runtime default)");

  app.add_option("--data", o.data_file, "training dataset (default OUT/data_train.nod)");
  app.add_option("--test", o.test_file, "test dataset (default OUT/data_test.nod)");
  app.add_option("--model", o.model_file, "model file (default OUT/model.txt)");
  app.add_option("--field", o.field_file, "field dump to render");
  app.add_option("--m", o.m_file, "parameter field dump");
  app.add_option("--u", o.u_file, "state field dump (default: model prediction)");
  app.add_option("--tag", o.tag, "output name stem for render");
  app.add_option("--number", o.number, "row number in eval/report tables")
      ->capture_default_str();
  app.add_option("--probe-index", o.probe_index, "prior sample used by probe")
      ->capture_default_str();
  app.add_option("--probe-directions", o.probe_directions)->capture_default_str();
  app.add_option("--report-ranks", o.grid_ranks, "rank pairs RMxRU")->capture_default_str();
  app.add_option("--report-n", o.grid_n, "sample counts N")->capture_default_str();
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Neural operator surrogates with a Newton corrector"};
  app.config_formatter(std::make_shared<SectionedIni>());
  app.set_config("--config", "", "INI file; [section] key = value maps to --section-key");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1, 1);

  Options o;
  add_options(app, o);

  using Command = void (*)(const Options &);
  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"gen-mesh", "write the configured mesh", cmd_gen_mesh},
      {"gen-data", "sample parameters and solve for training and test data", cmd_gen_data},
      {"svd", "reduced bases and singular value spectra of the training data", cmd_svd},
      {"train", "train the surrogate", cmd_train},
      {"eval", "surrogate and corrected errors on the test data", cmd_eval},
      {"correct", "apply one correction to a state", cmd_correct},
      {"probe", "corrector error scaling along random directions", cmd_probe},
      {"topopt", "topology optimization with FEM, surrogate or corrected states", cmd_topopt},
      {"render", "SVG heat map and CSV of a field dump", cmd_render},
      {"report", "train and evaluate over a grid of ranks and sample counts", cmd_report},
  };
  Command selected = nullptr;
  for (const auto &[name, help, fn] : commands)
  {
    auto *sub = app.add_subcommand(name, help);
    sub->callback([&selected, f = fn] { selected = f; });
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  // The environment beats the config file; an explicit flag beats both.
  bool flag_given = false;
  for (int i = 1; i < argc; ++i)
  {
    const std::string_view a(argv[i]);
    flag_given = flag_given || a == "--output-dir" || a.starts_with("--output-dir=");
  }
  if (const char *env = std::getenv("NOPC_OUTPUT_DIR"); env && *env && !flag_given)
  {
    o.cfg.output_dir = env;
  }

  try
  {
    o.cfg.problem = parse_problem(o.problem);
    validate(o.cfg);
    if (o.threads > 0)
    {
      omp_set_num_threads(o.threads);
    }
    selected(o);
    return 0;
  }
  catch (const UserError &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  catch (const std::invalid_argument &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  catch (const FormatError &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  catch (const std::exception &e)
  {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
