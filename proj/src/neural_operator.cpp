// SPDX-License-Identifier: Apache-2.0

#include "nopc/neural_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nopc/error.hpp"
#include "nopc/random.hpp"
#include "nopc/text_format.hpp"

namespace nopc
{

namespace
{

double sigmoid(double x)
{
  if (x >= 0.0)
  {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// y += A x for column-major A (rows x cols)
void gemv_add(std::span<const double> a, std::size_t rows, std::span<const double> x,
              std::span<double> y)
{
  for (std::size_t j = 0; j < x.size(); ++j)
  {
    const double xj = x[j];
    const double *col = a.data() + j * rows;
    for (std::size_t i = 0; i < rows; ++i)
    {
      y[i] += col[i] * xj;
    }
  }
}

// Activations of one forward pass in reduced coordinates.
struct Trace
{
  std::vector<double> z;  // (n_blocks + 1) * r_u
  std::vector<double> a;  // n_blocks * block_rank pre-activations
};

void forward_trace(const Surrogate &net, std::span<const double> z0, Trace &t)
{
  const auto &cfg = net.config();
  const std::size_t ru = cfg.r_u, rank = cfg.block_rank;
  t.z.assign((cfg.n_blocks + 1) * ru, 0.0);
  t.a.assign(cfg.n_blocks * rank, 0.0);
  gemv_add(net.dense(), ru, z0, std::span(t.z).subspan(0, ru));
  std::vector<double> s(rank);
  for (std::size_t k = 0; k < cfg.n_blocks; ++k)
  {
    const auto zk = std::span<const double>(t.z).subspan(k * ru, ru);
    auto ak = std::span(t.a).subspan(k * rank, rank);
    const auto b = net.b1(k);
    std::copy(b.begin(), b.end(), ak.begin());
    gemv_add(net.w1(k), rank, zk, ak);
    for (std::size_t c = 0; c < rank; ++c)
    {
      s[c] = softplus(ak[c]);
    }
    auto next = std::span(t.z).subspan((k + 1) * ru, ru);
    std::copy(zk.begin(), zk.end(), next.begin());
    gemv_add(net.w2(k), ru, s, next);
  }
}

// Accumulates d loss / d params given gz = d loss / d z_final (overwritten).
void backward(const Surrogate &net, std::span<const double> z0, const Trace &t,
              std::vector<double> &gz, std::span<double> grad)
{
  const auto &cfg = net.config();
  const std::size_t ru = cfg.r_u, rank = cfg.block_rank;
  std::vector<double> s(rank), ga(rank);
  for (std::size_t k = cfg.n_blocks; k-- > 0;)
  {
    const auto zk = std::span<const double>(t.z).subspan(k * ru, ru);
    const auto ak = std::span<const double>(t.a).subspan(k * rank, rank);
    const auto w1 = net.w1(k);
    const auto w2 = net.w2(k);
    const std::size_t off = net.block_offset(k);
    double *g_w1 = grad.data() + off;
    double *g_b1 = g_w1 + rank * ru;
    double *g_w2 = g_b1 + rank;
    for (std::size_t c = 0; c < rank; ++c)
    {
      s[c] = softplus(ak[c]);
      double gs = 0.0;
      for (std::size_t i = 0; i < ru; ++i)
      {
        g_w2[c * ru + i] += gz[i] * s[c];
        gs += w2[c * ru + i] * gz[i];
      }
      ga[c] = gs * sigmoid(ak[c]);
      g_b1[c] += ga[c];
    }
    for (std::size_t j = 0; j < ru; ++j)
    {
      double acc = 0.0;
      for (std::size_t c = 0; c < rank; ++c)
      {
        g_w1[j * rank + c] += ga[c] * zk[j];
        acc += w1[j * rank + c] * ga[c];
      }
      gz[j] += acc;
    }
  }
  double *g_d = grad.data() + net.dense_offset();
  for (std::size_t j = 0; j < cfg.r_m; ++j)
  {
    for (std::size_t i = 0; i < ru; ++i)
    {
      g_d[j * ru + i] += gz[i] * z0[j];
    }
  }
}

void check_finite(std::span<const double> v, const char *what)
{
  for (double x : v)
  {
    if (!std::isfinite(x))
    {
      throw NumericalError(std::string(what) + " has non-finite entries");
    }
  }
}

}  // namespace

void validate(const NetConfig &cfg)
{
  NOPC_REQUIRE(cfg.r_m >= 1 && cfg.r_u >= 1, "reduced dimensions must be positive");
  NOPC_REQUIRE(cfg.block_rank >= 1, "block rank must be positive");
}

double softplus(double x)
{
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

Surrogate::Surrogate(const NetConfig &cfg, Projector input, Projector output)
    : cfg_(cfg), input_(std::move(input)), output_(std::move(output))
{
  validate(cfg_);
  NOPC_REQUIRE(input_.rank() == cfg_.r_m, "input projector rank does not match r_m");
  NOPC_REQUIRE(output_.rank() == cfg_.r_u, "output projector rank does not match r_u");
  params_.assign(cfg_.r_u * cfg_.r_m + cfg_.n_blocks * block_size(), 0.0);
}

Surrogate Surrogate::init(const NetConfig &cfg, Projector input, Projector output,
                          std::uint64_t seed)
{
  Surrogate net(cfg, std::move(input), std::move(output));
  std::mt19937_64 rng(stream_seed(seed, 0));
  auto glorot = [&](double *w, std::size_t fan_out, std::size_t fan_in) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t k = 0; k < fan_in * fan_out; ++k)
    {
      w[k] = dist(rng);
    }
  };
  double *p = net.params_.data();
  glorot(p, cfg.r_u, cfg.r_m);
  for (std::size_t k = 0; k < cfg.n_blocks; ++k)
  {
    double *b = p + net.block_offset(k);
    glorot(b, cfg.block_rank, cfg.r_u);
    glorot(b + cfg.block_rank * cfg.r_u + cfg.block_rank, cfg.r_u, cfg.block_rank);
  }
  return net;
}

std::size_t Surrogate::block_size() const
{
  return 2 * cfg_.block_rank * cfg_.r_u + cfg_.block_rank;
}

std::size_t Surrogate::block_offset(std::size_t k) const
{
  return cfg_.r_u * cfg_.r_m + k * block_size();
}

std::span<const double> Surrogate::dense() const
{
  return std::span<const double>(params_).subspan(0, cfg_.r_u * cfg_.r_m);
}

std::span<const double> Surrogate::w1(std::size_t k) const
{
  return std::span<const double>(params_).subspan(block_offset(k), cfg_.block_rank * cfg_.r_u);
}

std::span<const double> Surrogate::b1(std::size_t k) const
{
  return std::span<const double>(params_).subspan(
      block_offset(k) + cfg_.block_rank * cfg_.r_u, cfg_.block_rank);
}

std::span<const double> Surrogate::w2(std::size_t k) const
{
  return std::span<const double>(params_).subspan(
      block_offset(k) + cfg_.block_rank * cfg_.r_u + cfg_.block_rank, cfg_.r_u * cfg_.block_rank);
}

std::vector<double> Surrogate::forward_reduced(std::span<const double> z0) const
{
  NOPC_REQUIRE(z0.size() == cfg_.r_m, "reduced input length does not match r_m");
  Trace t;
  forward_trace(*this, z0, t);
  return {t.z.end() - static_cast<std::ptrdiff_t>(cfg_.r_u), t.z.end()};
}

std::vector<double> Surrogate::forward(std::span<const double> m) const
{
  NOPC_REQUIRE(m.size() == input_dim(), "input length does not match the network");
  check_finite(m, "network input");
  auto u = decode(output_, forward_reduced(encode(input_, m)));
  check_finite(u, "network output");
  return u;
}

Matrix Surrogate::forward_batch(const Matrix &m) const
{
  NOPC_REQUIRE(m.rows() == input_dim(), "input length does not match the network");
  Matrix out(output_dim(), m.cols());
  const auto n = static_cast<std::int64_t>(m.cols());
  std::vector<std::exception_ptr> errors(m.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n; ++j)
  {
    try
    {
      const auto u = forward(m.col(j));
      std::copy(u.begin(), u.end(), out.col(j).begin());
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

ReducedSamples reduce_samples(const Surrogate &net, const Matrix &m, const Matrix &u)
{
  NOPC_REQUIRE(m.cols() == u.cols(), "input and output sample counts differ");
  NOPC_REQUIRE(m.rows() == net.input_dim() && u.rows() == net.output_dim(),
               "sample dimensions do not match the network");
  const auto &out = net.output_projector();
  ReducedSamples r;
  r.q_u = u.rows();
  r.z0 = Matrix(net.config().r_m, m.cols());
  r.target = Matrix(net.config().r_u, m.cols());
  r.tail.resize(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j)
  {
    const auto z = encode(net.input_projector(), m.col(j));
    std::copy(z.begin(), z.end(), r.z0.col(j).begin());
    const auto t = encode(out, u.col(j));
    std::copy(t.begin(), t.end(), r.target.col(j).begin());
    const auto back = decode(out, t);
    double tail = 0.0;
    for (std::size_t i = 0; i < back.size(); ++i)
    {
      tail += (u(i, j) - back[i]) * (u(i, j) - back[i]);
    }
    r.tail[j] = tail;
  }
  return r;
}

double reduced_loss(const Surrogate &net, const ReducedSamples &data,
                    std::span<const std::size_t> indices, std::span<double> grad)
{
  NOPC_REQUIRE(!indices.empty(), "empty batch");
  NOPC_REQUIRE(grad.empty() || grad.size() == net.parameters().size(),
               "gradient length does not match the parameters");
  const std::size_t ru = net.config().r_u;
  const double scale = 1.0 / (static_cast<double>(data.q_u) * static_cast<double>(indices.size()));
  double loss = 0.0;
  Trace t;
  std::vector<double> gz(ru);
  for (std::size_t j : indices)
  {
    const auto z0 = data.z0.col(j);
    const auto target = data.target.col(j);
    forward_trace(net, z0, t);
    double sq = data.tail[j];
    for (std::size_t i = 0; i < ru; ++i)
    {
      const double d = t.z[t.z.size() - ru + i] - target[i];
      sq += d * d;
      gz[i] = 2.0 * scale * d;
    }
    loss += sq;
    if (!grad.empty())
    {
      backward(net, z0, t, gz, grad);
    }
  }
  return loss * scale;
}

LossAndGrad loss_and_grad(const Surrogate &net, const Matrix &m, const Matrix &u)
{
  const auto data = reduce_samples(net, m, u);
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  LossAndGrad out;
  out.grad.assign(net.parameters().size(), 0.0);
  out.loss = reduced_loss(net, data, idx, out.grad);
  return out;
}

DataSplit split_indices(std::size_t n, std::uint64_t seed)
{
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(stream_seed(seed, 0));
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::size_t nv = n / 10;
  return {{perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(nv)},
          {perm.begin() + static_cast<std::ptrdiff_t>(nv), perm.end()}};
}

TrainResult train(const Surrogate &initial, const TrainConfig &cfg, const DataSet &data)
{
  NOPC_REQUIRE(cfg.batch_size >= 1, "batch size must be positive");
  NOPC_REQUIRE(cfg.learning_rate >= 0.0, "learning rate must be nonnegative");
  NOPC_REQUIRE(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0 && cfg.beta2 >= 0.0 && cfg.beta2 < 1.0,
               "Adam betas must be in [0, 1)");
  NOPC_REQUIRE(data.size() >= 1, "empty data set");
  const auto split = split_indices(data.size(), cfg.seed);
  NOPC_REQUIRE(!split.training.empty(), "no training samples");
  const auto reduced = reduce_samples(initial, data.m_data, data.u_data);

  TrainResult result{initial, {}, 0};
  Surrogate net = initial;
  auto params = net.parameters();
  std::vector<double> grad(params.size()), mom(params.size(), 0.0), vel(params.size(), 0.0);
  std::vector<std::size_t> order = split.training;
  std::mt19937_64 rng(stream_seed(cfg.seed, 1));

  auto selection_loss = [&](const EpochRecord &r) {
    return split.validation.empty() ? r.train_loss : r.val_loss;
  };
  auto val_loss = [&]() {
    return split.validation.empty() ? 0.0 : reduced_loss(net, reduced, split.validation, {});
  };

  EpochRecord first{0, reduced_loss(net, reduced, split.training, {}), val_loss()};
  result.history.push_back(first);
  double best = selection_loss(first);
  std::size_t step = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch)
  {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size)
    {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      const auto batch = std::span<const std::size_t>(order).subspan(start, len);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double loss = reduced_loss(net, reduced, batch, grad);
      if (!std::isfinite(loss))
      {
        throw NumericalError("training loss became non-finite at epoch " + std::to_string(epoch) +
                             ", batch starting at " + std::to_string(start));
      }
      epoch_loss += loss * static_cast<double>(len);
      ++step;
      const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      for (std::size_t k = 0; k < params.size(); ++k)
      {
        mom[k] = cfg.beta1 * mom[k] + (1.0 - cfg.beta1) * grad[k];
        vel[k] = cfg.beta2 * vel[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
        params[k] -= cfg.learning_rate * (mom[k] / c1) / (std::sqrt(vel[k] / c2) + cfg.adam_eps);
      }
    }
    EpochRecord rec{epoch, epoch_loss / static_cast<double>(order.size()), val_loss()};
    if (!std::isfinite(rec.val_loss))
    {
      throw NumericalError("validation loss became non-finite at epoch " + std::to_string(epoch));
    }
    result.history.push_back(rec);
    if (selection_loss(rec) < best)
    {
      best = selection_loss(rec);
      result.net = net;
      result.best_epoch = epoch;
    }
  }
  return result;
}

double relative_error_percent(std::span<const double> u, std::span<const double> approx)
{
  NOPC_REQUIRE(u.size() == approx.size(), "length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    num += (u[i] - approx[i]) * (u[i] - approx[i]);
    den += u[i] * u[i];
  }
  if (!(den > 0.0))
  {
    throw NumericalError("relative error against a zero reference");
  }
  return 100.0 * std::sqrt(num / den);
}

ErrorSummary summarize(std::vector<double> values)
{
  NOPC_REQUIRE(!values.empty(), "no values to summarize");
  ErrorSummary s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.per_sample = std::move(values);
  return s;
}

ErrorSummary evaluate(const Surrogate &net, const Matrix &m, const Matrix &u)
{
  NOPC_REQUIRE(m.cols() == u.cols(), "input and output sample counts differ");
  const Matrix pred = net.forward_batch(m);
  std::vector<double> errs(u.cols());
  for (std::size_t j = 0; j < u.cols(); ++j)
  {
    errs[j] = relative_error_percent(u.col(j), pred.col(j));
  }
  return summarize(std::move(errs));
}

}  // namespace nopc
