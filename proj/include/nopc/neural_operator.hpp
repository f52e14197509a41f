// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_NEURAL_OPERATOR_HPP
#define NOPC_NEURAL_OPERATOR_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "nopc/dense.hpp"
#include "nopc/reduction.hpp"

namespace nopc
{

struct NetConfig
{
  std::size_t r_m = 50;
  std::size_t r_u = 25;
  std::size_t n_blocks = 5;
  std::size_t block_rank = 20;
};

void validate(const NetConfig &cfg);

// softplus(x) = log(1 + exp(x)), evaluated without overflow
double softplus(double x);

// Reduced-basis network
//   z0 = V_m^T (m - m_mean),  z1 = D z0,  z_{k+1} = z_k + W2_k softplus(W1_k z_k + b1_k),
//   u = V_u z + u_mean.
// The projectors are frozen; D, W1_k, b1_k, W2_k live in one flat parameter vector.
class Surrogate
{
public:
  // All trainable parameters zero.
  Surrogate(const NetConfig &cfg, Projector input, Projector output);

  // Glorot-uniform matrices from `seed`, zero biases.
  static Surrogate init(const NetConfig &cfg, Projector input, Projector output,
                        std::uint64_t seed);

  const NetConfig &config() const { return cfg_; }
  const Projector &input_projector() const { return input_; }
  const Projector &output_projector() const { return output_; }
  std::size_t input_dim() const { return input_.dim(); }
  std::size_t output_dim() const { return output_.dim(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  // Column-major views into parameters().
  std::span<const double> dense() const;            // r_u x r_m
  std::span<const double> w1(std::size_t k) const;  // block_rank x r_u
  std::span<const double> b1(std::size_t k) const;  // block_rank
  std::span<const double> w2(std::size_t k) const;  // r_u x block_rank
  std::size_t dense_offset() const { return 0; }
  std::size_t block_offset(std::size_t k) const;
  std::size_t block_size() const;

  std::vector<double> forward(std::span<const double> m) const;
  // z0 -> final reduced output
  std::vector<double> forward_reduced(std::span<const double> z0) const;
  // One column per sample, evaluated in parallel.
  Matrix forward_batch(const Matrix &m) const;

private:
  NetConfig cfg_;
  Projector input_;
  Projector output_;
  std::vector<double> params_;
};

// Samples in reduced coordinates: z0 = V_m^T(m - m_mean), target t = V_u^T(u - u_mean),
// and the squared part of u - u_mean outside the output basis.
struct ReducedSamples
{
  Matrix z0;
  Matrix target;
  std::vector<double> tail;
  std::size_t q_u = 0;

  std::size_t size() const { return z0.cols(); }
};

ReducedSamples reduce_samples(const Surrogate &net, const Matrix &m, const Matrix &u);

// Mean over `indices` of ||forward(m) - u||^2 / q_u, written in reduced coordinates
// (the output basis is orthonormal). Adds the gradient to `grad` when it is nonempty.
double reduced_loss(const Surrogate &net, const ReducedSamples &data,
                    std::span<const std::size_t> indices, std::span<double> grad);

struct LossAndGrad
{
  double loss = 0.0;
  std::vector<double> grad;
};

// Loss and gradient over a batch of (m, u) columns.
LossAndGrad loss_and_grad(const Surrogate &net, const Matrix &m, const Matrix &u);

struct TrainConfig
{
  std::size_t epochs = 500;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  // drives the validation split and the minibatch shuffles
  std::uint64_t seed = 0;
};

struct DataSplit
{
  std::vector<std::size_t> validation;  // floor(0.1 N) samples
  std::vector<std::size_t> training;
};

// Seeded permutation of 0..n-1; the first floor(0.1 n) entries validate.
DataSplit split_indices(std::size_t n, std::uint64_t seed);

struct EpochRecord
{
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult
{
  Surrogate net;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

// Adam on shuffled minibatches; returns the weights with the lowest validation loss
// (training loss when there is no validation split). Epoch 0 records the initial state.
TrainResult train(const Surrogate &initial, const TrainConfig &cfg, const DataSet &data);

struct ErrorSummary
{
  std::vector<double> per_sample;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

// 100 ||u - approx|| / ||u||
double relative_error_percent(std::span<const double> u, std::span<const double> approx);
ErrorSummary summarize(std::vector<double> values);
// Column-wise relative errors of the surrogate against u.
ErrorSummary evaluate(const Surrogate &net, const Matrix &m, const Matrix &u);

}  // namespace nopc

#endif  // NOPC_NEURAL_OPERATOR_HPP
