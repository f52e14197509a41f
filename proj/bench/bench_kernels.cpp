// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "nopc/fem.hpp"
#include "nopc/grf.hpp"
#include "nopc/kernels.hpp"
#include "nopc/neural_operator.hpp"

using namespace nopc;

namespace
{

SpacePtr square(int n)
{
  return FunctionSpace::create(std::make_shared<const Mesh>(build_unit_square_quad(n)),
                               BoundaryTag::GammaBottom);
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<double> v(n);
  for (auto &x : v)
  {
    x = dist(rng);
  }
  return v;
}

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed)
{
  Matrix a(r, c);
  const auto v = random_vector(r * c, seed);
  std::copy(v.begin(), v.end(), a.data().begin());
  return a;
}

template <bool Parallel>
void BM_Dot(benchmark::State &state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(n, 1);
  const auto b = random_vector(n, 2);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(Parallel ? kernels::dot(a, b) : serial::dot(a, b));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * 16 * n));
}

template <bool Parallel>
void BM_Spmv(benchmark::State &state)
{
  const auto space = square(static_cast<int>(state.range(0)));
  const auto &a = space->stiffness();
  const auto x = random_vector(space->size(), 3);
  std::vector<double> y(space->size());
  for (auto _ : state)
  {
    if constexpr (Parallel)
    {
      kernels::spmv(a, x, y);
    }
    else
    {
      serial::spmv(a, x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["rows"] = static_cast<double>(space->size());
}

template <bool Parallel>
void BM_Gram(benchmark::State &state)
{
  const auto a = random_matrix(static_cast<std::size_t>(state.range(0)),
                               static_cast<std::size_t>(state.range(1)), 4);
  for (auto _ : state)
  {
    auto g = Parallel ? kernels::gram(a) : serial::gram(a);
    benchmark::DoNotOptimize(g.data().data());
  }
}

template <bool Parallel>
void BM_Jacobian(benchmark::State &state)
{
  const auto space = square(static_cast<int>(state.range(0)));
  const auto p = ProblemDef::source_problem();
  const auto m = Field(space, random_vector(space->size(), 5));
  const auto u = Field(space, random_vector(space->size(), 6));
  for (auto _ : state)
  {
    auto j = Parallel ? assemble_jacobian_unconstrained(p, m, u)
                      : serial::assemble_jacobian_unconstrained(p, m, u);
    benchmark::DoNotOptimize(j.values().data());
  }
  state.counters["elements"] = static_cast<double>(space->mesh().num_elements());
}

template <bool Parallel>
void BM_Residual(benchmark::State &state)
{
  const auto space = square(static_cast<int>(state.range(0)));
  const auto p = ProblemDef::source_problem();
  const auto m = Field(space, random_vector(space->size(), 7));
  const auto u = Field(space, random_vector(space->size(), 8));
  for (auto _ : state)
  {
    auto r = Parallel ? assemble_residual(p, m, u) : serial::assemble_residual(p, m, u);
    benchmark::DoNotOptimize(r.data());
  }
}

void BM_SurrogateBatch(benchmark::State &state)
{
  const std::size_t q = 1089;
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto data = random_matrix(q, 120, 9);
  const auto net = Surrogate::init({50, 25, 5, 20}, build_projector(data, 50),
                                   build_projector(data, 25), 10);
  const auto m = random_matrix(q, n, 11);
  for (auto _ : state)
  {
    auto out = net.forward_batch(m);
    benchmark::DoNotOptimize(out.data().data());
  }
  state.counters["threads"] = kernels::max_threads();
}

}  // namespace

BENCHMARK(BM_Dot<true>)->Name("dot/parallel")->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Dot<false>)->Name("dot/serial")->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Spmv<true>)->Name("spmv/parallel")->Arg(32)->Arg(128)->Arg(256);
BENCHMARK(BM_Spmv<false>)->Name("spmv/serial")->Arg(32)->Arg(128)->Arg(256);
BENCHMARK(BM_Gram<true>)->Name("gram/parallel")->Args({1089, 256})->Args({4225, 512});
BENCHMARK(BM_Gram<false>)->Name("gram/serial")->Args({1089, 256})->Args({4225, 512});
BENCHMARK(BM_Jacobian<true>)->Name("jacobian/parallel")->Arg(32)->Arg(128);
BENCHMARK(BM_Jacobian<false>)->Name("jacobian/serial")->Arg(32)->Arg(128);
BENCHMARK(BM_Residual<true>)->Name("residual/parallel")->Arg(32)->Arg(128);
BENCHMARK(BM_Residual<false>)->Name("residual/serial")->Arg(32)->Arg(128);
BENCHMARK(BM_SurrogateBatch)->Name("surrogate_batch")->Arg(64)->Arg(256);

BENCHMARK_MAIN();
