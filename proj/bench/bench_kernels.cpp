// Serial reference vs OpenMP kernels. Run with --benchmark_filter to pick one.

#include "tsnle/forecasters.hpp"
#include "tsnle/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace tsnle;

namespace {

std::vector<double> noisy_wave(std::size_t n, std::uint64_t seed) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> noise(0.0, 0.3);
	std::vector<double> v(n);
	for (std::size_t i = 0; i < n; ++i) {
		v[i] = 0.01 * static_cast<double>(i) + std::sin(0.3 * static_cast<double>(i)) + noise(rng);
	}
	return v;
}

std::vector<std::size_t> block_bounds(std::size_t n, std::size_t block) {
	std::vector<std::size_t> bounds;
	for (std::size_t b = 0; b < n; b += block) {
		bounds.push_back(b);
	}
	bounds.push_back(n);
	return bounds;
}

template <bool Parallel>
void merge_costs(benchmark::State &state) {
	const auto n = static_cast<std::size_t>(state.range(0));
	const auto values = noisy_wave(n, 1);
	const auto bounds = block_bounds(n, 3);
	for (auto _ : state) {
		auto costs = Parallel ? kernels::parallel::merge_costs(values, bounds) : kernels::serial::merge_costs(values, bounds);
		benchmark::DoNotOptimize(costs.data());
	}
	state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(bounds.size() - 2));
}

template <bool Parallel>
void autocorrelations(benchmark::State &state) {
	const auto n = static_cast<std::size_t>(state.range(0));
	const auto values = noisy_wave(n, 2);
	for (auto _ : state) {
		auto acf = Parallel ? kernels::parallel::autocorrelations(values, n / 2)
		                    : kernels::serial::autocorrelations(values, n / 2);
		benchmark::DoNotOptimize(acf.data());
	}
}

template <bool Parallel>
void batch_distances(benchmark::State &state) {
	const auto count = static_cast<std::size_t>(state.range(0));
	std::vector<std::vector<double>> refs(count);
	std::vector<std::vector<double>> cands(count);
	for (std::size_t i = 0; i < count; ++i) {
		refs[i] = noisy_wave(8, i);
		cands[i] = noisy_wave(8, i + count);
		for (auto &x : refs[i]) {
			x += 5.0;
		}
	}
	for (auto _ : state) {
		auto reports = Parallel ? kernels::parallel::batch_distances(refs, cands) : kernels::serial::batch_distances(refs, cands);
		benchmark::DoNotOptimize(reports.data());
	}
	state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(count));
}

template <bool Parallel>
void occlusion(benchmark::State &state) {
	const auto n = static_cast<std::size_t>(state.range(0));
	TimeSeries history;
	history.id = "bench";
	history.values = noisy_wave(n, 3);
	ForecasterSpec spec;
	spec.id = "ar3";
	spec.kind = ForecasterKind::ar;
	spec.order = 3;
	const auto base = forecast(spec, history, 6).values;
	auto fn = [&](const std::vector<double> &perturbed) {
		TimeSeries s = history;
		s.values = perturbed;
		return forecast(spec, s, 6).values;
	};
	for (auto _ : state) {
		auto scores = Parallel ? kernels::parallel::occlusion_scores(history.values, base, fn)
		                       : kernels::serial::occlusion_scores(history.values, base, fn);
		benchmark::DoNotOptimize(scores.data());
	}
}

} // namespace

BENCHMARK(merge_costs<false>)->Name("merge_costs/serial")->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK(merge_costs<true>)->Name("merge_costs/omp")->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK(autocorrelations<false>)->Name("autocorrelations/serial")->Arg(256)->Arg(4096);
BENCHMARK(autocorrelations<true>)->Name("autocorrelations/omp")->Arg(256)->Arg(4096);
BENCHMARK(batch_distances<false>)->Name("batch_distances/serial")->Arg(1000)->Arg(100000);
BENCHMARK(batch_distances<true>)->Name("batch_distances/omp")->Arg(1000)->Arg(100000);
BENCHMARK(occlusion<false>)->Name("occlusion/serial")->Arg(64)->Arg(512);
BENCHMARK(occlusion<true>)->Name("occlusion/omp")->Arg(64)->Arg(512);

BENCHMARK_MAIN();
