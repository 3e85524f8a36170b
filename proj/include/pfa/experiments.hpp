// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "pfa/pfa.hpp"
#include "pfa/preprocessing.hpp"
#include "pfa/random.hpp"
#include "pfa/timeseries.hpp"

namespace pfa {

/// Base synthetic signal: component i is sin(omega_i * t) + amplitude_i * eta_i(t)
/// with eta i.i.d. standard normal, t = 0..T-1. The seed is fixed so the base
/// signal is identical across experiment runs.
struct SineComponent {
  double omega = 0.0;
  double noise_amplitude = 0.0;
};

struct NoisySineSpec {
  std::vector<SineComponent> components;
  Index samples = 0;
  std::uint64_t seed = 0;
};

inline TimeSeries generate_base(const NoisySineSpec& spec) {
  if (spec.components.empty()) throw std::invalid_argument("signal needs at least one component");
  for (const auto& c : spec.components)
    if (!std::isfinite(c.omega) || !std::isfinite(c.noise_amplitude))
      throw std::invalid_argument("non-finite component parameters");
  const Index n = static_cast<Index>(spec.components.size());
  NormalSampler rng(spec.seed);
  Matrix noise = rng.matrix(n, spec.samples);
  Matrix data(n, spec.samples);
  for (Index i = 0; i < n; ++i) {
    const auto& c = spec.components[static_cast<size_t>(i)];
    for (Index t = 0; t < spec.samples; ++t)
      data(i, t) = std::sin(c.omega * static_cast<double>(t)) + c.noise_amplitude * noise(i, t);
  }
  return TimeSeries(std::move(data));
}

/// RMS of a unit-amplitude sine. The reference experiment's published noise
/// amplitudes are relative to the sine RMS, so the spec below scales them by
/// this factor to get the noise standard deviation per unit-amplitude sine.
inline constexpr double kSineRms = 0.70710678118654752;

/// The three-sine reference signal driving the overfitting experiment.
inline NoisySineSpec reference_sine_spec(Index samples, std::uint64_t seed) {
  return {{{0.1, 0.7 * kSineRms}, {0.2, 1.0 * kSineRms}, {0.4, 5.3 * kSineRms}}, samples, seed};
}

/// Appends extra-noise rows (fresh noise per run) and mixes everything with a
/// random orthogonal transformation. identity_mix is a test hook that skips
/// the mixing.
struct EmbeddingSpec {
  Index extra_noise_dims = 0;
  std::uint64_t noise_seed = 0;
  std::uint64_t mix_seed = 0;
  bool identity_mix = false;
};

inline TimeSeries embed_and_mix(const TimeSeries& base, const EmbeddingSpec& spec) {
  if (spec.extra_noise_dims < 0) throw std::invalid_argument("noise dimension must be nonnegative");
  const Index n = base.dim() + spec.extra_noise_dims;
  Matrix stacked(n, base.samples());
  stacked.topRows(base.dim()) = base.data;
  if (spec.extra_noise_dims > 0) {
    NormalSampler rng(spec.noise_seed);
    stacked.bottomRows(spec.extra_noise_dims) = rng.matrix(spec.extra_noise_dims, base.samples());
  }
  if (spec.identity_mix) return TimeSeries(std::move(stacked));
  return TimeSeries(random_orthogonal(spec.mix_seed, n) * stacked);
}

/// One sweep cell: extraction error statistics for a (noise-dim, horizon)
/// pair, plus the shared noise-free relaxation bound.
struct ExperimentRecord {
  Index noise_dim = 0;
  int k = 0;
  Index samples = 0;
  int runs = 0;
  double mean_error = 0.0;
  double std_error = 0.0;   // sample standard deviation across runs
  double lower_bound = 0.0; // relaxation objective at k = 0, no added noise
  bool below_bound = false;
};

struct SweepConfig {
  NoisySineSpec base;
  std::vector<int> k_values;
  std::vector<Index> noise_dims;
  int runs = 30;
  PfaConfig core;
  std::uint64_t master_seed = 1;
  int jobs = 1;  // 0 = hardware concurrency
};

/// Runs the noise-dimension x horizon sweep: per (d, run) one embedded and
/// sphered signal is solved for every requested k (shared fit). Per-run
/// seeds derive from the master seed and the (d, run) counters, so results
/// are independent of scheduling; aggregation is an ordered fold over runs.
inline std::vector<ExperimentRecord> run_sweep(const SweepConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("runs must be positive");
  if (cfg.k_values.empty() || cfg.noise_dims.empty())
    throw std::invalid_argument("sweep needs at least one k and one noise dimension");

  const TimeSeries base = generate_base(cfg.base);
  const Expansion expansion{cfg.core.expansion_degree, base.dim()};

  // Shared noise-free bound: relaxation objective on the sphered base signal.
  PfaConfig bound_cfg = cfg.core;
  bound_cfg.k = 0;
  const double lower_bound =
      solve_relaxation(sphere(expand(base, expansion), cfg.core.threshold), bound_cfg).objective;

  const size_t cells = cfg.noise_dims.size();
  const size_t tasks = cells * static_cast<size_t>(cfg.runs);
  std::vector<std::vector<double>> per_task(tasks);  // errors per k for each (d, run)

  auto work = [&](size_t task) {
    const size_t d_idx = task / static_cast<size_t>(cfg.runs);
    const std::uint64_t run = task % static_cast<size_t>(cfg.runs);
    const Index d = cfg.noise_dims[d_idx];
    EmbeddingSpec embed{d, derive_seed(cfg.master_seed, {1, static_cast<std::uint64_t>(d), run}),
                        derive_seed(cfg.master_seed, {2, static_cast<std::uint64_t>(d), run}), false};
    const TimeSeries mixed = embed_and_mix(base, embed);
    const Expansion mixed_expansion{cfg.core.expansion_degree, mixed.dim()};
    const TimeSeries z = sphere(expand(mixed, mixed_expansion), cfg.core.threshold);
    const auto results = solve_pfa_k_multi(z, cfg.core, cfg.k_values);
    std::vector<double> errors;
    errors.reserve(results.size());
    for (const auto& res : results) errors.push_back(res.achieved_error);
    per_task[task] = std::move(errors);
  };

  int jobs = cfg.jobs == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : cfg.jobs;
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (size_t t = 0; t < tasks; ++t) work(t);
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(jobs));
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        try {
          for (size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) work(t);
        } catch (...) {
          const std::scoped_lock lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(tasks);  // stop handing out work
        }
      });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<ExperimentRecord> records;
  records.reserve(cells * cfg.k_values.size());
  for (size_t d_idx = 0; d_idx < cells; ++d_idx) {
    for (size_t k_idx = 0; k_idx < cfg.k_values.size(); ++k_idx) {
      double sum = 0.0;
      for (int run = 0; run < cfg.runs; ++run)
        sum += per_task[d_idx * static_cast<size_t>(cfg.runs) + static_cast<size_t>(run)][k_idx];
      const double mean = sum / cfg.runs;
      double sq = 0.0;
      for (int run = 0; run < cfg.runs; ++run) {
        const double e =
            per_task[d_idx * static_cast<size_t>(cfg.runs) + static_cast<size_t>(run)][k_idx] - mean;
        sq += e * e;
      }
      const double stddev = cfg.runs > 1 ? std::sqrt(sq / (cfg.runs - 1)) : 0.0;
      records.push_back({cfg.noise_dims[d_idx], cfg.k_values[k_idx], cfg.base.samples, cfg.runs, mean,
                         stddev, lower_bound, mean < lower_bound});
    }
  }
  return records;
}

}  // namespace pfa
