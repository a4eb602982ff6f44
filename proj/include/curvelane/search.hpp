// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "curvelane/evaluator.hpp"
#include "curvelane/kernels.hpp"
#include "curvelane/pareto.hpp"

namespace curvelane {

struct SearchConfig {
    std::size_t budget = 200;            // evaluations after the initial population
    std::size_t initial_population = 16;
    std::size_t workers = 1;
    std::uint64_t seed = 0;

    // Which part of the parent genome a child mutates.
    double p_backbone = 0.4;
    double p_fusion = 0.3;
    double p_blend = 0.3;

    MutationRates backbone_rates;
    SpaceConfig space;
    BlendParamSpace blend_space;
    Resolution resolution;
    CostOptions cost;

    /// Called from the consumer thread after every `snapshot_every` completed evaluations (0 = never).
    std::size_t snapshot_every = 0;
    std::function<void(const ParetoArchive&)> on_snapshot;
};

/// One child of `parent`: a backbone, fusion or blend mutation drawn with the
/// configured probabilities. Blend levels follow the head set.
ArchEncoding mutate_arch(const ArchEncoding& parent, Rng& rng, const SearchConfig& config);

/// Evaluates the initial population, then `budget` children of uniformly
/// chosen front members. One worker runs inline and is bit-reproducible for a
/// fixed seed; more workers evaluate concurrently while a single consumer
/// inserts results. Failed evaluations are logged unscored and skipped.
/// Children that repeat an already evaluated genome are redrawn; after 64
/// misses a fresh random genome is evaluated instead.
ParetoArchive run_search(const SearchConfig& config, const Evaluator& evaluator);

/// Continues from `archive` for `config.budget` further evaluations (no new initial population).
ParetoArchive resume_search(ParetoArchive archive, const SearchConfig& config, const Evaluator& evaluator);

struct BlendSearchConfig {
    std::size_t iterations = 40;
    std::size_t children_per_iteration = 8;
    double mutation_rate = 0.3;
    std::uint64_t seed = 0;
    MatchOptions match;
};

struct BlendSearchResult {
    BlendParamSet params;
    double f1 = 0.0;
    double default_f1 = 0.0;
    std::size_t evaluations = 0;
};

/// Hill climb over post-processing parameters, starting from the space
/// defaults: each iteration scores a batch of Gaussian perturbations of the
/// incumbent and keeps the best if it is at least as good. Throws EmptyDatasetError.
BlendSearchResult run_blend_inner_search(const std::vector<kernels::BlendSample>& samples, const BlendParamSpace& space,
                                         const BlendSearchConfig& config);

/// Distinct head levels present in the samples, ascending.
std::vector<int> head_levels(const std::vector<kernels::BlendSample>& samples);

} // namespace curvelane
