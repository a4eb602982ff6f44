// SPDX-License-Identifier: Apache-2.0
#include "curvelane/kernels.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>

#include "curvelane/evaluator.hpp"
#include "curvelane/point_blend.hpp"

namespace curvelane::kernels {

Canvas canvas_of(const AnchorLayout& layout)
{
    return {static_cast<int>(std::lround(layout.image_width)), static_cast<int>(std::lround(layout.image_height))};
}

namespace {

SceneCounts score_one(const BlendSample& s, const BlendParamSet& params, MatchOptions options)
{
    options.canvas = canvas_of(s.proposals.layout);
    std::vector<Polyline> pred;
    for (const auto& line : postprocess(s.proposals, params)) {
        pred.push_back(to_polyline(line));
    }
    return match_scene(pred, s.gt, options);
}

GenomeScore evaluate_one(const ArchEncoding& arch, Resolution resolution, const CostOptions& options)
{
    return {candidate_cost(arch, resolution, options).total_flops, synthetic_score(arch, resolution)};
}

} // namespace

std::vector<SceneCounts> score_corpus(const std::vector<BlendSample>& samples, const BlendParamSet& params,
                                      const MatchOptions& options)
{
    std::vector<SceneCounts> out(samples.size());
    const auto n = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = score_one(samples[static_cast<std::size_t>(i)], params, options);
    }
    return out;
}

std::vector<SceneCounts> score_corpus_serial(const std::vector<BlendSample>& samples, const BlendParamSet& params,
                                             const MatchOptions& options)
{
    std::vector<SceneCounts> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back(score_one(s, params, options));
    }
    return out;
}

std::vector<GenomeScore> evaluate_genomes(const std::vector<ArchEncoding>& genomes, Resolution resolution,
                                          const CostOptions& options)
{
    std::vector<GenomeScore> out(genomes.size());
    const auto n = static_cast<std::ptrdiff_t>(genomes.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = evaluate_one(genomes[static_cast<std::size_t>(i)], resolution, options);
    }
    return out;
}

std::vector<GenomeScore> evaluate_genomes_serial(const std::vector<ArchEncoding>& genomes, Resolution resolution,
                                                 const CostOptions& options)
{
    std::vector<GenomeScore> out;
    out.reserve(genomes.size());
    for (const auto& g : genomes) {
        out.push_back(evaluate_one(g, resolution, options));
    }
    return out;
}

std::vector<std::size_t> pareto_front(const std::vector<GenomeScore>& points)
{
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].flops != points[b].flops) {
            return points[a].flops < points[b].flops;
        }
        if (points[a].score != points[b].score) {
            return points[a].score > points[b].score;
        }
        return a < b;
    });
    std::vector<std::size_t> front;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < order.size()) {
        // order[i] holds the top score of its FLOPS bucket; equal copies share its fate.
        const auto& head = points[order[i]];
        std::size_t j = i;
        while (j < order.size() && points[order[j]].flops == head.flops) {
            if (head.score > best && points[order[j]].score == head.score) {
                front.push_back(order[j]);
            }
            ++j;
        }
        best = std::max(best, head.score);
        i = j;
    }
    return front;
}

} // namespace curvelane::kernels
