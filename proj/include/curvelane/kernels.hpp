// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel batch kernels. Every OpenMP kernel has a serial twin with the
// same contract; tests require identical output and bench/ times the pair.

#include <vector>

#include "curvelane/arch_space.hpp"
#include "curvelane/blend_params.hpp"
#include "curvelane/cost_model.hpp"
#include "curvelane/lane_model.hpp"
#include "curvelane/metrics.hpp"

namespace curvelane::kernels {

/// Frozen detector output for one image with its ground truth.
struct BlendSample {
    LaneProposalSet proposals;
    std::vector<Polyline> gt;
};

/// Canvas of a proposal layout (image size rounded to whole pixels).
Canvas canvas_of(const AnchorLayout& layout);

/// postprocess + match per scene. The canvas comes from each scene's layout.
std::vector<SceneCounts> score_corpus(const std::vector<BlendSample>& samples, const BlendParamSet& params,
                                      const MatchOptions& options = {});
std::vector<SceneCounts> score_corpus_serial(const std::vector<BlendSample>& samples, const BlendParamSet& params,
                                             const MatchOptions& options = {});

struct GenomeScore {
    Count flops = 0;
    double score = 0.0;

    bool operator==(const GenomeScore&) const = default;
};

/// FLOPS and synthetic score of every genome.
std::vector<GenomeScore> evaluate_genomes(const std::vector<ArchEncoding>& genomes, Resolution resolution = {},
                                          const CostOptions& options = {});
std::vector<GenomeScore> evaluate_genomes_serial(const std::vector<ArchEncoding>& genomes, Resolution resolution = {},
                                                 const CostOptions& options = {});

/// Indices of the non-dominated points (FLOPS minimized, score maximized), sorted by FLOPS.
std::vector<std::size_t> pareto_front(const std::vector<GenomeScore>& points);

} // namespace curvelane::kernels
