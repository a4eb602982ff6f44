// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "curvelane/blend_params.hpp"
#include "curvelane/lane_model.hpp"

namespace curvelane {

/// Score-mask logit of a cell centered at (cx, cy):
/// alpha1 * cy + beta1 + alpha2 * sqrt((cx - ux)^2 + (cy - uy)^2).
double mask_logit(const BlendParams& params, double cx, double cy);

inline constexpr double kScoreClampEps = 1e-6;

/// sigmoid(logit(s) + mask_logit) with s clamped to [eps, 1 - eps]. A zero
/// mask logit returns the clamped score bit-for-bit.
double apply_mask(double score, double mask_logit);

/// Copy of `proposals` with every cell score masked by its level's parameters.
/// Levels without parameters keep their scores (identity mask).
LaneProposalSet mask_scores(const LaneProposalSet& proposals, const BlendParamSet& params);

/// Greedy NMS grouping. Each group lists indices into `lines`, seed first; the
/// seed is the highest-scoring line not yet assigned (ties: lower index).
std::vector<std::vector<std::size_t>> group_lines(const std::vector<LaneLine>& lines, double group_distance);

/// Replaces each row of the highest-scoring member by the member point with the
/// largest score * exp(-(y - source_cy)^2 / sigma^2). The representative keeps
/// ties, its score and its row extent.
LaneLine blend_group(const std::vector<LaneLine>& group, double locality_sigma);

/// mask -> threshold/decode -> group -> blend; one line per group, in seed order.
std::vector<LaneLine> postprocess(const LaneProposalSet& proposals, const BlendParamSet& params);

/// Reference Line-NMS on raw scores: keep a line unless it lies within
/// `group_distance` of an already kept, higher-scoring line.
std::vector<LaneLine> plain_line_nms(const LaneProposalSet& proposals, double score_threshold, double group_distance);

} // namespace curvelane
