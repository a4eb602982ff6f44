// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "curvelane/data_io.hpp"

namespace curvelane {

/// Synthetic lane scenes with fabricated two-head detector output.
///
/// Every cell a lane passes through proposes the whole lane. Its offsets are
/// exact at its own row and drift away from the truth by
/// `remote_noise_sigma * xi * |y - cy| / noise_range` (xi ~ N(0, 1), one draw
/// per cell), so confident bottom cells get the far end of the lane wrong
/// while weaker cells near the top get it right.
struct SynthSceneConfig {
    int num_scenes = 100;
    double curvature_min = 2e-4; // 1/px
    double curvature_max = 1.5e-3;
    double remote_noise_sigma = 20.0; // px
    int lanes_per_scene = 3;
    std::uint64_t seed = 0;

    int image_width = 1640;
    int image_height = 590;
    int anchor_rows = 59;
    double noise_range = 200.0; // px

    /// Throws ConstraintError naming the offending field.
    void validate() const;
};

/// Scenes carry ground truth; head levels are 2 (20x8 grid) and 3 (10x4 grid).
std::vector<io::ProposalScene> generate_synthetic_scenes(const SynthSceneConfig& config);

} // namespace curvelane
