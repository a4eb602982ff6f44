// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "curvelane/random.hpp"

namespace curvelane {

/// Score-mask coefficients of one feature level. The mask logit is
/// alpha1 * c_y + beta1 + alpha2 * |c - center|.
struct BlendParams {
    double alpha1 = 0.0;
    double beta1 = 0.0;
    double alpha2 = 0.0;
    double center_x = 0.0;
    double center_y = 0.0;

    bool operator==(const BlendParams&) const = default;
};

/// Complete post-processing configuration. An infinite locality sigma turns
/// point blending off (the group representative wins every row).
struct BlendParamSet {
    std::map<int, BlendParams> per_level;
    double score_threshold = 0.5;
    double group_distance = 100.0;
    double locality_sigma = std::numeric_limits<double>::infinity();

    bool operator==(const BlendParamSet&) const = default;

    /// Identity masks on `levels`, blending disabled: classic Line-NMS.
    static BlendParamSet plain_nms(const std::vector<int>& levels, double score_threshold, double group_distance);
};

/// Bounds and Gaussian step of one parameter. Log-scale ranges (min > 0)
/// step multiplicatively: v * exp(sigma * z).
struct ParamRange {
    double min = 0.0;
    double max = 1.0;
    double sigma = 0.1;
    bool log_scale = false;

    double clamp(double v) const { return v < min ? min : (v > max ? max : v); }
    double step(double v, double z) const { return clamp(log_scale ? v * std::exp(sigma * z) : v + sigma * z); }
};

/// Bounds and mutation scales of every searchable post-processing parameter.
struct BlendParamSpace {
    ParamRange alpha1{-0.01, 0.01, 0.002};
    ParamRange beta1{-3.0, 3.0, 0.5};
    ParamRange alpha2{-0.01, 0.01, 0.002};
    ParamRange center_x{0.0, 1640.0, 80.0};
    ParamRange center_y{0.0, 590.0, 30.0};
    ParamRange score_threshold{0.05, 0.95, 0.05};
    ParamRange group_distance{5.0, 400.0, 20.0};
    ParamRange locality_sigma{5.0, 2000.0, 0.5, true};
    double default_score_threshold = 0.5;
    double default_group_distance = 100.0;

    /// Ranges scaled to an image of the given size.
    static BlendParamSpace for_image(double width, double height);

    /// Throws ConstraintError if any range has min >= max or a negative sigma.
    void validate() const;

    /// Starting point of the inner search: identity masks centered in the
    /// image, mid thresholds, and locality sigma at its upper bound.
    BlendParamSet defaults(const std::vector<int>& levels) const;

    /// Gaussian step (see ParamRange::step) on each parameter with probability
    /// `rate`, at least one parameter always moving; results are clamped into range.
    BlendParamSet mutate(const BlendParamSet& base, Rng& rng, double rate = 0.5) const;

    /// Adds default entries for new head levels and drops entries of levels without a head.
    BlendParamSet reconcile(const BlendParamSet& base, const std::vector<int>& levels) const;
};

} // namespace curvelane
