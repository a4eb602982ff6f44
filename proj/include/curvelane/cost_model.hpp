// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvelane/arch_space.hpp"

namespace curvelane {

/// FLOPS and parameter counts. Unsigned 64-bit; arithmetic is checked and
/// throws OverflowError instead of wrapping.
using Count = std::uint64_t;

struct ConvCost {
    Count flops = 0;
    Count params = 0;

    bool operator==(const ConvCost&) const = default;
};

/// One convolution. A multiply-accumulate counts as two operations; the bias
/// adds parameters but no FLOPS. `stride` does not enter the count since the
/// output extent is given.
ConvCost conv_cost(int in_ch, int out_ch, int kernel, int stride, int out_w, int out_h, bool bias = false);

/// ceil(in / stride)
constexpr int conv_output_extent(int in, int stride) { return (in + stride - 1) / stride; }

struct Resolution {
    int width = 512;
    int height = 288;

    bool operator==(const Resolution&) const = default;
};

struct ComponentCost {
    std::string label;
    Count flops = 0;
    Count params = 0;
};

struct CostReport {
    Count total_flops = 0;
    Count total_params = 0;
    std::vector<ComponentCost> per_component;
    Resolution input_resolution;
    int stem_factor = kStemFactor;
};

struct CostOptions {
    int anchor_rows = 72;          // Z; heads emit Z + 3 channels per grid cell
    int bottleneck_expansion = 4;
};

struct FeatureLevel {
    int channels = 0;
    int width = 0;
    int height = 0;
};

/// Output channels and extent of every backbone stage, F_1 .. F_t.
std::vector<FeatureLevel> feature_levels(const BackboneSpec& spec, Resolution resolution = {},
                                         const CostOptions& options = {});

/// Stem, residual blocks (with projection shortcuts wherever stride or width
/// changes), fusion 1x1 convolutions and one 1x1 prediction conv per head.
CostReport candidate_cost(const ArchEncoding& arch, Resolution resolution = {}, const CostOptions& options = {});

Count checked_add(Count a, Count b);
Count checked_mul(Count a, Count b);

} // namespace curvelane
