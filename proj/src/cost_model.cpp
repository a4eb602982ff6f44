// SPDX-License-Identifier: Apache-2.0
#include "curvelane/cost_model.hpp"

#include "curvelane/errors.hpp"

namespace curvelane {

Count checked_add(Count a, Count b)
{
    Count r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        throw OverflowError("operation count exceeds 64 bits");
    }
    return r;
}

Count checked_mul(Count a, Count b)
{
    Count r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw OverflowError("operation count exceeds 64 bits");
    }
    return r;
}

ConvCost conv_cost(int in_ch, int out_ch, int kernel, int /*stride*/, int out_w, int out_h, bool bias)
{
    auto k = static_cast<Count>(kernel);
    Count weights = checked_mul(checked_mul(k * k, static_cast<Count>(in_ch)), static_cast<Count>(out_ch));
    Count positions = checked_mul(static_cast<Count>(out_w), static_cast<Count>(out_h));
    ConvCost c;
    c.flops = checked_mul(checked_mul(2, weights), positions);
    c.params = bias ? checked_add(weights, static_cast<Count>(out_ch)) : weights;
    return c;
}

namespace {

class Tally {
public:
    explicit Tally(CostReport& report) : report_(report) {}

    void conv(std::string label, int in_ch, int out_ch, int kernel, int stride, int out_w, int out_h, bool bias = false)
    {
        auto c = conv_cost(in_ch, out_ch, kernel, stride, out_w, out_h, bias);
        report_.total_flops = checked_add(report_.total_flops, c.flops);
        report_.total_params = checked_add(report_.total_params, c.params);
        report_.per_component.push_back({std::move(label), c.flops, c.params});
    }

private:
    CostReport& report_;
};

struct Walk {
    std::vector<FeatureLevel> levels;
};

/// Walks stem and blocks; records convs into `tally` when given.
Walk walk_backbone(const BackboneSpec& spec, Resolution res, const CostOptions& options, Tally* tally)
{
    int w = conv_output_extent(res.width, 2);
    int h = conv_output_extent(res.height, 2);
    if (tally) {
        tally->conv("stem.conv1", 3, spec.base_channels, 3, 2, w, h);
    }
    w = conv_output_extent(w, 2);
    h = conv_output_extent(h, 2);
    if (tally) {
        tally->conv("stem.conv2", spec.base_channels, spec.base_channels, 3, 2, w, h);
    }

    const int expansion = spec.kind == BlockKind::Bottleneck ? options.bottleneck_expansion : 1;
    const auto layout = stage_layout(spec);
    Walk walk;
    int in_ch = spec.base_channels;
    for (const auto& b : layout) {
        const int in_w = w;
        const int in_h = h;
        w = conv_output_extent(w, b.stride);
        h = conv_output_extent(h, b.stride);
        const int out_ch = b.width * expansion;
        if (tally) {
            const std::string name = "block" + std::to_string(b.block);
            if (spec.kind == BlockKind::Basic) {
                tally->conv(name + ".conv1", in_ch, b.width, 3, b.stride, w, h);
                tally->conv(name + ".conv2", b.width, b.width, 3, 1, w, h);
            } else {
                tally->conv(name + ".conv1", in_ch, b.width, 1, 1, in_w, in_h);
                tally->conv(name + ".conv2", b.width, b.width, 3, b.stride, w, h);
                tally->conv(name + ".conv3", b.width, out_ch, 1, 1, w, h);
            }
            if (b.stride != 1 || in_ch != out_ch) {
                tally->conv(name + ".shortcut", in_ch, out_ch, 1, b.stride, w, h);
            }
        }
        in_ch = out_ch;
        const bool stage_ends = b.block == spec.num_blocks || layout[static_cast<std::size_t>(b.block)].stage != b.stage;
        if (stage_ends) {
            walk.levels.push_back({out_ch, w, h});
        }
    }
    return walk;
}

} // namespace

std::vector<FeatureLevel> feature_levels(const BackboneSpec& spec, Resolution resolution, const CostOptions& options)
{
    return walk_backbone(spec, resolution, options, nullptr).levels;
}

CostReport candidate_cost(const ArchEncoding& arch, Resolution resolution, const CostOptions& options)
{
    CostReport report;
    report.input_resolution = resolution;
    Tally tally(report);
    const auto levels = walk_backbone(arch.backbone, resolution, options, &tally).levels;
    auto level = [&](int f) -> const FeatureLevel& { return levels.at(static_cast<std::size_t>(f - 1)); };

    const int c = arch.fusion.channels;
    std::vector<int> fused_channels(levels.size(), 0);
    for (std::size_t i = 0; i < arch.fusion.layers.size(); ++i) {
        const auto& layer = arch.fusion.layers[i];
        const auto& target = level(layer.output_level);
        const std::string name = "fusion" + std::to_string(i);
        int slot = 0;
        for (int input : {layer.input_a, layer.input_b}) {
            const auto& src = level(input);
            // Higher-resolution inputs reach the target through the conv stride;
            // lower-resolution inputs are projected first and upsampled for free.
            const bool downsample = input < layer.output_level;
            const int stride = downsample ? (1 << (layer.output_level - input)) : 1;
            tally.conv(name + (slot++ == 0 ? ".in_a" : ".in_b"), src.channels, c, 1, stride,
                       downsample ? target.width : src.width, downsample ? target.height : src.height);
        }
        tally.conv(name + ".out", 2 * c, c, 1, 1, target.width, target.height);
        fused_channels[static_cast<std::size_t>(layer.output_level - 1)] += c;
    }

    for (int f : arch.fusion.heads_at) {
        const auto& lv = level(f);
        const int in_ch = lv.channels + fused_channels[static_cast<std::size_t>(f - 1)];
        tally.conv("head" + std::to_string(f), in_ch, options.anchor_rows + 3, 1, 1, lv.width, lv.height, true);
    }
    return report;
}

} // namespace curvelane
