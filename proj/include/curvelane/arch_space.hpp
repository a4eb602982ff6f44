// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "curvelane/blend_params.hpp"
#include "curvelane/random.hpp"

namespace curvelane {

enum class BlockKind { Basic, Bottleneck };

inline constexpr std::array<int, 5> kBaseChannelChoices{48, 64, 80, 96, 128};
inline constexpr int kMinBlocks = 10;
inline constexpr int kMaxBlocks = 45;
/// Spatial reduction of the fixed two-conv stem in front of block 1.
inline constexpr int kStemFactor = 4;

/// Backbone genome. Positions are 1-based block indices: a downsample index
/// gives that block stride 2, a doubling index doubles that block's width.
struct BackboneSpec {
    BlockKind kind = BlockKind::Bottleneck;
    int base_channels = 64;
    int num_blocks = 13;
    std::vector<int> downsample_at{5, 9};
    std::vector<int> double_channels_at{7, 12};

    int stage_count() const { return static_cast<int>(downsample_at.size()) + 1; }
    bool operator==(const BackboneSpec&) const = default;
};

/// Throws ConstraintError naming the first violated field.
void validate(const BackboneSpec& spec);

/// Parses `<KIND>_<BASE>_<N>_[d1,d2(,d3)]_[c1,c2(,c3)]` with KIND in {RB, BB}.
/// Whitespace after commas and around bracket contents is accepted.
BackboneSpec parse_backbone(std::string_view encoding);

/// Canonical form, e.g. `BB_64_13_[5,9]_[7,12]`.
std::string serialize_backbone(const BackboneSpec& spec);

struct BlockInfo {
    int block = 0;             // 1-based
    int stage = 0;             // 1-based
    int stride = 1;
    int downsample_factor = 0; // relative to the input image
    int width = 0;             // block channel width before bottleneck expansion
};

std::vector<BlockInfo> stage_layout(const BackboneSpec& spec);

struct FusionLayer {
    int input_a = 1;
    int input_b = 1;
    int output_level = 1;

    bool operator==(const FusionLayer&) const = default;
};

struct FusionSpec {
    std::vector<FusionLayer> layers;
    int channels = 128;
    std::vector<int> heads_at{1}; // sorted, unique

    bool operator==(const FusionSpec&) const = default;
};

/// Throws ConstraintError if any level exceeds `stage_count`, heads are empty or channels <= 0.
void validate(const FusionSpec& spec, int stage_count);

struct ArchEncoding {
    BackboneSpec backbone;
    FusionSpec fusion;
    BlendParamSet blend;

    bool operator==(const ArchEncoding&) const = default;
};

void validate(const ArchEncoding& arch);

/// Declares the search space: which values are allowed for every genome field.
/// The default is the full space; tests and acceptance runs shrink it.
struct SpaceConfig {
    std::vector<BlockKind> kinds{BlockKind::Basic, BlockKind::Bottleneck};
    std::vector<int> base_channels{kBaseChannelChoices.begin(), kBaseChannelChoices.end()};
    int min_blocks = kMinBlocks;
    int max_blocks = kMaxBlocks;
    std::vector<int> stage_counts{3, 4};
    int fusion_layers = 2;
    int fusion_channels = 128;

    // Counting assumptions for space_cardinality.
    bool fusion_inputs_ordered = true;
    bool fusion_allow_equal_inputs = true;

    bool contains(const BackboneSpec& spec) const;
};

struct MutationRates {
    double position = 0.7;
    double depth = 0.1;
    double width = 0.1;
    double kind = 0.1;
};

/// All specs reachable by moving one downsample or doubling index by one position.
std::vector<BackboneSpec> position_neighbors(const BackboneSpec& spec);

/// One mutation unit away from `spec`, always valid and inside `space`.
BackboneSpec mutate_backbone(const BackboneSpec& spec, Rng& rng, const SpaceConfig& space = {},
                             const MutationRates& rates = {});

/// Resamples one fusion level (to a different value in [1, stage_count]) or
/// toggles one head, never emptying the head set.
FusionSpec mutate_fusion(const FusionSpec& spec, int stage_count, Rng& rng);

BackboneSpec random_backbone(Rng& rng, const SpaceConfig& space = {});
FusionSpec random_fusion(int stage_count, Rng& rng, const SpaceConfig& space = {});
ArchEncoding random_arch(Rng& rng, const SpaceConfig& space = {}, const BlendParamSpace& blend_space = {});

using BigCount = boost::multiprecision::cpp_int;

struct CardinalityReport {
    BigCount backbone;
    BigCount fusion;
    std::vector<std::string> assumptions;
};

/// Exact number of valid backbones and fusion specs in `space`.
CardinalityReport space_cardinality(const SpaceConfig& space = {});

/// Fusion count for one stage count (no sum over the space's stage counts).
BigCount fusion_cardinality(int stage_count, const SpaceConfig& space);

/// Every valid backbone in `space`, in a fixed order. Only sensible for small spaces.
std::vector<BackboneSpec> enumerate_backbones(const SpaceConfig& space);

std::string to_string(BlockKind kind);

} // namespace curvelane
