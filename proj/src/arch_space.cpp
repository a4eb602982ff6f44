// SPDX-License-Identifier: Apache-2.0
#include "curvelane/arch_space.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "curvelane/errors.hpp"

namespace curvelane {

namespace {

bool strictly_increasing_in(const std::vector<int>& v, int lo, int hi)
{
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < lo || v[i] > hi) {
            return false;
        }
        if (i > 0 && v[i] <= v[i - 1]) {
            return false;
        }
    }
    return true;
}

std::string join(const std::vector<int>& v)
{
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += std::to_string(v[i]);
    }
    return out + "]";
}

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    bool done() const { return pos_ >= s_.size(); }

    void skip_spaces()
    {
        while (!done() && (s_[pos_] == ' ' || s_[pos_] == '\t')) {
            ++pos_;
        }
    }

    void expect(char c, const char* field)
    {
        if (done() || s_[pos_] != c) {
            throw SyntaxError(field, std::string("expected '") + c + "' at offset " + std::to_string(pos_));
        }
        ++pos_;
    }

    int integer(const char* field)
    {
        std::size_t start = pos_;
        while (!done() && s_[pos_] >= '0' && s_[pos_] <= '9') {
            ++pos_;
        }
        if (start == pos_) {
            throw SyntaxError(field, "expected an integer at offset " + std::to_string(start));
        }
        int value = 0;
        auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, value);
        if (ec != std::errc{}) {
            throw SyntaxError(field, "integer out of range");
        }
        return value;
    }

    std::string_view take(std::size_t n)
    {
        auto out = s_.substr(pos_, n);
        pos_ += out.size();
        return out;
    }

    std::vector<int> list(const char* field)
    {
        expect('[', field);
        std::vector<int> out;
        skip_spaces();
        out.push_back(integer(field));
        skip_spaces();
        while (!done() && s_[pos_] == ',') {
            ++pos_;
            skip_spaces();
            out.push_back(integer(field));
            skip_spaces();
        }
        expect(']', field);
        if (out.size() < 2 || out.size() > 3) {
            throw SyntaxError(field, "expected 2 or 3 positions, got " + std::to_string(out.size()));
        }
        return out;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

/// Moves index `i` of `list` by `delta`; false if the result breaks ordering or bounds.
bool try_shift(BackboneSpec& spec, bool downsample_list, std::size_t i, int delta)
{
    auto& list = downsample_list ? spec.downsample_at : spec.double_channels_at;
    list[i] += delta;
    if (strictly_increasing_in(list, 2, spec.num_blocks)) {
        return true;
    }
    list[i] -= delta;
    return false;
}

template <typename T>
std::size_t uniform_index(Rng& rng, const std::vector<T>& v)
{
    return std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng);
}

BigCount binomial(int n, int k)
{
    if (k < 0 || k > n) {
        return 0;
    }
    BigCount r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

} // namespace

std::string to_string(BlockKind kind)
{
    return kind == BlockKind::Basic ? "RB" : "BB";
}

void validate(const BackboneSpec& spec)
{
    if (std::find(kBaseChannelChoices.begin(), kBaseChannelChoices.end(), spec.base_channels) ==
        kBaseChannelChoices.end()) {
        throw ConstraintError("base_channels", std::to_string(spec.base_channels) + " is not an allowed width");
    }
    if (spec.num_blocks < kMinBlocks || spec.num_blocks > kMaxBlocks) {
        throw ConstraintError("num_blocks", std::to_string(spec.num_blocks) + " outside [10, 45]");
    }
    if (spec.downsample_at.size() < 2 || spec.downsample_at.size() > 3) {
        throw ConstraintError("downsample_at", "must hold 2 or 3 positions");
    }
    if (spec.double_channels_at.size() != spec.downsample_at.size()) {
        throw ConstraintError("double_channels_at", "must hold as many positions as downsample_at");
    }
    if (!strictly_increasing_in(spec.downsample_at, 2, spec.num_blocks)) {
        throw ConstraintError("downsample_at", "positions must be strictly increasing within [2, num_blocks]");
    }
    if (!strictly_increasing_in(spec.double_channels_at, 2, spec.num_blocks)) {
        throw ConstraintError("double_channels_at", "positions must be strictly increasing within [2, num_blocks]");
    }
}

BackboneSpec parse_backbone(std::string_view encoding)
{
    Cursor c(encoding);
    BackboneSpec spec;
    auto kind = c.take(2);
    if (kind == "RB") {
        spec.kind = BlockKind::Basic;
    } else if (kind == "BB") {
        spec.kind = BlockKind::Bottleneck;
    } else {
        throw SyntaxError("kind", "expected RB or BB, got '" + std::string(kind) + "'");
    }
    c.expect('_', "kind");
    spec.base_channels = c.integer("base_channels");
    c.expect('_', "base_channels");
    spec.num_blocks = c.integer("num_blocks");
    c.expect('_', "num_blocks");
    spec.downsample_at = c.list("downsample_at");
    c.expect('_', "downsample_at");
    spec.double_channels_at = c.list("double_channels_at");
    if (!c.done()) {
        throw SyntaxError("encoding", "trailing characters");
    }
    validate(spec);
    return spec;
}

std::string serialize_backbone(const BackboneSpec& spec)
{
    return to_string(spec.kind) + "_" + std::to_string(spec.base_channels) + "_" + std::to_string(spec.num_blocks) +
           "_" + join(spec.downsample_at) + "_" + join(spec.double_channels_at);
}

std::vector<BlockInfo> stage_layout(const BackboneSpec& spec)
{
    std::vector<BlockInfo> out;
    out.reserve(static_cast<std::size_t>(spec.num_blocks));
    for (int b = 1; b <= spec.num_blocks; ++b) {
        auto downs = std::count_if(spec.downsample_at.begin(), spec.downsample_at.end(), [b](int d) { return d <= b; });
        auto doubles =
            std::count_if(spec.double_channels_at.begin(), spec.double_channels_at.end(), [b](int d) { return d <= b; });
        BlockInfo info;
        info.block = b;
        info.stage = static_cast<int>(downs) + 1;
        info.stride = std::find(spec.downsample_at.begin(), spec.downsample_at.end(), b) != spec.downsample_at.end() ? 2 : 1;
        info.downsample_factor = kStemFactor << downs;
        info.width = spec.base_channels << doubles;
        out.push_back(info);
    }
    return out;
}

void validate(const FusionSpec& spec, int stage_count)
{
    auto in_range = [stage_count](int level) { return level >= 1 && level <= stage_count; };
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const auto& l = spec.layers[i];
        if (!in_range(l.input_a) || !in_range(l.input_b) || !in_range(l.output_level)) {
            throw ConstraintError("fusion.layers[" + std::to_string(i) + "]",
                                  "feature level outside [1, " + std::to_string(stage_count) + "]");
        }
    }
    if (spec.channels <= 0) {
        throw ConstraintError("fusion.channels", "must be positive");
    }
    if (spec.heads_at.empty()) {
        throw ConstraintError("fusion.heads_at", "at least one head is required");
    }
    if (!strictly_increasing_in(spec.heads_at, 1, stage_count)) {
        throw ConstraintError("fusion.heads_at", "levels must be sorted, unique and within the stage count");
    }
}

void validate(const ArchEncoding& arch)
{
    validate(arch.backbone);
    validate(arch.fusion, arch.backbone.stage_count());
    const auto& blend = arch.blend;
    if (!(blend.score_threshold >= 0.0 && blend.score_threshold <= 1.0)) {
        throw ConstraintError("blend.score_threshold", "must lie in [0, 1]");
    }
    if (!(blend.group_distance > 0.0)) {
        throw ConstraintError("blend.group_distance", "must be positive");
    }
    if (!(blend.locality_sigma > 0.0)) {
        throw ConstraintError("blend.locality_sigma", "must be positive");
    }
    for (int level : arch.fusion.heads_at) {
        if (!blend.per_level.contains(level)) {
            throw ConstraintError("blend.per_level", "missing parameters for head level " + std::to_string(level));
        }
    }
    if (blend.per_level.size() != arch.fusion.heads_at.size()) {
        throw ConstraintError("blend.per_level", "parameters given for a level without a head");
    }
}

bool SpaceConfig::contains(const BackboneSpec& spec) const
{
    return std::find(kinds.begin(), kinds.end(), spec.kind) != kinds.end() &&
           std::find(base_channels.begin(), base_channels.end(), spec.base_channels) != base_channels.end() &&
           spec.num_blocks >= min_blocks && spec.num_blocks <= max_blocks &&
           std::find(stage_counts.begin(), stage_counts.end(), spec.stage_count()) != stage_counts.end();
}

std::vector<BackboneSpec> position_neighbors(const BackboneSpec& spec)
{
    std::vector<BackboneSpec> out;
    for (bool ds : {true, false}) {
        std::size_t n = ds ? spec.downsample_at.size() : spec.double_channels_at.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (int delta : {-1, 1}) {
                BackboneSpec next = spec;
                if (try_shift(next, ds, i, delta)) {
                    out.push_back(std::move(next));
                }
            }
        }
    }
    return out;
}

BackboneSpec mutate_backbone(const BackboneSpec& spec, Rng& rng, const SpaceConfig& space, const MutationRates& rates)
{
    std::vector<int> widths = space.base_channels;
    std::sort(widths.begin(), widths.end());
    // Moves that cannot change anything inside this space get zero weight.
    std::array<double, 4> weights{
        rates.position,
        space.max_blocks > space.min_blocks ? rates.depth : 0.0,
        widths.size() > 1 ? rates.width : 0.0,
        space.kinds.size() > 1 ? rates.kind : 0.0,
    };
    std::discrete_distribution<int> move(weights.begin(), weights.end());
    std::uniform_int_distribution<int> coin(0, 1);

    for (int attempt = 0; attempt < 10000; ++attempt) {
        BackboneSpec next = spec;
        switch (move(rng)) {
        case 0: {
            bool ds = coin(rng) == 0;
            auto& list = ds ? next.downsample_at : next.double_channels_at;
            std::size_t i = uniform_index(rng, list);
            if (try_shift(next, ds, i, coin(rng) == 0 ? -1 : 1)) {
                return next;
            }
            break;
        }
        case 1: {
            next.num_blocks += coin(rng) == 0 ? -1 : 1;
            if (next.num_blocks >= space.min_blocks && next.num_blocks <= space.max_blocks &&
                next.downsample_at.back() <= next.num_blocks && next.double_channels_at.back() <= next.num_blocks) {
                return next;
            }
            break;
        }
        case 2: {
            auto it = std::find(widths.begin(), widths.end(), spec.base_channels);
            if (it == widths.end()) {
                break;
            }
            auto idx = static_cast<std::ptrdiff_t>(it - widths.begin()) + (coin(rng) == 0 ? -1 : 1);
            if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(widths.size())) {
                next.base_channels = widths[static_cast<std::size_t>(idx)];
                return next;
            }
            break;
        }
        default: {
            std::vector<BlockKind> others;
            std::copy_if(space.kinds.begin(), space.kinds.end(), std::back_inserter(others),
                         [&](BlockKind k) { return k != spec.kind; });
            if (!others.empty()) {
                next.kind = others[uniform_index(rng, others)];
                return next;
            }
            break;
        }
        }
    }
    throw ExhaustedError("no valid backbone mutation found for " + serialize_backbone(spec));
}

FusionSpec mutate_fusion(const FusionSpec& spec, int stage_count, Rng& rng)
{
    const int field_units = static_cast<int>(spec.layers.size()) * 3;
    std::uniform_int_distribution<int> unit_dist(0, field_units + stage_count - 1);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        FusionSpec next = spec;
        int unit = unit_dist(rng);
        if (unit < field_units) {
            auto& layer = next.layers[static_cast<std::size_t>(unit / 3)];
            int* field = unit % 3 == 0 ? &layer.input_a : (unit % 3 == 1 ? &layer.input_b : &layer.output_level);
            // Uniform over the other stage_count - 1 levels.
            int v = std::uniform_int_distribution<int>(1, stage_count - 1)(rng);
            *field = v >= *field ? v + 1 : v;
            if (*field > stage_count) {
                continue;
            }
            return next;
        }
        int level = unit - field_units + 1;
        auto it = std::find(next.heads_at.begin(), next.heads_at.end(), level);
        if (it != next.heads_at.end()) {
            if (next.heads_at.size() == 1) {
                continue;
            }
            next.heads_at.erase(it);
        } else {
            next.heads_at.insert(std::upper_bound(next.heads_at.begin(), next.heads_at.end(), level), level);
        }
        return next;
    }
    throw ExhaustedError("no valid fusion mutation found");
}

BackboneSpec random_backbone(Rng& rng, const SpaceConfig& space)
{
    BackboneSpec spec;
    spec.kind = space.kinds[uniform_index(rng, space.kinds)];
    spec.base_channels = space.base_channels[uniform_index(rng, space.base_channels)];
    spec.num_blocks = std::uniform_int_distribution<int>(space.min_blocks, space.max_blocks)(rng);
    int stages = space.stage_counts[uniform_index(rng, space.stage_counts)];
    std::vector<int> positions(static_cast<std::size_t>(spec.num_blocks - 1));
    std::iota(positions.begin(), positions.end(), 2);
    auto pick = [&] {
        std::vector<int> out;
        std::sample(positions.begin(), positions.end(), std::back_inserter(out), stages - 1, rng);
        return out;
    };
    spec.downsample_at = pick();
    spec.double_channels_at = pick();
    return spec;
}

FusionSpec random_fusion(int stage_count, Rng& rng, const SpaceConfig& space)
{
    FusionSpec spec;
    spec.channels = space.fusion_channels;
    std::uniform_int_distribution<int> level(1, stage_count);
    for (int i = 0; i < space.fusion_layers; ++i) {
        FusionLayer l;
        l.input_a = level(rng);
        l.input_b = level(rng);
        l.output_level = level(rng);
        spec.layers.push_back(l);
    }
    std::bernoulli_distribution keep(0.5);
    do {
        spec.heads_at.clear();
        for (int f = 1; f <= stage_count; ++f) {
            if (keep(rng)) {
                spec.heads_at.push_back(f);
            }
        }
    } while (spec.heads_at.empty());
    return spec;
}

ArchEncoding random_arch(Rng& rng, const SpaceConfig& space, const BlendParamSpace& blend_space)
{
    ArchEncoding arch;
    arch.backbone = random_backbone(rng, space);
    arch.fusion = random_fusion(arch.backbone.stage_count(), rng, space);
    arch.blend = blend_space.defaults(arch.fusion.heads_at);
    return arch;
}

std::vector<BackboneSpec> enumerate_backbones(const SpaceConfig& space)
{
    // All strictly increasing k-subsets of [2, n], in lexicographic order.
    auto subsets = [](int n, int k) {
        std::vector<std::vector<int>> out;
        std::vector<int> cur;
        auto rec = [&](auto&& self, int from) -> void {
            if (static_cast<int>(cur.size()) == k) {
                out.push_back(cur);
                return;
            }
            for (int v = from; v <= n; ++v) {
                cur.push_back(v);
                self(self, v + 1);
                cur.pop_back();
            }
        };
        rec(rec, 2);
        return out;
    };

    std::vector<BackboneSpec> out;
    for (BlockKind kind : space.kinds) {
        for (int base : space.base_channels) {
            for (int n = space.min_blocks; n <= space.max_blocks; ++n) {
                for (int stages : space.stage_counts) {
                    const auto lists = subsets(n, stages - 1);
                    for (const auto& ds : lists) {
                        for (const auto& dc : lists) {
                            out.push_back({kind, base, n, ds, dc});
                        }
                    }
                }
            }
        }
    }
    return out;
}

BigCount fusion_cardinality(int stage_count, const SpaceConfig& space)
{
    const int t = stage_count;
    BigCount pairs;
    if (space.fusion_inputs_ordered) {
        pairs = space.fusion_allow_equal_inputs ? t * t : t * (t - 1);
    } else {
        pairs = space.fusion_allow_equal_inputs ? t * (t + 1) / 2 : t * (t - 1) / 2;
    }
    BigCount per_layer = pairs * t;
    BigCount layers = boost::multiprecision::pow(per_layer, static_cast<unsigned>(space.fusion_layers));
    BigCount heads = (BigCount(1) << t) - 1;
    return layers * heads;
}

CardinalityReport space_cardinality(const SpaceConfig& space)
{
    CardinalityReport report;
    BigCount per_shape = 0;
    for (int n = space.min_blocks; n <= space.max_blocks; ++n) {
        for (int stages : space.stage_counts) {
            BigCount lists = binomial(n - 1, stages - 1);
            per_shape += lists * lists;
        }
    }
    report.backbone = per_shape * space.kinds.size() * space.base_channels.size();
    for (int stages : space.stage_counts) {
        report.fusion += fusion_cardinality(stages, space);
    }

    std::ostringstream s;
    auto& a = report.assumptions;
    s << space.kinds.size() << " block kind(s), one kind for the whole backbone";
    a.push_back(s.str());
    s.str("");
    s << space.base_channels.size() << " base channel choice(s)";
    a.push_back(s.str());
    s.str("");
    s << "num_blocks in [" << space.min_blocks << ", " << space.max_blocks << "]";
    a.push_back(s.str());
    s.str("");
    s << "stage counts {";
    for (std::size_t i = 0; i < space.stage_counts.size(); ++i) {
        s << (i ? ", " : "") << space.stage_counts[i];
    }
    s << "}; downsample and doubling positions chosen independently as strictly increasing subsets of [2, num_blocks], "
         "one doubling per downsample";
    a.push_back(s.str());
    a.push_back("head placement and fusion are excluded from the backbone count");
    s.str("");
    s << "fusion: M=" << space.fusion_layers << " layers, inputs "
      << (space.fusion_inputs_ordered ? "ordered" : "unordered") << ", equal inputs "
      << (space.fusion_allow_equal_inputs ? "allowed" : "excluded")
      << ", any output level, non-empty head subset; summed over stage counts";
    a.push_back(s.str());
    a.push_back("fixed fusion channel count; post-processing parameters are continuous and not counted");
    return report;
}

} // namespace curvelane
