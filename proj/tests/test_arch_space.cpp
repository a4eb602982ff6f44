// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <queue>
#include <set>

#include "curvelane/arch_space.hpp"
#include "curvelane/errors.hpp"

using namespace curvelane;

namespace {

int units_apart(const BackboneSpec& a, const BackboneSpec& b)
{
    int diff = (a.kind != b.kind) + (a.base_channels != b.base_channels) + (a.num_blocks != b.num_blocks);
    diff += a.downsample_at != b.downsample_at;
    diff += a.double_channels_at != b.double_channels_at;
    return diff;
}

} // namespace

TEST_SUITE("arch_space")
{
    TEST_CASE("parse the reference encoding")
    {
        auto s = parse_backbone("BB_64_13_[5,9]_[7,12]");
        CHECK(s.kind == BlockKind::Bottleneck);
        CHECK(s.base_channels == 64);
        CHECK(s.num_blocks == 13);
        CHECK(s.downsample_at == std::vector<int>{5, 9});
        CHECK(s.double_channels_at == std::vector<int>{7, 12});
        CHECK(parse_backbone("BB_64_13_[5, 9]_[7, 12]") == s);
        CHECK(serialize_backbone(parse_backbone("BB_64_13_[ 5, 9 ]_[7,  12]")) == "BB_64_13_[5,9]_[7,12]");
    }

    TEST_CASE("minimal spec is valid")
    {
        auto s = parse_backbone("RB_48_10_[2,3]_[2,3]");
        CHECK(s.kind == BlockKind::Basic);
        CHECK(s.base_channels == 48);
        CHECK(s.num_blocks == 10);
        CHECK_NOTHROW(validate(s));
    }

    TEST_CASE("serialize")
    {
        CHECK(serialize_backbone({BlockKind::Bottleneck, 64, 13, {5, 9}, {7, 12}}) == "BB_64_13_[5,9]_[7,12]");
        CHECK(serialize_backbone({BlockKind::Basic, 128, 45, {10, 20, 30}, {15, 25, 35}}) ==
              "RB_128_45_[10,20,30]_[15,25,35]");
    }

    TEST_CASE("constraint errors name the field")
    {
        auto field_of = [](const char* s) {
            try {
                parse_backbone(s);
            } catch (const ConstraintError& e) {
                return e.field();
            }
            return std::string("<none>");
        };
        CHECK(field_of("BB_50_13_[5,9]_[7,12]") == "base_channels");
        CHECK(field_of("BB_64_9_[5,9]_[7,8]") == "num_blocks");
        CHECK(field_of("BB_64_46_[5,9]_[7,12]") == "num_blocks");
        CHECK(field_of("BB_64_13_[1,9]_[7,12]") == "downsample_at");
        CHECK(field_of("BB_64_13_[9,5]_[7,12]") == "downsample_at");
        CHECK(field_of("BB_64_13_[5,14]_[7,12]") == "downsample_at");
        CHECK(field_of("BB_64_13_[5,9]_[7,7]") == "double_channels_at");
        CHECK_THROWS_AS(parse_backbone("BB_64_13_[5,9]_[7,12,13]"), Error);
    }

    TEST_CASE("syntax errors")
    {
        for (const char* s : {"", "XX_64_13_[5,9]_[7,12]", "BB_64_13_[5,9]", "BB_64_13_[5]_[7]", "BB_64_13_[5,9]_[7,12]x",
                              "BB_64_13_[]_[]", "BB_6a_13_[5,9]_[7,12]", "BB_64_13_(5,9)_[7,12]", "bb_64_13_[5,9]_[7,12]",
                              "BB_64_13_[5,9,10,11]_[7,8,12,13]"}) {
            CAPTURE(s);
            CHECK_THROWS_AS(parse_backbone(s), SyntaxError);
        }
    }

    TEST_CASE("round trip on random specs")
    {
        Rng rng(7);
        for (int i = 0; i < 2000; ++i) {
            auto s = random_backbone(rng);
            const auto text = serialize_backbone(s);
            CHECK(parse_backbone(text) == s);
            CHECK(serialize_backbone(parse_backbone(text)) == text);
        }
    }

    TEST_CASE("stage layout")
    {
        auto layout = stage_layout(parse_backbone("BB_64_13_[5,9]_[7,12]"));
        REQUIRE(layout.size() == 13);
        CHECK(layout[0].downsample_factor == kStemFactor);
        CHECK(layout[0].width == 64);
        CHECK(layout[5].downsample_factor == 2 * kStemFactor);
        CHECK(layout[5].width == 64);
        CHECK(layout[7].downsample_factor == 2 * kStemFactor);
        CHECK(layout[7].width == 128);
        CHECK(layout[12].downsample_factor == 4 * kStemFactor);
        CHECK(layout[12].width == 256);
        CHECK(layout[4].stride == 2);
        CHECK(layout[4].stage == 2);

        Rng rng(3);
        for (int i = 0; i < 500; ++i) {
            auto s = random_backbone(rng);
            auto l = stage_layout(s);
            for (std::size_t b = 1; b < l.size(); ++b) {
                CHECK(l[b].downsample_factor >= l[b - 1].downsample_factor);
                CHECK(l[b].width >= l[b - 1].width);
            }
            CHECK(l.back().width == s.base_channels << s.double_channels_at.size());
            CHECK(l.back().stage == s.stage_count());
        }
    }

    TEST_CASE("neighbor moves")
    {
        auto s = parse_backbone("BB_64_13_[5,9]_[7,12]");
        auto n = position_neighbors(s);
        auto has = [&](std::vector<int> d) {
            return std::any_of(n.begin(), n.end(), [&](const BackboneSpec& x) {
                return x.downsample_at == d && x.double_channels_at == s.double_channels_at;
            });
        };
        CHECK(has({4, 9}));
        CHECK(has({6, 9}));
        for (const auto& x : n) {
            CHECK_NOTHROW(validate(x));
            CHECK(units_apart(x, s) == 1);
        }
    }

    TEST_CASE("mutation closure")
    {
        SpaceConfig space;
        Rng rng(11);
        auto s = random_backbone(rng, space);
        for (int i = 0; i < 100000; ++i) {
            auto m = mutate_backbone(s, rng, space);
            REQUIRE_NOTHROW(validate(m));
            REQUIRE(space.contains(m));
            REQUIRE(units_apart(m, s) == 1);
            s = (i % 100 == 0) ? random_backbone(rng, space) : m;
        }
    }

    TEST_CASE("mutation is deterministic")
    {
        auto run = [](std::uint64_t seed) {
            Rng rng(seed);
            std::vector<std::string> out;
            BackboneSpec s;
            for (int i = 0; i < 200; ++i) {
                s = mutate_backbone(s, rng);
                out.push_back(serialize_backbone(s));
            }
            return out;
        };
        CHECK(run(5) == run(5));
        CHECK(run(5) != run(6));
    }

    TEST_CASE("fusion mutation")
    {
        FusionSpec f{{{1, 3, 2}}, 128, {2}};
        Rng rng(1);
        int moved_field = 0;
        for (int i = 0; i < 2000; ++i) {
            auto m = mutate_fusion(f, 4, rng);
            CHECK_NOTHROW(validate(m, 4));
            CHECK(!m.heads_at.empty());
            int changes = (m.heads_at != f.heads_at);
            changes += (m.layers[0].input_a != 1) + (m.layers[0].input_b != 3) + (m.layers[0].output_level != 2);
            CHECK(changes == 1);
            moved_field += m.layers[0].input_b == 4;
        }
        CHECK(moved_field > 0);

        for (int i = 0; i < 5000; ++i) {
            auto g = random_fusion(3, rng);
            auto m = mutate_fusion(g, 3, rng);
            CHECK_NOTHROW(validate(m, 3));
            for (const auto& l : m.layers) {
                CHECK(std::max({l.input_a, l.input_b, l.output_level}) <= 3);
            }
        }
    }

    TEST_CASE("cardinality")
    {
        SpaceConfig space;
        space.kinds = {BlockKind::Basic};
        space.base_channels = {64};
        space.min_blocks = space.max_blocks = 10;
        space.stage_counts = {3};
        auto r = space_cardinality(space);
        CHECK(r.backbone == 1296);
        CHECK(enumerate_backbones(space).size() == 1296);
        CHECK(!r.assumptions.empty());

        space.min_blocks = 10;
        space.max_blocks = 14;
        space.stage_counts = {3, 4};
        CHECK(BigCount(enumerate_backbones(space).size()) == space_cardinality(space).backbone);

        SpaceConfig fusion;
        fusion.fusion_layers = 2;
        CHECK(fusion_cardinality(4, fusion) == 61440);

        // t = 3, one layer: 27 level triples times 7 head subsets.
        fusion.fusion_layers = 1;
        CHECK(fusion_cardinality(3, fusion) == 189);
    }

    TEST_CASE("neighbor moves reach every spec with the same depth and stage count")
    {
        for (const char* start : {"RB_64_10_[2,3]_[2,3]", "RB_64_10_[2,3,4]_[2,3,4]"}) {
            auto s = parse_backbone(start);
            SpaceConfig space;
            space.kinds = {s.kind};
            space.base_channels = {s.base_channels};
            space.min_blocks = space.max_blocks = 10;
            space.stage_counts = {s.stage_count()};
            const auto all = enumerate_backbones(space);

            std::set<std::string> seen{serialize_backbone(s)};
            std::queue<BackboneSpec> todo;
            todo.push(s);
            while (!todo.empty()) {
                for (const auto& n : position_neighbors(todo.front())) {
                    if (seen.insert(serialize_backbone(n)).second) {
                        todo.push(n);
                    }
                }
                todo.pop();
            }
            CAPTURE(start);
            CHECK(seen.size() == all.size());
        }
    }

    TEST_CASE("random specs stay inside the space")
    {
        SpaceConfig space;
        space.kinds = {BlockKind::Bottleneck};
        space.base_channels = {80, 96};
        space.min_blocks = 20;
        space.max_blocks = 25;
        space.stage_counts = {4};
        Rng rng(2);
        for (int i = 0; i < 1000; ++i) {
            auto s = random_backbone(rng, space);
            CHECK(space.contains(s));
            CHECK_NOTHROW(validate(s));
        }
    }
}
