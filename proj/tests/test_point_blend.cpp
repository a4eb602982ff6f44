// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <limits>
#include <set>

#include "curvelane/point_blend.hpp"
#include "curvelane/synth.hpp"
#include "oracles.hpp"

using namespace curvelane;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LaneLine vertical(double x, std::vector<double> rows, double score, double cy, int cell = 0)
{
    LaneLine l;
    l.score = score;
    for (double y : rows) {
        l.points.push_back({x, y, {1, cell, score, cy}});
    }
    return l;
}

double max_point_error(const std::vector<LaneLine>& lines, const std::vector<Polyline>& gt)
{
    // Each line against its nearest GT lane, by x at the same row (GT is linearly interpolated).
    auto x_at = [](const Polyline& g, double y) {
        for (std::size_t k = 0; k + 1 < g.size(); ++k) {
            const double y0 = g[k].y, y1 = g[k + 1].y;
            if ((y >= std::min(y0, y1)) && (y <= std::max(y0, y1))) {
                const double t = y1 == y0 ? 0.0 : (y - y0) / (y1 - y0);
                return g[k].x + t * (g[k + 1].x - g[k].x);
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    };
    double worst = 0.0;
    for (const auto& l : lines) {
        double best = kInf;
        for (const auto& g : gt) {
            double e = 0.0;
            for (const auto& p : l.points) {
                const double x = x_at(g, p.y);
                if (!std::isnan(x)) {
                    e = std::max(e, std::abs(p.x - x));
                }
            }
            best = std::min(best, e);
        }
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

TEST_SUITE("point_blend")
{
    TEST_CASE("mask logit worked examples")
    {
        CHECK(mask_logit({0, 0.7, 0, 0, 0}, 123, 45) == 0.7);
        CHECK(mask_logit({0, 0.7, 0, 0, 0}, 0, 0) == 0.7);
        CHECK(mask_logit({0.01, -1, 0, 0, 0}, 50, 100) == 0.0);
        CHECK(mask_logit({0, 0, -0.02, 256, 144}, 256, 44) == -2.0);
    }

    TEST_CASE("mask logit against the reference")
    {
        Rng rng(99);
        std::uniform_real_distribution<double> coef(-0.05, 0.05), beta(-5, 5), pos(0, 1640);
        for (int i = 0; i < 10000; ++i) {
            BlendParams p{coef(rng), beta(rng), coef(rng), pos(rng), pos(rng)};
            const double cx = pos(rng), cy = pos(rng);
            CHECK(std::abs(mask_logit(p, cx, cy) - oracle::mask_logit(p.alpha1, p.beta1, p.alpha2, p.center_x,
                                                                      p.center_y, cx, cy)) < 1e-12);
        }
    }

    TEST_CASE("apply mask")
    {
        CHECK(apply_mask(0.5, -2.0) == doctest::Approx(1.0 / (1.0 + std::exp(2.0))).epsilon(1e-12));
        CHECK(apply_mask(0.5, -2.0) == doctest::Approx(0.1192).epsilon(1e-3));
        CHECK(apply_mask(0.37, 0.0) == 0.37);
        CHECK(apply_mask(1.0, 0.0) == 1.0 - kScoreClampEps);
        CHECK(apply_mask(0.0, 0.0) == kScoreClampEps);
        double prev = 0.0;
        for (double l = -10; l <= 10; l += 0.25) {
            const double m = apply_mask(0.3, l);
            CHECK(m >= prev);
            CHECK(m > 0.0);
            CHECK(m < 1.0);
            prev = m;
        }
    }

    TEST_CASE("greedy grouping")
    {
        const std::vector<double> rows{10, 20, 30};
        CHECK(group_lines({vertical(0, rows, 0.9, 0), vertical(0, rows, 0.8, 0)}, 30).size() == 1);
        CHECK(group_lines({vertical(0, rows, 0.9, 0), vertical(100, rows, 0.8, 0)}, 30).size() == 2);
        auto g = group_lines({vertical(0, rows, 0.9, 0), vertical(20, rows, 0.5, 0), vertical(40, rows, 0.8, 0)}, 30);
        REQUIRE(g.size() == 2);
        CHECK(g[0] == std::vector<std::size_t>{0, 1});
        CHECK(g[1] == std::vector<std::size_t>{2});
    }

    TEST_CASE("blend group")
    {
        const std::vector<double> rows{100, 300, 500};
        auto rep = vertical(100, rows, 0.9, 580, 1);
        auto local = vertical(110, rows, 0.5, 100, 2);

        CHECK(blend_group({rep}, 10.0) == rep);
        CHECK(blend_group({rep, local}, kInf) == rep);

        // sigma 200: row 100 -> 0.9 e^-5.76 = 0.0028 vs 0.5; row 300 -> 0.9 e^-1.96 = 0.127 vs 0.5 e^-1 = 0.184;
        // row 500 -> 0.9 e^-0.16 = 0.767 vs 0.5 e^-16.
        auto out = blend_group({local, rep}, 200.0);
        REQUIRE(out.points.size() == 3);
        CHECK(out.points[0].x == 110.0);
        CHECK(out.points[1].x == 110.0);
        CHECK(out.points[2].x == 100.0);
        CHECK(out.score == 0.9);
        CHECK(out.points[0].source.cell == 2);
        CHECK(out.points[2].source.cell == 1);
    }

    TEST_CASE("blending never invents coordinates")
    {
        Rng rng(12);
        std::uniform_real_distribution<double> u(0, 1);
        for (int i = 0; i < 200; ++i) {
            std::vector<LaneLine> group;
            std::set<std::pair<double, double>> pool;
            const int n = 1 + static_cast<int>(u(rng) * 5);
            for (int k = 0; k < n; ++k) {
                LaneLine l;
                l.score = u(rng);
                for (double y = 10 * std::floor(u(rng) * 5); y < 100; y += 10) {
                    const double x = 100 * u(rng);
                    l.points.push_back({x, y, {1, k, l.score, 100 * u(rng)}});
                    pool.insert({x, y});
                }
                group.push_back(l);
            }
            auto out = blend_group(group, 1 + 100 * u(rng));
            for (const auto& p : out.points) {
                CHECK(pool.count({p.x, p.y}) == 1);
            }
        }
    }

    TEST_CASE("postprocess of one perfect cell returns it unchanged")
    {
        LaneProposalSet set;
        set.layout = AnchorLayout::uniform(512, 288, 72);
        GridCell c{200, 250, 0.8, std::vector<std::optional<double>>(72, 3.0), 100};
        set.heads.push_back({1, 1, 1, {c}});
        auto out = postprocess(set, BlendParamSet::plain_nms({1}, 0.5, 30));
        REQUIRE(out.size() == 1);
        CHECK(out[0] == decode_cell(c, set.layout, 1, 0));
        CHECK(postprocess(LaneProposalSet{set.layout, {}}, BlendParamSet{}).empty());
    }

    TEST_CASE("seeds of kept lines are at least the group distance apart")
    {
        SynthSceneConfig cfg;
        cfg.num_scenes = 20;
        cfg.seed = 4;
        auto scenes = generate_synthetic_scenes(cfg);
        for (const auto& s : scenes) {
            for (double gd : {20.0, 60.0, 150.0}) {
                auto params = BlendParamSet::plain_nms({2, 3}, 0.3, gd);
                auto out = postprocess(s.proposals, params);
                for (std::size_t a = 0; a < out.size(); ++a) {
                    for (std::size_t b = a + 1; b < out.size(); ++b) {
                        CHECK(line_distance(out[a], out[b]) >= gd);
                    }
                }
            }
        }
    }

    TEST_CASE("identity mask with infinite sigma is plain line NMS")
    {
        SynthSceneConfig cfg;
        cfg.num_scenes = 50;
        cfg.seed = 9;
        for (const auto& s : generate_synthetic_scenes(cfg)) {
            CHECK(postprocess(s.proposals, BlendParamSet::plain_nms({2, 3}, 0.5, 100)) ==
                  plain_line_nms(s.proposals, 0.5, 100));
        }
    }

    TEST_CASE("blending shrinks the worst point error on noisy scenes")
    {
        SynthSceneConfig cfg;
        cfg.num_scenes = 30;
        cfg.seed = 1;
        int better = 0;
        for (const auto& s : generate_synthetic_scenes(cfg)) {
            auto plain = BlendParamSet::plain_nms({2, 3}, 0.5, 102.5);
            auto blended = plain;
            blended.locality_sigma = 35.0;
            const double e_plain = max_point_error(postprocess(s.proposals, plain), *s.gt_lanes);
            const double e_blend = max_point_error(postprocess(s.proposals, blended), *s.gt_lanes);
            better += e_blend < e_plain;
        }
        CHECK(better >= 20);
    }
}
