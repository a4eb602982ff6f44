// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>

#include "curvelane/errors.hpp"
#include "curvelane/lane_model.hpp"
#include "curvelane/random.hpp"

using namespace curvelane;

namespace {

LaneLine line_at(std::vector<std::pair<double, double>> xy)
{
    LaneLine l;
    for (auto [x, y] : xy) {
        l.points.push_back({x, y, {}});
    }
    return l;
}

GridCell cell(double cx, double cy, double score, int z, double end_y = 0.0, double offset = 0.0)
{
    return {cx, cy, score, std::vector<std::optional<double>>(static_cast<std::size_t>(z), offset), end_y};
}

} // namespace

TEST_SUITE("lane_model")
{
    TEST_CASE("uniform layout")
    {
        auto l = AnchorLayout::uniform(512, 288, 72);
        REQUIRE(l.rows.size() == 72);
        CHECK(l.rows[0] == 0.0);
        CHECK(l.rows[1] == 4.0);
        CHECK(l.rows.back() == 284.0);
        CHECK_NOTHROW(validate(l));
        auto bad = l;
        bad.rows[3] = bad.rows[2];
        CHECK_THROWS_AS(validate(bad), ConstraintError);
        CHECK_THROWS_AS(validate(AnchorLayout::uniform(512, 288, 1)), ConstraintError);
    }

    TEST_CASE("zero offsets decode to a vertical line")
    {
        auto layout = AnchorLayout::uniform(512, 288, 72);
        auto line = decode_cell(cell(100, 200, 0.9, 72), layout, 2, 7);
        REQUIRE(line.points.size() == 72);
        for (std::size_t z = 0; z < 72; ++z) {
            CHECK(line.points[z].x == 100.0);
            CHECK(line.points[z].y == layout.rows[z]);
            CHECK(line.points[z].source.level == 2);
            CHECK(line.points[z].source.cell == 7);
        }
        CHECK(line.score == 0.9);
    }

    TEST_CASE("end row cuts the line and degenerate cells throw")
    {
        auto layout = AnchorLayout::uniform(512, 288, 72);
        auto line = decode_cell(cell(100, 200, 0.9, 72, 200.0), layout);
        CHECK(line.points.front().y == 200.0);
        CHECK(line.points.size() == 22);
        CHECK_THROWS_AS(decode_cell(cell(100, 200, 0.9, 72, 285.0), layout), DegenerateLineError);
        CHECK_THROWS_AS(decode_cell(cell(100, 200, 0.9, 72, 284.0), layout), DegenerateLineError);
    }

    TEST_CASE("decode is shift equivariant")
    {
        auto layout = AnchorLayout::uniform(512, 288, 72);
        Rng rng(1);
        std::uniform_real_distribution<double> u(-50, 50);
        for (int i = 0; i < 100; ++i) {
            auto c = cell(200, 100, 0.5, 72);
            for (auto& o : c.offsets) {
                o = u(rng);
            }
            const double delta = u(rng);
            auto moved = c;
            moved.center_x += delta;
            auto a = decode_cell(c, layout);
            auto b = decode_cell(moved, layout);
            for (std::size_t k = 0; k < a.points.size(); ++k) {
                CHECK(b.points[k].x == doctest::Approx(a.points[k].x + delta).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("line distance")
    {
        auto a = line_at({{0, 10}, {0, 20}, {0, 30}});
        CHECK(line_distance(a, a) == 0.0);
        CHECK(line_distance(a, line_at({{40, 10}, {40, 20}, {40, 30}})) == 40.0);
        auto p = line_at({{0, 10}, {0, 20}, {0, 30}, {0, 40}, {0, 50}});
        auto q = line_at({{10, 30}, {20, 40}, {30, 50}, {0, 60}, {0, 70}});
        CHECK(line_distance(p, q) == 20.0);
        CHECK(line_distance(q, p) == 20.0);
        CHECK(std::isinf(line_distance(a, line_at({{0, 100}, {0, 110}}))));
    }

    TEST_CASE("decode_all counts cells above threshold")
    {
        LaneProposalSet set;
        set.layout = AnchorLayout::uniform(512, 288, 72);
        HeadGrid h{1, 3, 2, {}};
        const double scores[] = {0.9, 0.2, 0.7, 0.4, 0.6, 0.1};
        for (double s : scores) {
            h.cells.push_back(cell(50 * s, 100, s, 72));
        }
        h.cells[5].end_y = 300; // degenerate
        set.heads.push_back(h);
        CHECK(decode_all(set, 0.5).size() == 3);
        CHECK(decode_all(set, 1.0).empty());
        CHECK(decode_all(set, 0.0).size() == 5);
    }
}
