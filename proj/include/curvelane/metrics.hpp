// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "curvelane/lane_model.hpp"

namespace curvelane {

struct Canvas {
    int width = 1640;
    int height = 590;

    bool operator==(const Canvas&) const = default;
};

/// Rasterized lane: sorted row-major pixel indices into the canvas.
struct LaneMask {
    Canvas canvas;
    std::vector<std::uint32_t> pixels;
};

/// Pixels whose centers lie within width/2 of the polyline (round caps and
/// joins), clipped to the canvas. Throws DegenerateLineError below two points.
LaneMask rasterize_lane(const Polyline& line, double width, Canvas canvas);
LaneMask rasterize_lane(const LaneLine& line, double width, Canvas canvas);

double mask_iou(const LaneMask& a, const LaneMask& b);
double lane_iou(const Polyline& a, const Polyline& b, double width, Canvas canvas);
double lane_iou(const LaneLine& a, const LaneLine& b, double width, Canvas canvas);

struct SceneCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    SceneCounts& operator+=(const SceneCounts& o)
    {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    bool operator==(const SceneCounts&) const = default;
};

struct MetricsReport {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
    std::vector<SceneCounts> per_scene;
};

/// Precision/recall with the 0/0 -> 1 convention; F1 is 0 when P + R == 0.
MetricsReport make_report(std::vector<SceneCounts> per_scene);
double f1_score(const SceneCounts& counts);

struct MatchOptions {
    double iou_threshold = 0.5; // strict: a pair needs IoU > threshold
    double lane_width = 30.0;
    Canvas canvas;
};

/// Greedy one-to-one matching in descending IoU (ties by prediction, then GT index).
SceneCounts match_scene(const std::vector<Polyline>& pred, const std::vector<Polyline>& gt, const MatchOptions& options);

struct SceneLanes {
    std::vector<Polyline> pred;
    std::vector<Polyline> gt;
};

MetricsReport match_and_score(const std::vector<SceneLanes>& scenes, const MatchOptions& options = {});

struct PointAccuracy {
    std::uint64_t correct = 0;
    std::uint64_t total = 0;
    double accuracy = 1.0;
};

/// Counts GT points whose row has a prediction with |dx| < tolerance on the
/// matched lane. Lanes are paired one-to-one, greedily by correct-point count.
std::uint64_t tusimple_scene_correct(const std::vector<Polyline>& pred, const std::vector<Polyline>& gt,
                                     double x_tolerance);
PointAccuracy tusimple_accuracy(const std::vector<SceneLanes>& scenes, double x_tolerance = 20.0);

} // namespace curvelane
