// SPDX-License-Identifier: Apache-2.0
#include "curvelane/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "curvelane/errors.hpp"

namespace curvelane {

namespace {

double segment_distance2(double px, double py, const Point2& a, const Point2& b)
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(((px - a.x) * dx + (py - a.y) * dy) / len2, 0.0, 1.0);
    }
    const double ex = px - (a.x + t * dx);
    const double ey = py - (a.y + t * dy);
    return ex * ex + ey * ey;
}

struct PixelSpan {
    int lo = 0;
    int hi = -1;
};

/// Pixels whose centers fall inside [lo, hi], clipped to [0, extent).
PixelSpan center_span(double lo, double hi, int extent)
{
    PixelSpan s;
    s.lo = std::max(0, static_cast<int>(std::ceil(lo - 0.5)));
    s.hi = std::min(extent - 1, static_cast<int>(std::floor(hi - 0.5)));
    return s;
}

} // namespace

LaneMask rasterize_lane(const Polyline& line, double width, Canvas canvas)
{
    if (line.size() < 2) {
        throw DegenerateLineError("a lane needs at least two points to rasterize");
    }
    const double r = width / 2.0;
    const double r2 = r * r;
    LaneMask mask;
    mask.canvas = canvas;

    double min_x = line[0].x, max_x = line[0].x, min_y = line[0].y, max_y = line[0].y;
    for (const auto& p : line) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const auto bx = center_span(min_x - r, max_x + r, canvas.width);
    const auto by = center_span(min_y - r, max_y + r, canvas.height);
    if (bx.hi < bx.lo || by.hi < by.lo) {
        return mask;
    }
    const int bw = bx.hi - bx.lo + 1;
    const int bh = by.hi - by.lo + 1;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(bw) * static_cast<std::size_t>(bh), 0);

    for (std::size_t s = 0; s + 1 < line.size(); ++s) {
        const auto& a = line[s];
        const auto& b = line[s + 1];
        const auto sx = center_span(std::min(a.x, b.x) - r, std::max(a.x, b.x) + r, canvas.width);
        const auto sy = center_span(std::min(a.y, b.y) - r, std::max(a.y, b.y) + r, canvas.height);
        for (int j = sy.lo; j <= sy.hi; ++j) {
            auto* row = &bits[static_cast<std::size_t>(j - by.lo) * static_cast<std::size_t>(bw)];
            for (int i = sx.lo; i <= sx.hi; ++i) {
                if (!row[i - bx.lo] && segment_distance2(i + 0.5, j + 0.5, a, b) <= r2) {
                    row[i - bx.lo] = 1;
                }
            }
        }
    }

    for (int j = 0; j < bh; ++j) {
        for (int i = 0; i < bw; ++i) {
            if (bits[static_cast<std::size_t>(j) * static_cast<std::size_t>(bw) + static_cast<std::size_t>(i)]) {
                mask.pixels.push_back(static_cast<std::uint32_t>(j + by.lo) * static_cast<std::uint32_t>(canvas.width) +
                                      static_cast<std::uint32_t>(i + bx.lo));
            }
        }
    }
    return mask;
}

LaneMask rasterize_lane(const LaneLine& line, double width, Canvas canvas)
{
    return rasterize_lane(to_polyline(line), width, canvas);
}

double mask_iou(const LaneMask& a, const LaneMask& b)
{
    std::size_t inter = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.pixels.size() && j < b.pixels.size()) {
        if (a.pixels[i] == b.pixels[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a.pixels[i] < b.pixels[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t uni = a.pixels.size() + b.pixels.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double lane_iou(const Polyline& a, const Polyline& b, double width, Canvas canvas)
{
    return mask_iou(rasterize_lane(a, width, canvas), rasterize_lane(b, width, canvas));
}

double lane_iou(const LaneLine& a, const LaneLine& b, double width, Canvas canvas)
{
    return lane_iou(to_polyline(a), to_polyline(b), width, canvas);
}

double f1_score(const SceneCounts& c)
{
    const double precision = c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double recall = c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

MetricsReport make_report(std::vector<SceneCounts> per_scene)
{
    MetricsReport r;
    SceneCounts total;
    for (const auto& c : per_scene) {
        total += c;
    }
    r.tp = total.tp;
    r.fp = total.fp;
    r.fn = total.fn;
    r.precision = total.tp + total.fp == 0 ? 1.0 : static_cast<double>(total.tp) / static_cast<double>(total.tp + total.fp);
    r.recall = total.tp + total.fn == 0 ? 1.0 : static_cast<double>(total.tp) / static_cast<double>(total.tp + total.fn);
    r.f1 = f1_score(total);
    r.per_scene = std::move(per_scene);
    return r;
}

SceneCounts match_scene(const std::vector<Polyline>& pred, const std::vector<Polyline>& gt, const MatchOptions& options)
{
    std::vector<LaneMask> pm;
    std::vector<LaneMask> gm;
    pm.reserve(pred.size());
    gm.reserve(gt.size());
    for (const auto& p : pred) {
        pm.push_back(rasterize_lane(p, options.lane_width, options.canvas));
    }
    for (const auto& g : gt) {
        gm.push_back(rasterize_lane(g, options.lane_width, options.canvas));
    }

    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < pm.size(); ++i) {
        for (std::size_t j = 0; j < gm.size(); ++j) {
            const double iou = mask_iou(pm[i], gm[j]);
            if (iou > options.iou_threshold) {
                pairs.emplace_back(iou, i, j);
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) {
            return std::get<0>(a) > std::get<0>(b);
        }
        return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
    });

    std::vector<bool> pred_used(pm.size(), false);
    std::vector<bool> gt_used(gm.size(), false);
    SceneCounts c;
    for (const auto& [iou, i, j] : pairs) {
        if (!pred_used[i] && !gt_used[j]) {
            pred_used[i] = true;
            gt_used[j] = true;
            ++c.tp;
        }
    }
    c.fp = pm.size() - c.tp;
    c.fn = gm.size() - c.tp;
    return c;
}

MetricsReport match_and_score(const std::vector<SceneLanes>& scenes, const MatchOptions& options)
{
    std::vector<SceneCounts> per_scene;
    per_scene.reserve(scenes.size());
    for (const auto& s : scenes) {
        per_scene.push_back(match_scene(s.pred, s.gt, options));
    }
    return make_report(std::move(per_scene));
}

namespace {

std::uint64_t correct_points(const Polyline& pred, const Polyline& gt, double tol)
{
    std::uint64_t n = 0;
    for (const auto& g : gt) {
        auto it = std::find_if(pred.begin(), pred.end(), [&](const Point2& p) { return same_row(p.y, g.y); });
        if (it != pred.end() && std::abs(it->x - g.x) < tol) {
            ++n;
        }
    }
    return n;
}

} // namespace

std::uint64_t tusimple_scene_correct(const std::vector<Polyline>& pred, const std::vector<Polyline>& gt,
                                     double x_tolerance)
{
    std::vector<std::tuple<std::uint64_t, std::size_t, std::size_t>> pairs;
    for (std::size_t j = 0; j < gt.size(); ++j) {
        for (std::size_t i = 0; i < pred.size(); ++i) {
            auto n = correct_points(pred[i], gt[j], x_tolerance);
            if (n > 0) {
                pairs.emplace_back(n, j, i);
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) {
            return std::get<0>(a) > std::get<0>(b);
        }
        return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
    });
    std::vector<bool> gt_used(gt.size(), false);
    std::vector<bool> pred_used(pred.size(), false);
    std::uint64_t correct = 0;
    for (const auto& [n, j, i] : pairs) {
        if (!gt_used[j] && !pred_used[i]) {
            gt_used[j] = true;
            pred_used[i] = true;
            correct += n;
        }
    }
    return correct;
}

PointAccuracy tusimple_accuracy(const std::vector<SceneLanes>& scenes, double x_tolerance)
{
    PointAccuracy acc;
    for (const auto& s : scenes) {
        acc.correct += tusimple_scene_correct(s.pred, s.gt, x_tolerance);
        for (const auto& g : s.gt) {
            acc.total += g.size();
        }
    }
    acc.accuracy = acc.total == 0 ? 1.0 : static_cast<double>(acc.correct) / static_cast<double>(acc.total);
    return acc;
}

} // namespace curvelane
