// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

namespace curvelane {

/// Image size plus the Z vertical anchor rows (strictly increasing, in [0, height)).
struct AnchorLayout {
    double image_width = 512.0;
    double image_height = 288.0;
    std::vector<double> rows;

    /// Z evenly spaced rows y_z = z * height / Z.
    static AnchorLayout uniform(double width, double height, int rows);

    bool operator==(const AnchorLayout&) const = default;
};

/// Throws ConstraintError if rows are not strictly increasing inside the image or Z < 2.
void validate(const AnchorLayout& layout);

/// One grid proposal. Offsets are horizontal displacements from center_x, one per anchor row;
/// a missing entry means the cell predicts nothing on that row.
struct GridCell {
    double center_x = 0.0;
    double center_y = 0.0;
    double score = 0.0;
    std::vector<std::optional<double>> offsets;
    double end_y = 0.0;

    bool operator==(const GridCell&) const = default;
};

struct HeadGrid {
    int level = 1;
    int grid_w = 0;
    int grid_h = 0;
    std::vector<GridCell> cells; // row-major, grid_w * grid_h

    bool operator==(const HeadGrid&) const = default;
};

struct LaneProposalSet {
    AnchorLayout layout;
    std::vector<HeadGrid> heads;

    bool operator==(const LaneProposalSet&) const = default;
};

/// Which grid cell produced a point, with that cell's (masked) score.
struct PointSource {
    int level = 0;
    int cell = 0;
    double score = 0.0;
    double center_y = 0.0;

    bool operator==(const PointSource&) const = default;
};

struct LanePoint {
    double x = 0.0;
    double y = 0.0;
    PointSource source;

    bool operator==(const LanePoint&) const = default;
};

/// Decoded lane; points sorted by increasing y.
struct LaneLine {
    std::vector<LanePoint> points;
    double score = 0.0;

    bool operator==(const LaneLine&) const = default;
};

/// Points at every anchor row at or below end_y. Throws DegenerateLineError with fewer than 2 points.
LaneLine decode_cell(const GridCell& cell, const AnchorLayout& layout, int level = 0, int cell_index = 0);

/// Mean |x_a - x_b| over anchor rows present in both lines; +infinity without shared rows.
double line_distance(const LaneLine& a, const LaneLine& b);

/// One line per cell whose score reaches `threshold`; degenerate cells are skipped.
/// Scores are taken as given, so masking has to happen before this call.
std::vector<LaneLine> decode_all(const LaneProposalSet& proposals, double threshold);

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

using Polyline = std::vector<Point2>;

Polyline to_polyline(const LaneLine& line);
/// Points get an empty source and the given score.
LaneLine from_polyline(const Polyline& points, double score = 1.0);

/// Same-row test used when comparing anchor-aligned points.
inline bool same_row(double a, double b) { return a - b < 1e-9 && b - a < 1e-9; }

} // namespace curvelane
