// SPDX-License-Identifier: Apache-2.0
#include "curvelane/lane_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "curvelane/errors.hpp"

namespace curvelane {

AnchorLayout AnchorLayout::uniform(double width, double height, int rows)
{
    AnchorLayout layout;
    layout.image_width = width;
    layout.image_height = height;
    layout.rows.reserve(static_cast<std::size_t>(rows));
    for (int z = 0; z < rows; ++z) {
        layout.rows.push_back(z * height / rows);
    }
    return layout;
}

void validate(const AnchorLayout& layout)
{
    if (layout.rows.size() < 2) {
        throw ConstraintError("layout.rows", "at least two anchor rows are required");
    }
    for (std::size_t z = 0; z < layout.rows.size(); ++z) {
        double y = layout.rows[z];
        if (!(y >= 0.0 && y < layout.image_height) || (z > 0 && y <= layout.rows[z - 1])) {
            throw ConstraintError("layout.rows[" + std::to_string(z) + "]",
                                  "rows must be strictly increasing within [0, height)");
        }
    }
}

LaneLine decode_cell(const GridCell& cell, const AnchorLayout& layout, int level, int cell_index)
{
    LaneLine line;
    line.score = cell.score;
    const std::size_t n = std::min(cell.offsets.size(), layout.rows.size());
    for (std::size_t z = 0; z < n; ++z) {
        const double y = layout.rows[z];
        if (y < cell.end_y || !cell.offsets[z]) {
            continue;
        }
        line.points.push_back({cell.center_x + *cell.offsets[z], y, {level, cell_index, cell.score, cell.center_y}});
    }
    if (line.points.size() < 2) {
        throw DegenerateLineError("cell " + std::to_string(cell_index) + " on level " + std::to_string(level) +
                                  " decodes to fewer than two points");
    }
    return line;
}

double line_distance(const LaneLine& a, const LaneLine& b)
{
    double total = 0.0;
    std::size_t shared = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.points.size() && j < b.points.size()) {
        const double ya = a.points[i].y;
        const double yb = b.points[j].y;
        if (same_row(ya, yb)) {
            total += std::abs(a.points[i].x - b.points[j].x);
            ++shared;
            ++i;
            ++j;
        } else if (ya < yb) {
            ++i;
        } else {
            ++j;
        }
    }
    return shared == 0 ? std::numeric_limits<double>::infinity() : total / static_cast<double>(shared);
}

std::vector<LaneLine> decode_all(const LaneProposalSet& proposals, double threshold)
{
    std::vector<LaneLine> out;
    for (const auto& head : proposals.heads) {
        for (std::size_t k = 0; k < head.cells.size(); ++k) {
            const auto& cell = head.cells[k];
            if (!(cell.score >= threshold)) {
                continue;
            }
            try {
                out.push_back(decode_cell(cell, proposals.layout, head.level, static_cast<int>(k)));
            } catch (const DegenerateLineError&) {
                // cells ending below the last anchor row propose nothing
            }
        }
    }
    return out;
}

Polyline to_polyline(const LaneLine& line)
{
    Polyline out;
    out.reserve(line.points.size());
    for (const auto& p : line.points) {
        out.push_back({p.x, p.y});
    }
    return out;
}

LaneLine from_polyline(const Polyline& points, double score)
{
    LaneLine line;
    line.score = score;
    for (const auto& p : points) {
        line.points.push_back({p.x, p.y, {0, -1, score, p.y}});
    }
    return line;
}

} // namespace curvelane
