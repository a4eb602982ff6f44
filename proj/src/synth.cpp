// SPDX-License-Identifier: Apache-2.0
#include "curvelane/synth.hpp"

#include <cmath>
#include <random>

#include "curvelane/errors.hpp"
#include "curvelane/random.hpp"

namespace curvelane {

void SynthSceneConfig::validate() const
{
    if (num_scenes <= 0) {
        throw ConstraintError("num_scenes", "must be positive");
    }
    if (!(curvature_min > 0.0) || curvature_max < curvature_min) {
        throw ConstraintError("curvature", "need 0 < min <= max");
    }
    if (!(remote_noise_sigma >= 0.0)) {
        throw ConstraintError("remote_noise_sigma", "must be non-negative");
    }
    if (lanes_per_scene <= 0 || lanes_per_scene > 4) {
        throw ConstraintError("lanes_per_scene", "must be in [1, 4]");
    }
    if (image_width < 200 || image_height < 100 || anchor_rows < 2 || !(noise_range > 0.0)) {
        throw ConstraintError("image", "canvas too small or bad anchor/noise settings");
    }
}

namespace {

struct Lane {
    double x_bottom = 0.0;
    double slope = 0.0; // dx per px upwards
    double curvature = 0.0;
    double cubic = 0.0;
    double y_top = 0.0;

    double x_at(double y, double height) const
    {
        const double d = height - y;
        return x_bottom + slope * d + 0.5 * curvature * d * d + cubic * d * d * d;
    }
};

struct HeadShape {
    int level;
    int grid_w;
    int grid_h;
};

constexpr HeadShape kHeads[] = {{2, 20, 8}, {3, 10, 4}};

} // namespace

std::vector<io::ProposalScene> generate_synthetic_scenes(const SynthSceneConfig& config)
{
    config.validate();
    const double W = config.image_width;
    const double H = config.image_height;
    const auto layout = AnchorLayout::uniform(W, H, config.anchor_rows);

    std::vector<io::ProposalScene> scenes;
    scenes.reserve(static_cast<std::size_t>(config.num_scenes));
    for (int s = 0; s < config.num_scenes; ++s) {
        Rng rng = derive_stream(config.seed, static_cast<std::uint64_t>(s));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> normal(0.0, 1.0);

        // Lanes start in equal-width bands along the bottom edge so they never merge.
        std::vector<Lane> lanes;
        const double band = W / config.lanes_per_scene;
        for (int l = 0; l < config.lanes_per_scene; ++l) {
            Lane lane;
            lane.x_bottom = band * (l + 0.3 + 0.4 * unit(rng));
            lane.slope = (lane.x_bottom < W / 2 ? 1.0 : -1.0) * (0.2 + 0.4 * unit(rng));
            const double k = config.curvature_min + (config.curvature_max - config.curvature_min) * unit(rng);
            lane.curvature = (unit(rng) < 0.5 ? -k : k);
            lane.cubic = unit(rng) < 0.5 ? 0.0 : lane.curvature * (unit(rng) - 0.5) / 300.0;
            lane.y_top = H * (0.25 + 0.15 * unit(rng));
            lanes.push_back(lane);
        }

        io::ProposalScene scene;
        scene.image_id = "synth_" + std::to_string(s);
        scene.proposals.layout = layout;
        std::vector<Polyline> gt;
        for (const auto& lane : lanes) {
            // Annotated every 10 px from the bottom edge, like CULane labels.
            Polyline line;
            for (double y = H - 10.0 * std::floor((H - lane.y_top) / 10.0); y <= H; y += 10.0) {
                const double x = lane.x_at(y, H);
                if (x >= 0.0 && x < W) {
                    line.push_back({x, y});
                }
            }
            if (line.size() >= 2) {
                gt.push_back(std::move(line));
            }
        }

        for (const auto& shape : kHeads) {
            HeadGrid head;
            head.level = shape.level;
            head.grid_w = shape.grid_w;
            head.grid_h = shape.grid_h;
            const double cw = W / shape.grid_w;
            const double ch = H / shape.grid_h;
            head.cells.resize(static_cast<std::size_t>(shape.grid_w * shape.grid_h));
            for (int r = 0; r < shape.grid_h; ++r) {
                for (int c = 0; c < shape.grid_w; ++c) {
                    auto& cell = head.cells[static_cast<std::size_t>(r * shape.grid_w + c)];
                    cell.center_x = (c + 0.5) * cw;
                    cell.center_y = (r + 0.5) * ch;
                    cell.score = 0.01 + 0.29 * unit(rng);
                    cell.offsets.assign(layout.rows.size(), std::nullopt);
                    cell.end_y = H;
                }
            }
            for (const auto& lane : lanes) {
                for (int r = 0; r < shape.grid_h; ++r) {
                    const double cy = (r + 0.5) * ch;
                    if (cy < lane.y_top) {
                        continue;
                    }
                    const double x = lane.x_at(cy, H);
                    if (x < 0.0 || x >= W) {
                        continue;
                    }
                    const int c = static_cast<int>(x / cw);
                    auto& cell = head.cells[static_cast<std::size_t>(r * shape.grid_w + c)];
                    // Confidence falls off towards the far end of the lane.
                    const double remoteness = (H - cy) / (H - lane.y_top);
                    cell.score = 0.95 - 0.35 * remoteness - 0.04 * unit(rng);
                    cell.end_y = lane.y_top;
                    const double xi = normal(rng);
                    for (std::size_t z = 0; z < layout.rows.size(); ++z) {
                        const double y = layout.rows[z];
                        const double truth = lane.x_at(y, H);
                        if (y < lane.y_top || truth < 0.0 || truth >= W) {
                            cell.offsets[z] = std::nullopt;
                            continue;
                        }
                        const double error = config.remote_noise_sigma * xi * std::abs(y - cy) / config.noise_range;
                        cell.offsets[z] = truth + error - cell.center_x;
                    }
                }
            }
            scene.proposals.heads.push_back(std::move(head));
        }
        scene.gt_lanes = std::move(gt);
        scenes.push_back(std::move(scene));
    }
    return scenes;
}

} // namespace curvelane
