#include "deskmon/features/mouse.hpp"

#include <cmath>
#include <map>

namespace deskmon::features {
namespace {

struct Point {
    std::int64_t t = 0;
    double x = 0.0;
    double y = 0.0;
};

double heading_change(const Point& a, const Point& b, const Point& c)
{
    const double ux = b.x - a.x, uy = b.y - a.y;
    const double vx = c.x - b.x, vy = c.y - b.y;
    return std::abs(std::atan2(ux * vy - uy * vx, ux * vx + uy * vy));
}

}  // namespace

MouseFeatures mouse_features(std::span<const MouseEvent> events, const MouseConfig& config)
{
    MouseFeatures f;
    std::vector<Point> path;
    std::map<MouseButton, std::int64_t> pressed_at;

    for (const auto& e : events) {
        switch (e.kind) {
        case MouseKind::move:
        case MouseKind::drag: {
            const Point p{e.raw_ts.micros, static_cast<double>(e.x), static_cast<double>(e.y)};
            if (!path.empty() && p.t == path.back().t) {
                ++f.diagnostics.dropped_zero_dt;
                break;
            }
            path.push_back(p);
            break;
        }
        case MouseKind::press:
            pressed_at.try_emplace(e.button, e.raw_ts.micros);
            break;
        case MouseKind::release: {
            auto it = pressed_at.find(e.button);
            if (it == pressed_at.end()) {
                ++f.diagnostics.orphan_releases;
                break;
            }
            f.click_durations_ms.push_back(static_cast<double>(e.raw_ts.micros - it->second) / 1000.0);
            pressed_at.erase(it);
            break;
        }
        case MouseKind::wheel:
            ++f.wheel_events;
            break;
        }
    }

    for (std::size_t i = 1; i < path.size(); ++i) {
        const double d = std::hypot(path[i].x - path[i - 1].x, path[i].y - path[i - 1].y);
        const double dt_s = static_cast<double>(path[i].t - path[i - 1].t) * 1e-6;
        f.path_length += d;
        f.velocities.push_back({SessionTime{path[i].t}, d / dt_s});
    }
    for (std::size_t i = 1; i < f.velocities.size(); ++i) {
        const double dt_s = static_cast<double>(f.velocities[i].t.micros - f.velocities[i - 1].t.micros) * 1e-6;
        f.accelerations.push_back({f.velocities[i].t, (f.velocities[i].value - f.velocities[i - 1].value) / dt_s});
    }

    std::vector<Point> merged;
    for (const auto& p : path) {
        if (merged.empty() || std::hypot(p.x - merged.back().x, p.y - merged.back().y) >= config.curvature_merge_px) {
            merged.push_back(p);
        }
    }
    double turning = 0.0;
    double arc = 0.0;
    for (std::size_t i = 1; i < merged.size(); ++i) {
        arc += std::hypot(merged[i].x - merged[i - 1].x, merged[i].y - merged[i - 1].y);
        if (i >= 2) turning += heading_change(merged[i - 2], merged[i - 1], merged[i]);
    }
    f.mean_curvature = arc > 0 ? turning / arc : 0.0;

    if (events.size() >= 2) {
        const double total = static_cast<double>(events.back().raw_ts.micros - events.front().raw_ts.micros);
        double idle = 0.0;
        const double threshold_us = config.idle_threshold_ms * 1000.0;
        for (std::size_t i = 1; i < events.size(); ++i) {
            const double dt = static_cast<double>(events[i].raw_ts.micros - events[i - 1].raw_ts.micros);
            if (dt > threshold_us) idle += dt;
        }
        if (total > 0) f.idle_fraction = idle / total;
    }
    return f;
}

}  // namespace deskmon::features
