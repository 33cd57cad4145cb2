#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "scenic/math.hpp"

namespace scenic {

struct Gate {
    Vec3 center;
    Vec3 normal;       // unit, points along the direction of travel
    double half_width = 1.0;
};

struct Aabb {
    Vec3 lo;
    Vec3 hi;

    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
               p.z >= lo.z && p.z <= hi.z;
    }
    Vec3 extent() const { return hi - lo; }
};

// Closed gate-to-gate polygonal race path. Progress is the arc-length
// fraction along the path, wrapping at 1.0; gate 0 is the path origin.
class Track {
public:
    Track(std::vector<Gate> gates, Aabb arena) : gates_(std::move(gates)), arena_(arena) {
        if (gates_.size() < 3) throw std::invalid_argument("Track: need at least 3 gates");
        const std::size_t n = gates_.size();
        cum_length_.resize(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 a = gates_[i].center;
            const Vec3 b = gates_[(i + 1) % n].center;
            const double len = (b - a).norm();
            if (len < 1e-9)
                throw std::invalid_argument("Track: consecutive gate centers coincide");
            cum_length_[i + 1] = cum_length_[i] + len;
        }
        for (auto& g : gates_) {
            g.normal = g.normal.normalized();
            if (g.half_width <= 0.0) throw std::invalid_argument("Track: half_width <= 0");
            if (!arena_.contains(g.center))
                throw std::invalid_argument("Track: gate outside arena");
        }
    }

    const std::vector<Gate>& gates() const { return gates_; }
    std::size_t gate_count() const { return gates_.size(); }
    const Gate& gate(std::size_t i) const { return gates_[i % gates_.size()]; }
    const Aabb& arena() const { return arena_; }
    double total_length() const { return cum_length_.back(); }

    // Segment i runs from gate i to gate i+1 (mod n).
    Vec3 segment_start(std::size_t i) const { return gates_[i % gates_.size()].center; }
    Vec3 segment_end(std::size_t i) const { return gates_[(i + 1) % gates_.size()].center; }
    double segment_length(std::size_t i) const {
        i %= gates_.size();
        return cum_length_[i + 1] - cum_length_[i];
    }
    Vec3 segment_direction(std::size_t i) const {
        return (segment_end(i) - segment_start(i)) / segment_length(i);
    }

    // Progress of the closest point of segment i to `position`, plus the
    // perpendicular distance. t is clamped to the segment.
    struct SegmentProjection {
        double progress;
        double distance;
        double t;  // parameter along the segment in [0, 1]
    };

    SegmentProjection project_on_segment(std::size_t i, const Vec3& position) const {
        i %= gates_.size();
        const Vec3 a = segment_start(i);
        const Vec3 d = segment_end(i) - a;
        const double len2 = d.squared_norm();
        double t = (position - a).dot(d) / len2;
        t = clamp(t, 0.0, 1.0);
        const Vec3 closest = a + d * t;
        const double s = cum_length_[i] + t * segment_length(i);
        double progress = s / total_length();
        if (progress >= 1.0) progress -= 1.0;
        return {progress, (position - closest).norm(), t};
    }

    // Arc-length fraction of the closest point on the full path.
    double progress_of(const Vec3& position) const {
        if (!arena_.contains(position))
            throw std::domain_error("progress_of: position outside arena");
        double best_dist = 1e300;
        double best_progress = 0.0;
        for (std::size_t i = 0; i < gates_.size(); ++i) {
            const SegmentProjection p = project_on_segment(i, position);
            if (p.distance < best_dist) {
                best_dist = p.distance;
                best_progress = p.progress;
            }
        }
        return best_progress;
    }

    // Point on the path at a given progress fraction.
    Vec3 point_at(double progress) const {
        progress -= std::floor(progress);
        const double s = progress * total_length();
        for (std::size_t i = 0; i < gates_.size(); ++i) {
            if (s <= cum_length_[i + 1] || i + 1 == gates_.size()) {
                const double t = (s - cum_length_[i]) / segment_length(i);
                return segment_start(i) + (segment_end(i) - segment_start(i)) * t;
            }
        }
        return gates_[0].center;
    }

    // Among segments passing within `slack` of the closest one, pick the one
    // whose travel direction best aligns with `heading`. This disambiguates
    // the figure-8 crossing the way a forward-facing camera would.
    std::size_t nearest_segment(const Vec3& position, const Vec3& heading,
                                double slack = 2.0) const {
        double best_dist = 1e300;
        std::vector<double> dists(gates_.size());
        for (std::size_t i = 0; i < gates_.size(); ++i) {
            dists[i] = project_on_segment(i, position).distance;
            if (dists[i] < best_dist) best_dist = dists[i];
        }
        std::size_t best = 0;
        double best_align = -2.0;
        for (std::size_t i = 0; i < gates_.size(); ++i) {
            if (dists[i] > best_dist + slack) continue;
            const double align = segment_direction(i).dot(heading);
            if (align > best_align) {
                best_align = align;
                best = i;
            }
        }
        return best;
    }

private:
    std::vector<Gate> gates_;
    Aabb arena_;
    std::vector<double> cum_length_;
};

// Circular distance between two progress fractions, in [0, 0.5].
inline double progress_diff(double a, double b) {
    double d = std::fabs(a - b);
    if (d > 0.5) d = 1.0 - d;
    return d;
}

// Planar figure-8 (lemniscate of Gerono) sampled at `n_gates` points,
// inside a 20 x 20 x 5 m arena. Gate normals follow the travel direction.
// The parameter offset keeps gates away from the self-crossing at the origin.
inline Track make_figure8_track(std::size_t n_gates = 7, double scale_x = 8.0,
                                double scale_y = 8.0, double altitude = 2.0,
                                double half_width = 1.0) {
    std::vector<Gate> gates;
    gates.reserve(n_gates);
    const double t0 = kPi / (2.0 * static_cast<double>(n_gates));
    for (std::size_t k = 0; k < n_gates; ++k) {
        const double t = t0 + 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n_gates);
        const Vec3 center{scale_x * std::sin(t),
                          0.5 * scale_y * std::sin(2.0 * t), altitude};
        const Vec3 tangent{scale_x * std::cos(t), scale_y * std::cos(2.0 * t), 0.0};
        gates.push_back({center, tangent.normalized(), half_width});
    }
    const Aabb arena{{-10.0, -10.0, 0.0}, {10.0, 10.0, 5.0}};
    return Track(std::move(gates), arena);
}

}  // namespace scenic
