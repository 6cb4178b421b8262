#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace wellness {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
    friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::sqrt(dot(a, a)); }
inline double distance(Point a, Point b) { return norm(a - b); }

// Axis-aligned box in pixel coordinates, min corner exclusive of max corner.
struct BBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    bool valid() const { return x_min < x_max && y_min < y_max && x_min >= 0.0 && y_min >= 0.0; }
    double area() const { return (x_max - x_min) * (y_max - y_min); }
    Point center() const { return {(x_min + x_max) * 0.5, (y_min + y_max) * 0.5}; }

    friend bool operator==(const BBox& a, const BBox& b) {
        return a.x_min == b.x_min && a.y_min == b.y_min && a.x_max == b.x_max && a.y_max == b.y_max;
    }
};

inline double intersection_area(const BBox& a, const BBox& b) {
    const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (w <= 0.0 || h <= 0.0) return 0.0;
    return w * h;
}

inline double iou(const BBox& a, const BBox& b) {
    const double inter = intersection_area(a, b);
    if (inter <= 0.0) return 0.0;
    return inter / (a.area() + b.area() - inter);
}

// Does the ray origin + t*dir (t >= 0) hit the box? Slab test; an origin
// already inside the box counts as a hit.
inline bool ray_intersects_box(Point origin, Point dir, const BBox& box) {
    double t_lo = 0.0;
    double t_hi = std::numeric_limits<double>::infinity();
    const double o[2] = {origin.x, origin.y};
    const double d[2] = {dir.x, dir.y};
    const double lo[2] = {box.x_min, box.y_min};
    const double hi[2] = {box.x_max, box.y_max};
    for (int axis = 0; axis < 2; ++axis) {
        if (d[axis] == 0.0) {
            if (o[axis] < lo[axis] || o[axis] > hi[axis]) return false;
            continue;
        }
        double t0 = (lo[axis] - o[axis]) / d[axis];
        double t1 = (hi[axis] - o[axis]) / d[axis];
        if (t0 > t1) std::swap(t0, t1);
        t_lo = std::max(t_lo, t0);
        t_hi = std::min(t_hi, t1);
        if (t_lo > t_hi) return false;
    }
    return true;
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace wellness
