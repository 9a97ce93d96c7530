#pragma once

#include <cmath>
#include <vector>

namespace ri::sim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 heading_dir(double heading) { return {std::cos(heading), std::sin(heading)}; }

struct Segment {
    Vec2 a;
    Vec2 b;
};

struct Disc {
    Vec2 center;
    double radius = 0.0;
};

// Distance along the ray to the first intersection, +inf when it misses.
double ray_segment(const Vec2& origin, const Vec2& dir, const Segment& s);
double ray_disc(const Vec2& origin, const Vec2& dir, const Disc& d);

double point_segment_distance(const Vec2& p, const Segment& s);

// Rectangular ring course: an axis-aligned outer rectangle with a
// concentric inner rectangle, leaving a corridor of constant width. The
// origin sits at the outer rectangle's bottom-left corner.
struct TrackMap {
    double outer_width = 20.0;
    double outer_height = 10.0;
    double corridor_width = 1.5;

    std::vector<Segment> walls() const;  // 4 outer + 4 inner segments

    // Centerline loop, parameterized by arc length from the start point
    // (mid-left corridor) travelling counterclockwise: down the left
    // side, along the bottom, up the right side, back across the top.
    double centerline_perimeter() const;
    Vec2 centerline_point(double s) const;
    double centerline_heading(double s) const;

    Vec2 start_point() const { return {corridor_width / 2.0, outer_height / 2.0}; }
    double start_heading() const { return -M_PI / 2.0; }

    bool inside_corridor(const Vec2& p, double margin) const;
};

}  // namespace ri::sim
