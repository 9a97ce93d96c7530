#include <algorithm>
#include <limits>

#include "ri/sim/geometry.hpp"

namespace ri::sim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double ray_segment(const Vec2& origin, const Vec2& dir, const Segment& s) {
    // Solve origin + t*dir = a + u*(b-a), t >= 0, u in [0,1].
    const Vec2 e = s.b - s.a;
    const double denom = dir.x * e.y - dir.y * e.x;
    if (std::abs(denom) < 1e-12) return kInf;  // parallel
    const Vec2 w = s.a - origin;
    const double t = (w.x * e.y - w.y * e.x) / denom;
    const double u = (w.x * dir.y - w.y * dir.x) / denom;
    if (t < 0.0 || u < 0.0 || u > 1.0) return kInf;
    return t;
}

double ray_disc(const Vec2& origin, const Vec2& dir, const Disc& d) {
    const Vec2 to_center = d.center - origin;
    const double proj = to_center.dot(dir);
    const double closest2 = to_center.dot(to_center) - proj * proj;
    const double r2 = d.radius * d.radius;
    if (closest2 > r2) return kInf;
    const double half_chord = std::sqrt(r2 - closest2);
    const double t_near = proj - half_chord;
    if (t_near >= 0.0) return t_near;
    const double t_far = proj + half_chord;
    if (t_far >= 0.0) return 0.0;  // origin inside the disc
    return kInf;
}

double point_segment_distance(const Vec2& p, const Segment& s) {
    const Vec2 e = s.b - s.a;
    const double len2 = e.dot(e);
    if (len2 <= 0.0) return (p - s.a).norm();
    const double t = std::clamp((p - s.a).dot(e) / len2, 0.0, 1.0);
    return (p - (s.a + e * t)).norm();
}

std::vector<Segment> TrackMap::walls() const {
    const double w = outer_width;
    const double h = outer_height;
    const double c = corridor_width;
    std::vector<Segment> segs;
    // Outer rectangle.
    segs.push_back({{0, 0}, {w, 0}});
    segs.push_back({{w, 0}, {w, h}});
    segs.push_back({{w, h}, {0, h}});
    segs.push_back({{0, h}, {0, 0}});
    // Inner rectangle.
    segs.push_back({{c, c}, {w - c, c}});
    segs.push_back({{w - c, c}, {w - c, h - c}});
    segs.push_back({{w - c, h - c}, {c, h - c}});
    segs.push_back({{c, h - c}, {c, c}});
    return segs;
}

double TrackMap::centerline_perimeter() const {
    const double lw = outer_width - corridor_width;   // loop width
    const double lh = outer_height - corridor_width;  // loop height
    return 2.0 * (lw + lh);
}

Vec2 TrackMap::centerline_point(double s) const {
    const double half = corridor_width / 2.0;
    const double lw = outer_width - corridor_width;
    const double lh = outer_height - corridor_width;
    const double per = 2.0 * (lw + lh);
    s = std::fmod(s, per);
    if (s < 0) s += per;

    // Legs, starting mid-left heading down (counterclockwise loop).
    const double leg0 = outer_height / 2.0 - half;  // down to bottom-left corner
    if (s < leg0) return {half, outer_height / 2.0 - s};
    s -= leg0;
    if (s < lw) return {half + s, half};
    s -= lw;
    if (s < lh) return {outer_width - half, half + s};
    s -= lh;
    if (s < lw) return {outer_width - half - s, outer_height - half};
    s -= lw;
    return {half, outer_height - half - s};
}

double TrackMap::centerline_heading(double s) const {
    const double half = corridor_width / 2.0;
    const double lw = outer_width - corridor_width;
    const double lh = outer_height - corridor_width;
    const double per = 2.0 * (lw + lh);
    s = std::fmod(s, per);
    if (s < 0) s += per;

    const double leg0 = outer_height / 2.0 - half;
    if (s < leg0) return -M_PI / 2.0;
    s -= leg0;
    if (s < lw) return 0.0;
    s -= lw;
    if (s < lh) return M_PI / 2.0;
    s -= lh;
    if (s < lw) return M_PI;
    return -M_PI / 2.0;
}

bool TrackMap::inside_corridor(const Vec2& p, double margin) const {
    const double c = corridor_width;
    const bool in_outer = p.x >= margin && p.x <= outer_width - margin && p.y >= margin &&
                          p.y <= outer_height - margin;
    const bool in_inner = p.x > c - margin && p.x < outer_width - c + margin &&
                          p.y > c - margin && p.y < outer_height - c + margin;
    return in_outer && !in_inner;
}

}  // namespace ri::sim
