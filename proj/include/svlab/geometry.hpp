#pragma once
// Lines, prisms, direction nets and covering utilities.
//
// Direction conventions: directions are unit vectors identified with their
// antipodes via a canonical sign (first nonzero coordinate positive). Lines
// that participate in incidence sets additionally keep their direction within
// a fixed angular cap around e1.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "svlab/core.hpp"

namespace svlab {

// Unit vector with the canonical sign: v1 >= 0, with ties broken by v2, then
// v3, then v4. Rejects the zero vector.
Vec4 canonicalize_direction(const Vec4& v);

struct Line {
    Vec4 anchor;  // perpendicular foot of the line, anchor . dir = 0
    Vec4 dir;     // canonical unit direction

    Vec4 at(double t) const { return anchor + dir * t; }
};

// Line through a given point with the given (not necessarily unit) direction.
Line make_line(const Vec4& point, const Vec4& direction);

// Distance used for deduplication and cover clustering: direction angle plus
// perpendicular offset distance.
double line_distance(const Line& a, const Line& b);

struct Prism {
    Vec4 center;
    std::array<Vec4, 4> axes;        // orthonormal
    std::array<double, 4> half_len;  // descending

    // Throws invalid_argument when axes are not orthonormal to 1e-10 or the
    // half lengths are not positive and descending.
    void validate() const;
    bool contains(const Vec4& x, double slack = 0.0) const;
};

Prism make_prism(const Vec4& center, const std::array<Vec4, 4>& axes,
                 const std::array<double, 4>& half_len);

// True when the segment {line.at(t) : |t| <= 1} spends length >= 2 - tol
// inside the prism.
bool line_covered_by_prism(const Line& line, const Prism& prism, double tol);

enum class Metric { Euclidean, Angular };

// Size of the greedy delta-net of the point set: first-fit, keep a point iff
// it is farther than delta from every kept point. Within a factor 2 of the
// optimal covering number.
std::size_t covering_number(const std::vector<Vec4>& points, double delta, Metric metric);

// The kept indices of the greedy net, in input order.
std::vector<std::size_t> greedy_net(const std::vector<Vec4>& points, double delta,
                                    Metric metric);

// Directions sampled on S^3 inside the cap angle(v, e1) <= cap_angle, spaced
// by a Fibonacci-style spiral and greedily thinned: pairwise angle >= delta/2,
// and every cap direction lies within delta of some net point.
struct DirectionNet {
    double delta = 0.0;
    double cap_angle = 0.0;
    std::vector<Vec4> points;

    // Index of the nearest net point (angular), or -1 for an empty net.
    long nearest(const Vec4& v) const;

  private:
    friend DirectionNet build_direction_net(double, double);
    std::unordered_map<uint64_t, std::vector<uint32_t>> cells_;
    double cell_size_ = 0.0;
};

DirectionNet build_direction_net(double delta, double cap_angle);

// Greedy cover of a line family by prisms with long_axes long sides of
// half-length 1 and 4 - long_axes short sides of half-length t. Clusters
// lines on (direction, offset); for two and three long axes the clusters are
// grown along the extra long directions (strips and slabs). Every input line
// is covered by the prism of its cluster.
struct PrismCover {
    std::vector<Prism> prisms;
    std::vector<std::size_t> assignment;  // line index -> prism index
};

PrismCover greedy_prism_cover(const std::vector<Line>& lines, int long_axes, double t,
                              const Tolerances& tol = default_tol());

// Affine change of variables adapted to a prism with d long axes: rotates the
// prism frame to the standard one and dilates the short coordinates by 1/t,
// sending the prism onto the unit box.
struct RescaleMap {
    Vec4 center;
    std::array<Vec4, 4> axes;
    int long_axes = 0;
    double t = 1.0;

    Vec4 apply(const Vec4& x) const;
    Vec4 inverse(const Vec4& y) const;
    // Image direction of a line direction, renormalized and canonical.
    Vec4 map_direction(const Vec4& v) const;
};

RescaleMap prism_rescale_map(const Prism& prism, int long_axes, double t);

}  // namespace svlab
