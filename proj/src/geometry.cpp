#include "svlab/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace svlab {

namespace {

// Packs a 4D integer cell into a hash key. Cells stay well inside 16 bits for
// every scale this code runs at.
uint64_t cell_key(const Vec4& x, double cell) {
    uint64_t k = 0;
    for (int i = 0; i < 4; ++i) {
        long c = std::lround(std::floor(x[i] / cell));
        k = (k << 16) | static_cast<uint64_t>(static_cast<uint16_t>(c + 32768));
    }
    return k;
}

void neighbor_cells(const Vec4& x, double cell, std::vector<uint64_t>& out) {
    out.clear();
    long base[4];
    for (int i = 0; i < 4; ++i) base[i] = std::lround(std::floor(x[i] / cell));
    for (int d0 = -1; d0 <= 1; ++d0)
        for (int d1 = -1; d1 <= 1; ++d1)
            for (int d2 = -1; d2 <= 1; ++d2)
                for (int d3 = -1; d3 <= 1; ++d3) {
                    uint64_t k = 0;
                    long idx[4] = {base[0] + d0, base[1] + d1, base[2] + d2, base[3] + d3};
                    for (int i = 0; i < 4; ++i)
                        k = (k << 16) |
                            static_cast<uint64_t>(static_cast<uint16_t>(idx[i] + 32768));
                    out.push_back(k);
                }
}

// Orthonormal completion: given k orthonormal vectors, extend to 4 using the
// coordinate directions least aligned with the span.
std::array<Vec4, 4> complete_frame(const std::vector<Vec4>& given) {
    std::array<Vec4, 4> frame{};
    int have = static_cast<int>(given.size());
    for (int i = 0; i < have; ++i) frame[i] = given[i];
    int filled = have;
    while (filled < 4) {
        // Pick the coordinate axis with the smallest projection onto the span.
        int best = -1;
        double best_res = -1.0;
        for (int a = 0; a < 4; ++a) {
            Vec4 e{};
            e[a] = 1.0;
            for (int j = 0; j < filled; ++j) e -= frame[j] * dot(e, frame[j]);
            double r = norm(e);
            if (r > best_res) {
                best_res = r;
                best = a;
            }
        }
        Vec4 e{};
        e[best] = 1.0;
        for (int j = 0; j < filled; ++j) e -= frame[j] * dot(e, frame[j]);
        frame[filled++] = normalized(e);
    }
    return frame;
}

}  // namespace

Vec4 canonicalize_direction(const Vec4& v) {
    Vec4 u = normalized(v);
    for (int i = 0; i < 4; ++i) {
        if (u[i] > 0.0) return u;
        if (u[i] < 0.0) return -u;
    }
    throw std::invalid_argument("canonicalize_direction: zero vector");
}

Line make_line(const Vec4& point, const Vec4& direction) {
    Line l;
    l.dir = canonicalize_direction(direction);
    l.anchor = point - l.dir * dot(point, l.dir);
    return l;
}

double line_distance(const Line& a, const Line& b) {
    double ang = angle_between(a.dir, b.dir);
    ang = std::min(ang, M_PI - ang);  // directions are line-like
    return ang + dist(a.anchor, b.anchor);
}

void Prism::validate() const {
    for (int i = 0; i < 4; ++i) {
        if (!(half_len[i] > 0.0)) throw std::invalid_argument("Prism: nonpositive side");
        if (i > 0 && half_len[i] > half_len[i - 1] + 1e-12)
            throw std::invalid_argument("Prism: half lengths not descending");
        for (int j = i; j < 4; ++j) {
            double d = dot(axes[i], axes[j]) - (i == j ? 1.0 : 0.0);
            if (std::abs(d) > 1e-10)
                throw std::invalid_argument("Prism: axes not orthonormal");
        }
    }
}

bool Prism::contains(const Vec4& x, double slack) const {
    Vec4 r = x - center;
    for (int i = 0; i < 4; ++i)
        if (std::abs(dot(r, axes[i])) > half_len[i] + slack) return false;
    return true;
}

Prism make_prism(const Vec4& center, const std::array<Vec4, 4>& axes,
                 const std::array<double, 4>& half_len) {
    Prism p{center, axes, half_len};
    p.validate();
    return p;
}

bool line_covered_by_prism(const Line& line, const Prism& prism, double tol) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    Vec4 r = line.anchor - prism.center;
    for (int i = 0; i < 4; ++i) {
        double u = dot(r, prism.axes[i]);
        double w = dot(line.dir, prism.axes[i]);
        double h = prism.half_len[i];
        if (std::abs(w) < 1e-14) {
            if (std::abs(u) > h) return false;
            continue;
        }
        double t0 = (-h - u) / w;
        double t1 = (h - u) / w;
        if (t0 > t1) std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
        if (hi - lo < 2.0 - tol) return false;
    }
    return hi - lo >= 2.0 - tol;
}

std::vector<std::size_t> greedy_net(const std::vector<Vec4>& points, double delta,
                                    Metric metric) {
    if (delta <= 0.0) throw std::invalid_argument("greedy_net: delta <= 0");
    std::vector<std::size_t> kept;
    // Threshold in chord units for the angular metric.
    double thr = (metric == Metric::Angular) ? 2.0 * std::sin(std::min(delta, M_PI) / 2.0)
                                             : delta;
    double cell = std::max(thr, 1e-9);
    std::unordered_map<uint64_t, std::vector<uint32_t>> grid;
    std::vector<uint64_t> nbr;
    std::vector<Vec4> canon(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        canon[i] = (metric == Metric::Angular) ? canonicalize_direction(points[i]) : points[i];

    auto near_kept = [&](const Vec4& p) {
        neighbor_cells(p, cell, nbr);
        for (uint64_t k : nbr) {
            auto it = grid.find(k);
            if (it == grid.end()) continue;
            for (uint32_t j : it->second) {
                const Vec4& q = canon[kept[j]];
                double d = (metric == Metric::Angular)
                               ? std::min(dist(p, q), dist(p, -q))
                               : dist(p, q);
                if (d < thr) return true;
            }
        }
        return false;
    };

    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec4& p = canon[i];
        if (near_kept(p)) continue;
        if (metric == Metric::Angular && near_kept(-p)) continue;
        uint32_t id = static_cast<uint32_t>(kept.size());
        kept.push_back(i);
        grid[cell_key(p, cell)].push_back(id);
        if (metric == Metric::Angular) grid[cell_key(-p, cell)].push_back(id);
    }
    return kept;
}

std::size_t covering_number(const std::vector<Vec4>& points, double delta, Metric metric) {
    return greedy_net(points, delta, metric).size();
}

long DirectionNet::nearest(const Vec4& v) const {
    if (points.empty()) return -1;
    Vec4 u = canonicalize_direction(v);
    long best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    std::vector<uint64_t> nbr;
    for (int sign = 0; sign < 2; ++sign) {
        Vec4 q = sign ? -u : u;
        neighbor_cells(q, cell_size_, nbr);
        for (uint64_t k : nbr) {
            auto it = cells_.find(k);
            if (it == cells_.end()) continue;
            for (uint32_t j : it->second) {
                double d = std::min(dist(q, points[j]), dist(q, -points[j]));
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
        }
    }
    if (best >= 0) return best;
    // Sparse fallback: scan. Only reachable for queries far outside the cap.
    for (std::size_t j = 0; j < points.size(); ++j) {
        double d = std::min(dist(u, points[j]), dist(u, -points[j]));
        if (d < best_d) {
            best_d = d;
            best = static_cast<long>(j);
        }
    }
    return best;
}

DirectionNet build_direction_net(double delta, double cap_angle) {
    if (delta <= 0.0 || delta > 1.0) throw std::invalid_argument("direction net: delta");
    if (cap_angle <= 0.0 || cap_angle > M_PI)
        throw std::invalid_argument("direction net: cap angle");

    // 3-volume of the cap {angle <= a} in S^3 and the inverse CDF of the
    // latitude density sin^2.
    auto cap_vol = [](double a) { return 2.0 * M_PI * (a - std::sin(a) * std::cos(a)); };
    double total = cap_vol(cap_angle);

    double gen_spacing = delta / 4.0;
    std::size_t n_gen = static_cast<std::size_t>(
        std::min(6.0e6, std::max(512.0, total / (gen_spacing * gen_spacing * gen_spacing))));

    // Plastic-ratio increments decorrelate the two angular coordinates.
    const double a1 = 0.7548776662466927;
    const double a2 = 0.5698402909980532;

    std::vector<Vec4> raw;
    raw.reserve(n_gen);
    for (std::size_t k = 0; k < n_gen; ++k) {
        double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n_gen);
        // Solve cap_vol(psi)/total = u by bisection; monotone increasing.
        double lo = 0.0, hi = cap_angle;
        for (int it = 0; it < 48; ++it) {
            double mid = 0.5 * (lo + hi);
            (cap_vol(mid) / total < u ? lo : hi) = mid;
        }
        double psi = 0.5 * (lo + hi);
        double z = 2.0 * std::fmod(static_cast<double>(k) * a1, 1.0) - 1.0;
        double az = 2.0 * M_PI * std::fmod(static_cast<double>(k) * a2, 1.0);
        double rz = std::sqrt(std::max(0.0, 1.0 - z * z));
        double sp = std::sin(psi);
        Vec4 v{{std::cos(psi), sp * rz * std::cos(az), sp * rz * std::sin(az), sp * z}};
        raw.push_back(canonicalize_direction(v));
    }

    DirectionNet net;
    net.delta = delta;
    net.cap_angle = cap_angle;
    double sep_chord = 2.0 * std::sin(delta / 4.0);  // delta/2 angular separation
    net.cell_size_ = std::max(2.0 * std::sin(delta / 2.0), 1e-9);

    std::unordered_map<uint64_t, std::vector<uint32_t>> thin_grid;
    std::vector<uint64_t> nbr;
    auto too_close = [&](const Vec4& p) {
        neighbor_cells(p, sep_chord, nbr);
        for (uint64_t k : nbr) {
            auto it = thin_grid.find(k);
            if (it == thin_grid.end()) continue;
            for (uint32_t j : it->second) {
                double d = std::min(dist(p, net.points[j]), dist(p, -net.points[j]));
                if (d < sep_chord) return true;
            }
        }
        return false;
    };
    for (const Vec4& p : raw) {
        if (too_close(p) || too_close(-p)) continue;
        uint32_t id = static_cast<uint32_t>(net.points.size());
        net.points.push_back(p);
        thin_grid[cell_key(p, sep_chord)].push_back(id);
        thin_grid[cell_key(-p, sep_chord)].push_back(id);
    }
    for (uint32_t i = 0; i < net.points.size(); ++i) {
        net.cells_[cell_key(net.points[i], net.cell_size_)].push_back(i);
        net.cells_[cell_key(-net.points[i], net.cell_size_)].push_back(i);
    }
    return net;
}

// ---------------------------------------------------------------------------
// Greedy prism cover.
//
// A cluster accepts a line when, for every prism axis, the anchor offset plus
// the full direction drift fits the corresponding half length; that condition
// makes the whole window [-1, 1] of the line sit inside the prism, so the
// chord test passes with room to spare. Long half lengths carry a 2t slack to
// absorb anchor components along the long axes.

namespace {

struct Cluster {
    std::vector<std::size_t> members;
    Vec4 vbar;                 // representative direction
    Vec4 base;                 // first anchor
    std::array<Vec4, 4> axes;  // [long..., short...]; valid once frame_set
    bool frame_set = false;
    Vec4 waxis;       // second long axis (k = 2)
    bool has_w = false;
    Eigen::Matrix4d scatter = Eigen::Matrix4d::Zero();  // k = 3 refits
};

Vec4 smallest_eig_dir(const Eigen::Matrix4d& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
    Eigen::Vector4d v = es.eigenvectors().col(0);
    return canonicalize_direction({{v[0], v[1], v[2], v[3]}});
}

}  // namespace

PrismCover greedy_prism_cover(const std::vector<Line>& lines, int long_axes, double t,
                              const Tolerances& tol) {
    if (long_axes < 1 || long_axes > 3)
        throw std::invalid_argument("greedy_prism_cover: long_axes must be 1, 2 or 3");
    if (t <= 0.0 || t >= 1.0) throw std::invalid_argument("greedy_prism_cover: t");

    PrismCover cover;
    cover.assignment.assign(lines.size(), 0);
    if (lines.empty()) return cover;

    const double margin = 1.0 - 1e-9;
    const double long_half = 1.0 + 2.0 * t;

    std::vector<Cluster> clusters;
    // k = 1 uses exact cell keys; k = 2, 3 grow clusters with fit tests.
    std::unordered_map<uint64_t, std::vector<uint32_t>> by_cell;

    auto dir_cell = [&](const Vec4& v, double g) {
        uint64_t k = 0;
        for (int i = 0; i < 4; ++i)
            k = (k << 16) | static_cast<uint64_t>(
                                static_cast<uint16_t>(std::lround(std::floor(v[i] / g)) + 32768));
        return k;
    };

    auto fits = [&](const Cluster& c, const Line& l) {
        // Requires c.frame_set. Short axes are the last 4 - long_axes.
        for (int j = 0; j < 4; ++j) {
            double h = (j < long_axes) ? long_half : t * margin;
            double off = std::abs(dot(l.anchor - c.base, c.axes[j]));
            double drift = std::abs(dot(l.dir, c.axes[j]));
            if (j < long_axes) drift = 0.0;  // long side: any drift is fine
            if (off + drift > h) return false;
        }
        return true;
    };

    if (long_axes == 1) {
        double g = t / 2.0;
        std::unordered_map<uint64_t, uint32_t> key_to_cluster;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const Line& l = lines[i];
            uint64_t kd = dir_cell(l.dir, g);
            uint64_t ko = dir_cell(l.anchor * (1.0 / std::max(1e-12, 1.0)), g);
            uint64_t key = kd * 1000003ULL ^ ko;
            auto it = key_to_cluster.find(key);
            if (it == key_to_cluster.end()) {
                Cluster c;
                c.vbar = l.dir;
                c.base = l.anchor;
                c.axes = complete_frame({l.dir});
                c.frame_set = true;
                c.members.push_back(i);
                key_to_cluster.emplace(key, static_cast<uint32_t>(clusters.size()));
                cover.assignment[i] = clusters.size();
                clusters.push_back(std::move(c));
            } else {
                Cluster& c = clusters[it->second];
                if (fits(c, l)) {
                    c.members.push_back(i);
                    cover.assignment[i] = it->second;
                } else {
                    // Rare cell-boundary overflow: give the line its own prism.
                    Cluster c2;
                    c2.vbar = l.dir;
                    c2.base = l.anchor;
                    c2.axes = complete_frame({l.dir});
                    c2.frame_set = true;
                    c2.members.push_back(i);
                    cover.assignment[i] = clusters.size();
                    clusters.push_back(std::move(c2));
                }
            }
        }
    } else if (long_axes == 2) {
        double g = t / 4.0;
        std::unordered_map<uint64_t, std::vector<uint32_t>> dir_buckets;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const Line& l = lines[i];
            uint64_t kd = dir_cell(l.dir, g);
            auto& strip_ids = dir_buckets[kd];
            bool placed = false;
            for (uint32_t ci : strip_ids) {
                Cluster& c = clusters[ci];
                if (!c.has_w) {
                    Vec4 d = l.anchor - c.base;
                    d -= c.vbar * dot(d, c.vbar);
                    double nd = norm(d);
                    if (nd <= t / 4.0) {
                        c.members.push_back(i);
                        cover.assignment[i] = ci;
                        placed = true;
                        break;
                    }
                    // Adopt the offset direction as the strip axis.
                    Vec4 w = d * (1.0 / nd);
                    std::array<Vec4, 4> fr = complete_frame({c.vbar, w});
                    Cluster trial = c;
                    trial.waxis = w;
                    trial.has_w = true;
                    trial.axes = fr;
                    trial.frame_set = true;
                    if (fits(trial, l)) {
                        c = trial;
                        c.members.push_back(i);
                        cover.assignment[i] = ci;
                        placed = true;
                        break;
                    }
                    continue;
                }
                if (fits(c, l)) {
                    c.members.push_back(i);
                    cover.assignment[i] = ci;
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                Cluster c;
                c.vbar = l.dir;
                c.base = l.anchor;
                c.axes = complete_frame({l.dir});
                c.frame_set = true;  // frame valid; waxis refined on 2nd member
                c.members.push_back(i);
                cover.assignment[i] = clusters.size();
                dir_buckets[kd].push_back(static_cast<uint32_t>(clusters.size()));
                clusters.push_back(std::move(c));
            }
        }
    } else {  // long_axes == 3: slabs with a fitted normal
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const Line& l = lines[i];
            bool placed = false;
            for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
                Cluster& c = clusters[ci];
                const Vec4& n = c.axes[3];
                double off = std::abs(dot(l.anchor - c.base, n));
                double drift = std::abs(dot(l.dir, n));
                if (off + drift <= t * margin) {
                    c.members.push_back(i);
                    cover.assignment[i] = ci;
                    Eigen::Vector4d dv(l.dir[0], l.dir[1], l.dir[2], l.dir[3]);
                    c.scatter += dv * dv.transpose();
                    Vec4 d = l.anchor - c.base;
                    double nd = norm(d);
                    if (nd > t) {
                        Eigen::Vector4d ov(d[0] / nd, d[1] / nd, d[2] / nd, d[3] / nd);
                        c.scatter += ov * ov.transpose();
                    }
                    // Refit the slab normal; keep it only if members still fit.
                    Vec4 n2 = smallest_eig_dir(c.scatter);
                    bool ok = true;
                    for (std::size_t m : c.members) {
                        const Line& lm = lines[m];
                        if (std::abs(dot(lm.anchor - c.base, n2)) +
                                std::abs(dot(lm.dir, n2)) >
                            t * margin) {
                            ok = false;
                            break;
                        }
                    }
                    if (ok) {
                        std::vector<Vec4> longs;
                        std::array<Vec4, 4> fr = complete_frame({n2});
                        c.axes = {fr[1], fr[2], fr[3], n2};
                    }
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                Cluster c;
                c.vbar = l.dir;
                c.base = l.anchor;
                std::array<Vec4, 4> fr = complete_frame({l.dir});
                // Normal: any direction orthogonal to the line works to start.
                c.axes = {fr[0], fr[1], fr[2], fr[3]};
                Eigen::Vector4d dv(l.dir[0], l.dir[1], l.dir[2], l.dir[3]);
                c.scatter = dv * dv.transpose();
                c.frame_set = true;
                c.members.push_back(i);
                cover.assignment[i] = clusters.size();
                clusters.push_back(std::move(c));
            }
        }
    }

    // Materialize prisms: center each cluster at the midrange of its members'
    // coordinates in the cluster frame.
    cover.prisms.reserve(clusters.size());
    for (auto& c : clusters) {
        std::array<double, 4> lo{}, hi{};
        lo.fill(std::numeric_limits<double>::infinity());
        hi.fill(-std::numeric_limits<double>::infinity());
        for (std::size_t m : c.members) {
            for (int j = 0; j < 4; ++j) {
                double u = dot(lines[m].anchor - c.base, c.axes[j]);
                lo[j] = std::min(lo[j], u);
                hi[j] = std::max(hi[j], u);
            }
        }
        Vec4 center = c.base;
        for (int j = 0; j < 4; ++j) center += c.axes[j] * (0.5 * (lo[j] + hi[j]));
        std::array<double, 4> halfs{};
        for (int j = 0; j < 4; ++j) halfs[j] = (j < long_axes) ? long_half : t;
        cover.prisms.push_back(make_prism(center, c.axes, halfs));
    }

    // Verification sweep: anything that slipped through a boundary gets its
    // own aligned prism, which covers it by construction.
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (line_covered_by_prism(lines[i], cover.prisms[cover.assignment[i]], tol.tol_cover))
            continue;
        std::array<Vec4, 4> fr = complete_frame({lines[i].dir});
        std::array<double, 4> halfs{};
        for (int j = 0; j < 4; ++j) halfs[j] = (j < long_axes) ? long_half : t;
        cover.assignment[i] = cover.prisms.size();
        cover.prisms.push_back(make_prism(lines[i].anchor, fr, halfs));
    }
    return cover;
}

Vec4 RescaleMap::apply(const Vec4& x) const {
    Vec4 r = x - center;
    Vec4 y;
    for (int i = 0; i < 4; ++i) {
        double u = dot(r, axes[i]);
        y[i] = (i < long_axes) ? u : u / t;
    }
    return y;
}

Vec4 RescaleMap::inverse(const Vec4& y) const {
    Vec4 x = center;
    for (int i = 0; i < 4; ++i) {
        double u = (i < long_axes) ? y[i] : y[i] * t;
        x += axes[i] * u;
    }
    return x;
}

Vec4 RescaleMap::map_direction(const Vec4& v) const {
    Vec4 y;
    for (int i = 0; i < 4; ++i) {
        double u = dot(v, axes[i]);
        y[i] = (i < long_axes) ? u : u / t;
    }
    return canonicalize_direction(y);
}

RescaleMap prism_rescale_map(const Prism& prism, int long_axes, double t) {
    prism.validate();
    if (long_axes < 1 || long_axes > 3)
        throw std::invalid_argument("prism_rescale_map: long_axes");
    if (t <= 0.0 || t > 1.0) throw std::invalid_argument("prism_rescale_map: t");
    for (int i = 0; i < long_axes; ++i)
        if (prism.half_len[i] < 1.0 - 1e-9)
            throw std::invalid_argument("prism_rescale_map: long side shorter than 1");
    for (int i = long_axes; i < 4; ++i)
        if (std::abs(prism.half_len[i] - t) > 1e-9 * std::max(1.0, t))
            throw std::invalid_argument("prism_rescale_map: short side != t");
    RescaleMap m;
    m.center = prism.center;
    m.axes = prism.axes;
    m.long_axes = long_axes;
    m.t = t;
    return m;
}

}  // namespace svlab
