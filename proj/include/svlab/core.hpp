#pragma once
// Shared scaffolding for the incidence-geometry lab: 4-vectors, the one
// tolerance record everything reads, deterministic RNG seeding, error types,
// and a tiny ordered parallel_for.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace svlab {

// ---------------------------------------------------------------------------
// Vec4

struct Vec4 {
    std::array<double, 4> v{0, 0, 0, 0};

    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }

    Vec4 operator+(const Vec4& o) const {
        return {{v[0] + o.v[0], v[1] + o.v[1], v[2] + o.v[2], v[3] + o.v[3]}};
    }
    Vec4 operator-(const Vec4& o) const {
        return {{v[0] - o.v[0], v[1] - o.v[1], v[2] - o.v[2], v[3] - o.v[3]}};
    }
    Vec4 operator*(double s) const { return {{v[0] * s, v[1] * s, v[2] * s, v[3] * s}}; }
    Vec4 operator-() const { return {{-v[0], -v[1], -v[2], -v[3]}}; }
    Vec4& operator+=(const Vec4& o) {
        for (int i = 0; i < 4; ++i) v[i] += o.v[i];
        return *this;
    }
    Vec4& operator-=(const Vec4& o) {
        for (int i = 0; i < 4; ++i) v[i] -= o.v[i];
        return *this;
    }
    Vec4& operator*=(double s) {
        for (int i = 0; i < 4; ++i) v[i] *= s;
        return *this;
    }
    bool operator==(const Vec4& o) const { return v == o.v; }
};

inline Vec4 operator*(double s, const Vec4& a) { return a * s; }

inline double dot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}
inline double norm2(const Vec4& a) { return dot(a, a); }
inline double norm(const Vec4& a) { return std::sqrt(norm2(a)); }
inline double dist(const Vec4& a, const Vec4& b) { return norm(a - b); }

inline Vec4 normalized(const Vec4& a) {
    double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    return a * (1.0 / n);
}

// Angle between unit vectors, clamped against rounding.
inline double angle_between(const Vec4& a, const Vec4& b) {
    double c = dot(a, b);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return std::acos(c);
}

// ---------------------------------------------------------------------------
// Tolerances and fixed algorithm constants. Everything numeric that is not a
// per-run parameter lives here so tests and the CLI agree on one set.

struct Tolerances {
    double tol_cover = 1e-6;      // slack on required intersection length 2
    double tol_cone = 1e-9;       // cone membership residual
    double grad_floor = 1e-4;     // discard samples with |grad P| below this
    double newton_residual = 1e-9;  // stop for surface projection
    int newton_max_iters = 50;
    double prefilter_k1 = 20.0;   // |v . grad P(z)|   <= k1 * delta
    double prefilter_k2 = 20.0;   // |(v . grad)^2 P(z)| <= k2 * delta
    int measure_samples = 256;    // t-samples for line neighborhood measure
    int fit_restarts = 16;        // seeded restarts for subspace/circle fits
    int verify_multistarts = 8;   // starts for nearest-ruling optimization
    double dedup_granularity = 1.0;  // in units of delta, for (dir, offset)
    double sbroad_adjacency = 3.0;   // adjacency radius in units of delta
    double cap_angle = 0.1;       // half-angle of the e1 direction cap
    double nearest_reach = 10.0;  // nearest_point max distance in units of delta
    int max_incidences_per_line = 64;
    int witness_anchor_limit = 128;  // anchors tried per direction in survey mode
    double degeneracy_resolution = 0.125;  // sphere sampling step in units of w
};

inline const Tolerances& default_tol() {
    static const Tolerances t{};
    return t;
}

// ---------------------------------------------------------------------------
// Errors. The generic bad-argument case uses std::invalid_argument directly.

struct NotNearVariety : std::runtime_error {
    explicit NotNearVariety(const std::string& m) : std::runtime_error(m) {}
};
struct SingularPoint : std::runtime_error {
    explicit SingularPoint(const std::string& m) : std::runtime_error(m) {}
};
struct InsufficientPoints : std::runtime_error {
    explicit InsufficientPoints(const std::string& m) : std::runtime_error(m) {}
};
struct DegenerateQuadric : std::runtime_error {
    explicit DegenerateQuadric(const std::string& m) : std::runtime_error(m) {}
};
struct EmptyShading : std::runtime_error {
    explicit EmptyShading(const std::string& m) : std::runtime_error(m) {}
};
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// ---------------------------------------------------------------------------
// Deterministic seeding. Reports must be byte-identical for a fixed seed, so
// every stochastic step derives its own stream from (seed, purpose tag).

inline uint64_t mix_seed(uint64_t seed, uint64_t tag) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t hash_str(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// parallel_for: static chunks, results committed in index order by the
// caller's closure writing to pre-sized storage. With n_threads <= 1 this is
// a plain loop.

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         int n_threads) {
    if (n == 0) return;
    if (n_threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::size_t nt = std::min<std::size_t>(n_threads, n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline int default_threads() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace svlab
