#include "svlab/poly.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace svlab {

int UniPoly::degree() const {
    for (std::size_t i = coeffs.size(); i-- > 0;)
        if (coeffs[i] != 0.0) return static_cast<int>(i);
    return 0;
}

UniPoly UniPoly::derivative() const {
    UniPoly d;
    if (coeffs.size() <= 1) {
        d.coeffs = {0.0};
        return d;
    }
    d.coeffs.resize(coeffs.size() - 1);
    for (std::size_t i = 1; i < coeffs.size(); ++i)
        d.coeffs[i - 1] = coeffs[i] * static_cast<double>(i);
    return d;
}

Polynomial4::Polynomial4(const std::map<Exps, double>& terms) {
    for (const auto& [e, c] : terms) {
        if (e[0] < 0 || e[1] < 0 || e[2] < 0 || e[3] < 0)
            throw std::invalid_argument("Polynomial4: negative exponent");
        if (c != 0.0) terms_[e] += c;
    }
    // Summing duplicates may cancel to zero.
    for (auto it = terms_.begin(); it != terms_.end();)
        it = (it->second == 0.0) ? terms_.erase(it) : std::next(it);
    rebuild();
}

Polynomial4 Polynomial4::from_terms(const std::vector<std::pair<Exps, double>>& terms) {
    std::map<Exps, double> m;
    for (const auto& [e, c] : terms) m[e] += c;
    return Polynomial4(m);
}

Polynomial4 Polynomial4::constant(double c) {
    return from_terms({{{0, 0, 0, 0}, c}});
}

Polynomial4 Polynomial4::variable(int i) {
    if (i < 0 || i > 3) throw std::invalid_argument("Polynomial4::variable: index");
    Exps e{0, 0, 0, 0};
    e[i] = 1;
    return from_terms({{e, 1.0}});
}

void Polynomial4::rebuild() {
    degree_ = 0;
    flat_.assign(terms_.begin(), terms_.end());
    for (const auto& [e, c] : flat_)
        degree_ = std::max(degree_, e[0] + e[1] + e[2] + e[3]);
}

double Polynomial4::coeff(const Exps& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial4::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

double Polynomial4::eval(const Vec4& x) const {
    // Power tables keep this cheap enough for Newton loops over millions of
    // points; degrees stay small.
    double pw[4][13];
    for (int i = 0; i < 4; ++i) {
        pw[i][0] = 1.0;
        for (int k = 1; k <= degree_ && k < 13; ++k) pw[i][k] = pw[i][k - 1] * x[i];
    }
    double r = 0.0;
    for (const auto& [e, c] : flat_)
        r += c * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]] * pw[3][e[3]];
    return r;
}

Polynomial4 Polynomial4::operator+(const Polynomial4& o) const {
    std::map<Exps, double> m = terms_;
    for (const auto& [e, c] : o.terms_) m[e] += c;
    return Polynomial4(m);
}

Polynomial4 Polynomial4::operator-(const Polynomial4& o) const {
    std::map<Exps, double> m = terms_;
    for (const auto& [e, c] : o.terms_) m[e] -= c;
    return Polynomial4(m);
}

Polynomial4 Polynomial4::operator*(const Polynomial4& o) const {
    std::map<Exps, double> m;
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) {
            Exps e{e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]};
            m[e] += c1 * c2;
        }
    return Polynomial4(m);
}

Polynomial4 Polynomial4::operator*(double s) const {
    std::map<Exps, double> m;
    for (const auto& [e, c] : terms_) m[e] = c * s;
    return Polynomial4(m);
}

Polynomial4 partial_derivative(const Polynomial4& p, int axis) {
    if (axis < 0 || axis > 3) throw std::invalid_argument("partial_derivative: axis");
    std::map<Exps, double> m;
    for (const auto& [e, c] : p.terms()) {
        if (e[axis] == 0) continue;
        Exps d = e;
        d[axis] -= 1;
        m[d] += c * static_cast<double>(e[axis]);
    }
    return Polynomial4(m);
}

Polynomial4 directional_derivative(const Polynomial4& p, const Vec4& v, int order) {
    if (order < 1 || order > 3)
        throw std::invalid_argument("directional_derivative: order must be 1, 2 or 3");
    Polynomial4 cur = p;
    for (int k = 0; k < order; ++k) {
        Polynomial4 next;
        for (int i = 0; i < 4; ++i) {
            if (v[i] == 0.0) continue;
            next = next + partial_derivative(cur, i) * v[i];
        }
        cur = next;
    }
    return cur;
}

std::array<Polynomial4, 4> gradient(const Polynomial4& p) {
    return {partial_derivative(p, 0), partial_derivative(p, 1), partial_derivative(p, 2),
            partial_derivative(p, 3)};
}

UniPoly restrict_to_line(const Polynomial4& p, const Vec4& anchor, const Vec4& dir) {
    UniPoly q;
    q.coeffs.assign(static_cast<std::size_t>(p.degree()) + 1, 0.0);
    std::vector<double> acc, tmp;
    for (const auto& [e, c] : p.terms()) {
        acc.assign(1, c);
        for (int i = 0; i < 4; ++i) {
            for (int k = 0; k < e[i]; ++k) {
                // multiply acc by (anchor_i + dir_i t)
                tmp.assign(acc.size() + 1, 0.0);
                for (std::size_t j = 0; j < acc.size(); ++j) {
                    tmp[j] += acc[j] * anchor[i];
                    tmp[j + 1] += acc[j] * dir[i];
                }
                acc.swap(tmp);
            }
        }
        for (std::size_t j = 0; j < acc.size(); ++j) q.coeffs[j] += acc[j];
    }
    return q;
}

Polynomial4 normalize_max_coeff(const Polynomial4& p) {
    double m = p.max_abs_coeff();
    if (m == 0.0) throw std::invalid_argument("normalize_max_coeff: zero polynomial");
    return p * (1.0 / m);
}

PolyJet::PolyJet(const Polynomial4& poly) : p(poly), d1(gradient(poly)) {
    int k = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) d2[k++] = partial_derivative(d1[i], j);
}

Vec4 PolyJet::grad(const Vec4& x) const {
    return {{d1[0].eval(x), d1[1].eval(x), d1[2].eval(x), d1[3].eval(x)}};
}

double PolyJet::hess_quad(const Vec4& x, const Vec4& v) const {
    double H[4][4];
    hess(x, H);
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s += v[i] * v[j] * H[i][j];
    return s;
}

void PolyJet::hess(const Vec4& x, double out[4][4]) const {
    int k = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            double val = d2[k++].eval(x);
            out[i][j] = val;
            out[j][i] = val;
        }
}

double Box4::volume() const {
    double v = 1.0;
    for (int i = 0; i < 4; ++i) {
        if (hi[i] <= lo[i]) throw std::invalid_argument("Box4: empty side");
        v *= hi[i] - lo[i];
    }
    return v;
}

SublevelEstimate sublevel_measure(const Polynomial4& p, const Box4& box, double lambda,
                                  std::size_t n_samples, uint64_t seed) {
    if (n_samples < 10000)
        throw std::invalid_argument("sublevel_measure: need at least 1e4 samples");
    if (lambda < 0.0) throw std::invalid_argument("sublevel_measure: lambda < 0");
    double vol = box.volume();
    std::mt19937_64 rng(mix_seed(seed, hash_str("sublevel")));
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    std::vector<double> vals(n_samples);
    double sup = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        Vec4 x;
        for (int i = 0; i < 4; ++i) x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * uni(rng);
        vals[s] = std::abs(p.eval(x));
        sup = std::max(sup, vals[s]);
    }
    std::size_t hits = 0;
    double thr = lambda * sup;
    for (double v : vals)
        if (v <= thr) ++hits;
    double frac = static_cast<double>(hits) / static_cast<double>(n_samples);
    double se = vol * std::sqrt(std::max(frac * (1.0 - frac), 1e-12) /
                                static_cast<double>(n_samples));
    return {frac * vol, se, sup};
}

}  // namespace svlab
