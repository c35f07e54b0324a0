#pragma once
// Dense 4-variable polynomials with exact symbolic derivatives, restriction
// to lines, and a Monte-Carlo sublevel-set measure. Exponent vectors are the
// map keys; coefficients are doubles.

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "svlab/core.hpp"

namespace svlab {

using Exps = std::array<int, 4>;

// Univariate polynomial, ascending coefficients. Produced by restricting a
// Polynomial4 to a line; evaluation is Horner.
struct UniPoly {
    std::vector<double> coeffs;  // coeffs[k] multiplies t^k

    double eval(double t) const {
        double r = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) r = r * t + coeffs[i];
        return r;
    }
    int degree() const;
    UniPoly derivative() const;
};

class Polynomial4 {
  public:
    Polynomial4() = default;
    // Merges duplicate exponent keys; drops exact-zero coefficients.
    explicit Polynomial4(const std::map<Exps, double>& terms);
    static Polynomial4 from_terms(const std::vector<std::pair<Exps, double>>& terms);
    static Polynomial4 constant(double c);
    static Polynomial4 variable(int i);  // x_i, i in 0..3

    double eval(const Vec4& x) const;
    int degree() const { return degree_; }
    bool empty() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    const std::map<Exps, double>& terms() const { return terms_; }
    double coeff(const Exps& e) const;
    double max_abs_coeff() const;

    Polynomial4 operator+(const Polynomial4& o) const;
    Polynomial4 operator-(const Polynomial4& o) const;
    Polynomial4 operator*(const Polynomial4& o) const;
    Polynomial4 operator*(double s) const;

  private:
    std::map<Exps, double> terms_;
    int degree_ = 0;
    // Flat copy of terms_ for evaluation; rebuilt on construction.
    std::vector<std::pair<Exps, double>> flat_;
    void rebuild();
};

Polynomial4 partial_derivative(const Polynomial4& p, int axis);

// (v . grad)^order applied to p, expanded symbolically. order in {1, 2, 3}.
Polynomial4 directional_derivative(const Polynomial4& p, const Vec4& v, int order);

std::array<Polynomial4, 4> gradient(const Polynomial4& p);

// q(t) = p(anchor + t * dir).
UniPoly restrict_to_line(const Polynomial4& p, const Vec4& anchor, const Vec4& dir);

// p scaled so the largest |coefficient| is 1. Zero polynomial is rejected.
Polynomial4 normalize_max_coeff(const Polynomial4& p);

// Evaluation bundle: p with cached first and second partials, for inner
// loops that need values, gradients and Hessian contractions per point.
struct PolyJet {
    Polynomial4 p;
    std::array<Polynomial4, 4> d1;
    std::array<Polynomial4, 10> d2;  // upper triangle, row-major: (0,0),(0,1)...(3,3)

    explicit PolyJet(const Polynomial4& poly);
    double value(const Vec4& x) const { return p.eval(x); }
    Vec4 grad(const Vec4& x) const;
    // H contracted twice with v: sum_ij v_i v_j d2P/dx_i dx_j (x).
    double hess_quad(const Vec4& x, const Vec4& v) const;
    void hess(const Vec4& x, double out[4][4]) const;
};

struct Box4 {
    Vec4 lo, hi;
    double volume() const;
};

struct SublevelEstimate {
    double measure;     // estimated |{x in box : |p(x)| <= lambda * sup}|
    double std_error;   // binomial standard error, in measure units
    double sup_abs;     // sample estimate of sup_box |p|
};

// Uniform Monte-Carlo estimate. n_samples >= 1e4 enforced; deterministic for
// a fixed seed.
SublevelEstimate sublevel_measure(const Polynomial4& p, const Box4& box, double lambda,
                                  std::size_t n_samples, uint64_t seed);

}  // namespace svlab
