// Floating-point filters with an exact fallback in multi-component expansion
// arithmetic (nonoverlapping sums of doubles, smallest component first).

#include "predicates.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sphrs::detail {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kInCircleBound = (10.0 + 96.0 * kEps) * kEps;

using Expansion = std::vector<double>;

inline void two_sum(double a, double b, double& x, double& y) noexcept {
    x = a + b;
    const double bv = x - a;
    const double av = x - bv;
    y = (a - av) + (b - bv);
}

inline void fast_two_sum(double a, double b, double& x, double& y) noexcept {
    x = a + b;
    y = b - (x - a);
}

inline void two_product(double a, double b, double& x, double& y) noexcept {
    x = a * b;
    y = std::fma(a, b, -x);
}

Expansion difference(double a, double b) {
    double x = 0.0;
    double y = 0.0;
    two_sum(a, -b, x, y);
    Expansion e;
    if (y != 0.0) e.push_back(y);
    if (x != 0.0) e.push_back(x);
    return e;
}

Expansion grow(const Expansion& e, double b) {
    Expansion h;
    h.reserve(e.size() + 1);
    double q = b;
    for (double ei : e) {
        double sum = 0.0;
        double err = 0.0;
        two_sum(q, ei, sum, err);
        if (err != 0.0) h.push_back(err);
        q = sum;
    }
    if (q != 0.0) h.push_back(q);
    return h;
}

Expansion add(const Expansion& e, const Expansion& f) {
    Expansion h = e;
    for (double fi : f) h = grow(h, fi);
    return h;
}

Expansion negate(Expansion e) {
    for (double& v : e) v = -v;
    return e;
}

Expansion scale(const Expansion& e, double b) {
    Expansion h;
    if (e.empty() || b == 0.0) return h;
    h.reserve(2 * e.size());
    double q = 0.0;
    double hh = 0.0;
    two_product(e[0], b, q, hh);
    if (hh != 0.0) h.push_back(hh);
    for (std::size_t i = 1; i < e.size(); ++i) {
        double p1 = 0.0;
        double p0 = 0.0;
        two_product(e[i], b, p1, p0);
        double sum = 0.0;
        two_sum(q, p0, sum, hh);
        if (hh != 0.0) h.push_back(hh);
        fast_two_sum(p1, sum, q, hh);
        if (hh != 0.0) h.push_back(hh);
    }
    if (q != 0.0) h.push_back(q);
    return h;
}

Expansion multiply(const Expansion& e, const Expansion& f) {
    Expansion h;
    for (double fi : f) h = add(h, scale(e, fi));
    return h;
}

double sign_of(const Expansion& e) noexcept { return e.empty() ? 0.0 : e.back(); }

double orient2d_exact(PixelCoord a, PixelCoord b, PixelCoord c) {
    const Expansion acx = difference(a.u, c.u);
    const Expansion acy = difference(a.v, c.v);
    const Expansion bcx = difference(b.u, c.u);
    const Expansion bcy = difference(b.v, c.v);
    return sign_of(add(multiply(acx, bcy), negate(multiply(acy, bcx))));
}

double incircle_exact(PixelCoord a, PixelCoord b, PixelCoord c, PixelCoord d) {
    const Expansion adx = difference(a.u, d.u);
    const Expansion ady = difference(a.v, d.v);
    const Expansion bdx = difference(b.u, d.u);
    const Expansion bdy = difference(b.v, d.v);
    const Expansion cdx = difference(c.u, d.u);
    const Expansion cdy = difference(c.v, d.v);

    const Expansion alift = add(multiply(adx, adx), multiply(ady, ady));
    const Expansion blift = add(multiply(bdx, bdx), multiply(bdy, bdy));
    const Expansion clift = add(multiply(cdx, cdx), multiply(cdy, cdy));

    const Expansion bc = add(multiply(bdx, cdy), negate(multiply(cdx, bdy)));
    const Expansion ca = add(multiply(cdx, ady), negate(multiply(adx, cdy)));
    const Expansion ab = add(multiply(adx, bdy), negate(multiply(bdx, ady)));

    return sign_of(add(add(multiply(alift, bc), multiply(blift, ca)), multiply(clift, ab)));
}

}  // namespace

double orient2d(PixelCoord a, PixelCoord b, PixelCoord c) noexcept {
    const double left = (a.u - c.u) * (b.v - c.v);
    const double right = (a.v - c.v) * (b.u - c.u);
    const double det = left - right;
    const double bound = kOrientBound * (std::abs(left) + std::abs(right));
    if (det > bound || -det > bound) return det;
    return orient2d_exact(a, b, c);
}

double incircle(PixelCoord a, PixelCoord b, PixelCoord c, PixelCoord d) noexcept {
    const double adx = a.u - d.u;
    const double ady = a.v - d.v;
    const double bdx = b.u - d.u;
    const double bdy = b.v - d.v;
    const double cdx = c.u - d.u;
    const double cdy = c.v - d.v;

    const double bdxcdy = bdx * cdy;
    const double cdxbdy = cdx * bdy;
    const double alift = adx * adx + ady * ady;
    const double cdxady = cdx * ady;
    const double adxcdy = adx * cdy;
    const double blift = bdx * bdx + bdy * bdy;
    const double adxbdy = adx * bdy;
    const double bdxady = bdx * ady;
    const double clift = cdx * cdx + cdy * cdy;

    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                             (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                             (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    const double bound = kInCircleBound * permanent;
    if (det > bound || -det > bound) return det;
    return incircle_exact(a, b, c, d);
}

}  // namespace sphrs::detail
