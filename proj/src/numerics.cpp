#include "pdem/numerics.hpp"

#include <cmath>
#include <sstream>

#include "pdem/error.hpp"

namespace pdem::numerics {

namespace {

double simpson_step(const RealFunction& f, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double tol, int depth)
{
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const RealFunction& f, double a, double b, double abs_tol, int max_depth)
{
    if (a == b) {
        return 0.0;
    }
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

std::vector<Bracket> scan_sign_changes(const RealFunction& f, double lo, double hi, int points)
{
    std::vector<Bracket> out;
    if (points < 2 || !(hi > lo)) {
        return out;
    }
    const double step = (hi - lo) / (points - 1);
    double x_prev = lo;
    double f_prev = f(lo);
    if (f_prev == 0.0) {
        out.push_back({lo, lo, 0.0, 0.0});
    }
    for (int i = 1; i < points; ++i) {
        const double x = i + 1 == points ? hi : lo + i * step;
        const double fx = f(x);
        if (fx == 0.0) {
            out.push_back({x, x, 0.0, 0.0});
        } else if (std::isfinite(fx) && std::isfinite(f_prev) && f_prev != 0.0 &&
                   std::signbit(fx) != std::signbit(f_prev)) {
            out.push_back({x_prev, x, f_prev, fx});
        }
        x_prev = x;
        f_prev = fx;
    }
    return out;
}

double bisect(const RealFunction& f, const Bracket& bracket, double tol, int max_iter)
{
    double lo = bracket.lo;
    double hi = bracket.hi;
    if (lo == hi) {
        return lo;
    }
    const bool lo_negative = std::signbit(bracket.f_lo);
    for (int it = 0; it < max_iter; ++it) {
        if (hi - lo <= tol) {
            return 0.5 * (lo + hi);
        }
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double fm = f(mid);
        if (fm == 0.0) {
            return mid;
        }
        if (std::signbit(fm) == lo_negative) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    std::ostringstream os;
    os << "bisection did not reach tolerance " << tol << " within " << max_iter
       << " halvings (bracket [" << lo << ", " << hi << "])";
    throw ConvergenceError(os.str());
}

} // namespace pdem::numerics
