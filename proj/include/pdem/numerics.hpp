#pragma once

#include <functional>
#include <vector>

// Quadrature and root-bracketing shared by the engines.
namespace pdem::numerics {

using RealFunction = std::function<double(double)>;

// Adaptive Simpson with Richardson correction. The tolerance is absolute and
// is split in half at each refinement level.
double adaptive_simpson(const RealFunction& f, double a, double b, double abs_tol = 1e-10,
                        int max_depth = 40);

struct Bracket {
    double lo;
    double hi;
    double f_lo;
    double f_hi;
};

// Sign changes of f on a uniform scan of [lo, hi]. Non-finite samples break
// the scan (no bracket spans them). A sample that is exactly zero yields a
// degenerate bracket lo == hi.
std::vector<Bracket> scan_sign_changes(const RealFunction& f, double lo, double hi, int points);

// Bisection inside a bracket until its width is below tol. Throws
// ConvergenceError if that takes more than max_iter halvings.
double bisect(const RealFunction& f, const Bracket& bracket, double tol, int max_iter = 200);

} // namespace pdem::numerics
