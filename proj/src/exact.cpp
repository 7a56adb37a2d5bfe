#include "pdem/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/airy.hpp>

#include "pdem/numerics.hpp"

namespace pdem::exact {

namespace {

void require_well(const LinearWell& w)
{
    if (!(w.a > 0.0) || !(w.m1 > 0.0) || !(w.m2 > 0.0)) {
        throw DomainError("linear well needs a > 0 and positive masses");
    }
}

double constant_mass_level(const LinearWell& w, int n)
{
    const double m = 0.5 * (w.m1 + w.m2);
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    return static_cast<double>(n) * n * pi2 * w.constants.hbar2_over_2m0 / (m * 4.0 * w.a * w.a);
}

double wkb_estimate(const LinearWell& w, double n)
{
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    if (w.constant_mass()) {
        const double m = 0.5 * (w.m1 + w.m2);
        return n * n * pi2 * w.constants.hbar2_over_2m0 / (m * 4.0 * w.a * w.a);
    }
    const double dm = w.m1 - w.m2;
    const double d32 = w.m1 * std::sqrt(w.m1) - w.m2 * std::sqrt(w.m2);
    return 9.0 * n * n * pi2 * w.constants.hbar2_over_2m0 * dm * dm / (16.0 * w.a * w.a * d32 * d32);
}

// All zeros of D(E) in (0, e_hi], ascending.
std::vector<double> determinant_zeros(const LinearWell& w, double e_hi, int scan_points,
                                      double tol)
{
    const double e_lo = 1e-3 * wkb_estimate(w, 1.0);
    const auto d = [&](double e) { return w.determinant(e); };
    std::vector<double> roots;
    for (const auto& b : numerics::scan_sign_changes(d, e_lo, e_hi, scan_points)) {
        roots.push_back(numerics::bisect(d, b, tol));
    }
    return roots;
}

} // namespace

AiryPair airy(double y)
{
    if (!(std::abs(y) <= kAiryRange)) {
        std::ostringstream os;
        os << "Airy argument " << y << " outside the supported range |y| <= " << kAiryRange;
        throw RangeError(os.str());
    }
    return {boost::math::airy_ai(y), boost::math::airy_bi(y), boost::math::airy_ai_prime(y),
            boost::math::airy_bi_prime(y)};
}

bool LinearWell::constant_mass() const
{
    return std::abs(m1 - m2) <= 1e-12 * std::max(m1, m2);
}

double LinearWell::airy_argument(double energy, double x) const
{
    const double slope = (m1 - m2) / (2.0 * a);
    const double offset = (m1 + m2) / (m1 - m2) * a;
    return -std::cbrt(slope * energy / constants.hbar2_over_2m0) * (x + offset);
}

double LinearWell::determinant(double energy) const
{
    const AiryPair left = airy(airy_argument(energy, -a));
    const AiryPair right = airy(airy_argument(energy, a));
    return left.ai_prime * right.bi_prime - right.ai_prime * left.bi_prime;
}

ExactSpectrum linear_well_exact_spectrum(const LinearWell& well, int n_max, double tol)
{
    require_well(well);
    if (n_max < 1) {
        throw DomainError("n_max must be at least 1");
    }
    ExactSpectrum out;
    if (well.constant_mass()) {
        for (int n = 1; n <= n_max; ++n) {
            out.levels.push_back({n, constant_mass_level(well, n)});
        }
        return out;
    }
    // Exact levels sit a few percent above the WKB ones at most.
    const double e_hi = wkb_estimate(well, n_max + 0.5);
    const auto roots = determinant_zeros(well, e_hi, std::max(400, 200 * n_max), tol);
    for (std::size_t i = 0; i < roots.size() && static_cast<int>(i) < n_max; ++i) {
        out.levels.push_back({static_cast<int>(i) + 1, roots[i]});
    }
    out.truncated = static_cast<int>(out.levels.size()) < n_max;
    return out;
}

ExactSpectrum linear_well_exact_spectrum(const LinearWell& well, double e_lo, double e_hi,
                                         double tol)
{
    require_well(well);
    if (!(e_lo < e_hi)) {
        throw DomainError("energy range requires e_lo < e_hi");
    }
    ExactSpectrum out;
    if (well.constant_mass()) {
        for (int n = 1; constant_mass_level(well, n) <= e_hi; ++n) {
            if (constant_mass_level(well, n) >= e_lo) {
                out.levels.push_back({n, constant_mass_level(well, n)});
            }
        }
        return out;
    }
    const double span = e_hi / wkb_estimate(well, 1.0);
    const int points = std::max(400, static_cast<int>(200.0 * std::sqrt(std::max(span, 1.0))));
    const auto roots = determinant_zeros(well, e_hi, points, tol);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (roots[i] >= e_lo) {
            out.levels.push_back({static_cast<int>(i) + 1, roots[i]});
        }
    }
    return out;
}

Wavefunction linear_well_exact_wavefunction_at(const LinearWell& well, double energy, int points)
{
    require_well(well);
    Wavefunction wf;
    wf.engine = Engine::Airy;
    wf.energy = energy;
    wf.grid = uniform_grid(-well.a, well.a, points);
    wf.values.resize(points);
    if (well.constant_mass()) {
        const double k = std::sqrt(0.5 * (well.m1 + well.m2) * energy / well.constants.hbar2_over_2m0);
        for (int i = 0; i < points; ++i) {
            wf.values(i) = std::sin(k * (wf.grid(i) + well.a));
        }
        return normalize(std::move(wf));
    }
    // (A, B) annihilates the left-wall row, so psi(-a) = 0 identically.
    const AiryPair left = airy(well.airy_argument(energy, -well.a));
    const double coeff_a = left.bi_prime;
    const double coeff_b = -left.ai_prime;
    for (int i = 0; i < points; ++i) {
        const AiryPair p = airy(well.airy_argument(energy, wf.grid(i)));
        wf.values(i) = coeff_a * p.ai_prime + coeff_b * p.bi_prime;
    }
    return normalize(std::move(wf));
}

Wavefunction linear_well_exact_wavefunction(const LinearWell& well, int n, int points)
{
    const ExactSpectrum spec = linear_well_exact_spectrum(well, n);
    if (static_cast<int>(spec.levels.size()) < n) {
        throw SearchError("requested exact state is beyond the computed spectrum");
    }
    return linear_well_exact_wavefunction_at(well, spec.levels[static_cast<std::size_t>(n - 1)].energy,
                                             points);
}

double f_correction(const Problem& problem, double x, FReading reading)
{
    const double m = problem.mass_at(x);
    const double dm = profile_derivative(problem.mass, x);
    const double d2m = profile_second_derivative(problem.mass, x);
    // hbar^2 / (8 m) = C / (4 m) with C = hbar^2/(2 m0) and m in units of m0.
    const double prefactor = -problem.constants.hbar2_over_2m0 / (4.0 * m);
    const double gradient = reading == FReading::RelativeToMass ? dm / m : dm;
    return prefactor * (d2m / m - 1.75 * gradient * gradient);
}

TransformedProblem::TransformedProblem(const Problem& source, int grid_points, FReading reading)
    : source_(source)
{
    if (grid_points < 2) {
        throw DiscretizationError("transform grid needs at least two points");
    }
    x_ = uniform_grid(source.x_min, source.x_max, grid_points);
    y_.resize(grid_points);
    potential_.resize(grid_points);
    y_(0) = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        if (i > 0) {
            y_(i) = y_(i - 1) + segment(x_(i - 1), x_(i));
        }
        potential_(i) = source.potential_at(x_(i)) + f_correction(source, x_(i), reading);
    }
}

double TransformedProblem::segment(double x_from, double x_to) const
{
    if (const auto* lin = std::get_if<LinearProfile>(&source_.mass.kind())) {
        const double slope = lin->slope();
        const double ma = source_.mass_at(x_from);
        const double mb = source_.mass_at(x_to);
        if (slope != 0.0) {
            return (2.0 / 3.0) * (mb * std::sqrt(mb) - ma * std::sqrt(ma)) / slope;
        }
        return std::sqrt(ma) * (x_to - x_from);
    }
    return numerics::adaptive_simpson(
        [&](double x) { return std::sqrt(source_.mass_at(x)); }, x_from, x_to, 1e-14);
}

double TransformedProblem::y_of(double x) const
{
    const Eigen::Index n = x_.size();
    const double step = (x_(n - 1) - x_(0)) / static_cast<double>(n - 1);
    auto i = static_cast<Eigen::Index>(std::floor((x - x_(0)) / step));
    i = std::clamp<Eigen::Index>(i, 0, n - 2);
    return y_(i) + segment(x_(i), x);
}

double TransformedProblem::x_of(double y) const
{
    const Eigen::Index n = y_.size();
    const auto it = std::upper_bound(y_.data(), y_.data() + n, y);
    auto i = static_cast<Eigen::Index>(it - y_.data()) - 1;
    i = std::clamp<Eigen::Index>(i, 0, n - 2);
    const double lo = x_(i);
    const double hi = x_(i + 1);
    double x = lo + (hi - lo) * (y - y_(i)) / (y_(i + 1) - y_(i));
    for (int it_count = 0; it_count < 50; ++it_count) {
        const double dx = (y_(i) + segment(lo, x) - y) / std::sqrt(source_.mass_at(x));
        x -= dx;
        if (std::abs(dx) < 1e-15 * std::max(1.0, std::abs(x))) {
            break;
        }
    }
    return x;
}

Problem TransformedProblem::constant_mass_problem() const
{
    if (!source_.hard_wall()) {
        throw BoundaryKindError("constant-mass transform is implemented for hard walls only");
    }
    std::vector<double> ys(y_.data(), y_.data() + y_.size());
    std::vector<double> vs(potential_.data(), potential_.data() + potential_.size());
    return Problem(0.0, y_(y_.size() - 1), Profile::constant(Quantity::Mass, 1.0),
                   Profile::tabulated(Quantity::Potential, std::move(ys), std::move(vs)),
                   HardWall{}, source_.constants);
}

TransformedProblem to_constant_mass(const Problem& problem, int grid_points, FReading reading)
{
    return TransformedProblem(problem, grid_points, reading);
}

} // namespace pdem::exact
