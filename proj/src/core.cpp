#include "pdem/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pdem {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive_mass(Quantity q, double value, std::string_view where)
{
    if (q == Quantity::Mass && !(value > 0.0)) {
        std::ostringstream os;
        os << "mass profile must be positive (" << where << " = " << value << ")";
        throw ProfileError(os.str());
    }
}

void require_increasing(const std::vector<double>& xs, std::string_view what)
{
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) {
            throw ProfileError(std::string(what) + " must be strictly increasing");
        }
    }
}

double eval_tabulated(const TabulatedProfile& t, double x)
{
    if (x <= t.x.front()) {
        return t.values.front();
    }
    if (x >= t.x.back()) {
        return t.values.back();
    }
    const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    const auto i = static_cast<std::size_t>(it - t.x.begin());
    const double w = (x - t.x[i - 1]) / (t.x[i] - t.x[i - 1]);
    return (1.0 - w) * t.values[i - 1] + w * t.values[i];
}

double eval_raw(const Profile& profile, double x)
{
    return std::visit(
        overloaded{
            [](const ConstantProfile& c) { return c.value; },
            [x](const LinearProfile& l) { return l.value_left + l.slope() * (x - l.x_left); },
            [x](const PiecewiseConstantProfile& p) {
                const auto it = std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), x);
                return p.values[static_cast<std::size_t>(it - p.breakpoints.begin())];
            },
            [x](const TabulatedProfile& t) { return eval_tabulated(t, x); },
        },
        profile.kind());
}

} // namespace

Profile::Profile(Quantity q, Kind kind) : quantity_(q), kind_(std::move(kind)) {}

Profile Profile::constant(Quantity q, double value)
{
    require_positive_mass(q, value, "value");
    return Profile(q, ConstantProfile{value});
}

Profile Profile::linear(Quantity q, double x_left, double x_right, double value_left,
                        double value_right)
{
    if (!(x_right > x_left)) {
        throw ProfileError("linear profile requires x_left < x_right");
    }
    require_positive_mass(q, value_left, "value_left");
    require_positive_mass(q, value_right, "value_right");
    return Profile(q, LinearProfile{x_left, x_right, value_left, value_right});
}

Profile Profile::piecewise_constant(Quantity q, std::vector<double> breakpoints,
                                    std::vector<double> values)
{
    if (values.size() != breakpoints.size() + 1) {
        throw ProfileError("piecewise profile needs one more value than breakpoints");
    }
    require_increasing(breakpoints, "breakpoints");
    for (double v : values) {
        require_positive_mass(q, v, "values");
    }
    return Profile(q, PiecewiseConstantProfile{std::move(breakpoints), std::move(values)});
}

Profile Profile::tabulated(Quantity q, std::vector<double> x, std::vector<double> values)
{
    if (x.size() < 2 || x.size() != values.size()) {
        throw ProfileError("tabulated profile needs at least two (x, value) samples");
    }
    require_increasing(x, "tabulated x samples");
    for (double v : values) {
        require_positive_mass(q, v, "values");
    }
    return Profile(q, TabulatedProfile{std::move(x), std::move(values)});
}

std::vector<double> Profile::singular_points() const
{
    if (const auto* p = std::get_if<PiecewiseConstantProfile>(&kind_)) {
        return p->breakpoints;
    }
    if (const auto* t = std::get_if<TabulatedProfile>(&kind_)) {
        return t->x;
    }
    return {};
}

double eval_profile(const Profile& profile, double x)
{
    const double v = eval_raw(profile, x);
    require_positive_mass(profile.quantity(), v, "m*(x)");
    return v;
}

double profile_derivative(const Profile& profile, double x)
{
    return std::visit(
        overloaded{
            [](const ConstantProfile&) { return 0.0; },
            [](const LinearProfile& l) { return l.slope(); },
            [](const PiecewiseConstantProfile&) { return 0.0; },
            [&](const TabulatedProfile&) {
                const double h = kProfileDerivativeStep;
                return (eval_raw(profile, x + h) - eval_raw(profile, x - h)) / (2.0 * h);
            },
        },
        profile.kind());
}

double profile_second_derivative(const Profile& profile, double x)
{
    if (profile.analytic()) {
        return 0.0;
    }
    const double h = kProfileDerivativeStep;
    return (eval_raw(profile, x + h) - 2.0 * eval_raw(profile, x) + eval_raw(profile, x - h)) /
           (h * h);
}

Problem::Problem(double x_min_, double x_max_, Profile mass_, Profile potential_,
                 Boundary boundary_, PhysicalConstants constants_)
    : x_min(x_min_), x_max(x_max_), mass(std::move(mass_)), potential(std::move(potential_)),
      boundary(boundary_), constants(constants_)
{
    if (!(x_min < x_max)) {
        throw DomainError("problem domain requires x_min < x_max");
    }
    if (mass.quantity() != Quantity::Mass || potential.quantity() != Quantity::Potential) {
        throw ProfileError("problem needs a mass profile and a potential profile");
    }
    if (!(constants.hbar2_over_2m0 > 0.0)) {
        throw DomainError("hbar^2/(2 m0) must be positive");
    }
    if (const auto* s = std::get_if<Scattering>(&boundary)) {
        require_positive_mass(Quantity::Mass, s->left.mass, "left lead mass");
        require_positive_mass(Quantity::Mass, s->right.mass, "right lead mass");
    }
}

Problem linear_well(double m1, double m2, double a, PhysicalConstants constants)
{
    if (!(a > 0.0)) {
        throw DomainError("well half-width must be positive");
    }
    // m*(-a) = m2, m*(a) = m1.
    return Problem(-a, a, Profile::linear(Quantity::Mass, -a, a, m2, m1),
                   Profile::constant(Quantity::Potential, 0.0), HardWall{}, constants);
}

Complex local_wavenumber(double mass, double potential, double energy,
                         const PhysicalConstants& constants)
{
    const double excess = energy - potential;
    const double k2 = mass * std::abs(excess) / constants.hbar2_over_2m0;
    if (excess > 0.0) {
        return {std::sqrt(k2), 0.0};
    }
    if (excess < 0.0) {
        return {0.0, std::sqrt(k2)};
    }
    return {0.0, 0.0};
}

Complex wavenumber(const Problem& problem, double energy, double x)
{
    return local_wavenumber(problem.mass_at(x), problem.potential_at(x), energy,
                            problem.constants);
}

std::string_view engine_name(Engine engine)
{
    switch (engine) {
    case Engine::TMM:
        return "tmm";
    case Engine::CoupledODE:
        return "coupled";
    case Engine::WKB:
        return "wkb";
    case Engine::Airy:
        return "exact";
    }
    return "unknown";
}

Eigen::VectorXd uniform_grid(double a, double b, Eigen::Index points)
{
    if (points < 2) {
        throw DiscretizationError("grid needs at least two points");
    }
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(points, a, b);
    x(points - 1) = b;
    return x;
}

double trapezoid(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
    double sum = 0.0;
    for (Eigen::Index i = 1; i < x.size(); ++i) {
        sum += 0.5 * (x(i) - x(i - 1)) * (y(i) + y(i - 1));
    }
    return sum;
}

double norm_squared(const Wavefunction& wf)
{
    return trapezoid(wf.grid, wf.values.cwiseAbs2());
}

Wavefunction normalize(Wavefunction wf)
{
    if (wf.grid.size() != wf.values.size() || wf.grid.size() < 2) {
        throw DegenerateWavefunctionError("wavefunction grid and values differ in length");
    }
    const double n2 = norm_squared(wf);
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
        throw DegenerateWavefunctionError("cannot normalize a zero or non-finite wavefunction");
    }
    Eigen::Index imax = 0;
    wf.values.cwiseAbs2().maxCoeff(&imax);
    const Complex phase = std::conj(wf.values(imax)) / std::abs(wf.values(imax));
    wf.values *= phase / std::sqrt(n2);
    wf.values(imax) = Complex(std::abs(wf.values(imax)), 0.0);
    wf.normalized = true;
    return wf;
}

int count_nodes(const Wavefunction& wf, double rel_threshold)
{
    const Eigen::Index n = wf.values.size();
    if (n < 3) {
        return 0;
    }
    Eigen::Index imax = 0;
    const double peak = std::sqrt(wf.values.cwiseAbs2().maxCoeff(&imax));
    const Complex phase = std::conj(wf.values(imax)) / peak;
    const double floor = rel_threshold * peak;

    int nodes = 0;
    int last_sign = 0;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double v = (wf.values(i) * phase).real();
        if (std::abs(v) <= floor) {
            continue;
        }
        const int sign = v > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) {
            ++nodes;
        }
        last_sign = sign;
    }
    return nodes;
}

EnvelopeFit fit_envelope(const Wavefunction& wf, const Profile& mass)
{
    EnvelopeFit fit;
    const Eigen::VectorXd p = wf.values.cwiseAbs2();
    for (Eigen::Index i = 1; i + 1 < p.size(); ++i) {
        if (p(i) > p(i - 1) && p(i) >= p(i + 1)) {
            fit.peak_x.push_back(wf.grid(i));
            fit.peak_height.push_back(p(i));
        }
    }
    if (fit.peak_x.empty()) {
        throw DegenerateWavefunctionError("no interior maxima in |psi|^2");
    }
    double sp = 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < fit.peak_x.size(); ++i) {
        const double s = std::sqrt(eval_profile(mass, fit.peak_x[i]));
        sp += s * fit.peak_height[i];
        ss += s * s;
    }
    fit.scale = sp / ss;

    double sq = 0.0;
    for (std::size_t i = 0; i < fit.peak_x.size(); ++i) {
        const double model = fit.scale * std::sqrt(eval_profile(mass, fit.peak_x[i]));
        const double rel = (fit.peak_height[i] - model) / model;
        fit.max_relative_deviation = std::max(fit.max_relative_deviation, std::abs(rel));
        sq += rel * rel;
    }
    fit.rms_relative_deviation = std::sqrt(sq / static_cast<double>(fit.peak_x.size()));
    return fit;
}

double schrodinger_residual(const Problem& problem, double energy, const Eigen::VectorXd& grid,
                            const Eigen::VectorXcd& psi)
{
    if (grid.size() != psi.size() || grid.size() < 3) {
        throw DiscretizationError("residual needs at least three matching samples");
    }
    const double c = problem.constants.hbar2_over_2m0;
    double worst = 0.0;
    for (Eigen::Index i = 1; i + 1 < grid.size(); ++i) {
        const double hl = grid(i) - grid(i - 1);
        const double hr = grid(i + 1) - grid(i);
        const double ml = problem.mass_at(0.5 * (grid(i) + grid(i - 1)));
        const double mr = problem.mass_at(0.5 * (grid(i) + grid(i + 1)));
        const Complex flux_r = (psi(i + 1) - psi(i)) / (hr * mr);
        const Complex flux_l = (psi(i) - psi(i - 1)) / (hl * ml);
        const Complex kinetic = -c * (flux_r - flux_l) / (0.5 * (hl + hr));
        const Complex r = kinetic + (problem.potential_at(grid(i)) - energy) * psi(i);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

} // namespace pdem
