#include "pdem/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pdem/numerics.hpp"

namespace pdem::wkb {

namespace {

const Complex kI{0.0, 1.0};

// Integrates f over [a, b] split at the profiles' singular points. Inside
// each piece the integrand is evaluated strictly within the piece, so a jump
// at a piece end is seen from the correct side.
double integrate_pieces(const Problem& problem, const numerics::RealFunction& f, double a,
                        double b, double tol)
{
    std::vector<double> cuts{a, b};
    for (const Profile* p : {&problem.mass, &problem.potential}) {
        for (double s : p->singular_points()) {
            if (s > a && s < b) {
                cuts.push_back(s);
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double total = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const double p = cuts[i - 1];
        const double q = cuts[i];
        const double lo = std::nextafter(p, q);
        const double hi = std::nextafter(q, p);
        const auto inner = [&](double x) { return f(std::clamp(x, lo, hi)); };
        total += numerics::adaptive_simpson(inner, p, q, tol * (q - p) / (b - a));
    }
    return total;
}

double allowed_k(const Problem& problem, double energy, double x)
{
    const double excess = energy - problem.potential_at(x);
    if (excess < 0.0) {
        std::ostringstream os;
        os << "classically forbidden point x = " << x << " nm at E = " << energy << " eV";
        throw DomainError(os.str());
    }
    return std::sqrt(problem.mass_at(x) * excess / problem.constants.hbar2_over_2m0);
}

// Outer-region log-derivative psi'/psi of the decaying branch; sign = +1 for
// a solution growing towards +x (left region), -1 for the right region.
double decaying_log_derivative(const Problem& problem, double energy, double x, double sign)
{
    const double m = problem.mass_at(x);
    const double gap = problem.potential_at(x) - energy;
    const double kappa = std::sqrt(m * gap / problem.constants.hbar2_over_2m0);
    const double dm = profile_derivative(problem.mass, x) / m;
    const double dv = profile_derivative(problem.potential, x) / gap;
    return sign * kappa + 0.25 * dm - 0.25 * dv;
}

struct MatchingRows {
    double r1p, r1q, r2p, r2q;
};

std::optional<MatchingRows> matching_rows(const Problem& problem, double a1, double a2,
                                          double energy)
{
    const double left_out = std::nextafter(a1, -HUGE_VAL);
    const double right_in = std::nextafter(a2, -HUGE_VAL);
    const double right_out = a2;
    if (!(problem.potential_at(left_out) > energy) || !(problem.potential_at(right_out) > energy)) {
        return std::nullopt;
    }
    const double c = problem.constants.hbar2_over_2m0;
    const auto inner = [&](double x, double& k, double& env) {
        const double m = problem.mass_at(x);
        const double excess = energy - problem.potential_at(x);
        k = std::sqrt(m * excess / c);
        env = 0.25 * profile_derivative(problem.mass, x) / m +
              0.25 * profile_derivative(problem.potential, x) / excess;
        return m;
    };
    if (!(energy > problem.potential_at(a1)) || !(energy > problem.potential_at(right_in))) {
        return std::nullopt;
    }
    double theta = 0.0;
    try {
        theta = integrate_pieces(
            problem, [&](double x) { return allowed_k(problem, energy, x); }, a1, a2,
            kPhaseTolerance);
    } catch (const DomainError&) {
        return std::nullopt;
    }

    double k1 = 0.0;
    double env1 = 0.0;
    const double m_in1 = inner(a1, k1, env1);
    double k2 = 0.0;
    double env2 = 0.0;
    const double m_in2 = inner(right_in, k2, env2);
    const double g1 = decaying_log_derivative(problem, energy, left_out, +1.0) /
                      problem.mass_at(left_out);
    const double g2 = decaying_log_derivative(problem, energy, right_out, -1.0) /
                      problem.mass_at(right_out);
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);

    // psi_II = A (p cos theta + q sin theta); rows enforce psi'/m* = g psi.
    MatchingRows rows{};
    rows.r1p = env1 / m_in1 - g1;
    rows.r1q = k1 / m_in1;
    rows.r2p = (env2 * cs - k2 * sn) / m_in2 - g2 * cs;
    rows.r2q = (env2 * sn + k2 * cs) / m_in2 - g2 * sn;
    return rows;
}

} // namespace

std::optional<double> closed_form_phase(const Problem& problem, double energy, double x_from,
                                        double x_to)
{
    const auto* lin = std::get_if<LinearProfile>(&problem.mass.kind());
    const auto* pot = std::get_if<ConstantProfile>(&problem.potential.kind());
    if (lin == nullptr || pot == nullptr || !(energy > pot->value)) {
        return std::nullopt;
    }
    const double scale = std::sqrt((energy - pot->value) / problem.constants.hbar2_over_2m0);
    const double m_from = problem.mass_at(x_from);
    const double m_to = problem.mass_at(x_to);
    const double slope = lin->slope();
    if (slope == 0.0) {
        return scale * std::sqrt(m_from) * (x_to - x_from);
    }
    return scale * (2.0 / 3.0) * (m_to * std::sqrt(m_to) - m_from * std::sqrt(m_from)) / slope;
}

double phase_integral(const Problem& problem, double energy, double x_from, double x_to,
                      PhaseMethod method)
{
    if (x_from == x_to) {
        return 0.0;
    }
    if (x_from > x_to) {
        return -phase_integral(problem, energy, x_to, x_from, method);
    }
    if (method == PhaseMethod::Auto) {
        if (auto closed = closed_form_phase(problem, energy, x_from, x_to)) {
            return *closed;
        }
    }
    return integrate_pieces(
        problem, [&](double x) { return allowed_k(problem, energy, x); }, x_from, x_to,
        kPhaseTolerance);
}

double decay_integral(const Problem& problem, double energy, double x_from, double x_to)
{
    if (x_from >= x_to) {
        return 0.0;
    }
    const double c = problem.constants.hbar2_over_2m0;
    return integrate_pieces(
        problem,
        [&](double x) {
            const double gap = problem.potential_at(x) - energy;
            return gap > 0.0 ? std::sqrt(problem.mass_at(x) * gap / c) : 0.0;
        },
        x_from, x_to, kPhaseTolerance);
}

double linear_well_energy(double m1, double m2, double a, int n,
                          const PhysicalConstants& constants)
{
    if (n < 1 || !(a > 0.0) || !(m1 > 0.0) || !(m2 > 0.0)) {
        throw DomainError("linear_well_energy needs n >= 1, a > 0 and positive masses");
    }
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    const double nn = static_cast<double>(n) * n;
    if (std::abs(m1 - m2) <= 1e-12 * std::max(m1, m2)) {
        const double m = 0.5 * (m1 + m2);
        return nn * pi2 * constants.hbar2_over_2m0 / (m * 4.0 * a * a);
    }
    const double dm = m1 - m2;
    const double d32 = m1 * std::sqrt(m1) - m2 * std::sqrt(m2);
    return 9.0 * nn * pi2 * constants.hbar2_over_2m0 * dm * dm / (16.0 * a * a * d32 * d32);
}

double hard_wall_quantize(const Problem& problem, int n, double e_lo, double e_hi,
                          PhaseMethod method, double tol)
{
    if (!problem.hard_wall()) {
        throw BoundaryKindError("hard_wall_quantize requires a hard-wall problem");
    }
    if (n < 1 || !(e_lo < e_hi)) {
        throw DomainError("hard_wall_quantize needs n >= 1 and e_lo < e_hi");
    }
    const double target = std::numbers::pi * n;
    const auto f = [&](double e) {
        return phase_integral(problem, e, problem.x_min, problem.x_max, method) - target;
    };
    double f_lo = 0.0;
    double f_hi = 0.0;
    try {
        f_lo = f(e_lo);
        f_hi = f(e_hi);
    } catch (const DomainError& e) {
        throw SearchError(std::string("quantization range reaches a forbidden energy: ") +
                          e.what());
    }
    if (!(f_lo < 0.0 && f_hi > 0.0)) {
        std::ostringstream os;
        os << "state n = " << n << " not bracketed in [" << e_lo << ", " << e_hi << "] eV";
        throw SearchError(os.str());
    }
    return numerics::bisect(f, {e_lo, e_hi, f_lo, f_hi}, tol);
}

Complex wkb_branch(const Problem& problem, double energy, double x, Branch branch)
{
    const Complex k = wavenumber(problem, energy, x);
    if (!(k.real() > 0.0) || k.imag() != 0.0) {
        throw DomainError("WKB branch requested outside the classically allowed region");
    }
    const double theta = phase_integral(problem, energy, problem.x_min, x);
    const double envelope = std::sqrt(problem.mass_at(x) / k.real());
    const double sign = branch == Branch::Rightward ? 1.0 : -1.0;
    return envelope * std::exp(sign * kI * theta);
}

Wavefunction wkb_wavefunction(const Problem& problem, double energy, Complex c1, Complex c2,
                              int points, bool normalized)
{
    Wavefunction wf;
    wf.engine = Engine::WKB;
    wf.energy = energy;
    wf.grid = uniform_grid(problem.x_min, problem.x_max, points);
    wf.values.resize(points);
    double theta = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = wf.grid(i);
        if (i > 0) {
            theta += phase_integral(problem, energy, wf.grid(i - 1), x);
        }
        const Complex k = wavenumber(problem, energy, x);
        if (!(k.real() > 0.0) || k.imag() != 0.0) {
            throw DomainError("turning point or forbidden region inside the WKB domain");
        }
        const double envelope = std::sqrt(problem.mass_at(x) / k.real());
        wf.values(i) = envelope * (c1 * std::exp(kI * theta) + c2 * std::exp(-kI * theta));
    }
    return normalized ? normalize(std::move(wf)) : wf;
}

Wavefunction wkb_eigenstate(const Problem& problem, int n, double e_lo, double e_hi, int points)
{
    const double e = hard_wall_quantize(problem, n, e_lo, e_hi);
    const Complex c = 1.0 / (2.0 * kI);
    return wkb_wavefunction(problem, e, c, -c, points, true);
}

double wkb_transmission(const Problem& problem, double energy, int scan_points)
{
    const auto* leads = std::get_if<Scattering>(&problem.boundary);
    if (leads == nullptr) {
        throw BoundaryKindError("wkb_transmission requires scattering boundaries");
    }
    if (!(energy > leads->left.potential) || !(energy > leads->right.potential)) {
        throw NoPropagatingChannelError("energy below the lead band edge; lead is evanescent");
    }
    const auto gap = [&](double x) { return energy - problem.potential_at(x); };
    const Eigen::VectorXd xs = uniform_grid(problem.x_min, problem.x_max, scan_points);

    // Runs of forbidden samples.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> runs;
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        if (gap(xs(i)) < 0.0) {
            if (runs.empty() || runs.back().second != i - 1) {
                runs.push_back({i, i});
            } else {
                runs.back().second = i;
            }
        }
    }
    if (runs.empty()) {
        return 1.0;
    }
    if (runs.size() > 1) {
        throw TopologyError("more than one classically forbidden interval");
    }
    const auto edge = [&](double allowed, double forbidden) {
        while (std::abs(forbidden - allowed) > 1e-10) {
            const double mid = 0.5 * (allowed + forbidden);
            if (mid == allowed || mid == forbidden) {
                break;
            }
            (gap(mid) < 0.0 ? forbidden : allowed) = mid;
        }
        return 0.5 * (allowed + forbidden);
    };
    const auto [first, last] = runs.front();
    const double x1 = first == 0 ? xs(0) : edge(xs(first - 1), xs(first));
    const double x2 = last + 1 == xs.size() ? xs(last) : edge(xs(last + 1), xs(last));
    return std::exp(-2.0 * decay_integral(problem, energy, x1, x2));
}

std::optional<double> piecewise_wkb_determinant(const Problem& problem, double a1, double a2,
                                                double energy)
{
    if (!(a1 < a2) || a1 <= problem.x_min || a2 >= problem.x_max) {
        throw DomainError("interfaces must satisfy x_min < a1 < a2 < x_max");
    }
    const auto rows = matching_rows(problem, a1, a2, energy);
    if (!rows) {
        return std::nullopt;
    }
    return rows->r1p * rows->r2q - rows->r1q * rows->r2p;
}

std::vector<double> piecewise_wkb_bound_states(const Problem& problem, double a1, double a2,
                                               double e_lo, double e_hi, int scan_points,
                                               double tol)
{
    const auto d = [&](double e) {
        return piecewise_wkb_determinant(problem, a1, a2, e).value_or(std::nan(""));
    };
    std::vector<double> out;
    for (const auto& bracket : numerics::scan_sign_changes(d, e_lo, e_hi, scan_points)) {
        out.push_back(numerics::bisect(d, bracket, tol));
    }
    return out;
}

Wavefunction piecewise_wkb_wavefunction(const Problem& problem, double a1, double a2,
                                        double energy, int points)
{
    const auto rows = matching_rows(problem, a1, a2, energy);
    if (!rows) {
        throw DomainError("energy is not inside the well for piecewise WKB");
    }
    double p = rows->r1q;
    double q = -rows->r1p;
    if (p == 0.0 && q == 0.0) {
        p = rows->r2q;
        q = -rows->r2p;
    }
    const double c = problem.constants.hbar2_over_2m0;
    const auto envelope = [&](double x) {
        const double m = problem.mass_at(x);
        return std::sqrt(m / std::sqrt(m * std::abs(energy - problem.potential_at(x)) / c));
    };
    const auto inner = [&](double x) {
        const double theta = phase_integral(problem, energy, a1, x, PhaseMethod::Quadrature);
        return envelope(x) * (p * std::cos(theta) + q * std::sin(theta));
    };
    const double left_out = std::nextafter(a1, -HUGE_VAL);
    const double right_in = std::nextafter(a2, -HUGE_VAL);
    const double psi_a1 = inner(a1);
    const double psi_a2 = inner(right_in);

    Wavefunction wf;
    wf.engine = Engine::WKB;
    wf.energy = energy;
    wf.grid = uniform_grid(problem.x_min, problem.x_max, points);
    wf.values.resize(points);
    for (int i = 0; i < points; ++i) {
        const double x = wf.grid(i);
        double v = 0.0;
        if (x < a1) {
            v = psi_a1 * envelope(x) / envelope(left_out) *
                std::exp(-decay_integral(problem, energy, x, a1));
        } else if (x < a2) {
            v = inner(x);
        } else {
            v = psi_a2 * envelope(x) / envelope(a2) *
                std::exp(-decay_integral(problem, energy, a2, x));
        }
        wf.values(i) = v;
    }
    return normalize(std::move(wf));
}

} // namespace pdem::wkb
