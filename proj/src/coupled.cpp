#include "pdem/coupled.hpp"

#include <cmath>

#include "pdem/numerics.hpp"

namespace pdem::coupled {

namespace {

const Complex kI{0.0, 1.0};

AmplitudePair rk4_step(const ComplexMatrix2& g0, const ComplexMatrix2& gmid,
                       const ComplexMatrix2& g1, const AmplitudePair& v, double h)
{
    const AmplitudePair k1 = g0 * v;
    const AmplitudePair k2 = gmid * (v + 0.5 * h * k1);
    const AmplitudePair k3 = gmid * (v + 0.5 * h * k2);
    const AmplitudePair k4 = g1 * (v + h * k3);
    return v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void require_steps(int steps)
{
    if (steps < kMinimumSteps) {
        throw DiscretizationError("coupled integration needs at least 16 steps");
    }
}

} // namespace

ComplexMatrix2 gamma_matrix(const Problem& problem, double energy, double x)
{
    const double m = problem.mass_at(x);
    const double v = problem.potential_at(x);
    const double excess = energy - v;
    if (std::abs(excess) < 1e-12) {
        throw TurningPointError("Gamma is singular at a turning point");
    }
    const double dm = profile_derivative(problem.mass, x);
    const double dv = profile_derivative(problem.potential, x);
    const double c = problem.constants.hbar2_over_2m0;

    const Complex k = local_wavenumber(m, v, energy, problem.constants);
    // k^2 = m (E - V) / C  =>  2 k k' = (m' (E - V) - m V') / C
    const Complex dk = (dm * excess - m * dv) / (2.0 * c * k);
    const Complex g = dk / (2.0 * k) - dm / (2.0 * m);
    const Complex twist = std::exp(2.0 * kI * x * k);

    ComplexMatrix2 gamma;
    gamma << -kI * x * dk - g, g / twist, g * twist, kI * x * dk - g;
    return gamma;
}

AmplitudeTrajectory integrate_linear_system(const GammaFunction& gamma, double x_start,
                                            double x_end, const AmplitudePair& initial, int steps)
{
    require_steps(steps);
    AmplitudeTrajectory traj;
    traj.x = uniform_grid(x_start, x_end, steps + 1);
    traj.amplitudes.reserve(static_cast<std::size_t>(steps) + 1);
    traj.amplitudes.push_back(initial);

    const double h = (x_end - x_start) / steps;
    ComplexMatrix2 g0 = gamma(traj.x(0));
    AmplitudePair v = initial;
    for (int i = 0; i < steps; ++i) {
        const double x = traj.x(i);
        const ComplexMatrix2 gmid = gamma(x + 0.5 * h);
        const ComplexMatrix2 g1 = gamma(traj.x(i + 1));
        v = rk4_step(g0, gmid, g1, v, h);
        traj.amplitudes.push_back(v);
        g0 = g1;
    }
    return traj;
}

AmplitudeTrajectory integrate_coupled(const Problem& problem, double energy, double x_start,
                                      double x_end, const AmplitudePair& initial, int steps)
{
    auto traj = integrate_linear_system(
        [&](double x) { return gamma_matrix(problem, energy, x); }, x_start, x_end, initial,
        steps);
    traj.energy = energy;
    return traj;
}

AmplitudePair amplitudes_at(const Problem& problem, double energy, double x, Complex psi,
                            Complex psi_over_mass_derivative)
{
    const Complex k = wavenumber(problem, energy, x);
    return tmm::amplitudes_from_state(k, k / problem.mass_at(x), x, psi,
                                      psi_over_mass_derivative);
}

Wavefunction reconstruct_wavefunction(const Problem& problem,
                                      const AmplitudeTrajectory& trajectory, bool normalized)
{
    Wavefunction wf;
    wf.engine = Engine::CoupledODE;
    wf.energy = trajectory.energy;
    wf.grid = trajectory.x;
    wf.values.resize(trajectory.x.size());
    for (Eigen::Index i = 0; i < trajectory.x.size(); ++i) {
        const double x = trajectory.x(i);
        const auto& a = trajectory.amplitudes[static_cast<std::size_t>(i)];
        wf.values(i) = psi_from_amplitudes(a(0), a(1), wavenumber(problem, trajectory.energy, x), x);
    }
    return normalized ? normalize(std::move(wf)) : wf;
}

double first_order_consistency(const Problem& problem, double energy, double y, double dx)
{
    const double xl = y - 0.5 * dx;
    const double xr = y + 0.5 * dx;
    const Complex kl = wavenumber(problem, energy, xl);
    const Complex kr = wavenumber(problem, energy, xr);
    if (kl == 0.0 || kr == 0.0) {
        throw TurningPointError("first-order consistency evaluated at a turning point");
    }
    const ComplexMatrix2 t = tmm::local_transfer_matrix(kl / problem.mass_at(xl),
                                                        kr / problem.mass_at(xr), kl, kr, y);
    const ComplexMatrix2 linear = ComplexMatrix2::Identity() + gamma_matrix(problem, energy, y) * dx;
    return (t - linear).cwiseAbs().maxCoeff();
}

Complex decoupled_closed_form(const Problem& problem, double energy, double x, wkb::Branch branch)
{
    return wkb::wkb_branch(problem, energy, x, branch);
}

double boundary_mismatch(const Problem& problem, double energy, int steps)
{
    if (!problem.hard_wall()) {
        throw BoundaryKindError("boundary_mismatch requires a hard-wall problem");
    }
    require_steps(steps);
    const double h = problem.length() / steps;
    AmplitudePair v = amplitudes_at(problem, energy, problem.x_min, 0.0, 1.0);
    ComplexMatrix2 g0 = gamma_matrix(problem, energy, problem.x_min);
    for (int i = 0; i < steps; ++i) {
        const double x = problem.x_min + i * h;
        const double x1 = i + 1 == steps ? problem.x_max : x + h;
        const ComplexMatrix2 gmid = gamma_matrix(problem, energy, x + 0.5 * h);
        const ComplexMatrix2 g1 = gamma_matrix(problem, energy, x1);
        v = rk4_step(g0, gmid, g1, v, h);
        g0 = g1;
    }
    const Complex k = wavenumber(problem, energy, problem.x_max);
    return psi_from_amplitudes(v(0), v(1), k, problem.x_max).real();
}

std::vector<Eigenvalue> find_eigenvalues(const Problem& problem, double e_lo, double e_hi,
                                              int steps, int scan_points, double tol)
{
    if (!(e_lo < e_hi) || scan_points < 2 || !(tol > 0.0)) {
        throw DomainError("find_eigenvalues requires e_lo < e_hi, scan_points >= 2, tol > 0");
    }
    const auto mismatch = [&](double e) {
        try {
            return boundary_mismatch(problem, e, steps);
        } catch (const TurningPointError&) {
            return std::nan("");
        }
    };
    std::vector<Eigenvalue> out;
    for (const auto& bracket : numerics::scan_sign_changes(mismatch, e_lo, e_hi, scan_points)) {
        const double e = numerics::bisect(mismatch, bracket, tol);
        out.push_back({count_nodes(eigenstate(problem, e, steps)) + 1, e});
    }
    return out;
}

Wavefunction eigenstate(const Problem& problem, double energy, int steps)
{
    const auto traj =
        integrate_coupled(problem, energy, problem.x_min, problem.x_max,
                          amplitudes_at(problem, energy, problem.x_min, 0.0, 1.0), steps);
    return reconstruct_wavefunction(problem, traj, true);
}

} // namespace pdem::coupled
