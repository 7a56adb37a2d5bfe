#pragma once

#include <functional>
#include <vector>

#include "pdem/core.hpp"
#include "pdem/semiclassical.hpp"
#include "pdem/tmm.hpp"

// Continuous limit of the slab engine: amplitudes t(x), r(x) obeying
// d/dx (t, r) = Gamma(x) (t, r), with psi = t exp(i k x) + r exp(-i k x).
namespace pdem::coupled {

using tmm::AmplitudePair;
using tmm::ComplexMatrix2;

struct AmplitudeTrajectory {
    double energy = 0.0;
    Eigen::VectorXd x;
    std::vector<AmplitudePair> amplitudes;
};

// Gamma(x) with the explicit x-dependence of the absolute-origin phases:
//   diag:  -+ i x k' - (m*/2k)(k/m*)'
//   off:   (m*/2k)(k/m*)' exp(-+2 i x k)
// Throws TurningPointError within 1e-12 eV of a turning point.
ComplexMatrix2 gamma_matrix(const Problem& problem, double energy, double x);

using GammaFunction = std::function<ComplexMatrix2(double)>;

// Classical fourth-order Runge-Kutta with a fixed step for d/dx v = G(x) v.
AmplitudeTrajectory integrate_linear_system(const GammaFunction& gamma, double x_start,
                                            double x_end, const AmplitudePair& initial, int steps);

inline constexpr int kMinimumSteps = 16;

AmplitudeTrajectory integrate_coupled(const Problem& problem, double energy, double x_start,
                                      double x_end, const AmplitudePair& initial, int steps);

inline Complex psi_from_amplitudes(Complex t, Complex r, Complex k, double x)
{
    const Complex phase = std::exp(Complex(0.0, 1.0) * k * x);
    return t * phase + r / phase;
}

// Amplitudes with psi(x) and psi'/m*(x) prescribed, using the local k at x.
AmplitudePair amplitudes_at(const Problem& problem, double energy, double x, Complex psi,
                            Complex psi_over_mass_derivative);

Wavefunction reconstruct_wavefunction(const Problem& problem,
                                      const AmplitudeTrajectory& trajectory,
                                      bool normalized = true);

// max |T_j - I - Gamma(y) dx| with T_j built from slabs centred at y -+ dx/2.
double first_order_consistency(const Problem& problem, double energy, double y, double dx);

// Decoupled solution (off-diagonal Gamma dropped), c = 1, phase from x_min.
Complex decoupled_closed_form(const Problem& problem, double energy, double x,
                              wkb::Branch branch);

// Shooting in the continuum picture: psi(x_min) = 0, psi'/m* = 1, returns Re psi(x_max).
double boundary_mismatch(const Problem& problem, double energy, int steps);

std::vector<Eigenvalue> find_eigenvalues(const Problem& problem, double e_lo, double e_hi,
                                              int steps, int scan_points, double tol);

// Hard-wall state at E: launch at x_min, integrate and reconstruct (normalized).
Wavefunction eigenstate(const Problem& problem, double energy, int steps);

} // namespace pdem::coupled
