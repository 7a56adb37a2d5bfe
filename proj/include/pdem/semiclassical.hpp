#pragma once

#include <optional>
#include <vector>

#include "pdem/core.hpp"

// Extended WKB engine. A single dimensionless phase theta(x) = int k dx is
// used everywhere (k already carries 1/hbar), and the WKB branches are
//
//     psi(x) ~ sqrt(m*(x)/k(x)) exp(+-i theta(x)).
namespace pdem::wkb {

enum class PhaseMethod {
    Auto,      // closed form where the profile family allows it, otherwise quadrature
    Quadrature // adaptive Simpson always
};

inline constexpr double kPhaseTolerance = 1e-10;

// int_{x_from}^{x_to} k(x) dx over a classically allowed interval. Throws
// DomainError if any evaluated point is forbidden.
double phase_integral(const Problem& problem, double energy, double x_from, double x_to,
                      PhaseMethod method = PhaseMethod::Auto);

// Closed form for a linear mass and a constant potential, if applicable.
std::optional<double> closed_form_phase(const Problem& problem, double energy, double x_from,
                                        double x_to);

// int kappa dx over a forbidden interval, kappa = |k|; allowed points contribute 0.
double decay_integral(const Problem& problem, double energy, double x_from, double x_to);

// WKB spectrum of the linear-mass infinite well on [-a, a], closed form.
// Falls back to the constant-mass well when m1 == m2.
double linear_well_energy(double m1, double m2, double a, int n,
                          const PhysicalConstants& constants = {});

// Solves theta(x_min -> x_max; E) = n pi inside [e_lo, e_hi].
double hard_wall_quantize(const Problem& problem, int n, double e_lo, double e_hi,
                          PhaseMethod method = PhaseMethod::Auto, double tol = 1e-12);

enum class Branch { Rightward, Leftward };

// sqrt(m*/k) exp(+-i theta(x)), phase measured from x_min.
Complex wkb_branch(const Problem& problem, double energy, double x, Branch branch);

inline constexpr int kDefaultWkbPoints = 2048;

// c1 * rightward + c2 * leftward on a uniform grid over the domain.
Wavefunction wkb_wavefunction(const Problem& problem, double energy, Complex c1, Complex c2,
                              int points = kDefaultWkbPoints, bool normalized = true);

// sqrt(m*/k) sin(theta) at the n-th hard-wall WKB energy.
Wavefunction wkb_eigenstate(const Problem& problem, int n, double e_lo, double e_hi,
                            int points = kDefaultWkbPoints);

// exp(-2 int kappa dx) across the single forbidden interval of a scattering
// problem; 1 when nothing is forbidden.
double wkb_transmission(const Problem& problem, double energy, int scan_points = 4096);

// Finite well with sharp interfaces at a1 < a2: decaying WKB branches
// outside, both branches inside, BenDaniel matching at a1 and a2.
// nullopt where E is not below both outer potentials and above the inner one.
std::optional<double> piecewise_wkb_determinant(const Problem& problem, double a1, double a2,
                                                double energy);

std::vector<double> piecewise_wkb_bound_states(const Problem& problem, double a1, double a2,
                                               double e_lo, double e_hi, int scan_points = 2000,
                                               double tol = 1e-9);

Wavefunction piecewise_wkb_wavefunction(const Problem& problem, double a1, double a2,
                                        double energy, int points = kDefaultWkbPoints);

} // namespace pdem::wkb
