#pragma once

#include <complex>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "pdem/error.hpp"

// Units throughout: lengths in nm, energies in eV, masses in units of the
// free-electron mass m0. The only physical constant is hbar^2/(2 m0).
namespace pdem {

using Complex = std::complex<double>;

struct PhysicalConstants {
    double hbar2_over_2m0 = 0.0380998; // eV nm^2
};

enum class Quantity { Mass, Potential };

struct ConstantProfile {
    double value;
};

// Straight line through (x_left, value_left) and (x_right, value_right),
// extended linearly outside that interval.
struct LinearProfile {
    double x_left;
    double x_right;
    double value_left;
    double value_right;

    double slope() const { return (value_right - value_left) / (x_right - x_left); }
};

// values.size() == breakpoints.size() + 1. A breakpoint belongs to the
// region on its right.
struct PiecewiseConstantProfile {
    std::vector<double> breakpoints;
    std::vector<double> values;
};

// Linear interpolation between samples, clamped to the end values outside.
struct TabulatedProfile {
    std::vector<double> x;
    std::vector<double> values;
};

class Profile {
public:
    using Kind = std::variant<ConstantProfile, LinearProfile, PiecewiseConstantProfile,
                              TabulatedProfile>;

    static Profile constant(Quantity q, double value);
    static Profile linear(Quantity q, double x_left, double x_right, double value_left,
                          double value_right);
    static Profile piecewise_constant(Quantity q, std::vector<double> breakpoints,
                                      std::vector<double> values);
    static Profile tabulated(Quantity q, std::vector<double> x, std::vector<double> values);

    const Kind& kind() const { return kind_; }
    Quantity quantity() const { return quantity_; }

    // Derivatives are exact for every kind except Tabulated.
    bool analytic() const { return !std::holds_alternative<TabulatedProfile>(kind_); }

    // Points where the profile jumps (PiecewiseConstant) or has kinks (Tabulated).
    std::vector<double> singular_points() const;

private:
    Profile(Quantity q, Kind kind);

    Quantity quantity_;
    Kind kind_;
};

double eval_profile(const Profile& profile, double x);
double profile_derivative(const Profile& profile, double x);
double profile_second_derivative(const Profile& profile, double x);

// Step used for finite-difference derivatives of tabulated profiles.
inline constexpr double kProfileDerivativeStep = 1e-5;

struct HardWall {};

// Semi-infinite uniform leads attached at x_min and x_max.
struct Lead {
    double mass;
    double potential;
};

struct Scattering {
    Lead left;
    Lead right;
};

using Boundary = std::variant<HardWall, Scattering>;

struct Problem {
    Problem(double x_min, double x_max, Profile mass, Profile potential,
            Boundary boundary = HardWall{}, PhysicalConstants constants = {});

    double x_min;
    double x_max;
    Profile mass;
    Profile potential;
    Boundary boundary;
    PhysicalConstants constants;

    bool hard_wall() const { return std::holds_alternative<HardWall>(boundary); }
    double length() const { return x_max - x_min; }
    double mass_at(double x) const { return eval_profile(mass, x); }
    double potential_at(double x) const { return eval_profile(potential, x); }
};

// Infinite well on [-a, a] with m*(x) = (m1 - m2)/(2a) x + (m1 + m2)/2 and V = 0.
Problem linear_well(double m1, double m2, double a, PhysicalConstants constants = {});

// sqrt(2 m (E - V))/hbar on the principal branch: real and positive when
// E > V, +i*kappa when E < V, zero at a turning point.
Complex local_wavenumber(double mass, double potential, double energy,
                         const PhysicalConstants& constants);
Complex wavenumber(const Problem& problem, double energy, double x);

struct Eigenvalue {
    int n = 0; // 1-based state index
    double energy = 0.0;
};

enum class Engine { TMM, CoupledODE, WKB, Airy };

std::string_view engine_name(Engine engine);

struct Wavefunction {
    Eigen::VectorXd grid;
    Eigen::VectorXcd values;
    double energy = 0.0;
    Engine engine = Engine::TMM;
    bool normalized = false;
};

Eigen::VectorXd uniform_grid(double a, double b, Eigen::Index points);

double trapezoid(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
double norm_squared(const Wavefunction& wf);

// Rescales to unit norm and rotates the global phase so the sample of largest
// magnitude is real and positive.
Wavefunction normalize(Wavefunction wf);

// Sign changes of the phase-aligned real part, endpoints excluded. Samples
// below rel_threshold * max|psi| are treated as zero and skipped.
int count_nodes(const Wavefunction& wf, double rel_threshold = 1e-8);

// Least-squares fit of |psi|^2 local maxima against scale * sqrt(m*(x)).
struct EnvelopeFit {
    double scale = 0.0;
    double max_relative_deviation = 0.0;
    double rms_relative_deviation = 0.0;
    std::vector<double> peak_x;
    std::vector<double> peak_height;
};

EnvelopeFit fit_envelope(const Wavefunction& wf, const Profile& mass);

// Max |-C (psi'/m)' + (V - E) psi| over interior points of a uniform grid,
// using the conservative three-point stencil with m at the half points.
double schrodinger_residual(const Problem& problem, double energy, const Eigen::VectorXd& grid,
                            const Eigen::VectorXcd& psi);

} // namespace pdem
