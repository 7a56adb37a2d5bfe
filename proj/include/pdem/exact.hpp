#pragma once

#include <vector>

#include "pdem/core.hpp"

// Reference solutions: Airy functions, the exact linear-mass infinite well
// and the change of variables to a constant-mass equation.
namespace pdem::exact {

struct AiryPair {
    double ai = 0.0;
    double bi = 0.0;
    double ai_prime = 0.0;
    double bi_prime = 0.0;
};

inline constexpr double kAiryRange = 25.0;

// Ai, Bi and their derivatives for |y| <= 25; RangeError beyond.
AiryPair airy(double y);

// Linear-mass well m*(x) = (m1 - m2)/(2a) x + (m1 + m2)/2 on [-a, a], V = 0.
//
// With u = psi'/m*, the equation -C (psi'/m*)' = E psi gives psi = -(C/E) u'
// and u'' = -(E m*(x)/C) u. The substitution
//   y = -((m1 - m2) E / (2 C a))^(1/3) (x + (m1 + m2) a / (m1 - m2))
// turns this into Airy's equation u_yy = y u, and psi(+-a) = 0 becomes
// u_y(y(+-a)) = 0, so the eigenvalues are the zeros of
//   D(E) = Ai'(y(-a)) Bi'(y(a)) - Ai'(y(a)) Bi'(y(-a)).
struct LinearWell {
    double m1 = 0.1;
    double m2 = 0.2;
    double a = 5.0;
    PhysicalConstants constants{};

    bool constant_mass() const;
    double airy_argument(double energy, double x) const;
    double determinant(double energy) const;
};

struct ExactSpectrum {
    std::vector<Eigenvalue> levels;
    bool truncated = false; // fewer than n_max levels were found
};

inline constexpr double kExactTolerance = 1e-12;

// Lowest n_max levels. Equal masses use the constant-mass closed form.
ExactSpectrum linear_well_exact_spectrum(const LinearWell& well, int n_max,
                                         double tol = kExactTolerance);

// Levels in [e_lo, e_hi], indexed by counting from the ground state.
ExactSpectrum linear_well_exact_spectrum(const LinearWell& well, double e_lo, double e_hi,
                                         double tol = kExactTolerance);

// psi(x) proportional to A Ai'(y(x)) + B Bi'(y(x)), normalized on a uniform grid.
Wavefunction linear_well_exact_wavefunction(const LinearWell& well, int n, int points = 2048);
Wavefunction linear_well_exact_wavefunction_at(const LinearWell& well, double energy,
                                               int points = 2048);

enum class FReading {
    RelativeToMass, // -C/(4m) [m''/m - 7/4 (m'/m)^2]
    Literal         // -C/(4m) [m''/m - 7/4 (m')^2]
};

// Potential correction F(x) of the constant-mass transform, in eV.
double f_correction(const Problem& problem, double x, FReading reading = FReading::RelativeToMass);

// y = int sqrt(m*) dx, phi = psi / m*^(1/4), effective potential V + F.
class TransformedProblem {
public:
    TransformedProblem(const Problem& source, int grid_points, FReading reading);

    const Eigen::VectorXd& x() const { return x_; }
    const Eigen::VectorXd& y() const { return y_; }
    const Eigen::VectorXd& effective_potential() const { return potential_; }

    double y_of(double x) const;
    double x_of(double y) const;

    // Unit-mass hard-wall problem on [0, y_max] with the tabulated effective potential.
    Problem constant_mass_problem() const;

private:
    double segment(double x_from, double x_to) const;

    Problem source_;
    Eigen::VectorXd x_;
    Eigen::VectorXd y_;
    Eigen::VectorXd potential_;
};

TransformedProblem to_constant_mass(const Problem& problem, int grid_points,
                                    FReading reading = FReading::RelativeToMass);

} // namespace pdem::exact
