#pragma once

#include <vector>

#include <Eigen/Core>

#include "pdem/core.hpp"

// Slab transfer-matrix engine. The domain is cut into uniform slabs with the
// mass and potential frozen at each slab center; inside slab j
//
//     psi(x) = t_j exp(i k_j x) + r_j exp(-i k_j x),
//
// and psi, psi'/m* are matched at every slab boundary y_j (BenDaniel-Duke).
// Phases use the absolute coordinate x, not a per-slab origin.
namespace pdem::tmm {

using ComplexMatrix2 = Eigen::Matrix2cd;
using AmplitudePair = Eigen::Vector2cd; // (t, r)

struct Slabbing {
    double x_min = 0.0;
    double x_max = 0.0;
    Eigen::VectorXd centers;    // x_j, size N
    Eigen::VectorXd boundaries; // interior y_j between slab j and j+1, size N - 1
    Eigen::VectorXd mass;       // m*(x_j)
    Eigen::VectorXd potential;  // V(x_j)

    Eigen::Index count() const { return centers.size(); }
    double width() const { return (x_max - x_min) / static_cast<double>(count()); }
    double left_edge(Eigen::Index j) const { return j == 0 ? x_min : boundaries(j - 1); }
    double right_edge(Eigen::Index j) const { return j + 1 == count() ? x_max : boundaries(j); }
    Eigen::Index slab_of(double x) const;
};

Slabbing build_slabs(const Problem& problem, Eigen::Index slabs);

// Slabs closer than this to a turning point get V_j moved to E - kTurningPointShift.
inline constexpr double kTurningPointShift = 1e-12;

// Per-slab wavenumbers k_j and flux velocities h_j = k_j / m*_j at one energy.
struct SlabWaves {
    Eigen::VectorXcd k;
    Eigen::VectorXcd h;
};

SlabWaves slab_waves(const Problem& problem, double energy, const Slabbing& slabbing);

// Matrix carrying (t_j, r_j) across boundary y into (t_{j+1}, r_{j+1}), with
// psi_j = t_j e^{i k_j x} + r_j e^{-i k_j x}. Its determinant is rho = h_j / h_{j+1}.
ComplexMatrix2 local_transfer_matrix(Complex h_j, Complex h_next, Complex k_j, Complex k_next,
                                     double y);

// Same matrix for amplitudes whose phases are measured from per-slab origins,
// psi_j = t_j e^{i k_j (x - origin_j)} + ... Related to the absolute form by
// diagonal phase factors, so the determinant is unchanged. Keeps e^{kappa x}
// factors bounded when barriers sit far from x = 0.
ComplexMatrix2 local_transfer_matrix(Complex h_j, Complex h_next, Complex k_j, Complex k_next,
                                     double y, double origin_j, double origin_next);

// Amplitudes reproducing given psi and psi'/m* at x inside a region with
// wavenumber k and flux velocity h.
AmplitudePair amplitudes_from_state(Complex k, Complex h, double x, Complex psi,
                                    Complex psi_over_mass_derivative);

// psi(x_min) = 0 and psi'/m*(x_min) = 1 in the first slab, phases from its center.
AmplitudePair hard_wall_launch(const SlabWaves& waves, const Slabbing& slabbing);

// Amplitudes of every slab, phases measured from the slab center (origins).
// Pair j is stored divided by exp(log_scale[j]);
// rescaling happens only when magnitudes leave [1e-150, 1e150], checked every
// 64 slabs, so for moderate problems every log_scale is zero.
struct AmplitudeChain {
    double energy = 0.0;
    SlabWaves waves;
    Eigen::VectorXd origins;
    std::vector<AmplitudePair> pairs;
    std::vector<double> log_scale;
    double max_log_scale = 0.0;

    // psi and psi'/m* from slab j's amplitudes at x, relative to the largest scale.
    Complex psi(Eigen::Index j, double x) const;
    Complex flux_derivative(Eigen::Index j, double x) const;
};

AmplitudeChain propagate(const Problem& problem, double energy, const Slabbing& slabbing,
                         const AmplitudePair& initial);

// psi at an arbitrary x, using the slab that owns x.
Complex evaluate(const AmplitudeChain& chain, const Slabbing& slabbing, double x);

// Product of all local matrices from slab 0 to slab N-1, as scale * matrix.
// Maps center-referenced amplitudes of the first slab to those of the last.
struct TransferProduct {
    ComplexMatrix2 matrix;
    double log_scale = 0.0;
};

TransferProduct total_transfer_matrix(const Problem& problem, double energy,
                                      const Slabbing& slabbing);

// Re psi(x_max) for the hard-wall launch. Real because every matching
// condition is real; continuous in E and zero exactly at an N-slab eigenvalue.
double boundary_mismatch(const Problem& problem, double energy, const Slabbing& slabbing);
double boundary_mismatch(const Problem& problem, double energy, Eigen::Index slabs);

using pdem::Eigenvalue;

inline constexpr int kDefaultScanPoints = 2000;
inline constexpr double kDefaultTolerance = 1e-9;

std::vector<Eigenvalue> find_eigenvalues(const Problem& problem, double e_lo, double e_hi,
                                         Eigen::Index slabs, int scan_points = kDefaultScanPoints,
                                         double tol = kDefaultTolerance);

// Samples psi with points_per_slab points in every slab plus x_max.
Wavefunction reconstruct_wavefunction(const Problem& problem, const Slabbing& slabbing,
                                      const AmplitudeChain& chain, int points_per_slab = 8,
                                      bool normalized = true);

// Hard-wall state at energy E: launch, propagate and reconstruct.
Wavefunction eigenstate(const Problem& problem, double energy, Eigen::Index slabs,
                        int points_per_slab = 8);

int node_count(const AmplitudeChain& chain, const Slabbing& slabbing);

// Sign changes of the hard-wall shooting solution on (x_min, x_max] at E.
// Equals the number of N-slab levels below E; insensitive to tail growth.
int sturm_count(const Problem& problem, double energy, const Slabbing& slabbing);

struct Transmission {
    double transmitted = 0.0;
    double reflected = 0.0;
};

// Flux transmission for a wave incident from the left lead.
Transmission transmission(const Problem& problem, double energy, Eigen::Index slabs);

} // namespace pdem::tmm
