#include "pdem/tmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdem/numerics.hpp"

namespace pdem::tmm {

namespace {

constexpr double kRescaleHigh = 1e150;
constexpr double kRescaleLow = 1e-150;
constexpr int kRescaleInterval = 64;

const Complex kI{0.0, 1.0};

void require_hard_wall(const Problem& problem)
{
    if (!problem.hard_wall()) {
        throw BoundaryKindError("operation requires a hard-wall problem");
    }
}

Complex lead_velocity(const Lead& lead, double energy, const PhysicalConstants& constants,
                      Complex& k)
{
    if (!(energy > lead.potential)) {
        throw NoPropagatingChannelError("energy below the lead band edge; lead is evanescent");
    }
    k = local_wavenumber(lead.mass, lead.potential, energy, constants);
    return k / lead.mass;
}

// Component-wise division by a real factor. Eigen's own operator/= promotes m
// to complex and squares it, which overflows for m beyond ~1e154.
template <typename M>
void divide_by(M& a, double m)
{
    a = a.unaryExpr([m](const Complex& c) { return Complex(c.real() / m, c.imag() / m); });
}

// Rescales v in place when its magnitude drifts outside the safe band.
void keep_in_range(AmplitudePair& v, double& log_scale)
{
    const double m = std::max(std::abs(v(0)), std::abs(v(1)));
    if (m > kRescaleHigh || (m < kRescaleLow && m > 0.0)) {
        divide_by(v, m);
        log_scale += std::log(m);
    }
}

double scaled(double value, double log_scale)
{
    const double r = value * std::exp(log_scale);
    if (std::isfinite(r)) {
        return r;
    }
    return std::copysign(std::numeric_limits<double>::max(), value);
}

} // namespace

Eigen::Index Slabbing::slab_of(double x) const
{
    const Eigen::Index n = count();
    auto j = static_cast<Eigen::Index>(std::floor((x - x_min) / width()));
    j = std::clamp<Eigen::Index>(j, 0, n - 1);
    if (j > 0 && x < boundaries(j - 1)) {
        --j;
    } else if (j + 1 < n && x >= boundaries(j)) {
        ++j;
    }
    return j;
}

Slabbing build_slabs(const Problem& problem, Eigen::Index slabs)
{
    if (slabs < 2) {
        throw DiscretizationError("slab count must be at least 2");
    }
    Slabbing s;
    s.x_min = problem.x_min;
    s.x_max = problem.x_max;
    const double w = problem.length() / static_cast<double>(slabs);
    s.centers.resize(slabs);
    s.boundaries.resize(slabs - 1);
    s.mass.resize(slabs);
    s.potential.resize(slabs);
    for (Eigen::Index j = 0; j < slabs; ++j) {
        s.centers(j) = problem.x_min + (static_cast<double>(j) + 0.5) * w;
        s.mass(j) = problem.mass_at(s.centers(j));
        s.potential(j) = problem.potential_at(s.centers(j));
        if (j + 1 < slabs) {
            s.boundaries(j) = problem.x_min + static_cast<double>(j + 1) * w;
        }
    }
    return s;
}

SlabWaves slab_waves(const Problem& problem, double energy, const Slabbing& slabbing)
{
    const Eigen::Index n = slabbing.count();
    SlabWaves w;
    w.k.resize(n);
    w.h.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double v = slabbing.potential(j);
        if (std::abs(energy - v) < kTurningPointShift) {
            v = energy - kTurningPointShift;
        }
        w.k(j) = local_wavenumber(slabbing.mass(j), v, energy, problem.constants);
        w.h(j) = w.k(j) / slabbing.mass(j);
    }
    return w;
}

ComplexMatrix2 local_transfer_matrix(Complex h_j, Complex h_next, Complex k_j, Complex k_next,
                                     double y)
{
    return local_transfer_matrix(h_j, h_next, k_j, k_next, y, 0.0, 0.0);
}

ComplexMatrix2 local_transfer_matrix(Complex h_j, Complex h_next, Complex k_j, Complex k_next,
                                     double y, double origin_j, double origin_next)
{
    if (k_next == 0.0 || h_next == 0.0) {
        throw TurningPointError("transfer matrix undefined: slab sits on a turning point");
    }
    const Complex rho = h_j / h_next;
    const Complex same = 0.5 * (1.0 + rho);
    const Complex cross = 0.5 * (1.0 - rho);
    const Complex a = k_j * (y - origin_j);
    const Complex b = k_next * (y - origin_next);
    const Complex diff_phase = std::exp(kI * (a - b));
    const Complex sum_phase = std::exp(kI * (a + b));
    ComplexMatrix2 t;
    t << same * diff_phase, cross / sum_phase, cross * sum_phase, same / diff_phase;
    return t;
}

AmplitudePair amplitudes_from_state(Complex k, Complex h, double x, Complex psi,
                                    Complex psi_over_mass_derivative)
{
    if (h == 0.0) {
        throw TurningPointError("amplitudes undefined at a turning point");
    }
    const Complex q = psi_over_mass_derivative / (kI * h);
    const Complex phase = std::exp(kI * k * x);
    return AmplitudePair(0.5 * (psi + q) / phase, 0.5 * (psi - q) * phase);
}

AmplitudePair hard_wall_launch(const SlabWaves& waves, const Slabbing& slabbing)
{
    return amplitudes_from_state(waves.k(0), waves.h(0), slabbing.x_min - slabbing.centers(0),
                                 0.0, 1.0);
}

Complex AmplitudeChain::psi(Eigen::Index j, double x) const
{
    const auto idx = static_cast<std::size_t>(j);
    const Complex e = std::exp(kI * waves.k(j) * (x - origins(j)));
    const Complex v = pairs[idx](0) * e + pairs[idx](1) / e;
    return log_scale[idx] == max_log_scale ? v : v * std::exp(log_scale[idx] - max_log_scale);
}

Complex AmplitudeChain::flux_derivative(Eigen::Index j, double x) const
{
    const auto idx = static_cast<std::size_t>(j);
    const Complex e = std::exp(kI * waves.k(j) * (x - origins(j)));
    const Complex v = kI * waves.h(j) * (pairs[idx](0) * e - pairs[idx](1) / e);
    return log_scale[idx] == max_log_scale ? v : v * std::exp(log_scale[idx] - max_log_scale);
}

AmplitudeChain propagate(const Problem& problem, double energy, const Slabbing& slabbing,
                         const AmplitudePair& initial)
{
    if (initial(0) == 0.0 && initial(1) == 0.0) {
        throw DegenerateWavefunctionError("initial amplitudes must not both vanish");
    }
    const Eigen::Index n = slabbing.count();
    AmplitudeChain chain;
    chain.energy = energy;
    chain.waves = slab_waves(problem, energy, slabbing);
    chain.origins = slabbing.centers;
    chain.pairs.resize(static_cast<std::size_t>(n));
    chain.log_scale.assign(static_cast<std::size_t>(n), 0.0);

    AmplitudePair current = initial;
    double log_scale = 0.0;
    chain.pairs[0] = current;
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        const ComplexMatrix2 t =
            local_transfer_matrix(chain.waves.h(j), chain.waves.h(j + 1), chain.waves.k(j),
                                  chain.waves.k(j + 1), slabbing.boundaries(j),
                                  slabbing.centers(j), slabbing.centers(j + 1));
        current = t * current;
        if ((j + 1) % kRescaleInterval == 0) {
            keep_in_range(current, log_scale);
        }
        const auto idx = static_cast<std::size_t>(j + 1);
        chain.pairs[idx] = current;
        chain.log_scale[idx] = log_scale;
    }
    chain.max_log_scale = *std::max_element(chain.log_scale.begin(), chain.log_scale.end());
    return chain;
}

Complex evaluate(const AmplitudeChain& chain, const Slabbing& slabbing, double x)
{
    return chain.psi(slabbing.slab_of(x), x);
}

TransferProduct total_transfer_matrix(const Problem& problem, double energy,
                                      const Slabbing& slabbing)
{
    const SlabWaves w = slab_waves(problem, energy, slabbing);
    TransferProduct p{ComplexMatrix2::Identity(), 0.0};
    for (Eigen::Index j = 0; j + 1 < slabbing.count(); ++j) {
        p.matrix = local_transfer_matrix(w.h(j), w.h(j + 1), w.k(j), w.k(j + 1),
                                         slabbing.boundaries(j), slabbing.centers(j),
                                         slabbing.centers(j + 1)) *
                   p.matrix;
        const double m = p.matrix.cwiseAbs().maxCoeff();
        if (m > kRescaleHigh) {
            divide_by(p.matrix, m);
            p.log_scale += std::log(m);
        }
    }
    return p;
}

double boundary_mismatch(const Problem& problem, double energy, const Slabbing& slabbing)
{
    require_hard_wall(problem);
    const SlabWaves w = slab_waves(problem, energy, slabbing);
    AmplitudePair current = hard_wall_launch(w, slabbing);
    double log_scale = 0.0;
    const Eigen::Index n = slabbing.count();
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        current = local_transfer_matrix(w.h(j), w.h(j + 1), w.k(j), w.k(j + 1),
                                        slabbing.boundaries(j), slabbing.centers(j),
                                        slabbing.centers(j + 1)) *
                  current;
        if ((j + 1) % kRescaleInterval == 0) {
            keep_in_range(current, log_scale);
        }
    }
    const Complex e = std::exp(kI * w.k(n - 1) * (slabbing.x_max - slabbing.centers(n - 1)));
    const Complex psi_end = current(0) * e + current(1) / e;
    return scaled(psi_end.real(), log_scale);
}

double boundary_mismatch(const Problem& problem, double energy, Eigen::Index slabs)
{
    require_hard_wall(problem);
    return boundary_mismatch(problem, energy, build_slabs(problem, slabs));
}

int node_count(const AmplitudeChain& chain, const Slabbing& slabbing)
{
    Wavefunction wf;
    wf.grid = slabbing.centers;
    wf.values.resize(slabbing.count());
    for (Eigen::Index j = 0; j < slabbing.count(); ++j) {
        wf.values(j) = chain.psi(j, slabbing.centers(j));
    }
    return count_nodes(wf);
}

int sturm_count(const Problem& problem, double energy, const Slabbing& slabbing)
{
    require_hard_wall(problem);
    const SlabWaves w = slab_waves(problem, energy, slabbing);
    const AmplitudeChain chain =
        propagate(problem, energy, slabbing, hard_wall_launch(w, slabbing));
    // Stored pairs only carry positive scale factors, so signs need no rescaling.
    const auto sign_at = [&](Eigen::Index j, double x) {
        const Complex e = std::exp(kI * w.k(j) * (x - slabbing.centers(j)));
        const double v = (chain.pairs[j](0) * e + chain.pairs[j](1) / e).real();
        return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    };
    int changes = 0;
    int last = 0;
    const auto visit = [&](int sign) {
        if (sign != 0) {
            changes += last != 0 && sign != last;
            last = sign;
        }
    };
    const Eigen::Index n = slabbing.count();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j > 0) {
            visit(sign_at(j, slabbing.left_edge(j)));
        }
        visit(sign_at(j, slabbing.centers(j)));
    }
    visit(sign_at(n - 1, slabbing.x_max));
    return changes;
}

std::vector<Eigenvalue> find_eigenvalues(const Problem& problem, double e_lo, double e_hi,
                                         Eigen::Index slabs, int scan_points, double tol)
{
    require_hard_wall(problem);
    if (!(e_lo < e_hi) || scan_points < 2 || !(tol > 0.0)) {
        throw DomainError("find_eigenvalues requires e_lo < e_hi, scan_points >= 2, tol > 0");
    }
    const Slabbing slabbing = build_slabs(problem, slabs);
    const auto mismatch = [&](double e) { return boundary_mismatch(problem, e, slabbing); };

    std::vector<Eigenvalue> out;
    for (const auto& bracket : numerics::scan_sign_changes(mismatch, e_lo, e_hi, scan_points)) {
        const double e = numerics::bisect(mismatch, bracket, tol);
        if (bracket.lo < bracket.hi) {
            // Zeros of the shooting solution just below the level count the levels beneath it.
            out.push_back({sturm_count(problem, bracket.lo, slabbing) + 1, e});
            continue;
        }
        const AmplitudeChain chain =
            propagate(problem, e, slabbing,
                      hard_wall_launch(slab_waves(problem, e, slabbing), slabbing));
        out.push_back({node_count(chain, slabbing) + 1, e});
    }
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].n <= out[i - 1].n) {
            throw ConvergenceError("node counts of bracketed states are not increasing; "
                                   "refine the scan or the slab count");
        }
    }
    return out;
}

Wavefunction reconstruct_wavefunction(const Problem& problem, const Slabbing& slabbing,
                                      const AmplitudeChain& chain, int points_per_slab,
                                      bool normalized)
{
    (void)problem;
    if (points_per_slab < 1) {
        throw DiscretizationError("points_per_slab must be positive");
    }
    const Eigen::Index n = slabbing.count();
    const Eigen::Index total = n * points_per_slab + 1;
    Wavefunction wf;
    wf.engine = Engine::TMM;
    wf.energy = chain.energy;
    wf.grid.resize(total);
    wf.values.resize(total);
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double left = slabbing.left_edge(j);
        const double step = (slabbing.right_edge(j) - left) / points_per_slab;
        for (int i = 0; i < points_per_slab; ++i) {
            const double x = left + i * step;
            wf.grid(idx) = x;
            wf.values(idx) = chain.psi(j, x);
            ++idx;
        }
    }
    wf.grid(idx) = slabbing.x_max;
    wf.values(idx) = chain.psi(n - 1, slabbing.x_max);
    return normalized ? normalize(std::move(wf)) : wf;
}

Wavefunction eigenstate(const Problem& problem, double energy, Eigen::Index slabs,
                        int points_per_slab)
{
    require_hard_wall(problem);
    const Slabbing slabbing = build_slabs(problem, slabs);
    const AmplitudeChain chain = propagate(
        problem, energy, slabbing,
        hard_wall_launch(slab_waves(problem, energy, slabbing), slabbing));
    return reconstruct_wavefunction(problem, slabbing, chain, points_per_slab, true);
}

Transmission transmission(const Problem& problem, double energy, Eigen::Index slabs)
{
    const auto* leads = std::get_if<Scattering>(&problem.boundary);
    if (leads == nullptr) {
        throw BoundaryKindError("transmission requires scattering boundaries");
    }
    Complex k_left;
    Complex k_right;
    const Complex h_left = lead_velocity(leads->left, energy, problem.constants, k_left);
    const Complex h_right = lead_velocity(leads->right, energy, problem.constants, k_right);

    const Slabbing slabbing = build_slabs(problem, slabs);
    const SlabWaves w = slab_waves(problem, energy, slabbing);
    const Eigen::Index n = slabbing.count();

    // Lead amplitudes are referenced to the domain edges.
    TransferProduct p{local_transfer_matrix(h_left, w.h(0), k_left, w.k(0), slabbing.x_min,
                                            slabbing.x_min, slabbing.centers(0)),
                      0.0};
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        p.matrix = local_transfer_matrix(w.h(j), w.h(j + 1), w.k(j), w.k(j + 1),
                                         slabbing.boundaries(j), slabbing.centers(j),
                                         slabbing.centers(j + 1)) *
                   p.matrix;
        if ((j + 1) % kRescaleInterval == 0) {
            const double m = p.matrix.cwiseAbs().maxCoeff();
            if (m > kRescaleHigh) {
                divide_by(p.matrix, m);
                p.log_scale += std::log(m);
            }
        }
    }
    p.matrix = local_transfer_matrix(w.h(n - 1), h_right, w.k(n - 1), k_right, slabbing.x_max,
                                     slabbing.centers(n - 1), slabbing.x_max) *
               p.matrix;

    // Incident t = 1 from the left, nothing incoming from the right:
    // r = -M10/M11 and, since det M = h_left/h_right, t_out = det M / M11.
    const Complex m11 = p.matrix(1, 1);
    Transmission out;
    out.reflected = std::norm(p.matrix(1, 0) / m11);
    out.transmitted = std::exp(std::log((h_left / h_right).real()) - 2.0 * p.log_scale -
                               2.0 * std::log(std::abs(m11)));
    return out;
}

} // namespace pdem::tmm
