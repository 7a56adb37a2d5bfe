#include "pdem/cli/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pdem/cli/csv.hpp"
#include "pdem/coupled.hpp"
#include "pdem/exact.hpp"
#include "pdem/semiclassical.hpp"
#include "pdem/tmm.hpp"

namespace pdem::cli {

namespace {

struct Table1Entry {
    double wkb;
    double exact;
    double error_pct;
};

// Published values, 4 decimals for energies and 2 for the error.
constexpr std::array<Table1Entry, 10> kTable1{{
    {0.0253, 0.0258, 1.93},
    {0.1012, 0.1018, 0.55},
    {0.2278, 0.2283, 0.25},
    {0.4049, 0.4055, 0.14},
    {0.6327, 0.6333, 0.09},
    {0.9111, 0.9117, 0.06},
    {1.2401, 1.2407, 0.05},
    {1.6197, 1.6203, 0.04},
    {2.0499, 2.0505, 0.03},
    {2.5308, 2.5313, 0.02},
}};

void require_hard_wall(const RunConfig& cfg, const char* command)
{
    if (!cfg.problem.hard_wall()) {
        throw ConfigError("problem.boundary", std::string(command) + " needs a hard_wall boundary");
    }
}

std::pair<double, double> require_range(const RunConfig& cfg, EngineChoice engine)
{
    if (!cfg.energy_range) {
        throw ConfigError("engine.energy_range",
                          "required by the " + std::string(engine_choice_name(engine)) + " engine");
    }
    return *cfg.energy_range;
}

ExactMapping require_exact(const RunConfig& cfg)
{
    auto map = exact_mapping(cfg.problem);
    if (!map) {
        throw ConfigError("engine.name", "the exact engine needs a linear or constant mass, a "
                                         "constant potential and hard walls");
    }
    return *map;
}

// Lower edge of the energies where the whole domain is classically allowed.
double potential_ceiling(const Problem& p)
{
    double vmax = -std::numeric_limits<double>::infinity();
    const auto sample = [&](double x) {
        if (x >= p.x_min && x <= p.x_max) {
            vmax = std::max(vmax, p.potential_at(x));
        }
    };
    const Eigen::VectorXd grid = uniform_grid(p.x_min, p.x_max, 4097);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        sample(grid(i));
    }
    for (const double x : p.potential.singular_points()) {
        sample(std::nextafter(x, -HUGE_VAL));
        sample(x);
    }
    return vmax;
}

std::vector<Eigenvalue> wkb_spectrum(const Problem& p, double e_lo, double e_hi)
{
    const double vmax = potential_ceiling(p);
    const double floor = vmax + 1e-9 * (1.0 + std::abs(vmax));
    std::vector<Eigenvalue> out;
    if (e_hi <= floor) {
        return out;
    }
    const double start = std::max(e_lo, floor);
    const double pi = std::numbers::pi;
    const int first =
        e_lo <= floor ? 1
                      : static_cast<int>(std::floor(
                            wkb::phase_integral(p, start, p.x_min, p.x_max) / pi)) + 1;
    const int last = static_cast<int>(std::floor(wkb::phase_integral(p, e_hi, p.x_min, p.x_max) / pi));
    for (int n = std::max(first, 1); n <= last; ++n) {
        out.push_back({n, wkb::hard_wall_quantize(p, n, start, e_hi)});
    }
    return out;
}

std::vector<Eigenvalue> exact_spectrum(const RunConfig& cfg, double e_lo, double e_hi)
{
    const ExactMapping map = require_exact(cfg);
    const double lo = e_lo - map.e_offset;
    const double hi = e_hi - map.e_offset;
    std::vector<Eigenvalue> out;
    if (hi <= 0.0) {
        return out;
    }
    const auto spec =
        exact::linear_well_exact_spectrum(map.well, std::max(lo, 0.0), hi, exact::kExactTolerance);
    for (auto level : spec.levels) {
        level.energy += map.e_offset;
        out.push_back(level);
    }
    return out;
}

std::vector<Eigenvalue> spectrum_for(const RunConfig& cfg, EngineChoice engine)
{
    const auto [lo, hi] = require_range(cfg, engine);
    switch (engine) {
    case EngineChoice::TMM:
        return tmm::find_eigenvalues(cfg.problem, lo, hi, cfg.slabs, cfg.scan_points, cfg.tol);
    case EngineChoice::Coupled:
        return coupled::find_eigenvalues(cfg.problem, lo, hi, cfg.coupled_steps, cfg.scan_points,
                                         cfg.tol);
    case EngineChoice::WKB:
        return wkb_spectrum(cfg.problem, lo, hi);
    case EngineChoice::Exact:
        return exact_spectrum(cfg, lo, hi);
    case EngineChoice::All:
        break;
    }
    throw ConfigError("engine.name", "a single engine is required here");
}

double level_energy(const std::vector<Eigenvalue>& levels, int n)
{
    for (const auto& level : levels) {
        if (level.n == n) {
            return level.energy;
        }
    }
    throw SearchError("state n = " + std::to_string(n) + " not found in the energy range");
}

Wavefunction tmm_state(const Problem& p, double energy, Eigen::Index slabs, int points)
{
    const tmm::Slabbing s = tmm::build_slabs(p, slabs);
    const tmm::SlabWaves waves = tmm::slab_waves(p, energy, s);
    const auto chain = tmm::propagate(p, energy, s, tmm::hard_wall_launch(waves, s));
    Wavefunction wf;
    wf.engine = Engine::TMM;
    wf.energy = energy;
    wf.grid = uniform_grid(p.x_min, p.x_max, points);
    wf.values.resize(points);
    for (Eigen::Index i = 0; i < wf.grid.size(); ++i) {
        wf.values(i) = tmm::evaluate(chain, s, wf.grid(i));
    }
    return normalize(std::move(wf));
}

std::string polyline(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double width,
                     double height, const char* colour)
{
    const double x0 = x.minCoeff();
    const double x1 = x.maxCoeff();
    const double y0 = std::min(0.0, y.minCoeff());
    const double y1 = std::max(y.maxCoeff(), y0 + 1e-300);
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double px = width * (x(i) - x0) / (x1 - x0);
        const double py = height * (1.0 - (y(i) - y0) / (y1 - y0));
        os << format_fixed(px, 2) << ',' << format_fixed(py, 2) << ' ';
    }
    os << "\"/>\n";
    return os.str();
}

std::string svg_plot(const Wavefunction& wf)
{
    constexpr double w = 800.0;
    constexpr double h = 400.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" "
          "viewBox=\"0 0 800 400\">\n";
    os << "<rect width=\"800\" height=\"400\" fill=\"white\"/>\n";
    os << polyline(wf.grid, wf.values.real(), w, h, "steelblue");
    os << polyline(wf.grid, wf.values.cwiseAbs2(), w, h, "firebrick");
    os << "</svg>\n";
    return os.str();
}

void emit(const std::string& path, const std::string& contents, std::ostream& out)
{
    if (path.empty()) {
        out << contents;
    } else {
        write_file(path, contents);
    }
}

} // namespace

std::string cmd_spectrum(const RunConfig& cfg)
{
    require_hard_wall(cfg, "spectrum");
    std::vector<EngineChoice> engines{cfg.engine};
    if (cfg.engine == EngineChoice::All) {
        // The exact engine joins only when the problem is one it can solve.
        engines = {EngineChoice::TMM, EngineChoice::WKB};
        if (exact_mapping(cfg.problem)) {
            engines.push_back(EngineChoice::Exact);
        }
    }
    // Validate every engine before running any of them.
    for (const auto engine : engines) {
        require_range(cfg, engine);
        if (engine == EngineChoice::Exact) {
            require_exact(cfg);
        }
    }

    CsvWriter csv({"n", "energy_ev", "engine"});
    for (const auto engine : engines) {
        auto levels = spectrum_for(cfg, engine);
        if (cfg.max_states > 0 && static_cast<int>(levels.size()) > cfg.max_states) {
            levels.resize(static_cast<std::size_t>(cfg.max_states));
        }
        for (const auto& level : levels) {
            csv.cell(level.n).cell(level.energy).cell(engine_choice_name(engine));
            csv.end_row();
        }
    }
    return csv.str();
}

WavefunctionOutput cmd_wavefunction(const RunConfig& cfg, int n)
{
    require_hard_wall(cfg, "wavefunction");
    if (n < 1) {
        throw ConfigError("engine.state", "wavefunction needs a state index n >= 1");
    }
    if (cfg.engine == EngineChoice::All) {
        throw ConfigError("engine.name", "wavefunction needs a single engine");
    }

    WavefunctionOutput result;
    Wavefunction& wf = result.wavefunction;
    switch (cfg.engine) {
    case EngineChoice::TMM: {
        const double e = level_energy(spectrum_for(cfg, cfg.engine), n);
        wf = tmm_state(cfg.problem, e, cfg.slabs, cfg.grid_points);
        break;
    }
    case EngineChoice::Coupled: {
        const double e = level_energy(spectrum_for(cfg, cfg.engine), n);
        wf = coupled::eigenstate(cfg.problem, e, cfg.coupled_steps);
        break;
    }
    case EngineChoice::WKB: {
        const double e = level_energy(spectrum_for(cfg, cfg.engine), n);
        const Complex c1(0.0, -0.5);
        wf = wkb::wkb_wavefunction(cfg.problem, e, c1, -c1, cfg.grid_points);
        break;
    }
    case EngineChoice::Exact: {
        const ExactMapping map = require_exact(cfg);
        wf = exact::linear_well_exact_wavefunction(map.well, n, cfg.grid_points);
        wf.grid.array() += map.x_shift;
        wf.energy += map.e_offset;
        break;
    }
    case EngineChoice::All:
        break;
    }

    std::vector<std::string> header{"x_nm", "re_psi", "im_psi", "abs2_psi"};
    Eigen::VectorXd envelope;
    if (cfg.envelope) {
        header.emplace_back("envelope");
        const EnvelopeFit fit = fit_envelope(wf, cfg.problem.mass);
        envelope.resize(wf.grid.size());
        for (Eigen::Index i = 0; i < wf.grid.size(); ++i) {
            envelope(i) = fit.scale * std::sqrt(cfg.problem.mass_at(wf.grid(i)));
        }
    }
    CsvWriter csv(header);
    for (Eigen::Index i = 0; i < wf.grid.size(); ++i) {
        csv.cell(wf.grid(i)).cell(wf.values(i).real()).cell(wf.values(i).imag());
        csv.cell(std::norm(wf.values(i)));
        if (cfg.envelope) {
            csv.cell(envelope(i));
        }
        csv.end_row();
    }
    result.csv = csv.str();
    if (!cfg.svg_path.empty()) {
        result.svg = svg_plot(wf);
    }
    return result;
}

bool Table1Report::ok() const
{
    return error_decreasing && std::all_of(rows.begin(), rows.end(),
                                           [](const Table1Row& r) { return r.ok; });
}

Table1Report cmd_compare_table1()
{
    const exact::LinearWell well{0.1, 0.2, 5.0, {}};
    const auto spec = exact::linear_well_exact_spectrum(well, 10);
    if (spec.levels.size() < kTable1.size()) {
        throw SearchError("exact spectrum returned fewer than ten levels");
    }

    Table1Report report;
    CsvWriter csv({"n", "wkb_ev", "exact_ev", "error_pct"});
    std::ostringstream text;
    text << " n   WKB (eV)   Exact (eV)   Error (%)   reference: WKB / Exact / Error\n";
    report.error_decreasing = true;
    for (std::size_t i = 0; i < kTable1.size(); ++i) {
        Table1Row row;
        row.n = static_cast<int>(i) + 1;
        row.wkb = wkb::linear_well_energy(well.m1, well.m2, well.a, row.n);
        row.exact = spec.levels[i].energy;
        row.error_pct = 100.0 * (row.exact - row.wkb) / row.exact;
        row.expected_wkb = kTable1[i].wkb;
        row.expected_exact = kTable1[i].exact;
        row.expected_error_pct = kTable1[i].error_pct;
        row.ok = std::abs(row.wkb - row.expected_wkb) <= kTable1EnergyTolerance &&
                 std::abs(row.exact - row.expected_exact) <= kTable1EnergyTolerance &&
                 std::abs(row.error_pct - row.expected_error_pct) <= kTable1ErrorTolerance;
        if (!report.rows.empty() && !(row.error_pct < report.rows.back().error_pct)) {
            report.error_decreasing = false;
        }
        report.rows.push_back(row);

        csv.cell(row.n).cell(format_fixed(row.wkb, 4)).cell(format_fixed(row.exact, 4));
        csv.cell(format_fixed(row.error_pct, 2));
        csv.end_row();

        text << std::setw(2) << row.n << "   " << format_fixed(row.wkb, 4) << "     "
             << format_fixed(row.exact, 4) << "       " << format_fixed(row.error_pct, 2)
             << "        " << format_fixed(row.expected_wkb, 4) << " / "
             << format_fixed(row.expected_exact, 4) << " / "
             << format_fixed(row.expected_error_pct, 2) << (row.ok ? "" : "   MISMATCH") << '\n';
    }
    if (!report.error_decreasing) {
        text << "error % is not strictly decreasing in n\n";
    }
    report.text = text.str();
    report.csv = csv.str();
    return report;
}

std::string cmd_transmit(const RunConfig& cfg)
{
    if (cfg.problem.hard_wall()) {
        throw ConfigError("problem.boundary", "transmit needs a scattering boundary");
    }
    if (cfg.transmit_energies.empty()) {
        throw ConfigError("transmit.energies", "no energies to evaluate");
    }
    CsvWriter csv({"energy_ev", "T_tmm", "R_tmm", "T_wkb"});
    for (const double e : cfg.transmit_energies) {
        const tmm::Transmission t = tmm::transmission(cfg.problem, e, cfg.slabs);
        csv.cell(e).cell(t.transmitted).cell(t.reflected).cell(wkb::wkb_transmission(cfg.problem, e));
        csv.end_row();
    }
    return csv.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Position-dependent effective mass Schroedinger solvers"};
    app.require_subcommand(1);

    std::string config_path;
    std::string engine;
    long long slabs = 0;
    double tol = 0.0;
    std::string out_path;
    bool envelope = false;
    int state = 0;
    std::string svg_path;

    const auto common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "JSON run configuration");
        if (needs_config) {
            opt->required();
        }
        sub->add_option("--engine", engine, "tmm | wkb | exact | coupled | all");
        sub->add_option("--slabs", slabs, "number of slabs for the tmm engine")
            ->check(CLI::Range(2LL, 1LL << 40));
        sub->add_option("--tol", tol, "eigenvalue bisection tolerance in eV")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", out_path, "output file (default: stdout)");
    };

    auto* spectrum = app.add_subcommand("spectrum", "bound-state energies");
    common(spectrum, true);
    auto* wavefunction = app.add_subcommand("wavefunction", "normalized eigenstate samples");
    common(wavefunction, true);
    wavefunction->add_flag("--envelope", envelope, "add the c sqrt(m*) envelope column");
    wavefunction->add_option("--state", state, "state index n (1-based)");
    wavefunction->add_option("--svg", svg_path, "also write a line plot");
    auto* table1 = app.add_subcommand("compare-table1", "WKB vs exact linear-well levels");
    table1->add_option("--out", out_path, "CSV path (default: table1.csv)");
    auto* transmit = app.add_subcommand("transmit", "transmission and reflection vs energy");
    common(transmit, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (table1->parsed()) {
            const Table1Report report = cmd_compare_table1();
            out << report.text;
            write_file(out_path.empty() ? "table1.csv" : out_path, report.csv);
            if (!report.ok()) {
                err << "Table 1 mismatch in rows:";
                for (const auto& row : report.rows) {
                    if (!row.ok) {
                        err << ' ' << row.n;
                    }
                }
                err << '\n';
                return kExitMismatch;
            }
            return kExitOk;
        }

        RunConfig cfg = load_config(config_path);
        if (!engine.empty()) {
            cfg.engine = parse_engine(engine, "--engine");
        }
        if (slabs > 0) {
            cfg.slabs = static_cast<Eigen::Index>(slabs);
        }
        if (tol > 0.0) {
            cfg.tol = tol;
        }
        if (!out_path.empty()) {
            cfg.output_path = out_path;
        }
        cfg.envelope = cfg.envelope || envelope;
        if (state > 0) {
            cfg.state = state;
        }
        if (!svg_path.empty()) {
            cfg.svg_path = svg_path;
        }

        if (spectrum->parsed()) {
            emit(cfg.output_path, cmd_spectrum(cfg), out);
        } else if (wavefunction->parsed()) {
            const auto result = cmd_wavefunction(cfg, cfg.state);
            emit(cfg.output_path, result.csv, out);
            if (!result.svg.empty()) {
                write_file(cfg.svg_path, result.svg);
            }
        } else if (transmit->parsed()) {
            emit(cfg.output_path, cmd_transmit(cfg), out);
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BoundaryKindError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "solver error: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

} // namespace pdem::cli
