#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pdem/cli/config.hpp"

namespace pdem::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitSolver = 3,
    kExitMismatch = 4,
};

// "n,energy_ev,engine"; engine=all runs tmm, wkb and exact in that order.
std::string cmd_spectrum(const RunConfig& cfg);

struct WavefunctionOutput {
    Wavefunction wavefunction;
    std::string csv; // "x_nm,re_psi,im_psi,abs2_psi[,envelope]"
    std::string svg; // empty unless cfg.svg_path is set
};

WavefunctionOutput cmd_wavefunction(const RunConfig& cfg, int n);

struct Table1Row {
    int n = 0;
    double wkb = 0.0;
    double exact = 0.0;
    double error_pct = 0.0;
    double expected_wkb = 0.0;
    double expected_exact = 0.0;
    double expected_error_pct = 0.0;
    bool ok = false;
};

inline constexpr double kTable1EnergyTolerance = 5e-4; // eV
inline constexpr double kTable1ErrorTolerance = 0.05;  // percentage points

struct Table1Report {
    std::vector<Table1Row> rows;
    bool error_decreasing = false;
    std::string text; // human-readable table
    std::string csv;  // "n,wkb_ev,exact_ev,error_pct"

    bool ok() const;
};

// Built-in linear well m1 = 0.1, m2 = 0.2, a = 5 nm against the published table.
Table1Report cmd_compare_table1();

// "energy_ev,T_tmm,R_tmm,T_wkb"
std::string cmd_transmit(const RunConfig& cfg);

// Entry point of the command-line tool. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace pdem::cli
