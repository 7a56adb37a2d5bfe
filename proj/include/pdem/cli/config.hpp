#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdem/core.hpp"
#include "pdem/exact.hpp"

namespace pdem::cli {

inline constexpr int kSchemaVersion = 1;

// Invalid configuration. key() is the dotted path of the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& message)
        : Error(key + ": " + message), key_(std::move(key))
    {
    }

    const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class EngineChoice { TMM, WKB, Exact, Coupled, All };

EngineChoice parse_engine(const std::string& name, const std::string& key = "engine.name");
std::string_view engine_choice_name(EngineChoice engine);

struct RunConfig {
    Problem problem;

    EngineChoice engine = EngineChoice::All;
    Eigen::Index slabs = 20000;
    int scan_points = 2000;
    double tol = 1e-9;
    int coupled_steps = 20000;
    int grid_points = 2048;
    std::optional<std::pair<double, double>> energy_range{};
    int max_states = 0; // 0: no limit
    int state = 0;      // wavefunction index, 0: unset

    std::vector<double> transmit_energies{};

    std::string output_path{}; // empty: stdout
    bool envelope = false;
    std::string svg_path{};
};

// Validates the whole document; unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// The linear-mass well behind the problem, when the exact engine applies:
// linear (or constant) mass, constant potential, hard walls. Returns the well
// centred at the origin plus the coordinate shift and energy offset.
struct ExactMapping {
    exact::LinearWell well;
    double x_shift = 0.0;  // x_problem = x_well + x_shift
    double e_offset = 0.0; // E_problem = E_well + e_offset
};

std::optional<ExactMapping> exact_mapping(const Problem& problem);

} // namespace pdem::cli
