#include "pdem/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

namespace pdem::cli {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

// Object with a fixed key set. Every lookup is relative to its dotted path.
class Section {
public:
    Section(const json& node, std::string path, std::initializer_list<const char*> allowed)
        : node_(node), path_(std::move(path))
    {
        if (!node_.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        }
        const std::set<std::string> keys(allowed.begin(), allowed.end());
        for (const auto& [key, value] : node_.items()) {
            if (!keys.count(key)) {
                throw ConfigError(join(path_, key), "unknown key");
            }
        }
    }

    bool has(const char* key) const { return node_.contains(key); }
    std::string path(const char* key) const { return join(path_, key); }

    const json& at(const char* key) const
    {
        if (!has(key)) {
            throw ConfigError(path(key), "missing required key");
        }
        return node_.at(key);
    }

    double number(const char* key) const
    {
        const json& v = at(key);
        if (!v.is_number()) {
            throw ConfigError(path(key), "expected a number");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            throw ConfigError(path(key), "expected a finite number");
        }
        return d;
    }

    double number_or(const char* key, double fallback) const
    {
        return has(key) ? number(key) : fallback;
    }

    long long integer(const char* key) const
    {
        const json& v = at(key);
        if (!v.is_number_integer()) {
            throw ConfigError(path(key), "expected an integer");
        }
        return v.get<long long>();
    }

    long long integer_or(const char* key, long long fallback) const
    {
        return has(key) ? integer(key) : fallback;
    }

    std::string string(const char* key) const
    {
        const json& v = at(key);
        if (!v.is_string()) {
            throw ConfigError(path(key), "expected a string");
        }
        return v.get<std::string>();
    }

    bool boolean_or(const char* key, bool fallback) const
    {
        if (!has(key)) {
            return fallback;
        }
        const json& v = at(key);
        if (!v.is_boolean()) {
            throw ConfigError(path(key), "expected true or false");
        }
        return v.get<bool>();
    }

    std::vector<double> numbers(const char* key) const
    {
        const json& v = at(key);
        if (!v.is_array()) {
            throw ConfigError(path(key), "expected an array of numbers");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
                throw ConfigError(path(key) + "[" + std::to_string(i) + "]",
                                  "expected a finite number");
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    Section child(const char* key, std::initializer_list<const char*> allowed) const
    {
        return Section(at(key), path(key), allowed);
    }

private:
    const json& node_;
    std::string path_;
};

long long positive(const Section& s, const char* key, long long fallback, long long minimum = 1)
{
    const long long v = s.integer_or(key, fallback);
    if (v < minimum) {
        throw ConfigError(s.path(key), "must be at least " + std::to_string(minimum));
    }
    return v;
}

void check_mass_values(const std::string& key, const std::vector<double>& values)
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) {
            throw ConfigError(key + "[" + std::to_string(i) + "]", "mass must be positive");
        }
    }
}

Profile parse_profile(const json& node, const std::string& path, Quantity q, double x_min,
                      double x_max)
{
    if (!node.is_object() || !node.contains("kind") || !node.at("kind").is_string()) {
        throw ConfigError(join(path, "kind"), "profile needs a string kind");
    }
    const std::string kind = node.at("kind").get<std::string>();
    const bool mass = q == Quantity::Mass;

    const auto positive_mass = [&](const Section& s, const char* key) {
        const double v = s.number(key);
        if (mass && !(v > 0.0)) {
            throw ConfigError(s.path(key), "mass must be positive");
        }
        return v;
    };

    try {
        if (kind == "constant") {
            const Section s(node, path, {"kind", "value"});
            return Profile::constant(q, positive_mass(s, "value"));
        }
        if (kind == "linear") {
            // Values at the two ends of the domain.
            const Section s(node, path, {"kind", "left", "right"});
            return Profile::linear(q, x_min, x_max, positive_mass(s, "left"),
                                   positive_mass(s, "right"));
        }
        if (kind == "piecewise_constant") {
            const Section s(node, path, {"kind", "breakpoints", "values"});
            auto breaks = s.numbers("breakpoints");
            auto values = s.numbers("values");
            if (values.size() != breaks.size() + 1) {
                throw ConfigError(s.path("values"), "needs exactly one more entry than breakpoints");
            }
            if (mass) {
                check_mass_values(s.path("values"), values);
            }
            return Profile::piecewise_constant(q, std::move(breaks), std::move(values));
        }
        if (kind == "tabulated") {
            const Section s(node, path, {"kind", "x", "values"});
            auto xs = s.numbers("x");
            auto values = s.numbers("values");
            if (xs.size() != values.size() || xs.size() < 2) {
                throw ConfigError(s.path("values"), "needs at least two samples, one per x");
            }
            if (mass) {
                check_mass_values(s.path("values"), values);
            }
            return Profile::tabulated(q, std::move(xs), std::move(values));
        }
    } catch (const ProfileError& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(join(path, "kind"),
                      "unknown profile kind '" + kind +
                          "' (constant, linear, piecewise_constant, tabulated)");
}

Lead parse_lead(const Section& parent, const char* key)
{
    const Section s = parent.child(key, {"mass", "potential"});
    const double m = s.number("mass");
    if (!(m > 0.0)) {
        throw ConfigError(s.path("mass"), "mass must be positive");
    }
    return {m, s.number("potential")};
}

Problem parse_problem(const Section& root)
{
    const Section p = root.child("problem", {"domain", "mass", "potential", "boundary",
                                             "hbar2_over_2m0"});
    const Section d = p.child("domain", {"x_min", "x_max"});
    const double x_min = d.number("x_min");
    const double x_max = d.number("x_max");
    if (!(x_min < x_max)) {
        throw ConfigError(d.path("x_max"), "must exceed x_min");
    }

    PhysicalConstants constants;
    constants.hbar2_over_2m0 = p.number_or("hbar2_over_2m0", constants.hbar2_over_2m0);
    if (!(constants.hbar2_over_2m0 > 0.0)) {
        throw ConfigError(p.path("hbar2_over_2m0"), "must be positive");
    }

    Profile mass = parse_profile(p.at("mass"), p.path("mass"), Quantity::Mass, x_min, x_max);
    Profile potential =
        parse_profile(p.at("potential"), p.path("potential"), Quantity::Potential, x_min, x_max);

    Boundary boundary = HardWall{};
    if (p.has("boundary")) {
        const json& b = p.at("boundary");
        if (!b.is_object() || !b.contains("kind") || !b.at("kind").is_string()) {
            throw ConfigError(p.path("boundary") + ".kind", "boundary needs a string kind");
        }
        const std::string kind = b.at("kind").get<std::string>();
        if (kind == "hard_wall") {
            const Section s(b, p.path("boundary"), {"kind"});
        } else if (kind == "scattering") {
            const Section s(b, p.path("boundary"), {"kind", "left_lead", "right_lead"});
            boundary = Scattering{parse_lead(s, "left_lead"), parse_lead(s, "right_lead")};
        } else {
            throw ConfigError(p.path("boundary") + ".kind",
                              "unknown boundary kind '" + kind + "' (hard_wall, scattering)");
        }
    }

    try {
        Problem problem(x_min, x_max, std::move(mass), std::move(potential), boundary, constants);
        // Profiles may extrapolate; the mass has to stay positive over the domain.
        for (const double x : {x_min, 0.5 * (x_min + x_max), x_max}) {
            problem.mass_at(x);
        }
        return problem;
    } catch (const ProfileError& e) {
        throw ConfigError(p.path("mass"), e.what());
    } catch (const Error& e) {
        throw ConfigError(p.path("domain"), e.what());
    }
}

std::pair<double, double> parse_range(const Section& s, const char* key)
{
    const auto v = s.numbers(key);
    if (v.size() != 2 || !(v[0] < v[1])) {
        throw ConfigError(s.path(key), "expected [lo, hi] with lo < hi");
    }
    return {v[0], v[1]};
}

} // namespace

EngineChoice parse_engine(const std::string& name, const std::string& key)
{
    if (name == "tmm") {
        return EngineChoice::TMM;
    }
    if (name == "wkb") {
        return EngineChoice::WKB;
    }
    if (name == "exact") {
        return EngineChoice::Exact;
    }
    if (name == "coupled") {
        return EngineChoice::Coupled;
    }
    if (name == "all") {
        return EngineChoice::All;
    }
    throw ConfigError(key, "unknown engine '" + name + "' (tmm, wkb, exact, coupled, all)");
}

std::string_view engine_choice_name(EngineChoice engine)
{
    switch (engine) {
    case EngineChoice::TMM:
        return "tmm";
    case EngineChoice::WKB:
        return "wkb";
    case EngineChoice::Exact:
        return "exact";
    case EngineChoice::Coupled:
        return "coupled";
    case EngineChoice::All:
        break;
    }
    return "all";
}

RunConfig parse_config(const nlohmann::json& doc)
{
    const Section root(doc, "", {"schema_version", "problem", "engine", "output", "transmit"});
    if (root.integer("schema_version") != kSchemaVersion) {
        throw ConfigError("schema_version",
                          "unsupported version, expected " + std::to_string(kSchemaVersion));
    }

    RunConfig cfg{.problem = parse_problem(root)};

    if (root.has("engine")) {
        const Section e = root.child("engine", {"name", "slabs", "scan_points", "tol",
                                                "coupled_steps", "grid_points", "energy_range",
                                                "max_states", "state"});
        if (e.has("name")) {
            cfg.engine = parse_engine(e.string("name"), e.path("name"));
        }
        cfg.slabs = positive(e, "slabs", cfg.slabs, 2);
        cfg.scan_points = static_cast<int>(positive(e, "scan_points", cfg.scan_points, 2));
        cfg.tol = e.number_or("tol", cfg.tol);
        if (!(cfg.tol > 0.0)) {
            throw ConfigError(e.path("tol"), "must be positive");
        }
        cfg.coupled_steps = static_cast<int>(positive(e, "coupled_steps", cfg.coupled_steps, 16));
        cfg.grid_points = static_cast<int>(positive(e, "grid_points", cfg.grid_points, 2));
        if (e.has("energy_range")) {
            cfg.energy_range = parse_range(e, "energy_range");
        }
        cfg.max_states = static_cast<int>(positive(e, "max_states", 0, 0));
        cfg.state = static_cast<int>(positive(e, "state", 0, 0));
    }

    if (root.has("output")) {
        const Section o = root.child("output", {"path", "envelope", "svg"});
        if (o.has("path")) {
            cfg.output_path = o.string("path");
        }
        cfg.envelope = o.boolean_or("envelope", false);
        if (o.has("svg")) {
            cfg.svg_path = o.string("svg");
        }
    }

    if (root.has("transmit")) {
        const Section t = root.child("transmit", {"energies", "energy_range", "count"});
        if (t.has("energies") == t.has("energy_range")) {
            throw ConfigError(t.path("energies"), "give either energies or energy_range");
        }
        if (t.has("energies")) {
            cfg.transmit_energies = t.numbers("energies");
        } else {
            const auto [lo, hi] = parse_range(t, "energy_range");
            const long long count = positive(t, "count", 0, 2);
            for (long long i = 0; i < count; ++i) {
                cfg.transmit_energies.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                                         static_cast<double>(count - 1));
            }
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("--config", "cannot open '" + path + "'");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

std::optional<ExactMapping> exact_mapping(const Problem& problem)
{
    if (!problem.hard_wall()) {
        return std::nullopt;
    }
    const auto* v = std::get_if<ConstantProfile>(&problem.potential.kind());
    const auto& mk = problem.mass.kind();
    if (v == nullptr || !(std::holds_alternative<LinearProfile>(mk) ||
                          std::holds_alternative<ConstantProfile>(mk))) {
        return std::nullopt;
    }
    ExactMapping map;
    map.x_shift = 0.5 * (problem.x_min + problem.x_max);
    map.e_offset = v->value;
    map.well.a = 0.5 * problem.length();
    map.well.m2 = problem.mass_at(problem.x_min);
    map.well.m1 = problem.mass_at(problem.x_max);
    map.well.constants = problem.constants;
    return map;
}

} // namespace pdem::cli
