#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "sps/harness.hpp"

#ifndef SPS_VERSION
#define SPS_VERSION "unknown"
#endif

namespace sps {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "is not a recognised key");
}

const json& section(const json& root, const std::string& name) {
    static const json empty = json::object();
    if (!root.contains(name)) return empty;
    const json& s = root.at(name);
    if (!s.is_object()) throw ConfigError(name, "must be an object");
    return s;
}

double get_number(const json& obj, const std::string& path, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(path + "." + key, "must be a number");
    return v.get<double>();
}

long get_integer(const json& obj, const std::string& path, const std::string& key, long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(path + "." + key, "must be an integer");
    return v.get<long>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(path + "." + key, "must be true or false");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(path + "." + key, "must be a string");
    return v.get<std::string>();
}

std::vector<double> get_number_list(const json& obj, const std::string& path, const std::string& key,
                                    const std::vector<double>& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array()) throw ConfigError(path + "." + key, "must be a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(path + "." + key, "must be a list of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

InitialRecipe parse_initial(const json& s) {
    const std::string p = "initial";
    const std::string kind = get_string(s, p, "kind", "radial_gaussian");
    InitialRecipe recipe;
    recipe.orthonormalize = get_bool(s, p, "orthonormalize", true);
    if (kind == "radial_gaussian") {
        reject_unknown(s, p, {"kind", "widths", "amplitude", "taper", "weights", "orthonormalize", "tune_target_energy"});
        RadialGaussianStack g;
        g.widths = get_number_list(s, p, "widths", {1.0});
        g.amplitude = get_number(s, p, "amplitude", 1.0);
        g.taper = get_bool(s, p, "taper", true);
        recipe.weights = get_number_list(s, p, "weights", std::vector<double>(g.widths.size(), 1.0));
        recipe.kind = g;
    } else if (kind == "plane_wave") {
        reject_unknown(s, p, {"kind", "modes", "amplitude", "weights", "orthonormalize"});
        PlaneWaveStack w;
        w.amplitude = get_number(s, p, "amplitude", 1.0);
        if (!s.contains("modes") || !s.at("modes").is_array()) throw ConfigError(p + ".modes", "must be a list of integer triples");
        for (const auto& m : s.at("modes")) {
            if (!m.is_array() || m.size() != 3) throw ConfigError(p + ".modes", "must be a list of integer triples");
            std::array<int, 3> t{};
            for (int i = 0; i < 3; ++i) {
                if (!m[i].is_number_integer()) throw ConfigError(p + ".modes", "must be a list of integer triples");
                t[i] = m[i].get<int>();
            }
            w.modes.push_back(t);
        }
        recipe.weights = get_number_list(s, p, "weights", std::vector<double>(w.modes.size(), 1.0));
        recipe.kind = w;
    } else if (kind == "snapshot") {
        reject_unknown(s, p, {"kind", "path", "weights", "orthonormalize"});
        const std::string path = get_string(s, p, "path", "");
        if (path.empty()) throw ConfigError(p + ".path", "is required for kind snapshot");
        recipe.kind = FromSnapshot{path};
        recipe.weights = get_number_list(s, p, "weights", {});
    } else {
        throw ConfigError(p + ".kind", "must be one of radial_gaussian, plane_wave, snapshot");
    }
    return recipe;
}

json serialize_initial(const InitialRecipe& recipe) {
    json j;
    if (const auto* g = std::get_if<RadialGaussianStack>(&recipe.kind)) {
        j["kind"] = "radial_gaussian";
        j["widths"] = g->widths;
        j["amplitude"] = g->amplitude;
        j["taper"] = g->taper;
    } else if (const auto* w = std::get_if<PlaneWaveStack>(&recipe.kind)) {
        j["kind"] = "plane_wave";
        j["modes"] = json::array();
        for (const auto& m : w->modes) j["modes"].push_back({m[0], m[1], m[2]});
        j["amplitude"] = w->amplitude;
    } else {
        j["kind"] = "snapshot";
        j["path"] = std::get<FromSnapshot>(recipe.kind).path.string();
    }
    j["weights"] = recipe.weights;
    j["orthonormalize"] = recipe.orthonormalize;
    return j;
}

}  // namespace

void SimConfig::validate() const {
    if (grid.n < 8 || grid.n % 2 != 0) throw ConfigError("grid.n", "must be an even integer >= 8");
    if (!(grid.L > 0.0) || !std::isfinite(grid.L)) throw ConfigError("grid.L", "must be positive");
    if (!(physics.m >= 0.0) || !std::isfinite(physics.m)) throw ConfigError("physics.m", "must be >= 0");
    if (!(physics.epsilon >= 0.0) || !std::isfinite(physics.epsilon)) throw ConfigError("physics.epsilon", "must be >= 0");
    if (!(physics.alpha >= 0.5) || !std::isfinite(physics.alpha)) throw ConfigError("physics.alpha", "must be >= 1/2");
    if (physics.kernel_mode != "truncated" && physics.kernel_mode != "periodic")
        throw ConfigError("physics.kernel_mode", "must be truncated or periodic");
    if (physics.R) {
        if (!(*physics.R > 0.0)) throw ConfigError("physics.R", "must be positive");
        if (*physics.R > grid.L * std::sqrt(3.0) / 2.0) throw ConfigError("physics.R", "must not exceed sqrt(3) L / 2");
    }
    if (physics.splitting != "strang" && physics.splitting != "lie")
        throw ConfigError("physics.splitting", "must be strang or lie");
    if (!(time.dt > 0.0) || !std::isfinite(time.dt)) throw ConfigError("time.dt", "must be positive");
    if (!(time.t_end >= 0.0) || !std::isfinite(time.t_end)) throw ConfigError("time.t_end", "must be >= 0");
    if (time.record_stride <= 0) throw ConfigError("time.record_stride", "must be positive");
    if (time.snapshot_stride < 0) throw ConfigError("time.snapshot_stride", "must be >= 0");
    if (!(thresholds.blowup_ratio > 1.0)) throw ConfigError("thresholds.blowup_ratio", "must be > 1");
    if (!(thresholds.tail_threshold > 0.0 && thresholds.tail_threshold <= 1.0))
        throw ConfigError("thresholds.tail_threshold", "must lie in (0, 1]");
    for (const auto& f : output.formats)
        if (f != "csv" && f != "json") throw ConfigError("output.formats", "entries must be csv or json");

    for (double w : initial.weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("initial.weights", "must be positive");
    if (const auto* g = std::get_if<RadialGaussianStack>(&initial.kind)) {
        if (g->widths.empty()) throw ConfigError("initial.widths", "must be non-empty");
        for (double s : g->widths)
            if (!(s > 0.0)) throw ConfigError("initial.widths", "must be positive");
        if (!(g->amplitude > 0.0)) throw ConfigError("initial.amplitude", "must be positive");
        if (initial.weights.size() != g->widths.size())
            throw ConfigError("initial.weights", "must have one entry per width");
    } else if (const auto* w = std::get_if<PlaneWaveStack>(&initial.kind)) {
        if (w->modes.empty()) throw ConfigError("initial.modes", "must be non-empty");
        if (!(w->amplitude > 0.0)) throw ConfigError("initial.amplitude", "must be positive");
        if (initial.weights.size() != w->modes.size())
            throw ConfigError("initial.weights", "must have one entry per mode");
    }
    if (tune_target_energy) {
        if (!std::holds_alternative<RadialGaussianStack>(initial.kind))
            throw ConfigError("initial.tune_target_energy", "requires kind radial_gaussian");
        if (!std::isfinite(*tune_target_energy)) throw ConfigError("initial.tune_target_energy", "must be finite");
    }
}

Grid3 SimConfig::make_grid() const { return Grid3(grid.n, grid.L); }

KernelMode SimConfig::kernel() const {
    if (physics.kernel_mode == "periodic") return PeriodicKernel{};
    return TruncatedKernel{physics.R.value_or(0.5 * grid.L)};
}

EvolutionParams SimConfig::evolution_params() const {
    EvolutionParams p;
    p.mass = physics.m;
    p.epsilon = physics.epsilon;
    p.alpha = physics.alpha;
    p.dt = time.dt;
    p.t_end = time.t_end;
    p.kernel = kernel();
    p.splitting = physics.splitting == "lie" ? Splitting::Lie : Splitting::Strang;
    return p;
}

SimConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config", "must be an object");
    reject_unknown(j, "", {"grid", "physics", "time", "initial", "thresholds", "output"});
    SimConfig c;

    const json& g = section(j, "grid");
    reject_unknown(g, "grid", {"n", "L"});
    c.grid.n = static_cast<int>(get_integer(g, "grid", "n", c.grid.n));
    c.grid.L = get_number(g, "grid", "L", c.grid.L);

    const json& ph = section(j, "physics");
    reject_unknown(ph, "physics", {"m", "epsilon", "alpha", "kernel_mode", "R", "splitting"});
    c.physics.m = get_number(ph, "physics", "m", c.physics.m);
    c.physics.epsilon = get_number(ph, "physics", "epsilon", c.physics.epsilon);
    c.physics.alpha = get_number(ph, "physics", "alpha", c.physics.alpha);
    c.physics.kernel_mode = get_string(ph, "physics", "kernel_mode", c.physics.kernel_mode);
    if (ph.contains("R") && !ph.at("R").is_null()) c.physics.R = get_number(ph, "physics", "R", 0.0);
    c.physics.splitting = get_string(ph, "physics", "splitting", c.physics.splitting);

    const json& t = section(j, "time");
    reject_unknown(t, "time", {"dt", "t_end", "record_stride", "snapshot_stride"});
    c.time.dt = get_number(t, "time", "dt", c.time.dt);
    c.time.t_end = get_number(t, "time", "t_end", c.time.t_end);
    c.time.record_stride = get_integer(t, "time", "record_stride", c.time.record_stride);
    c.time.snapshot_stride = get_integer(t, "time", "snapshot_stride", c.time.snapshot_stride);

    const json& in = section(j, "initial");
    c.initial = parse_initial(in);
    if (in.contains("tune_target_energy") && !in.at("tune_target_energy").is_null())
        c.tune_target_energy = get_number(in, "initial", "tune_target_energy", 0.0);

    const json& th = section(j, "thresholds");
    reject_unknown(th, "thresholds", {"blowup_ratio", "tail_threshold"});
    c.thresholds.blowup_ratio = get_number(th, "thresholds", "blowup_ratio", c.thresholds.blowup_ratio);
    c.thresholds.tail_threshold = get_number(th, "thresholds", "tail_threshold", c.thresholds.tail_threshold);

    const json& out = section(j, "output");
    reject_unknown(out, "output", {"directory", "formats"});
    c.output.directory = get_string(out, "output", "directory", c.output.directory.string());
    if (out.contains("formats")) {
        const json& f = out.at("formats");
        if (!f.is_array()) throw ConfigError("output.formats", "must be a list of strings");
        c.output.formats.clear();
        for (const auto& e : f) {
            if (!e.is_string()) throw ConfigError("output.formats", "must be a list of strings");
            c.output.formats.push_back(e.get<std::string>());
        }
    }

    c.validate();
    return c;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

json serialize_config(const SimConfig& c) {
    json j;
    j["grid"] = {{"n", c.grid.n}, {"L", c.grid.L}};
    j["physics"] = {{"m", c.physics.m},
                    {"epsilon", c.physics.epsilon},
                    {"alpha", c.physics.alpha},
                    {"kernel_mode", c.physics.kernel_mode},
                    {"R", c.physics.R ? json(*c.physics.R) : json(nullptr)},
                    {"splitting", c.physics.splitting}};
    j["time"] = {{"dt", c.time.dt},
                 {"t_end", c.time.t_end},
                 {"record_stride", c.time.record_stride},
                 {"snapshot_stride", c.time.snapshot_stride}};
    j["initial"] = serialize_initial(c.initial);
    if (c.tune_target_energy) j["initial"]["tune_target_energy"] = *c.tune_target_energy;
    j["thresholds"] = {{"blowup_ratio", c.thresholds.blowup_ratio}, {"tail_threshold", c.thresholds.tail_threshold}};
    j["output"] = {{"directory", c.output.directory.string()}, {"formats", c.output.formats}};
    return j;
}

std::string config_hash(const SimConfig& config) {
    const std::string text = serialize_config(config).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string code_version() { return SPS_VERSION; }

}  // namespace sps
