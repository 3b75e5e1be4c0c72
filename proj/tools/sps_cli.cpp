#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sps/harness.hpp"
#include "sps/semigroup_lab.hpp"

using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;

void write_json(const json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << std::setw(2) << j << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setw(2) << j << "\n";
}

double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

double exponent_value(const json& v) {
    if (v.is_string() && (v == "inf" || v == "infinity")) return sps::kInf;
    return v.get<double>();
}

int cmd_run(const std::string& path) {
    const sps::SimConfig cfg = sps::load_config(path);
    const auto rep = sps::run(cfg);
    std::cout << "status " << sps::to_string(rep.status) << " at t=" << rep.final_time;
    if (!rep.sentinel_reason.empty()) std::cout << " (" << rep.sentinel_reason << ")";
    std::cout << "\nenergy(0) " << rep.energy0 << ", max h_half ratio " << rep.max_h_half_ratio << "\n"
              << "outputs in " << cfg.output.directory.string() << "\n";
    return 0;
}

int cmd_study(const std::string& path, const std::vector<double>& eps) {
    const sps::SimConfig cfg = sps::load_config(path);
    const auto rep = sps::blowup_study(cfg, eps);
    std::cout << "amplitude " << rep.amplitude << ", energy(0) " << rep.energy0 << "\n";
    std::cout << std::left << std::setw(10) << "epsilon" << std::setw(16) << "status" << std::setw(12) << "t"
              << "max h_half ratio\n";
    for (const auto& r : rep.rows)
        std::cout << std::setw(10) << r.epsilon << std::setw(16) << sps::to_string(r.status) << std::setw(12)
                  << r.final_time << r.max_h_half_ratio << "\n";
    std::cout << "eps=0 blow-up: " << (rep.zero_eps_blowup ? "yes" : "no")
              << ", eps>0 completed: " << (rep.positive_eps_completed ? "yes" : "no") << "\n";
    return rep.zero_eps_blowup && rep.positive_eps_completed ? 0 : 1;
}

int cmd_verify(const std::string& suite, const std::string& out) {
    const auto rep = sps::verify(suite);
    for (const auto& c : rep.criteria)
        std::cerr << (c.pass ? "PASS" : "FAIL") << "  " << c.id << " " << c.name << ": " << c.summary << "\n";
    write_json(rep.to_json(), out);
    return rep.pass ? 0 : 1;
}

// Probe file: {"grid": {"n", "L"}, "decay": [...], "duhamel": [...], "hardy": [...]} or
// {"standard": true} for the built-in matrices.
int cmd_kernel_lab(const std::string& path, const std::string& out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open probe config " + path);
    const json cfg = json::parse(in);
    const json g = cfg.value("grid", json::object());
    const sps::Grid3 grid(g.value("n", 128), g.value("L", 64.0));
    json result = json::object();
    bool pass = true;

    json decay = json::array();
    std::vector<sps::LabeledDecayProbe> probes;
    if (cfg.value("standard", false)) probes = sps::standard_decay_matrix(grid);
    for (const auto& d : cfg.value("decay", json::array())) {
        sps::DecayProbe p;
        p.alpha = number_or(d, "alpha", 1.0);
        p.nu = number_or(d, "nu", 0.0);
        p.r = exponent_value(d.value("r", json(1.0)));
        p.p = exponent_value(d.value("p", json("inf")));
        p.data = d.value("data", std::string("scale_invariant")) == "gaussian" ? sps::ProbeData::PeakedGaussian
                                                                               : sps::ProbeData::ScaleInvariant;
        p.gaussian_sigma_cells = number_or(d, "sigma_cells", 4.0);
        p.tail_tol = number_or(d, "tail_tol", 1e-6);
        p.box_limit = d.contains("box_limit") ? d.at("box_limit").get<double>() : sps::infrared_box_limit(p.alpha, p.nu, p.r);
        p.t_samples = sps::geometric_times(d.at("t_min").get<double>(), d.at("t_max").get<double>(), d.value("samples", 48));
        probes.push_back({d.value("label", std::string("custom")), p});
    }
    for (const auto& lp : probes) {
        const double tol = lp.probe.r == lp.probe.p && lp.probe.nu == 0.0 ? 0.02 : 0.05;
        json e;
        try {
            e = sps::to_json(sps::decay_exponent_fit(grid, lp.probe), tol);
        } catch (const std::runtime_error& ex) {
            e = {{"pass", false}, {"error", ex.what()}};
        }
        e["label"] = lp.label;
        pass = pass && e["pass"].get<bool>();
        decay.push_back(e);
    }
    result["decay"] = decay;

    json duhamel = json::array();
    std::vector<sps::LabeledDuhamel> dprobes;
    if (cfg.value("standard", false)) dprobes = sps::standard_duhamel_probes(grid);
    for (const auto& d : cfg.value("duhamel", json::array())) {
        sps::DuhamelProbe p;
        p.alpha = number_or(d, "alpha", 1.0);
        p.nu = number_or(d, "nu", 0.0);
        p.b = number_or(d, "b", 0.8);
        p.r = number_or(d, "r", 2.0);
        p.p = number_or(d, "p", 2.0);
        p.time_variation = number_or(d, "time_variation", 0.0);
        p.T_samples = sps::geometric_times(d.at("T_min").get<double>(), d.at("T_max").get<double>(), d.value("samples", 9));
        dprobes.push_back({d.value("label", std::string("custom")), p});
    }
    for (const auto& lp : dprobes) {
        json e = sps::to_json(sps::duhamel_scaling_probe(grid, lp.probe), 0.10);
        e["label"] = lp.label;
        pass = pass && e["pass"].get<bool>();
        duhamel.push_back(e);
    }
    result["duhamel"] = duhamel;

    json hardy = json::array();
    for (const auto& h : cfg.value("hardy", json::array())) {
        const double gamma = number_or(h, "gamma", 1.0);
        const double sigma = number_or(h, "sigma", 1.0);
        const auto u = sps::gaussian_field(grid, sigma);
        hardy.push_back({{"gamma", gamma}, {"sigma", sigma}, {"ratio", sps::hardy_probe(u, gamma)}});
    }
    result["hardy"] = hardy;
    result["pass"] = pass;
    write_json(result, out);
    return pass ? 0 : 1;
}

// CSV with header r,rho in; CSV r,V out.
int cmd_potential_oracle(const std::string& path, const std::string& out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open density file " + path);
    sps::RadialProfile prof;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double r, rho;
        if (!(ss >> r >> rho)) {
            if (prof.radii.empty()) continue;  // header
            throw std::runtime_error("density file line " + std::to_string(lineno) + ": expected r,rho");
        }
        prof.radii.push_back(r);
        prof.values.push_back(rho);
    }
    const auto v = sps::newton_radial_potential(prof, prof.radii);
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty() && out != "-") {
        file.open(out);
        if (!file) throw std::runtime_error("cannot write " + out);
        os = &file;
    }
    *os << "r,V\n" << std::setprecision(17);
    for (std::size_t i = 0; i < v.size(); ++i) *os << prof.radii[i] << "," << v[i] << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral simulator for the semi-relativistic Schrodinger-Poisson system"};
    app.require_subcommand(1);
    app.set_version_flag("--version", sps::code_version());

    std::string config_path, suite, probe_path, density_path, out;
    std::vector<double> eps;

    auto* run = app.add_subcommand("run", "evolve a configured scenario");
    run->add_option("config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);

    auto* study = app.add_subcommand("blowup-study", "same initial data evolved for each epsilon");
    study->add_option("config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    study->add_option("--eps", eps, "comma-separated epsilon list (must include 0)")->required()->delimiter(',');

    auto* ver = app.add_subcommand("verify", "run a pinned verification suite");
    ver->add_option("suite", suite, "suite name")->required();
    ver->add_option("-o,--out", out, "write the JSON report here instead of stdout");

    auto* lab = app.add_subcommand("kernel-lab", "fractional heat kernel probes");
    lab->add_option("probe-config", probe_path, "JSON probe file")->required()->check(CLI::ExistingFile);
    lab->add_option("-o,--out", out, "write the JSON report here instead of stdout");

    auto* oracle = app.add_subcommand("potential-oracle", "radial Newton potential of a density profile");
    oracle->add_option("density-file", density_path, "CSV with columns r,rho")->required()->check(CLI::ExistingFile);
    oracle->add_option("-o,--out", out, "write CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path);
        if (*study) return cmd_study(config_path, eps);
        if (*ver) return cmd_verify(suite, out);
        if (*lab) return cmd_kernel_lab(probe_path, out);
        if (*oracle) return cmd_potential_oracle(density_path, out);
    } catch (const sps::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
