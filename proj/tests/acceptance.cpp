// Acceptance suite: one line per criterion. Pass a path to also write the full JSON report.
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>

#include "sps/harness.hpp"

int main(int argc, char** argv) {
    using namespace sps;
    const std::vector<std::function<CriterionResult()>> criteria{
        criterion_charge_conservation, criterion_energy_conservation, criterion_dissipation_identity,
        criterion_linear_oracle,       criterion_dichotomy,           criterion_dilation_equality,
        criterion_variance_chain,      criterion_newton_oracle,       criterion_kernel_exponents,
        criterion_orthonormality,      criterion_convergence};

    nlohmann::json report = nlohmann::json::array();
    int failed = 0;
    for (const auto& run : criteria) {
        const auto start = std::chrono::steady_clock::now();
        CriterionResult c;
        try {
            c = run();
        } catch (const std::exception& e) {
            c.pass = false;
            c.summary = std::string("error: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (c.pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << c.id << "  " << c.name << ": "
                  << c.summary << "  [" << std::fixed << std::setprecision(1) << secs << " s]" << std::endl;
        std::cout.unsetf(std::ios::fixed);
        if (!c.pass) ++failed;
        report.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"summary", c.summary},
                          {"seconds", secs}, {"metrics", c.metrics}});
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    if (argc > 1) std::ofstream(argv[1]) << std::setw(2) << report << "\n";
    return failed == 0 ? 0 : 1;
}
