// Runs every numbered acceptance criterion at its default parameters and
// prints one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "gibbsflow/experiments.hpp"

using namespace gibbsflow;

namespace {

// Wall-clock budgets in seconds.
const std::map<std::string, double> kBudget = {
    {"A1", 10},   {"A2", 5},    {"A3", 30},   {"A4", 30},   {"A5", 120},  {"A6", 120},  {"A7", 5},
    {"A8", 120},  {"A9", 180},  {"A10", 300}, {"A11", 180}, {"A12", 120}, {"A13", 120}, {"A14", 120},
};

int criterion_number(const std::string& c) { return std::atoi(c.c_str() + 1); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::uint64_t seed = 24301;
    std::string only;
    app.add_option("--seed", seed, "root seed");
    app.add_option("--only", only, "run a single criterion, e.g. A4");
    CLI11_PARSE(app, argc, argv);

    std::map<int, const Experiment*> ordered;
    for (const auto& e : experiment_catalogue())
        if (!e.criterion.empty()) ordered[criterion_number(e.criterion)] = &e;

    int failures = 0;
    for (const auto& [num, exp] : ordered) {
        if (!only.empty() && exp->criterion != only) continue;
        const auto start = std::chrono::steady_clock::now();
        bool pass = false;
        std::string note;
        try {
            const ExperimentOutput out = exp->run(resolve_params(*exp, nlohmann::json::object()), RunContext{seed, 1});
            pass = out.all_pass();
            for (const auto& v : out.verdicts)
                if (!v.pass) note += "\n    failed: " + v.property + " (" + v.detail + ")";
        } catch (const std::exception& e) {
            note = std::string("\n    error: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const double budget = kBudget.at(exp->criterion);
        if (secs > budget) {
            pass = false;
            note += "\n    over budget: " + std::to_string(secs) + " s > " + std::to_string(budget) + " s";
        }
        std::printf("%-3s %s  %-18s %7.2f s%s\n", exp->criterion.c_str(), pass ? "PASS" : "FAIL", exp->name.c_str(),
                    secs, note.c_str());
        std::fflush(stdout);
        failures += pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
