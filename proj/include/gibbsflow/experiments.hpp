#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace gibbsflow {

/// A CSV table; cells are preformatted strings.
struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void write(const std::filesystem::path& file) const;
    std::string to_csv() const;
};

/// Shortest round-trip text form of a double.
std::string fmt(double x);
std::string fmt(std::uint64_t x);
std::string fmt(int x);

struct Verdict {
    std::string property;
    bool pass;
    std::string detail;
};

/// Output of one experiment. `results` has columns case,quantity,value,se,n;
/// `curves` are the plot-facing tables.
struct ExperimentOutput {
    Table results{"results", {"case", "quantity", "value", "se", "n"}, {}};
    std::vector<Table> curves;
    std::vector<Verdict> verdicts;

    void add(const std::string& case_, const std::string& quantity, double value, double se = 0.0,
             std::uint64_t n = 0);
    void check(const std::string& property, bool pass, const std::string& detail);
    bool all_pass() const;
};

struct RunContext {
    std::uint64_t seed = 0x5EED;
    unsigned threads = 1;
};

/// Raised for invalid configurations; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParamSpec {
    std::string key;
    nlohmann::json default_value;
    std::string help;
};

struct Experiment {
    std::string name;
    std::string criterion;  // acceptance label, e.g. "A1"
    std::string summary;
    std::vector<ParamSpec> params;
    std::function<ExperimentOutput(const nlohmann::json& params, const RunContext&)> run;
};

const std::vector<Experiment>& experiment_catalogue();
/// nullptr when unknown.
const Experiment* find_experiment(const std::string& name);

/// Defaults overlaid with `given`; throws ConfigError on unknown keys or on
/// a value whose JSON type differs from the default's.
nlohmann::json resolve_params(const Experiment& exp, const nlohmann::json& given);

/// Parsed and validated TOML scenario.
struct ScenarioConfig {
    std::string name;
    std::string experiment;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string output_dir = "runs";
    nlohmann::json params;  // resolved
};

ScenarioConfig parse_config(const std::string& toml_text);
ScenarioConfig load_config(const std::filesystem::path& file);

enum class SeedSource { cli, env, config, fallback };
std::string to_string(SeedSource s);

struct ResolvedSeed {
    std::uint64_t seed;
    SeedSource source;
};

/// CLI flag > GIBBSFLOW_SEED > config > 0x5EED.
ResolvedSeed resolve_seed(std::optional<std::uint64_t> cli, const ScenarioConfig& cfg);

/// Version string baked in at configure time (git describe when available).
std::string tool_version();

struct RunSummary {
    std::filesystem::path dir;
    bool all_pass;
    std::size_t n_fail;
};

/// Runs the experiment and writes manifest.json, results.csv, verdicts.csv
/// and the curve tables into `dir`.
RunSummary execute_run(const ScenarioConfig& cfg, const ResolvedSeed& seed, unsigned threads,
                       const std::filesystem::path& dir);

}  // namespace gibbsflow
