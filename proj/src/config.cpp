#include <cstdlib>
#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "gibbsflow/experiments.hpp"

#ifndef GIBBSFLOW_VERSION
#define GIBBSFLOW_VERSION "unknown"
#endif

namespace gibbsflow {

using nlohmann::json;

namespace {

json to_json(const toml::node& n) {
    if (const auto* t = n.as_table()) {
        json out = json::object();
        for (const auto& [k, v] : *t) out[std::string(k.str())] = to_json(v);
        return out;
    }
    if (const auto* a = n.as_array()) {
        json out = json::array();
        for (const auto& v : *a) out.push_back(to_json(v));
        return out;
    }
    if (const auto* v = n.as_integer()) return v->get();
    if (const auto* v = n.as_floating_point()) return v->get();
    if (const auto* v = n.as_boolean()) return v->get();
    if (const auto* v = n.as_string()) return v->get();
    throw ConfigError("unsupported TOML value (dates and times are not accepted)");
}

std::uint64_t parse_seed_text(const std::string& s) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos, 0);
    } catch (const std::exception&) {
        throw ConfigError("invalid seed '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("invalid seed '" + s + "'");
    return v;
}

}  // namespace

ScenarioConfig parse_config(const std::string& toml_text) {
    toml::table tbl;
    try {
        tbl = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
        throw ConfigError(os.str());
    }
    const json doc = to_json(tbl);
    ScenarioConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        if (key == "name") {
            if (!value.is_string()) throw ConfigError("'name' must be a string");
            cfg.name = value.get<std::string>();
        } else if (key == "experiment") {
            if (!value.is_string()) throw ConfigError("'experiment' must be a string");
            cfg.experiment = value.get<std::string>();
        } else if (key == "seed") {
            if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
                throw ConfigError("'seed' must be a non-negative integer");
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "threads") {
            if (!value.is_number_integer() || value.get<std::int64_t>() < 1)
                throw ConfigError("'threads' must be a positive integer");
            cfg.threads = value.get<unsigned>();
        } else if (key == "output_dir") {
            if (!value.is_string()) throw ConfigError("'output_dir' must be a string");
            cfg.output_dir = value.get<std::string>();
        } else if (key == "params") {
            if (!value.is_object()) throw ConfigError("'params' must be a table");
        } else {
            throw ConfigError("unknown top-level key '" + key + "'");
        }
    }
    if (cfg.experiment.empty()) throw ConfigError("missing 'experiment'");
    const Experiment* exp = find_experiment(cfg.experiment);
    if (!exp) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    if (cfg.name.empty()) cfg.name = cfg.experiment;
    cfg.params = resolve_params(*exp, doc.contains("params") ? doc["params"] : json());
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw ConfigError("cannot read config " + file.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string to_string(SeedSource s) {
    switch (s) {
        case SeedSource::cli: return "cli";
        case SeedSource::env: return "env";
        case SeedSource::config: return "config";
        case SeedSource::fallback: return "fallback";
    }
    return "fallback";
}

ResolvedSeed resolve_seed(std::optional<std::uint64_t> cli, const ScenarioConfig& cfg) {
    if (cli) return {*cli, SeedSource::cli};
    if (const char* env = std::getenv("GIBBSFLOW_SEED"); env && *env) return {parse_seed_text(env), SeedSource::env};
    if (cfg.seed) return {*cfg.seed, SeedSource::config};
    return {0x5EED, SeedSource::fallback};
}

std::string tool_version() { return GIBBSFLOW_VERSION; }

RunSummary execute_run(const ScenarioConfig& cfg, const ResolvedSeed& seed, unsigned threads,
                       const std::filesystem::path& dir) {
    const Experiment* exp = find_experiment(cfg.experiment);
    if (!exp) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    const json params = resolve_params(*exp, cfg.params);
    // Everything is computed before the directory exists, so a rejected
    // parameter never leaves a partial run behind.
    const ExperimentOutput out = exp->run(params, RunContext{seed.seed, threads});

    std::filesystem::create_directories(dir);
    json manifest = {{"tool", "gibbsflow"},
                     {"version", tool_version()},
                     {"name", cfg.name},
                     {"experiment", cfg.experiment},
                     {"criterion", exp->criterion},
                     {"seed", seed.seed},
                     {"seed_source", to_string(seed.source)},
                     {"threads", threads},
                     {"params", params}};
    json files = json::array({"results.csv", "verdicts.csv"});
    for (const auto& t : out.curves) files.push_back(t.name + ".csv");
    manifest["files"] = files;
    {
        std::ofstream os(dir / "manifest.json", std::ios::binary);
        os << manifest.dump(2) << '\n';
        if (!os) throw std::filesystem::filesystem_error("write failed", dir / "manifest.json",
                                                         std::make_error_code(std::errc::io_error));
    }
    out.results.write(dir / "results.csv");
    Table verdicts{"verdicts", {"property", "status", "detail"}, {}};
    std::size_t n_fail = 0;
    for (const auto& v : out.verdicts) {
        verdicts.rows.push_back({v.property, v.pass ? "PASS" : "FAIL", v.detail});
        n_fail += v.pass ? 0 : 1;
    }
    verdicts.write(dir / "verdicts.csv");
    for (const auto& t : out.curves) t.write(dir / (t.name + ".csv"));
    return {dir, n_fail == 0 && !out.verdicts.empty(), n_fail};
}

}  // namespace gibbsflow
