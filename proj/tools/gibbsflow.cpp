// Command-line front end: run, validate, list-experiments, replay.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gibbsflow/experiments.hpp"
#include "gibbsflow/parallel.hpp"

namespace fs = std::filesystem;
using namespace gibbsflow;

namespace {

enum Exit { ok = 0, failed = 1, config_error = 2, io_error = 3 };

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw fs::filesystem_error("cannot read", p, std::make_error_code(std::errc::no_such_file_or_directory));
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

unsigned resolve_threads(std::optional<unsigned> cli, const ScenarioConfig& cfg) {
    if (cli) return *cli;
    if (const char* env = std::getenv("GIBBSFLOW_THREADS"); env && *env) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
        throw ConfigError(std::string("invalid GIBBSFLOW_THREADS '") + env + "'");
    }
    if (cfg.threads) return *cfg.threads;
    return 1;
}

void print_summary(const RunSummary& s) {
    std::cout << "run directory: " << s.dir.string() << '\n';
    std::ifstream is(s.dir / "verdicts.csv");
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) std::cout << "  " << line << '\n';
    std::cout << (s.all_pass ? "PASS" : "FAIL") << " (" << s.n_fail << " failing)\n";
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return config_error;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return io_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failed;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Birth-and-death dynamics of Gibbs point processes: numerical experiments"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    std::string config_path, run_dir_arg, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;

    auto* run = app.add_subcommand("run", "run one experiment from a TOML config");
    run->add_option("config", config_path, "scenario file")->required();
    run->add_option("--seed", seed, "root seed (overrides GIBBSFLOW_SEED and the config)");
    run->add_option("--threads", threads, "worker threads (overrides GIBBSFLOW_THREADS and the config)")
        ->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "run directory (default <output_dir>/<name>)");

    auto* validate = app.add_subcommand("validate", "parse and check a config without running it");
    validate->add_option("config", config_path, "scenario file")->required();

    auto* list = app.add_subcommand("list-experiments", "print the experiment catalogue");
    bool with_params = false;
    list->add_flag("--params", with_params, "also print parameters and defaults");

    auto* replay = app.add_subcommand("replay", "rerun a run directory and compare results.csv byte for byte");
    replay->add_option("run_dir", run_dir_arg, "existing run directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (*list) {
        for (const auto& e : experiment_catalogue()) {
            std::cout << e.name << '\t' << (e.criterion.empty() ? "-" : e.criterion) << '\t' << e.summary << '\n';
            if (with_params) {
                for (const auto& p : e.params)
                    std::cout << "    " << p.key << " = " << p.default_value.dump() << "    # " << p.help << '\n';
            }
        }
        return ok;
    }
    if (*validate) {
        return guarded([&] {
            const ScenarioConfig cfg = load_config(config_path);
            std::cout << "ok: " << cfg.name << " (" << cfg.experiment << ")\n" << cfg.params.dump(2) << '\n';
            return static_cast<int>(ok);
        });
    }
    if (*run) {
        return guarded([&] {
            const ScenarioConfig cfg = load_config(config_path);
            const ResolvedSeed rs = resolve_seed(seed, cfg);
            const unsigned n_threads = resolve_threads(threads, cfg);
            set_default_threads(n_threads);
            const fs::path dir = out_dir.empty() ? fs::path(cfg.output_dir) / cfg.name : fs::path(out_dir);
            const RunSummary s = execute_run(cfg, rs, n_threads, dir);
            print_summary(s);
            return static_cast<int>(s.all_pass ? ok : failed);
        });
    }
    if (*replay) {
        return guarded([&] {
            const fs::path src(run_dir_arg);
            const auto manifest = nlohmann::json::parse(slurp(src / "manifest.json"));
            ScenarioConfig cfg;
            cfg.name = manifest.at("name").get<std::string>();
            cfg.experiment = manifest.at("experiment").get<std::string>();
            const Experiment* exp = find_experiment(cfg.experiment);
            if (!exp) throw ConfigError("manifest names unknown experiment '" + cfg.experiment + "'");
            cfg.params = resolve_params(*exp, manifest.at("params"));
            const ResolvedSeed rs{manifest.at("seed").get<std::uint64_t>(), SeedSource::config};
            const unsigned n_threads = threads.value_or(manifest.at("threads").get<unsigned>());
            const fs::path dir = src / "replay";
            const RunSummary s = execute_run(cfg, rs, n_threads, dir);
            const bool same = slurp(src / "results.csv") == slurp(dir / "results.csv");
            std::cout << "replay into " << dir.string() << ": results.csv "
                      << (same ? "identical" : "DIFFERS") << '\n';
            return static_cast<int>(same && s.all_pass ? ok : failed);
        });
    }
    return ok;
}
