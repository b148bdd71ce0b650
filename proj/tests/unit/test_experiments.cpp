#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gibbsflow/experiments.hpp"

using namespace gibbsflow;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream is(p);
    std::vector<std::vector<std::string>> rows;
    for (std::string line; std::getline(is, line);) rows.push_back(split_csv(line));
    return rows;
}

struct EnvGuard {
    std::string key;
    explicit EnvGuard(std::string k, const char* value) : key(std::move(k)) { setenv(key.c_str(), value, 1); }
    ~EnvGuard() { unsetenv(key.c_str()); }
};

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("gibbsflow_test_" + name);
    fs::remove_all(p);
    return p;
}

// Plot-facing tables each experiment writes besides results.csv and verdicts.csv.
const std::map<std::string, std::map<std::string, std::vector<std::string>>> kCurveSchemas = {
    {"debruijn", {{"debruijn_curve", {"model", "t", "entropy", "fisher", "residual", "kappa", "envelope"}}}},
    {"dissipation", {{"dissipation_curve", {"model", "t", "entropy_slope", "fisher", "difference"}}}},
    {"strict-decrease", {}},
    {"decay", {{"decay_curve", {"beta", "kappa", "t", "entropy", "envelope"}}}},
    {"series", {}},
    {"reversibility", {}},
    {"finite-time-gibbs", {{"tv_curve", {"t", "tv"}}}},
    {"ideal-gas", {}},
    {"gnz", {{"gnz_residuals", {"spec", "test_function", "residual", "se", "n"}}}},
    {"finite-speed", {{"fsp_curve", {"buffer", "p_hat", "se", "n"}}}},
    {"correlations", {{"correlation_profile", {"order", "x1", "x2", "value", "se", "expected"}}}},
    {"variable-change", {}},
    {"moments", {}},
    {"ergodic", {{"ergodic_convergence", {"dim", "observable", "volume", "mean", "variance", "se"}}}},
    {"boundary-fisher", {{"boundary_fisher", {"interior", "free", "averaged", "difference_per_cell"}}}},
};

}  // namespace

TEST_CASE("catalogue") {
    const auto& cat = experiment_catalogue();
    CHECK(cat.size() == kCurveSchemas.size());
    std::set<std::string> criteria;
    for (const auto& e : cat) {
        CHECK(kCurveSchemas.count(e.name) == 1);
        CHECK(find_experiment(e.name) == &e);
        if (!e.criterion.empty()) criteria.insert(e.criterion);
    }
    CHECK(criteria.size() == 14);
    CHECK(find_experiment("nope") == nullptr);
}

TEST_CASE("config parsing") {
    const auto cfg = parse_config("name = \"a\"\nexperiment = \"decay\"\nseed = 7\n[params]\nfit_start = 20.0\n");
    CHECK(cfg.name == "a");
    CHECK(cfg.seed == 7u);
    CHECK(cfg.params["fit_start"] == 20.0);
    CHECK(cfg.params["fit_end"] == 60.0);
    CHECK(parse_config("experiment = \"decay\"\n").name == "decay");

    CHECK_THROWS_AS(parse_config("experiment = \"decay\"\ncolour = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment = \"decay\"\n[params]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment = \"decay\"\n[params]\nfit_start = \"x\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment = \"nope\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("name = \"a\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment = \"decay\"\nseed = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment = \"decay\"\nthreads = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment = = 1\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/x.toml"), ConfigError);
}

TEST_CASE("seed resolution order") {
    unsetenv("GIBBSFLOW_SEED");
    ScenarioConfig cfg;
    auto r = resolve_seed(std::nullopt, cfg);
    CHECK(r.seed == 0x5EED);
    CHECK(r.source == SeedSource::fallback);
    cfg.seed = 11;
    r = resolve_seed(std::nullopt, cfg);
    CHECK(r.seed == 11);
    CHECK(to_string(r.source) == "config");
    {
        EnvGuard env("GIBBSFLOW_SEED", "12");
        r = resolve_seed(std::nullopt, cfg);
        CHECK(r.seed == 12);
        CHECK(to_string(r.source) == "env");
        r = resolve_seed(13, cfg);
        CHECK(r.seed == 13);
        CHECK(to_string(r.source) == "cli");
    }
}

TEST_CASE("CSV tables quote awkward cells and print doubles round-trip") {
    const Table t{"x", {"a", "b"}, {{"p,q", "say \"hi\""}}};
    CHECK(t.to_csv() == "a,b\n\"p,q\",\"say \"\"hi\"\"\"\n");
    CHECK(split_csv("\"p,q\",\"say \"\"hi\"\"\"") == std::vector<std::string>{"p,q", "say \"hi\""});
    CHECK(std::stod(fmt(0.1)) == 0.1);
    CHECK(std::stod(fmt(1.0 / 3.0)) == 1.0 / 3.0);
    ExperimentOutput empty;
    CHECK_FALSE(empty.all_pass());
}

TEST_CASE("run directories follow the documented schema") {
    for (const auto& exp : experiment_catalogue()) {
        CAPTURE(exp.name);
        ScenarioConfig cfg;
        cfg.name = exp.name;
        cfg.experiment = exp.name;
        cfg.params = resolve_params(exp, json::object());
        const fs::path dir = scratch(exp.name);
        const RunSummary s = execute_run(cfg, {24301, SeedSource::config}, 1, dir);
        CHECK(s.all_pass);
        CHECK(s.n_fail == 0);

        std::ifstream ms(dir / "manifest.json");
        const json m = json::parse(ms);
        for (const char* key : {"tool", "version", "name", "experiment", "criterion", "seed", "seed_source",
                                "threads", "params", "files"})
            CHECK(m.contains(key));
        CHECK(m["seed"] == 24301);
        CHECK(m["seed_source"] == "config");
        CHECK(m["version"] == tool_version());
        CHECK(m["params"] == cfg.params);

        std::set<std::string> listed, present;
        for (const auto& f : m["files"]) listed.insert(f.get<std::string>());
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".csv") present.insert(e.path().filename().string());
        CHECK(listed == present);

        const auto results = read_csv(dir / "results.csv");
        REQUIRE(results.size() >= 2);
        CHECK(results[0] == std::vector<std::string>{"case", "quantity", "value", "se", "n"});
        for (const auto& row : results) CHECK(row.size() == 5);

        const auto verdicts = read_csv(dir / "verdicts.csv");
        REQUIRE(verdicts.size() >= 2);
        CHECK(verdicts[0] == std::vector<std::string>{"property", "status", "detail"});
        for (std::size_t i = 1; i < verdicts.size(); ++i) {
            CHECK(verdicts[i].size() == 3);
            CHECK(verdicts[i][1] == "PASS");
        }

        const auto& curves = kCurveSchemas.at(exp.name);
        CHECK(present.size() == 2 + curves.size());
        for (const auto& [stem, columns] : curves) {
            const auto rows = read_csv(dir / (stem + ".csv"));
            REQUIRE(rows.size() >= 2);
            CHECK(rows[0] == columns);
            for (const auto& row : rows) CHECK(row.size() == columns.size());
        }
        fs::remove_all(dir);
    }
}

TEST_CASE("fixed-seed runs replay byte for byte") {
    for (const char* name : {"decay", "ideal-gas", "finite-speed"}) {
        CAPTURE(name);
        ScenarioConfig cfg;
        cfg.name = name;
        cfg.experiment = name;
        const fs::path a = scratch(std::string(name) + "_a"), b = scratch(std::string(name) + "_b");
        execute_run(cfg, {99, SeedSource::cli}, 1, a);
        execute_run(cfg, {99, SeedSource::cli}, 1, b);
        CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
        fs::remove_all(a);
        fs::remove_all(b);
    }
}
