// mfi: evaluate strong fractional integrals, bump characteristics and decay
// profiles, and run the acceptance checks.
//
// Precedence: built-in defaults < --config document < command-line flags.
// Exit codes: 0 ok, 1 check or computation failure, 2 invalid configuration,
// 3 resource guard exceeded.
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mfi/acceptance.hpp"
#include "mfi/error.hpp"
#include "mfi/io.hpp"
#include "mfi/parallel.hpp"
#include "mfi/verify.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using mfi::cli::ConfigError;
using mfi::cli::RunConfig;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfigInvalid = 2, kGuard = 3 };

void write_json(const fs::path& path, const json& j) { mfi::io::atomic_write(path, j.dump(2) + "\n"); }

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

int cmd_eval(const RunConfig& cfg, json& run) {
    using namespace mfi;
    const auto f = cli::build_input(cfg);
    const ExponentConfig& ex = *cfg.exponents;
    OperatorOutput out = [&] {
        if (cfg.cone) return cone_operator(f, ex, *cfg.cone);
        if (cfg.cone_range) return cone_sum(f, ex, cfg.cone_range->min, cfg.cone_range->max);
        return strong_fractional_integral(f, ex);
    }();
    json report = {{"config", cli::effective_json(cfg)}, {"operator", io::operator_metadata(out, ex)}};
    report["mode"] = cfg.cone ? "cone" : cfg.cone_range ? "cone_sum" : "full";
    report["oracle_discrepancy"] = nullptr;
    if (cfg.oracle) {
        const auto sep = strong_fractional_integral(f, ex).result;
        const auto dir = strong_fractional_integral_direct(f, ex).result;
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < sep.size(); ++i) {
            num += (sep[i] - dir[i]) * (sep[i] - dir[i]);
            den += dir[i] * dir[i];
        }
        const double disc = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
        report["oracle_discrepancy"] = disc;
        std::cout << "oracle discrepancy " << std::setprecision(6) << disc << "\n";
    }
    const fs::path dir(cfg.out);
    io::write_grid_function(dir / "result", out.result, report["operator"]);
    if (cfg.cone || cfg.cone_range) {
        io::write_grid_function(dir / "excluded", out.excluded, {{"role", "excluded pairs"}});
        io::write_grid_function(dir / "residual", out.residual, {{"role", "out-of-range pairs"}});
    }
    write_json(dir / "eval.json", report);
    run["outputs"] = {"eval.json", "result.bin", "result.json"};
    return kOk;
}

int cmd_characteristic(const RunConfig& cfg, json& run) {
    using namespace mfi;
    const auto w = cli::build_weights(cfg);
    const auto rep =
        bump_characteristic_sup(w, *cfg.exponents, cfg.t, cfg.filter, cfg.table, cfg.form);
    const fs::path dir(cfg.out);
    json report = {{"config", cli::effective_json(cfg)},
                   {"report", io::characteristic_to_json(*cfg.grid, rep)}};
    write_json(dir / "characteristic.json", report);
    run["outputs"] = {"characteristic.json"};
    if (cfg.table) {
        io::atomic_write(dir / "characteristic.csv", io::characteristic_table_csv(*cfg.grid, rep));
        run["outputs"].push_back("characteristic.csv");
    }
    std::cout << "characteristic " << std::setprecision(10) << rep.value << " over "
              << rep.family_size << " rectangles\n";
    return kOk;
}

int cmd_cone_decay(const RunConfig& cfg, json& run) {
    using namespace mfi;
    const fs::path dir(cfg.out);
    run["outputs"] = json::array();
    int status = kOk;
    auto emit = [&](const std::string& name, const DecayReport& raw) {
        json report = {{"config", cli::effective_json(cfg)}};
        DecayReport rep = raw;
        try {
            rep = fit_decay_rate(raw);
            report["fit_error"] = nullptr;
        } catch (const InvalidArgument& e) {
            report["fit_error"] = e.what();
            status = kCheckFailed;
            std::cerr << "mfi: " << name << ": " << e.what() << "\n";
        }
        report["report"] = io::decay_to_json(rep);
        write_json(dir / ("decay_" + name + ".json"), report);
        io::atomic_write(dir / ("decay_" + name + ".csv"), io::decay_csv(rep));
        run["outputs"].push_back("decay_" + name + ".json");
        run["outputs"].push_back("decay_" + name + ".csv");
        auto fmt = [](double v) {
            std::ostringstream s;
            s << std::setprecision(6) << v;
            return std::isfinite(v) ? s.str() : std::string("n/a");
        };
        std::cout << name << ": fitted epsilon " << fmt(rep.fitted_epsilon) << ", residual "
                  << fmt(rep.fit_residual) << "\n";
    };
    if (cfg.profile == "synthetic") {
        DecayReport d;
        for (int ell = cfg.ell_range.min; ell <= cfg.ell_range.max; ++ell) {
            d.ell_values.push_back(ell);
            d.quantities.push_back(cfg.synthetic_scale * std::exp2(-cfg.synthetic_epsilon * std::abs(ell)));
        }
        emit("synthetic", d);
        return status;
    }
    const auto w = cli::build_weights(cfg);
    if (cfg.profile == "characteristic" || cfg.profile == "both") {
        if (!(cfg.t < cfg.theta)) throw ConfigError("exponents: the characteristic profile needs t < theta");
        emit("characteristic", characteristic_decay_profile(w, *cfg.exponents, cfg.t, cfg.ell_range));
    }
    if (cfg.profile == "norm" || cfg.profile == "both") {
        if (cfg.grid->size() > kDirectGuardCells) {
            throw GuardExceeded("norm profile: grid has " + std::to_string(cfg.grid->size()) +
                                " product cells, guard is " + std::to_string(kDirectGuardCells));
        }
        const auto& g = *cfg.grid;
        TestCorpus corpus;
        if (cfg.corpus.indicators) corpus.append(build_corpus(g, CorpusKind::kDyadicIndicators, cfg.corpus.indicators, cfg.seed));
        if (cfg.corpus.random) corpus.append(build_corpus(g, CorpusKind::kRandom, cfg.corpus.random, cfg.seed + 1));
        if (cfg.corpus.single_cells) corpus.append(build_corpus(g, CorpusKind::kSingleCells, cfg.corpus.single_cells, cfg.seed + 2));
        emit("norm", cone_norm_profile(w, *cfg.exponents, cfg.ell_range, corpus));
    }
    return status;
}

int cmd_verify(const RunConfig& cfg, json& run, bool list) {
    namespace acc = mfi::acceptance;
    if (list) {
        for (const auto& c : acc::inventory()) {
            std::cout << c.id << "  " << std::left << std::setw(24) << c.name << c.description << "\n";
        }
        return kOk;
    }
    const fs::path cal_path = cfg.calibration.empty() ? acc::default_calibration_path() : fs::path(cfg.calibration);
    acc::Context ctx;
    ctx.seed = cfg.seed;
    try {
        ctx.calibration = acc::load_calibration(cal_path);
    } catch (const mfi::InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    std::vector<int> ids = cfg.checks;
    if (ids.empty()) {
        for (const auto& c : acc::inventory()) ids.push_back(c.id);
    }
    json results = json::array();
    json timings = json::object();
    std::vector<std::string> failed;
    for (int id : ids) {
        if (id < 1 || id > static_cast<int>(acc::inventory().size())) {
            throw ConfigError("verify.checks: unknown check " + std::to_string(id));
        }
        const auto r = acc::run_check(id, ctx);
        std::cout << acc::format_line(r) << std::endl;
        results.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed},
                           {"detail", r.detail}, {"metrics", r.metrics}});
        timings[r.name] = r.seconds;
        if (!r.passed) failed.push_back(r.name);
    }
    json report = {{"config", mfi::cli::effective_json(cfg)},
                   {"calibration", acc::calibration_to_json(ctx.calibration)},
                   {"results", results},
                   {"passed", failed.empty()}};
    write_json(fs::path(cfg.out) / "verify.json", report);
    run["outputs"] = {"verify.json"};
    run["check_seconds"] = timings;
    if (!failed.empty()) {
        std::cerr << "mfi: failing checks:";
        for (const auto& n : failed) std::cerr << " " << n;
        std::cerr << "\n";
        return kCheckFailed;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Strong fractional integrals, bump characteristics and cone decay on product grids"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    int threads = 0;
    auto* o_out = app.add_option("--out", out, "output directory");
    auto* o_seed = app.add_option("--seed", seed, "random seed");
    auto* o_threads = app.add_option("--threads", threads, "worker threads");
    app.add_option("--config", config_path, "JSON configuration file");

    auto* eval = app.add_subcommand("eval", "evaluate the operator on the configured input");
    bool oracle = false;
    int cone = 0;
    eval->add_flag("--oracle", oracle, "also run the direct sum and report the discrepancy");
    auto* o_cone = eval->add_option("--cone", cone, "evaluate the partial operator of one cone");

    auto* chr = app.add_subcommand("characteristic", "supremum of the bump characteristic");
    std::string filter;
    bool table = false;
    double t = 0.0;
    auto* o_filter = chr->add_option("--filter", filter, "all | diagonal | eccentricity:<ell>");
    chr->add_flag("--table", table, "write per-rectangle values to characteristic.csv");
    auto* o_t = chr->add_option("--t", t, "bump exponent t in (1, theta]");

    auto* decay = app.add_subcommand("cone-decay", "per-eccentricity decay profiles and fits");
    std::string profile;
    auto* o_profile = decay->add_option("--profile", profile, "characteristic | norm | both | synthetic");

    auto* verify = app.add_subcommand("verify", "run the acceptance checks");
    bool list = false;
    std::string calibration;
    std::vector<int> checks;
    verify->add_flag("--list", list, "print the check inventory and exit");
    auto* o_cal = verify->add_option("--calibration", calibration, "calibration constants file");
    auto* o_checks = verify->add_option("--check", checks, "run only these check ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e);
        return kConfigInvalid;
    }

    const auto started = std::chrono::steady_clock::now();
    std::string command;
    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("config: cannot open " + config_path);
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::exception& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
            mfi::cli::apply_json(cfg, doc);
        }
        if (*o_out) cfg.out = out;
        if (*o_seed) cfg.seed = seed;
        if (*o_threads) cfg.threads = threads;
        if (oracle) cfg.oracle = true;
        if (*o_cone) cfg.cone = cone;
        if (*o_filter) cfg.filter = mfi::cli::parse_filter(filter);
        if (table) cfg.table = true;
        if (*o_t) cfg.t = t;
        if (*o_profile) cfg.profile = profile;
        if (*o_cal) cfg.calibration = calibration;
        if (*o_checks) cfg.checks = checks;
        mfi::cli::finalize(cfg);
        mfi::set_thread_count(cfg.threads);

        json run = {{"started_utc", utc_now()}, {"threads", cfg.threads}};
        int status = kOk;
        if (eval->parsed()) {
            command = "eval";
            status = cmd_eval(cfg, run);
        } else if (chr->parsed()) {
            command = "characteristic";
            status = cmd_characteristic(cfg, run);
        } else if (decay->parsed()) {
            command = "cone-decay";
            status = cmd_cone_decay(cfg, run);
        } else {
            command = "verify";
            status = cmd_verify(cfg, run, list);
            if (list) return status;
        }
        run["command"] = command;
        run["exit_code"] = status;
        run["elapsed_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_json(fs::path(cfg.out) / "run.json", run);
        return status;
    } catch (const ConfigError& e) {
        std::cerr << "mfi: invalid configuration: " << e.what() << "\n";
        return kConfigInvalid;
    } catch (const mfi::GuardExceeded& e) {
        std::cerr << "mfi: resource guard: " << e.what() << "\n";
        return kGuard;
    } catch (const std::exception& e) {
        std::cerr << "mfi: " << (command.empty() ? "error" : command) << ": " << e.what() << "\n";
        return kCheckFailed;
    }
}
