#include "run_config.hpp"

#include <algorithm>
#include <set>

#include "mfi/error.hpp"
#include "mfi/io.hpp"
#include "mfi/verify.hpp"

namespace mfi::cli {

namespace {

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const json& obj, const char* key, T& dst, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        dst = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

EllRange read_range(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
        throw ConfigError(where + ": expected [min, max] integers");
    }
    const EllRange r{v[0].get<int>(), v[1].get<int>()};
    if (r.empty()) throw ConfigError(where + ": min must not exceed max");
    return r;
}

}  // namespace

RectangleFilter parse_filter(const std::string& text) {
    if (text == "all") return RectangleFilter::all();
    if (text == "diagonal") return RectangleFilter::diagonal();
    const std::string prefix = "eccentricity:";
    if (text.rfind(prefix, 0) == 0) {
        try {
            std::size_t used = 0;
            const std::string tail = text.substr(prefix.size());
            const int ell = std::stoi(tail, &used);
            if (used == tail.size()) return RectangleFilter::with_eccentricity(ell);
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("filter: expected all, diagonal or eccentricity:<ell>, got '" + text + "'");
}

std::string filter_text(const RectangleFilter& f) {
    switch (f.kind) {
        case RectangleFilter::Kind::kAll:
            return "all";
        case RectangleFilter::Kind::kDiagonal:
            return "diagonal";
        case RectangleFilter::Kind::kEccentricity:
            return "eccentricity:" + std::to_string(f.ell);
    }
    return "all";
}

void apply_json(RunConfig& cfg, const json& doc) {
    reject_unknown(doc, "config",
                   {"grid", "exponents", "weights", "input", "corpus", "ell_range", "filter",
                    "characteristic", "eval", "cone_decay", "verify", "seed", "threads", "out"});
    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        reject_unknown(g, "grid", {"n", "m", "extent_x", "extent_y", "cells_x", "cells_y"});
        for (const auto& [k, v] : g.items()) cfg.grid_json[k] = v;
    }
    if (doc.contains("exponents")) {
        const auto& e = doc.at("exponents");
        reject_unknown(e, "exponents", {"alpha", "beta", "p", "q", "theta", "t"});
        read(e, "alpha", cfg.alpha, "exponents");
        read(e, "beta", cfg.beta, "exponents");
        read(e, "p", cfg.p, "exponents");
        read(e, "theta", cfg.theta, "exponents");
        read(e, "t", cfg.t, "exponents");
        if (e.contains("q")) {
            double q = 0.0;
            read(e, "q", q, "exponents");
            cfg.q = q;
        }
    }
    if (doc.contains("weights")) {
        const auto& w = doc.at("weights");
        reject_unknown(w, "weights", {"kind", "a", "b", "c", "d", "delta", "omega", "sigma"});
        read(w, "kind", cfg.weights.kind, "weights");
        read(w, "a", cfg.weights.power.a, "weights");
        read(w, "b", cfg.weights.power.b, "weights");
        read(w, "c", cfg.weights.power.c, "weights");
        read(w, "d", cfg.weights.power.d, "weights");
        read(w, "delta", cfg.weights.power.delta, "weights");
        read(w, "omega", cfg.weights.omega_path, "weights");
        read(w, "sigma", cfg.weights.sigma_path, "weights");
    }
    if (doc.contains("input")) {
        const auto& in = doc.at("input");
        reject_unknown(in, "input", {"kind", "cell", "path"});
        read(in, "kind", cfg.input.kind, "input");
        read(in, "cell", cfg.input.cell, "input");
        read(in, "path", cfg.input.path, "input");
    }
    if (doc.contains("corpus")) {
        const auto& c = doc.at("corpus");
        reject_unknown(c, "corpus", {"indicators", "random", "single_cells"});
        read(c, "indicators", cfg.corpus.indicators, "corpus");
        read(c, "random", cfg.corpus.random, "corpus");
        read(c, "single_cells", cfg.corpus.single_cells, "corpus");
    }
    if (doc.contains("ell_range")) cfg.ell_range = read_range(doc.at("ell_range"), "ell_range");
    if (doc.contains("filter")) {
        if (!doc.at("filter").is_string()) throw ConfigError("filter: expected a string");
        cfg.filter = parse_filter(doc.at("filter").get<std::string>());
    }
    if (doc.contains("characteristic")) {
        const auto& c = doc.at("characteristic");
        reject_unknown(c, "characteristic", {"form", "table"});
        std::string form = cfg.form == CharacteristicForm::kProductBump ? "product" : "averaged";
        read(c, "form", form, "characteristic");
        if (form == "product") {
            cfg.form = CharacteristicForm::kProductBump;
        } else if (form == "averaged") {
            cfg.form = CharacteristicForm::kAveragedPQ;
        } else {
            throw ConfigError("characteristic.form: expected product or averaged");
        }
        read(c, "table", cfg.table, "characteristic");
    }
    if (doc.contains("eval")) {
        const auto& e = doc.at("eval");
        reject_unknown(e, "eval", {"oracle", "cone", "cone_range"});
        read(e, "oracle", cfg.oracle, "eval");
        if (e.contains("cone") && !e.at("cone").is_null()) {
            if (!e.at("cone").is_number_integer()) throw ConfigError("eval.cone: expected an integer");
            cfg.cone = e.at("cone").get<int>();
        }
        if (e.contains("cone_range") && !e.at("cone_range").is_null()) {
            cfg.cone_range = read_range(e.at("cone_range"), "eval.cone_range");
        }
    }
    if (doc.contains("cone_decay")) {
        const auto& c = doc.at("cone_decay");
        reject_unknown(c, "cone_decay", {"profile", "synthetic_epsilon", "synthetic_scale"});
        read(c, "profile", cfg.profile, "cone_decay");
        read(c, "synthetic_epsilon", cfg.synthetic_epsilon, "cone_decay");
        read(c, "synthetic_scale", cfg.synthetic_scale, "cone_decay");
    }
    if (doc.contains("verify")) {
        const auto& v = doc.at("verify");
        reject_unknown(v, "verify", {"checks", "calibration"});
        read(v, "checks", cfg.checks, "verify");
        read(v, "calibration", cfg.calibration, "verify");
    }
    read(doc, "seed", cfg.seed, "config");
    read(doc, "threads", cfg.threads, "config");
    read(doc, "out", cfg.out, "config");
}

void finalize(RunConfig& cfg) {
    try {
        cfg.grid = io::grid_from_json(cfg.grid_json);
        cfg.exponents.emplace(cfg.grid->n(), cfg.grid->m(), cfg.alpha, cfg.beta, cfg.p,
                              cfg.q.value_or(cfg.p), cfg.theta);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (!(cfg.t > 1.0 && cfg.t <= cfg.theta)) {
        throw ConfigError("exponents: t must satisfy 1 < t <= theta");
    }
    const std::set<std::string> weight_kinds{"unit", "power", "file"};
    if (!weight_kinds.count(cfg.weights.kind)) {
        throw ConfigError("weights.kind: expected unit, power or file");
    }
    if (cfg.weights.kind == "file" &&
        (cfg.weights.omega_path.empty() || cfg.weights.sigma_path.empty())) {
        throw ConfigError("weights: file weights need omega and sigma paths");
    }
    const std::set<std::string> input_kinds{"zero", "random", "single_cell", "indicator", "file"};
    if (!input_kinds.count(cfg.input.kind)) {
        throw ConfigError("input.kind: expected zero, random, single_cell, indicator or file");
    }
    if (cfg.input.kind == "single_cell") {
        if (cfg.input.cell.size() != 2 || cfg.input.cell[0] < 0 || cfg.input.cell[1] < 0 ||
            static_cast<std::size_t>(cfg.input.cell[0]) >= cfg.grid->factor_cells(Factor::kFirst) ||
            static_cast<std::size_t>(cfg.input.cell[1]) >= cfg.grid->factor_cells(Factor::kSecond)) {
            throw ConfigError("input.cell: expected [x_cell, y_cell] inside the grid");
        }
    }
    if (cfg.input.kind == "file" && cfg.input.path.empty()) {
        throw ConfigError("input.path: required for file input");
    }
    const std::set<std::string> profiles{"characteristic", "norm", "both", "synthetic"};
    if (!profiles.count(cfg.profile)) {
        throw ConfigError("cone_decay.profile: expected characteristic, norm, both or synthetic");
    }
    if (cfg.profile == "synthetic" && !(cfg.synthetic_scale > 0.0)) {
        throw ConfigError("cone_decay.synthetic_scale: must be positive");
    }
    if (cfg.corpus.indicators + cfg.corpus.random + cfg.corpus.single_cells == 0) {
        throw ConfigError("corpus: at least one member is required");
    }
    if (cfg.threads < 1) throw ConfigError("threads: must be at least 1");
    if (cfg.out.empty()) throw ConfigError("out: must not be empty");
}

json effective_json(const RunConfig& cfg) {
    json j;
    j["grid"] = cfg.grid ? io::grid_to_json(*cfg.grid) : cfg.grid_json;
    j["exponents"] = {{"alpha", cfg.alpha}, {"beta", cfg.beta}, {"p", cfg.p},
                      {"q", cfg.q.value_or(cfg.p)}, {"theta", cfg.theta}, {"t", cfg.t}};
    j["weights"] = {{"kind", cfg.weights.kind}};
    if (cfg.weights.kind == "power") {
        j["weights"].update({{"a", cfg.weights.power.a},
                             {"b", cfg.weights.power.b},
                             {"c", cfg.weights.power.c},
                             {"d", cfg.weights.power.d},
                             {"delta", cfg.weights.power.delta}});
    } else if (cfg.weights.kind == "file") {
        j["weights"].update({{"omega", cfg.weights.omega_path}, {"sigma", cfg.weights.sigma_path}});
    }
    j["input"] = {{"kind", cfg.input.kind}, {"cell", cfg.input.cell}, {"path", cfg.input.path}};
    j["corpus"] = {{"indicators", cfg.corpus.indicators},
                   {"random", cfg.corpus.random},
                   {"single_cells", cfg.corpus.single_cells}};
    j["ell_range"] = {cfg.ell_range.min, cfg.ell_range.max};
    j["filter"] = filter_text(cfg.filter);
    j["characteristic"] = {
        {"form", cfg.form == CharacteristicForm::kProductBump ? "product" : "averaged"},
        {"table", cfg.table}};
    j["eval"] = {{"oracle", cfg.oracle},
                 {"cone", cfg.cone ? json(*cfg.cone) : json(nullptr)},
                 {"cone_range", cfg.cone_range ? json{cfg.cone_range->min, cfg.cone_range->max}
                                               : json(nullptr)}};
    j["cone_decay"] = {{"profile", cfg.profile},
                       {"synthetic_epsilon", cfg.synthetic_epsilon},
                       {"synthetic_scale", cfg.synthetic_scale}};
    j["verify"] = {{"checks", cfg.checks}, {"calibration", cfg.calibration}};
    j["seed"] = cfg.seed;
    return j;
}

WeightPair build_weights(const RunConfig& cfg) {
    const ProductGrid& g = *cfg.grid;
    if (cfg.weights.kind == "power") return cfg.weights.power.sample(g);
    if (cfg.weights.kind == "file") {
        auto om = io::read_grid_function(cfg.weights.omega_path);
        auto sg = io::read_grid_function(cfg.weights.sigma_path);
        if (!(om.grid() == g) || !(sg.grid() == g)) {
            throw ConfigError("weights: file grids differ from the configured grid");
        }
        return WeightPair(std::move(om), std::move(sg));
    }
    return unit_weights(g);
}

GridFunction build_input(const RunConfig& cfg) {
    const ProductGrid& g = *cfg.grid;
    if (cfg.input.kind == "zero") return GridFunction(g);
    if (cfg.input.kind == "single_cell") {
        std::vector<double> v(g.size(), 0.0);
        v[g.index(cfg.input.cell[0], cfg.input.cell[1])] = 1.0;
        return GridFunction(g, std::move(v));
    }
    if (cfg.input.kind == "indicator") {
        // indicator of the box [0, extent] in every coordinate
        return GridFunction::from_function(g, [&](const FactorPoint& x, const FactorPoint& y) {
            for (int k = 0; k < g.n(); ++k) {
                if (x[k] < 0.0) return 0.0;
            }
            for (int k = 0; k < g.m(); ++k) {
                if (y[k] < 0.0) return 0.0;
            }
            return 1.0;
        });
    }
    if (cfg.input.kind == "file") {
        auto f = io::read_grid_function(cfg.input.path);
        if (!(f.grid() == g)) throw ConfigError("input: file grid differs from the configured grid");
        return f;
    }
    return build_corpus(g, CorpusKind::kRandom, 1, cfg.seed).functions.front();
}

}  // namespace mfi::cli
