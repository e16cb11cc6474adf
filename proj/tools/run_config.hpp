#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfi/characteristic.hpp"
#include "mfi/grid.hpp"
#include "mfi/operator.hpp"
#include "mfi/weights.hpp"

namespace mfi::cli {

using nlohmann::json;

/// Raised for any malformed or out-of-range configuration value (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct WeightSpec {
    std::string kind = "unit";  // unit | power | file
    PowerWeightFamily power{0.25, 0.25, 0.25, 0.25, 0.0};
    std::string omega_path;
    std::string sigma_path;
};

struct InputSpec {
    std::string kind = "random";  // zero | random | single_cell | indicator | file
    std::vector<int> cell{0, 0};
    std::string path;
};

struct CorpusSpec {
    std::size_t indicators = 100;
    std::size_t random = 50;
    std::size_t single_cells = 0;
};

struct RunConfig {
    json grid_json = {{"n", 1}, {"m", 1}, {"extent_x", 1.0}, {"extent_y", 1.0},
                      {"cells_x", 16}, {"cells_y", 16}};
    double alpha = 0.5;
    double beta = 0.5;
    double p = 2.0;
    std::optional<double> q;
    double theta = 3.0;
    double t = 2.0;
    WeightSpec weights;
    InputSpec input;
    CorpusSpec corpus;
    EllRange ell_range{-4, 4};
    RectangleFilter filter = RectangleFilter::all();
    CharacteristicForm form = CharacteristicForm::kProductBump;
    bool table = false;
    bool oracle = false;
    std::optional<int> cone;
    std::optional<EllRange> cone_range;
    std::string profile = "characteristic";  // characteristic | norm | both | synthetic
    double synthetic_epsilon = 0.5;
    double synthetic_scale = 1.0;
    std::vector<int> checks;
    std::string calibration;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out = "mfi-out";

    /// Built and validated by `finalize`.
    std::optional<ProductGrid> grid;
    std::optional<ExponentConfig> exponents;
};

/// Applies a JSON document over the defaults; unknown keys raise ConfigError.
void apply_json(RunConfig& cfg, const json& doc);

/// Constructs and validates the grid and exponents; raises ConfigError.
void finalize(RunConfig& cfg);

[[nodiscard]] RectangleFilter parse_filter(const std::string& text);
[[nodiscard]] std::string filter_text(const RectangleFilter& f);

/// The effective configuration as JSON (echoed into reports).
[[nodiscard]] json effective_json(const RunConfig& cfg);

[[nodiscard]] WeightPair build_weights(const RunConfig& cfg);
[[nodiscard]] GridFunction build_input(const RunConfig& cfg);

}  // namespace mfi::cli
