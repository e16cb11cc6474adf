#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfi::acceptance {

/// Frozen regression bounds, stored in calibration/calibration.json.
struct Calibration {
    int version = 0;
    double two_weight_bound = 0.0;  ///< max ratio / characteristic, any grid
    double decay_bound = 0.0;        ///< characteristic profile / (2^{-ell(a-n/theta)} A(0))
    double dominance_bound = 0.0;    ///< norm profile / characteristic profile
};

[[nodiscard]] Calibration load_calibration(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json calibration_to_json(const Calibration& c);
[[nodiscard]] std::filesystem::path default_calibration_path();

struct CheckInfo {
    int id;
    std::string name;
    std::string description;
};

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    nlohmann::json metrics;
    double seconds = 0.0;
};

struct Context {
    std::uint64_t seed = 1;
    Calibration calibration;
};

[[nodiscard]] const std::vector<CheckInfo>& inventory();

/// Runs one check; errors raised by the library count as a failure.
[[nodiscard]] CheckResult run_check(int id, const Context& ctx);

/// "PASS [k] name: detail" or "FAIL [k] name: detail".
[[nodiscard]] std::string format_line(const CheckResult& r);

// Measurements shared by the checks and the calibration run.

struct TwoWeightMeasurement {
    std::vector<int> cells;
    std::vector<double> max_ratio;
    std::vector<double> characteristic;
    std::vector<double> constant;  ///< max_ratio / characteristic
    double drift = 0.0;            ///< (max - min) / min of constant
};

struct DecayMeasurement {
    double alpha = 0.0;
    double fitted_epsilon = 0.0;
    double fit_residual = 0.0;
    /// max over ell > 0 of profile / (2^{-ell(alpha-n/theta)} A(0)); 0 if alpha <= n/theta.
    double bound_ratio = 0.0;
    nlohmann::json profile;
};

struct DominanceMeasurement {
    std::vector<int> ell_values;
    std::vector<double> norm_ratio;
    std::vector<double> characteristic;
    double max_quotient = 0.0;
};

[[nodiscard]] TwoWeightMeasurement measure_two_weight(std::uint64_t seed);
[[nodiscard]] DecayMeasurement measure_decay(double alpha);
[[nodiscard]] DominanceMeasurement measure_dominance(std::uint64_t seed);

}  // namespace mfi::acceptance
