// Measures the regression constants and writes them with headroom.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>

#include <CLI11.hpp>

#include "mfi/acceptance.hpp"
#include "mfi/io.hpp"

namespace {

double freeze(double measured, double headroom) {
    const double v = measured * headroom;
    const double digits = 3.0 - std::floor(std::log10(v));
    const double inv = std::pow(10.0, digits);
    return digits >= 0.0 ? std::ceil(v * inv) / inv : std::ceil(v / std::pow(10.0, -digits)) * std::pow(10.0, -digits);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measure and freeze the acceptance calibration constants"};
    std::string out = mfi::acceptance::default_calibration_path().string();
    std::uint64_t seed = 1;
    double headroom = 1.05;
    app.add_option("--out", out, "calibration file to write");
    app.add_option("--seed", seed, "corpus seed");
    app.add_option("--headroom", headroom, "multiplier applied to measured values");
    CLI11_PARSE(app, argc, argv);

    using namespace mfi::acceptance;
    const auto t1 = measure_two_weight(seed);
    const auto decay = measure_decay(0.6);
    const auto dom = measure_dominance(seed);
    const double c1 = *std::max_element(t1.constant.begin(), t1.constant.end());

    Calibration c;
    c.version = 1;
    c.two_weight_bound = freeze(c1, headroom);
    c.decay_bound = freeze(decay.bound_ratio, headroom);
    c.dominance_bound = freeze(dom.max_quotient, headroom);
    auto j = calibration_to_json(c);
    j["measured"] = {{"two_weight_ratio", c1},
                     {"two_weight_drift", t1.drift},
                     {"decay_envelope", decay.bound_ratio},
                     {"norm_dominance", dom.max_quotient}};
    j["seed"] = seed;
    j["headroom"] = headroom;
    mfi::io::atomic_write(out, j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}
