#include "mfi/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "mfi/characteristic.hpp"
#include "mfi/error.hpp"
#include "mfi/io.hpp"
#include "mfi/operator.hpp"
#include "mfi/verify.hpp"

#ifndef MFI_CALIBRATION_FILE
#define MFI_CALIBRATION_FILE "calibration/calibration.json"
#endif

namespace mfi::acceptance {

using nlohmann::json;

namespace {

// Tolerances.
constexpr double kOracleTolerance = 1e-10;
constexpr double kOracleSeconds = 5.0;
constexpr double kQuadratureOrder = 1.0;
constexpr double kQuadratureError = 1e-3;
constexpr double kReconstructionTolerance = 1e-12;
constexpr double kHolderSlack = 1e-9;
constexpr double kDilationTolerance = 1e-6;
constexpr double kDriftLimit = 0.20;
constexpr double kFitResidualLimit = 0.5;
constexpr double kExactFitTolerance = 1e-9;
constexpr double kNoisyFitTolerance = 0.05;

// Shared experiment settings.
const PowerWeightFamily kWeights{0.25, 0.25, 0.25, 0.25, 0.125};
constexpr double kTheta = 3.0;
constexpr double kP = 2.0;
constexpr double kProfileT = 2.0;

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

GridFunction random_field(const ProductGrid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(g.size());
    for (double& x : v) x = dist(rng);
    return GridFunction(g, std::move(v));
}

double rel_l2(const GridFunction& a, const GridFunction& b) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

CheckResult check_oracle(const Context& ctx) {
    CheckResult r;
    std::mt19937_64 rng(ctx.seed);
    const ExponentConfig cfg(1, 1, 0.5, 0.5, kP, kTheta);
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int cells : {8, 16}) {
        const auto g = make_grid(1, 1, 1.0, 1.0, cells, cells);
        for (int k = 0; k < 20; ++k) {
            const auto f = random_field(g, rng);
            worst = std::max(worst, rel_l2(strong_fractional_integral(f, cfg).result,
                                           strong_fractional_integral_direct(f, cfg).result));
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.passed = worst <= kOracleTolerance && secs < kOracleSeconds;
    r.detail = "max relative discrepancy " + fmt(worst) + " (limit 1e-10), runtime " +
               (secs < kOracleSeconds ? "under" : "over") + " 5 s";
    r.metrics = {{"max_discrepancy", worst}, {"within_time_limit", secs < kOracleSeconds}};
    return r;
}

CheckResult check_quadrature(const Context&) {
    CheckResult r;
    const double exact = 2.0 * (std::sqrt(2.0) - 1.0);
    std::vector<double> errors;
    for (int cells : {64, 128, 256}) {
        const auto g = make_grid(1, 1, 2.0, 1.0, cells, 1);
        const auto f = GridFunction::from_function(g, [](const FactorPoint& x, const FactorPoint&) {
            return x[0] >= 0.0 && x[0] <= 1.0 ? 1.0 : 0.0;
        });
        errors.push_back(std::abs(fractional_integral_1factor_at(f, 0.5, Factor::kFirst, {2.0, 0.0})[0] - exact));
    }
    const double o1 = std::log2(errors[0] / errors[1]);
    const double o2 = std::log2(errors[1] / errors[2]);
    r.passed = o1 >= kQuadratureOrder && o2 >= kQuadratureOrder && errors[2] <= kQuadratureError;
    r.detail = "errors " + fmt(errors[0]) + ", " + fmt(errors[1]) + ", " + fmt(errors[2]) +
               "; observed orders " + fmt(o1) + ", " + fmt(o2);
    r.metrics = {{"errors", errors}, {"orders", {o1, o2}}};
    return r;
}

CheckResult check_cone_partition(const Context& ctx) {
    CheckResult r;
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const double h = g.step(Factor::kFirst);
    std::size_t pairs = 0;
    std::size_t bad = 0;
    for (int x = 0; x < 8; ++x) {
        for (int u = 0; u < 8; ++u) {
            for (int y = 0; y < 8; ++y) {
                for (int v = 0; v < 8; ++v) {
                    const double dx = std::abs(x - u) * h;
                    const double dy = std::abs(y - v) * h;
                    if (dx == 0.0 || dy == 0.0) continue;
                    ++pairs;
                    int members = 0;
                    bool agrees = true;
                    for (int ell = -8; ell <= 8; ++ell) {
                        const double q = dx / dy;
                        if (std::exp2(-ell) <= q && q < std::exp2(1 - ell)) {
                            ++members;
                            agrees = cone_index(dx, dy) == ell &&
                                     cone_index_squared(dx * dx, dy * dy) == ell;
                        }
                    }
                    if (members != 1 || !agrees) ++bad;
                }
            }
        }
    }
    const ExponentConfig cfg(1, 1, 0.5, 0.5, kP, kTheta);
    const auto reach = achievable_cone_range(g);
    std::mt19937_64 rng(ctx.seed + 3);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        const auto f = random_field(g, rng);
        const auto direct = strong_fractional_integral_direct(f, cfg).result;
        const auto sum = cone_sum(f, cfg, reach.min, reach.max);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double rebuilt = sum.result[i] + sum.excluded[i] + sum.residual[i];
            worst = std::max(worst, std::abs(rebuilt - direct[i]) / std::max(1.0, std::abs(direct[i])));
        }
    }
    r.passed = bad == 0 && worst <= kReconstructionTolerance;
    r.detail = std::to_string(pairs) + " pairs, " + std::to_string(bad) +
               " outside exactly one cone; reconstruction error " + fmt(worst) + " (limit 1e-12)";
    r.metrics = {{"pairs", pairs}, {"misclassified", bad}, {"max_reconstruction_error", worst}};
    return r;
}

CheckResult check_holder(const Context& ctx) {
    CheckResult r;
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const ExponentConfig cfg(1, 1, 0.5, 0.5, kP, kTheta);
    std::mt19937_64 rng(ctx.seed + 4);
    std::lognormal_distribution<double> dist(0.0, 1.0);
    int violations = 0;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        std::vector<double> om(g.size());
        std::vector<double> sg(g.size());
        for (double& v : om) v = dist(rng);
        for (double& v : sg) v = dist(rng);
        const WeightPair w(GridFunction(g, om), GridFunction(g, sg));
        double prev = 0.0;
        for (double t : {1.1, 1.5, 2.0, kTheta}) {
            const double v = bump_characteristic_sup(w, cfg, t, RectangleFilter::all()).value;
            if (prev > 0.0) worst = std::max(worst, prev / v - 1.0);
            if (prev > v * (1.0 + kHolderSlack)) ++violations;
            prev = v;
        }
    }
    r.passed = violations == 0;
    r.detail = std::to_string(violations) + " violations over 20 weight pairs; largest relative drop " + fmt(std::max(worst, 0.0));
    r.metrics = {{"violations", violations}, {"largest_relative_drop", std::max(worst, 0.0)}};
    return r;
}

CheckResult check_dilation(const Context&) {
    CheckResult r;
    const auto g = make_grid(1, 1, 1.0, 1.0, 16, 16);
    const ExponentConfig cfg(1, 1, 0.5, 0.5, kP, kTheta);
    double worst = 0.0;
    int cases = 0;
    for (const auto& rect : enumerate_dyadic_rectangles(g, RectangleFilter::diagonal())) {
        if (rect.q.side < 4) continue;
        for (int ell : {1, 2}) {
            for (Factor f : {Factor::kFirst, Factor::kSecond}) {
                for (double t : {1.5, kTheta}) {
                    const auto lines = characteristic_dilation_identity(kWeights, g, cfg, t, rect, ell, f);
                    worst = std::max({worst, std::abs(lines.line1 / lines.line2 - 1.0),
                                      std::abs(lines.line2 / lines.line3 - 1.0)});
                    ++cases;
                }
            }
        }
    }
    r.passed = cases > 0 && worst <= kDilationTolerance;
    r.detail = std::to_string(cases) + " identities (both factors, ell 1 and 2); max relative gap " +
               fmt(worst) + " (limit 1e-6)";
    r.metrics = {{"cases", cases}, {"max_relative_gap", worst}};
    return r;
}

CheckResult check_two_weight(const Context& ctx) {
    CheckResult r;
    const auto m = measure_two_weight(ctx.seed);
    const double worst = *std::max_element(m.constant.begin(), m.constant.end());
    const double bound = ctx.calibration.two_weight_bound;
    r.passed = m.drift < kDriftLimit && worst <= bound;
    r.detail = "constants " + fmt(m.constant[0]) + ", " + fmt(m.constant[1]) + ", " +
               fmt(m.constant[2]) + "; drift " + fmt(m.drift) + " (limit 0.2); frozen bound " +
               fmt(bound);
    r.metrics = {{"cells", m.cells},         {"max_ratio", m.max_ratio},
                 {"characteristic", m.characteristic}, {"constant", m.constant},
                 {"drift", m.drift},         {"frozen_bound", bound}};
    return r;
}

CheckResult check_decay(const Context& ctx) {
    CheckResult r;
    const auto low = measure_decay(0.25);
    const auto high = measure_decay(0.6);
    const double bound = ctx.calibration.decay_bound;
    r.passed = low.fitted_epsilon > 0.0 && high.fitted_epsilon > 0.0 &&
               low.fit_residual < kFitResidualLimit && high.fit_residual < kFitResidualLimit &&
               high.bound_ratio <= bound;
    r.detail = "alpha 0.25: eps " + fmt(low.fitted_epsilon) + " residual " + fmt(low.fit_residual) +
               "; alpha 0.6: eps " + fmt(high.fitted_epsilon) + " residual " +
               fmt(high.fit_residual) + ", bound ratio " + fmt(high.bound_ratio) +
               " (frozen " + fmt(bound) + ")";
    r.metrics = {{"low", {{"alpha", low.alpha}, {"fitted_epsilon", low.fitted_epsilon},
                          {"fit_residual", low.fit_residual}, {"profile", low.profile}}},
                 {"high", {{"alpha", high.alpha}, {"fitted_epsilon", high.fitted_epsilon},
                           {"fit_residual", high.fit_residual}, {"bound_ratio", high.bound_ratio},
                           {"profile", high.profile}}},
                 {"frozen_bound", bound}};
    return r;
}

CheckResult check_dominance(const Context& ctx) {
    CheckResult r;
    const auto m = measure_dominance(ctx.seed);
    const double bound = ctx.calibration.dominance_bound;
    r.passed = m.max_quotient <= bound;
    r.detail = "max over ell in [-4,4] of NORM/CHARACTERISTIC " + fmt(m.max_quotient) +
               " (frozen " + fmt(bound) + ")";
    r.metrics = {{"ell_values", m.ell_values}, {"norm_ratio", m.norm_ratio},
                 {"characteristic", m.characteristic}, {"max_quotient", m.max_quotient},
                 {"frozen_bound", bound}};
    return r;
}

DecayReport synthetic_profile(double eps, double c) {
    DecayReport d;
    for (int ell = -4; ell <= 4; ++ell) {
        d.ell_values.push_back(ell);
        d.quantities.push_back(c * std::exp2(-eps * std::abs(ell)));
    }
    return d;
}

CheckResult check_fit(const Context& ctx) {
    CheckResult r;
    const auto exact = fit_decay_rate(synthetic_profile(0.5, 1.0));
    const double exact_err = std::abs(exact.fitted_epsilon - 0.5);
    std::mt19937_64 rng(ctx.seed + 9);
    std::normal_distribution<double> noise(0.0, 0.01);
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        auto d = synthetic_profile(0.3, 2.0);
        for (double& q : d.quantities) q *= 1.0 + noise(rng);
        worst = std::max(worst, std::abs(fit_decay_rate(d).fitted_epsilon - 0.3));
    }
    r.passed = exact_err <= kExactFitTolerance && worst <= kNoisyFitTolerance;
    r.detail = "exact slope error " + fmt(exact_err) + " (limit 1e-9); worst noisy error " +
               fmt(worst) + " over 100 draws (limit 0.05)";
    r.metrics = {{"exact_error", exact_err}, {"worst_noisy_error", worst}};
    return r;
}

}  // namespace

Calibration load_calibration(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("calibration: cannot open " + path.string());
    try {
        const json j = json::parse(in);
        Calibration c;
        c.version = j.at("version").get<int>();
        const auto& b = j.at("bounds");
        c.two_weight_bound = b.at("two_weight_ratio").get<double>();
        c.decay_bound = b.at("decay_envelope").get<double>();
        c.dominance_bound = b.at("norm_dominance").get<double>();
        return c;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("calibration: ") + e.what());
    }
}

json calibration_to_json(const Calibration& c) {
    return {{"version", c.version},
            {"bounds",
             {{"two_weight_ratio", c.two_weight_bound},
              {"decay_envelope", c.decay_bound},
              {"norm_dominance", c.dominance_bound}}}};
}

std::filesystem::path default_calibration_path() { return MFI_CALIBRATION_FILE; }

const std::vector<CheckInfo>& inventory() {
    static const std::vector<CheckInfo> checks = {
        {1, "oracle-equivalence", "separable vs direct operator, 20 random f on 8x8 and 16x16"},
        {2, "quadrature-convergence", "I_alpha of 1_[0,1] at x=2 over 64, 128, 256 cells"},
        {3, "cone-partition", "unique cone per pair and cone-sum reconstruction on 8x8"},
        {4, "holder-monotonicity", "sup characteristic nondecreasing over t = 1.1, 1.5, 2, 3"},
        {5, "dilation-covariance", "characteristic dilation lines, both factors, ell = 1, 2"},
        {6, "two-weight-stability", "max ratio / characteristic over 8, 16, 32 cells"},
        {7, "decay-surrogate", "eccentricity profile fits for alpha below and above n/theta"},
        {8, "norm-dominance", "per-ell norm ratio against the characteristic on 16x16"},
        {9, "fit-self-test", "decay fit on exact and 1% noisy synthetic profiles"},
    };
    return checks;
}

CheckResult run_check(int id, const Context& ctx) {
    const auto& inv = inventory();
    const auto it = std::find_if(inv.begin(), inv.end(), [id](const CheckInfo& c) { return c.id == id; });
    if (it == inv.end()) throw InvalidArgument("verify: unknown check " + std::to_string(id));
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        switch (id) {
            case 1: r = check_oracle(ctx); break;
            case 2: r = check_quadrature(ctx); break;
            case 3: r = check_cone_partition(ctx); break;
            case 4: r = check_holder(ctx); break;
            case 5: r = check_dilation(ctx); break;
            case 6: r = check_two_weight(ctx); break;
            case 7: r = check_decay(ctx); break;
            case 8: r = check_dominance(ctx); break;
            default: r = check_fit(ctx); break;
        }
    } catch (const Error& e) {
        r.passed = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.id = id;
    r.name = it->name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string format_line(const CheckResult& r) {
    return std::string(r.passed ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name +
           ": " + r.detail;
}

TwoWeightMeasurement measure_two_weight(std::uint64_t seed) {
    TwoWeightMeasurement m;
    const ExponentConfig cfg(1, 1, 0.5, 0.5, kP, kTheta);
    for (int cells : {8, 16, 32}) {
        const auto g = make_grid(1, 1, 1.0, 1.0, cells, cells);
        const auto w = kWeights.sample(g);
        auto corpus = build_corpus(g, CorpusKind::kDyadicIndicators, 100, seed);
        corpus.append(build_corpus(g, CorpusKind::kRandom, 50, seed + 1));
        double best = 0.0;
        for (const auto& f : corpus.functions) best = std::max(best, inequality_ratio(f, w, cfg).ratio);
        const double a = bump_characteristic_sup(w, cfg, kTheta, RectangleFilter::all()).value;
        m.cells.push_back(cells);
        m.max_ratio.push_back(best);
        m.characteristic.push_back(a);
        m.constant.push_back(best / a);
    }
    const auto [lo, hi] = std::minmax_element(m.constant.begin(), m.constant.end());
    m.drift = (*hi - *lo) / *lo;
    return m;
}

DecayMeasurement measure_decay(double alpha) {
    DecayMeasurement m;
    m.alpha = alpha;
    const auto g = make_grid(1, 1, 1.0, 1.0, 32, 32);
    const ExponentConfig cfg(1, 1, alpha, alpha, kP, kTheta);
    const auto w = kWeights.sample(g);
    const auto fit = fit_decay_rate(characteristic_decay_profile(w, cfg, kProfileT, {-4, 4}));
    m.fitted_epsilon = fit.fitted_epsilon;
    m.fit_residual = fit.fit_residual;
    m.profile = io::decay_to_json(fit);
    const double gap = alpha - cfg.n() / kTheta;
    if (gap > 0.0) {
        const double a0 =
            bump_characteristic_sup(w, cfg, kTheta, RectangleFilter::with_eccentricity(0)).value;
        for (std::size_t k = 0; k < fit.ell_values.size(); ++k) {
            const int ell = fit.ell_values[k];
            if (ell <= 0) continue;
            m.bound_ratio = std::max(m.bound_ratio, fit.quantities[k] / (std::exp2(-ell * gap) * a0));
        }
    }
    return m;
}

DominanceMeasurement measure_dominance(std::uint64_t seed) {
    DominanceMeasurement m;
    const auto g = make_grid(1, 1, 1.0, 1.0, 16, 16);
    const ExponentConfig cfg(1, 1, 0.5, 0.5, kP, kTheta);
    const auto w = kWeights.sample(g);
    auto corpus = build_corpus(g, CorpusKind::kDyadicIndicators, 100, seed);
    corpus.append(build_corpus(g, CorpusKind::kRandom, 50, seed + 1));
    const EllRange range{-4, 4};
    const auto norm = cone_norm_profile(w, cfg, range, corpus);
    const auto chr = characteristic_decay_profile(w, cfg, kProfileT, range);
    for (std::size_t k = 0; k < norm.ell_values.size(); ++k) {
        const int ell = norm.ell_values[k];
        const auto it = std::find(chr.ell_values.begin(), chr.ell_values.end(), ell);
        if (it == chr.ell_values.end()) continue;
        const double c = chr.quantities[static_cast<std::size_t>(it - chr.ell_values.begin())];
        m.ell_values.push_back(ell);
        m.norm_ratio.push_back(norm.quantities[k]);
        m.characteristic.push_back(c);
        m.max_quotient = std::max(m.max_quotient, norm.quantities[k] / c);
    }
    return m;
}

}  // namespace mfi::acceptance
