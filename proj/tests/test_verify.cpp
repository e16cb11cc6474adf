#include <doctest.h>

#include <cmath>
#include <random>

#include "mfi/error.hpp"
#include "mfi/verify.hpp"
#include "test_helpers.hpp"

using namespace mfi;
using mfi::test::random_function;

namespace {

const ExponentConfig kCfg(1, 1, 0.5, 0.5, 2.0, 3.0);

DecayReport synthetic(double eps, double c, int lo, int hi) {
    DecayReport r;
    for (int ell = lo; ell <= hi; ++ell) {
        r.ell_values.push_back(ell);
        r.quantities.push_back(c * std::exp2(-eps * std::abs(ell)));
    }
    return r;
}

}  // namespace

TEST_CASE("weighted norm examples") {
    const auto g = make_grid(1, 1, 1.0, 2.0, 4, 8);
    const auto one = unit_weights(g).omega();
    for (double p : {1.0, 2.0, 3.5}) {
        CHECK(weighted_norm(one, one, p) == doctest::Approx(std::pow(8.0, 1.0 / p)).epsilon(1e-14));
    }
    CHECK(weighted_norm(GridFunction(g), one, 2.0) == 0.0);
    const auto h = random_function(g, 3, -1.0, 1.0);
    const double base = weighted_norm(h, one, 2.0);
    CHECK(weighted_norm(h.scaled(-3.0), one, 2.0) == doctest::Approx(3.0 * base).epsilon(1e-14));
    CHECK_THROWS_AS((void)weighted_norm(h, unit_weights(make_grid(1, 1, 1, 1, 4, 4)).omega(), 2.0),
                    InvalidArgument);
    CHECK_THROWS_AS((void)weighted_norm(h, one, 0.5), InvalidArgument);
}

TEST_CASE("inequality ratio is scale invariant") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const auto w = PowerWeightFamily{0.25, 0.25, 0.25, 0.25, 0.0}.sample(g);
    const auto cell = mfi::test::single_cell(g, 2, 6);
    const double base = inequality_ratio(cell.scaled(1e-6), w, kCfg).ratio;
    CHECK(inequality_ratio(cell.scaled(1000.0), w, kCfg).ratio == doctest::Approx(base).epsilon(1e-12));
    const auto f = random_function(g, 4);
    const double r = inequality_ratio(f, w, kCfg).ratio;
    for (double c : {1e-3, 0.5, 7.0, 1e5}) {
        CHECK(inequality_ratio(f.scaled(c), w, kCfg).ratio == doctest::Approx(r).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)inequality_ratio(GridFunction(g), w, kCfg), InvalidArgument);
}

TEST_CASE("unit weights give finite ratios over a corpus") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const auto corpus = build_corpus(g, CorpusKind::kDyadicIndicators, 1000, 1);
    for (const auto& f : corpus.functions) {
        CHECK(std::isfinite(inequality_ratio(f, unit_weights(g), kCfg).ratio));
    }
}

TEST_CASE("corpus construction") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 4, 4);
    const auto ind = build_corpus(g, CorpusKind::kDyadicIndicators, 1000, 7);
    CHECK(ind.size() == 49);
    CHECK(ind.labels.size() == 49);
    CHECK(build_corpus(g, CorpusKind::kSingleCells, 1000, 7).size() == 16);
    CHECK(build_corpus(g, CorpusKind::kDyadicIndicators, 10, 7).size() == 10);
    const auto a = build_corpus(g, CorpusKind::kRandom, 5, 42);
    const auto b = build_corpus(g, CorpusKind::kRandom, 5, 42);
    const auto c = build_corpus(g, CorpusKind::kRandom, 5, 43);
    CHECK(a.functions == b.functions);
    CHECK_FALSE(a.functions == c.functions);
    CHECK(build_corpus(g, CorpusKind::kDyadicIndicators, 10, 5).functions ==
          build_corpus(g, CorpusKind::kDyadicIndicators, 10, 5).functions);
    for (const auto& f : a.functions) {
        for (double v : f.values()) {
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
    }
    for (const auto& f : ind.functions) {
        double s = 0.0;
        for (double v : f.values()) {
            CHECK(v >= 0.0);
            s += v;
        }
        CHECK(s > 0.0);
    }
    CHECK_THROWS_AS((void)build_corpus(g, CorpusKind::kRandom, 0, 1), InvalidArgument);
}

TEST_CASE("cone norm profile of one single cell matches masked kernel norms") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const auto w = unit_weights(g);
    const std::size_t u0 = 2;
    const std::size_t v0 = 5;
    TestCorpus corpus;
    corpus.functions.push_back(mfi::test::single_cell(g, u0, v0));
    corpus.labels.push_back("cell");
    const auto rep = cone_norm_profile(w, kCfg, {-5, 5}, corpus);
    CHECK(rep.kind == QuantityKind::kNormRatio);
    REQUIRE(rep.ell_values.size() == 11);
    const double h = g.step(Factor::kFirst);
    const double vol = g.product_cell_volume();
    for (std::size_t k = 0; k < rep.ell_values.size(); ++k) {
        const int ell = rep.ell_values[k];
        double s = 0.0;
        for (std::size_t x = 0; x < 8; ++x) {
            for (std::size_t y = 0; y < 8; ++y) {
                const double dx = std::abs(double(x) - double(u0)) * h;
                const double dy = std::abs(double(y) - double(v0)) * h;
                if (dx == 0.0 || dy == 0.0) continue;
                const double r = dx / dy;
                if (!(std::exp2(-ell) <= r && r < std::exp2(1 - ell))) continue;
                const double val = std::pow(dx, -0.5) * std::pow(dy, -0.5) * vol;
                s += val * val * vol;
            }
        }
        // the single cell has ||f sigma||_2 = sqrt(vol)
        CHECK(rep.quantities[k] == doctest::Approx(std::sqrt(s) / std::sqrt(vol)).epsilon(1e-12));
    }
    CHECK(rep.quantities.front() == 0.0);
    CHECK_THROWS_AS((void)cone_norm_profile(w, kCfg, {-5, 5}, TestCorpus{}), InvalidArgument);
    CHECK_THROWS_AS((void)cone_norm_profile(unit_weights(make_grid(1, 1, 1, 1, 64, 64)), kCfg, {0, 0},
                                            build_corpus(make_grid(1, 1, 1, 1, 64, 64),
                                                         CorpusKind::kRandom, 1, 1)),
                    GuardExceeded);
}

TEST_CASE("per-cone ratio never exceeds the full ratio for nonnegative inputs") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const auto w = PowerWeightFamily{0.25, 0.25, 0.25, 0.25, 0.0}.sample(g);
    auto corpus = build_corpus(g, CorpusKind::kDyadicIndicators, 20, 3);
    corpus.append(build_corpus(g, CorpusKind::kRandom, 10, 4));
    const auto reach = achievable_cone_range(g);
    for (const auto& f : corpus.functions) {
        const auto full = cone_sum(f, kCfg, reach.min, reach.max);
        const auto total = full.result.combined(1.0, full.excluded, 1.0);
        const double denom = weighted_norm(f, w.sigma(), 2.0);
        const double full_ratio = weighted_norm(total, w.omega(), 2.0) / denom;
        for (int ell = reach.min; ell <= reach.max; ++ell) {
            const double r = weighted_norm(cone_operator(f, kCfg, ell).result, w.omega(), 2.0) / denom;
            CHECK(r <= full_ratio * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("characteristic profile of unit weights matches an exhaustive scan") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 16, 16);
    const ExponentConfig cfg(1, 1, 0.3, 0.6, 2.0, 3.0);
    const auto rep = characteristic_decay_profile(unit_weights(g), cfg, 2.0, {-3, 3});
    CHECK(rep.kind == QuantityKind::kCharacteristic);
    CHECK(rep.ell_values.size() == 7);
    CHECK(rep.dropped_ells.empty());
    const double h = g.step(Factor::kFirst);
    for (std::size_t k = 0; k < rep.ell_values.size(); ++k) {
        const int ell = rep.ell_values[k];
        double best = 0.0;
        for (int qs = 1; qs <= 16; qs *= 2) {
            for (int ps = 1; ps <= 16; ps *= 2) {
                if (qs * std::exp2(ell) != ps) continue;
                best = std::max(best, std::pow(qs * h, 0.3) * std::pow(ps * h, 0.6));
            }
        }
        CHECK(rep.quantities[k] == doctest::Approx(best).epsilon(1e-13));
    }
    const auto wide = characteristic_decay_profile(unit_weights(g), cfg, 2.0, {-6, 6});
    CHECK(wide.dropped_ells == std::vector<int>{-6, -5, 5, 6});
    CHECK_THROWS_AS((void)characteristic_decay_profile(unit_weights(g), cfg, 3.0, {-1, 1}), InvalidArgument);
}

TEST_CASE("decay fit on synthetic profiles") {
    const auto exact = fit_decay_rate(synthetic(0.5, 1.0, -4, 4));
    CHECK(std::abs(exact.fitted_epsilon - 0.5) <= 1e-9);
    CHECK(exact.fit_residual <= 1e-9);
    const auto flat = fit_decay_rate(synthetic(0.0, 3.0, -4, 4));
    CHECK(std::abs(flat.fitted_epsilon) <= 1e-12);

    std::mt19937_64 rng(2024);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (int draw = 0; draw < 100; ++draw) {
        auto r = synthetic(0.3, 2.0, -4, 4);
        for (double& q : r.quantities) q *= 1.0 + noise(rng);
        CHECK(std::abs(fit_decay_rate(r).fitted_epsilon - 0.3) <= 0.05);
    }
}

TEST_CASE("decay fit drops the diagonal and zero entries") {
    auto r = synthetic(0.7, 1.0, -3, 3);
    r.quantities[3] = 1e6;  // ell = 0
    r.quantities[0] = 0.0;
    const auto fit = fit_decay_rate(r);
    CHECK(fit.fitted_epsilon == doctest::Approx(0.7).epsilon(1e-12));
    DecayReport tiny;
    tiny.ell_values = {-1, 0, 1};
    tiny.quantities = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS((void)fit_decay_rate(tiny), InvalidArgument);
}

TEST_CASE("characteristic dilation lines agree") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const PowerWeightFamily fam{0.3, 0.2, 0.25, 0.35, 0.25};
    for (const auto& r : {DyadicRectangle{{{0, 0}, 4}, {{4, 0}, 4}}, DyadicRectangle{{{2, 0}, 2}, {{0, 0}, 8}}}) {
        for (int ell : {-2, -1, 1, 2}) {
            for (Factor f : {Factor::kFirst, Factor::kSecond}) {
                const auto lines = characteristic_dilation_identity(fam, g, kCfg, 2.0, r, ell, f);
                CHECK(lines.line1 == doctest::Approx(lines.line2).epsilon(1e-12));
                CHECK(lines.line2 == doctest::Approx(lines.line3).epsilon(1e-12));
            }
        }
    }
    CHECK_THROWS_AS((void)characteristic_dilation_identity(PowerWeightFamily{0.3, 0.2, 0.25, 0.35, 0.0}, g, kCfg,
                                                           2.0, {{{0, 0}, 4}, {{4, 0}, 4}}, 1, Factor::kFirst),
                    InvalidArgument);
}

TEST_CASE("operator dilation identity") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const AnalyticFunction f = [](const FactorPoint& x, const FactorPoint& y) {
        return std::exp(-x[0] * x[0] - 2.0 * y[0] * y[0]) + 0.1;
    };
    const AnalyticFunction omega = [](const FactorPoint& x, const FactorPoint& y) {
        return std::pow(std::abs(x[0]) + 0.2, -0.3) * std::pow(std::abs(y[0]) + 0.2, -0.2);
    };
    for (int ell : {-1, 1, 2}) {
        const auto s = operator_dilation_identity(f, omega, g, kCfg, ell);
        CHECK(s.lhs > 0.0);
        CHECK(s.rhs == doctest::Approx(s.lhs).epsilon(1e-9));
    }
}
