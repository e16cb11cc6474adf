#include <doctest.h>

#include <cmath>
#include <random>

#include "mfi/characteristic.hpp"
#include "mfi/error.hpp"
#include "test_helpers.hpp"

using namespace mfi;

namespace {

const ExponentConfig kCfg(1, 1, 0.5, 0.5, 2.0, 3.0);

WeightPair random_weights(const ProductGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::lognormal_distribution<double> dist(0.0, 1.0);
    std::vector<double> om(g.size());
    std::vector<double> sg(g.size());
    for (double& v : om) v = dist(rng);
    for (double& v : sg) v = dist(rng);
    return WeightPair(GridFunction(g, om), GridFunction(g, sg));
}

// Direct evaluation of the product bump formula from the cell values.
double formula(const WeightPair& w, const DyadicRectangle& r, const ExponentConfig& cfg, double t) {
    const auto& g = w.grid();
    const double p = cfg.p();
    long double so = 0.0L;
    long double ss = 0.0L;
    for_each_cell(g, r, [&](std::size_t x, std::size_t y) {
        so += std::pow(w.omega().at(x, y), p * t);
        ss += std::pow(w.sigma().at(x, y), -p * t / (p - 1.0));
    });
    const double vol = g.product_cell_volume();
    const double q = cube_measure(g, Factor::kFirst, r.q);
    const double pp = cube_measure(g, Factor::kSecond, r.p);
    return std::pow(q, cfg.alpha() / cfg.n() - 1.0 / t) * std::pow(pp, cfg.beta() / cfg.m() - 1.0 / t) *
           std::pow(static_cast<double>(so) * vol, 1.0 / (p * t)) *
           std::pow(static_cast<double>(ss) * vol, (p - 1.0) / (p * t));
}

}  // namespace

TEST_CASE("unit weights on the unit square") {
    // extent 0.5 with 1 cell per axis gives a unit cell
    const auto g = make_grid(1, 1, 0.5, 0.5, 1, 1);
    const DyadicRectangle r{{{0, 0}, 1}, {{0, 0}, 1}};
    for (double t : {1.5, 2.0, 3.0}) {
        CHECK(bump_characteristic_rectangle(unit_weights(g), r, kCfg, t) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(b_quantity(unit_weights(g), r, 2.0, t) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("unit weights collapse to the geometric prefactor") {
    const auto g = make_grid(1, 1, 1.0, 0.5, 2, 1);
    const DyadicRectangle r{{{0, 0}, 2}, {{0, 0}, 1}};
    CHECK(bump_characteristic_rectangle(unit_weights(g), r, kCfg, 2.0) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("vanishing omega gives zero") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 4, 4);
    const WeightPair w(GridFunction(g), unit_weights(g).sigma());
    CHECK(bump_characteristic_rectangle(w, {{{0, 0}, 2}, {{0, 0}, 2}}, kCfg, 2.0) == 0.0);
}

TEST_CASE("sigma vanishing inside the rectangle is a trivial weight") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 4, 4);
    std::vector<double> s(g.size(), 1.0);
    s[g.index(1, 1)] = 0.0;
    const WeightPair w(unit_weights(g).omega(), GridFunction(g, s));
    CHECK_THROWS_AS((void)bump_characteristic_rectangle(w, {{{0, 0}, 2}, {{0, 0}, 2}}, kCfg, 2.0),
                    TrivialWeight);
    CHECK_NOTHROW((void)bump_characteristic_rectangle(w, {{{2, 0}, 2}, {{0, 0}, 2}}, kCfg, 2.0));
    CHECK_THROWS_AS((void)bump_characteristic_sup(w, kCfg, 2.0, RectangleFilter::all()), TrivialWeight);
}

TEST_CASE("negative weights are rejected") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 2, 2);
    CHECK_THROWS_AS(WeightPair(GridFunction(g, {1, -1, 1, 1}), unit_weights(g).sigma()), InvalidArgument);
    CHECK_THROWS_AS(WeightPair(unit_weights(g).omega(), GridFunction(g, {1, -1, 1, 1})), InvalidArgument);
    CHECK_THROWS_AS(WeightPair(unit_weights(g).omega(), unit_weights(make_grid(1, 1, 1, 1, 4, 2)).sigma()),
                    InvalidArgument);
}

TEST_CASE("t outside the bump range is rejected") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 4, 4);
    const DyadicRectangle r{{{0, 0}, 1}, {{0, 0}, 1}};
    CHECK_THROWS_AS((void)bump_characteristic_rectangle(unit_weights(g), r, kCfg, 1.0), InvalidArgument);
    CHECK_THROWS_AS((void)bump_characteristic_rectangle(unit_weights(g), r, kCfg, 3.5), InvalidArgument);
    CHECK_NOTHROW((void)bump_characteristic_rectangle(unit_weights(g), r, kCfg, 3.0));
}

TEST_CASE("rectangle value matches the formula for random weights") {
    const auto g = make_grid(2, 1, 1.0, 2.0, 4, 8);
    const ExponentConfig cfg(2, 1, 1.2, 0.4, 1.7, 2.5);
    const auto w = random_weights(g, 4);
    for (const auto& r : enumerate_dyadic_rectangles(g, RectangleFilter::all())) {
        CHECK(bump_characteristic_rectangle(w, r, cfg, 2.0) == doctest::Approx(formula(w, r, cfg, 2.0)).epsilon(1e-12));
    }
}

TEST_CASE("unit weights on the full family peak at the whole box") {
    const auto g = make_grid(1, 1, 1.0, 1.5, 8, 8);
    const ExponentConfig cfg(1, 1, 0.3, 0.6, 2.0, 3.0);
    const auto rep = bump_characteristic_sup(unit_weights(g), cfg, 2.0, RectangleFilter::all(), true);
    CHECK(rep.value == doctest::Approx(std::pow(2.0, 0.3) * std::pow(3.0, 0.6)).epsilon(1e-13));
    CHECK(rep.argmax == DyadicRectangle{{{0, 0}, 8}, {{0, 0}, 8}});
    CHECK(rep.family_size == 15 * 15);
    REQUIRE(rep.per_rectangle_values.has_value());
    double best = 0.0;
    for (const auto& row : *rep.per_rectangle_values) best = std::max(best, row.value);
    CHECK(best == rep.value);
}

TEST_CASE("empty families raise EmptyFamily") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 4, 4);
    CHECK_THROWS_AS((void)bump_characteristic_sup(unit_weights(g), kCfg, 2.0,
                                                  RectangleFilter::with_eccentricity(10)),
                    EmptyFamily);
}

TEST_CASE("diagonal report equals eccentricity zero report") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const auto w = random_weights(g, 9);
    const auto a = bump_characteristic_sup(w, kCfg, 2.0, RectangleFilter::diagonal());
    const auto b = bump_characteristic_sup(w, kCfg, 2.0, RectangleFilter::with_eccentricity(0));
    CHECK(a.value == b.value);
    CHECK(a.argmax == b.argmax);
    CHECK(a.family_size == b.family_size);
}

TEST_CASE("ties go to the first rectangle") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 4, 4);
    // omega vanishes everywhere so every value is 0
    const WeightPair w(GridFunction(g), unit_weights(g).sigma());
    const auto rep = bump_characteristic_sup(w, kCfg, 2.0, RectangleFilter::with_eccentricity(1));
    CHECK(rep.argmax == enumerate_dyadic_rectangles(g, RectangleFilter::with_eccentricity(1)).front());
}

TEST_CASE("B quantity of unit weights and the A/B factorization") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 2, 2);
    const DyadicRectangle whole{{{0, 0}, 2}, {{0, 0}, 2}};
    for (double t : {1.5, 2.0, 3.0}) {
        CHECK(b_quantity(unit_weights(g), whole, 2.0, t) == doctest::Approx(std::pow(4.0, 1.0 / t)).epsilon(1e-14));
    }
    const auto g8 = make_grid(2, 1, 1.0, 1.0, 4, 8);
    const ExponentConfig cfg(2, 1, 0.8, 0.3, 2.5, 3.0);
    const auto w = random_weights(g8, 2);
    for (const auto& r : enumerate_dyadic_rectangles(g8, RectangleFilter::all())) {
        const double a = bump_characteristic_rectangle(w, r, cfg, 2.0);
        const double b = b_quantity(w, r, cfg.p(), 2.0);
        const double pre = std::pow(cube_measure(g8, Factor::kFirst, r.q), cfg.alpha() / 2 - 0.5) *
                           std::pow(cube_measure(g8, Factor::kSecond, r.p), cfg.beta() - 0.5);
        CHECK(a / b == doctest::Approx(pre).epsilon(1e-12));
    }
}

TEST_CASE("averaged form coincides with the product form when q = p") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const auto w = random_weights(g, 12);
    for (const auto& r : enumerate_dyadic_rectangles(g, RectangleFilter::all())) {
        CHECK(bump_characteristic_rectangle(w, r, kCfg, 2.0, CharacteristicForm::kAveragedPQ) ==
              doctest::Approx(bump_characteristic_rectangle(w, r, kCfg, 2.0)).epsilon(1e-12));
    }
    const ExponentConfig pq(1, 1, 0.5, 0.5, 2.0, 4.0, 3.0);
    const auto u = unit_weights(g);
    const DyadicRectangle r{{{0, 0}, 8}, {{0, 0}, 4}};
    // unit weights: |Q|^{a-1/p+1/q} |P|^{b-1/p+1/q}
    CHECK(bump_characteristic_rectangle(u, r, pq, 2.0, CharacteristicForm::kAveragedPQ) ==
          doctest::Approx(std::pow(2.0, 0.25) * std::pow(1.0, 0.25)).epsilon(1e-13));
}

TEST_CASE("b ratio probe for unit weights") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const DyadicRectangle r{{{0, 0}, 8}, {{0, 0}, 4}};
    for (double t : {1.5, 2.0, 3.0}) {
        for (int ell = 1; ell <= 3; ++ell) {
            const auto pr = b_ratio_probe(unit_weights(g), r, kCfg, t, ell);
            CHECK(pr.ratio == doctest::Approx(std::exp2(-ell / t)).epsilon(1e-13));
            CHECK(pr.bound == doctest::Approx(std::exp2(ell * (0.5 - 1.0 / t))).epsilon(1e-14));
            CHECK(pr.holds);
        }
        const auto zero = b_ratio_probe(unit_weights(g), r, kCfg, t, 0);
        CHECK(zero.ratio == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(zero.bound == 1.0);
    }
}

TEST_CASE("nested B quantities never exceed the parent") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto w = random_weights(g, 50 + s);
        for (const auto& r : enumerate_dyadic_rectangles(g, RectangleFilter::all())) {
            for (int ell = 1; (r.q.side >> ell) >= 1; ++ell) {
                CHECK(b_ratio_probe(w, r, kCfg, 2.0, ell).ratio <= 1.0 + 1e-14);
            }
        }
    }
}

TEST_CASE("Holder monotonicity in t") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto w = random_weights(g, 300 + s);
        double prev = 0.0;
        for (double t : {1.1, 1.5, 2.0, 3.0}) {
            const double v = bump_characteristic_sup(w, kCfg, t, RectangleFilter::all()).value;
            CHECK(prev <= v * (1.0 + 1e-9));
            prev = v;
        }
    }
}

TEST_CASE("scale homogeneity in omega and sigma") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const auto w = random_weights(g, 71);
    const double c = 3.7;
    const auto base = bump_characteristic_sup(w, kCfg, 2.0, RectangleFilter::all(), true);
    const auto om = bump_characteristic_sup(w.with_omega_scaled(c), kCfg, 2.0, RectangleFilter::all(), true);
    const auto sg = bump_characteristic_sup(w.with_sigma_scaled(c), kCfg, 2.0, RectangleFilter::all(), true);
    CHECK(om.value == doctest::Approx(c * base.value).epsilon(1e-12));
    CHECK(sg.value == doctest::Approx(base.value / c).epsilon(1e-12));
    for (std::size_t i = 0; i < base.family_size; ++i) {
        const double v = (*base.per_rectangle_values)[i].value;
        CHECK((*om.per_rectangle_values)[i].value == doctest::Approx(c * v).epsilon(1e-12));
        CHECK((*sg.per_rectangle_values)[i].value == doctest::Approx(v / c).epsilon(1e-12));
    }
}

TEST_CASE("power weight family sampling") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 4, 4);
    const PowerWeightFamily fam{0.25, 0.5, 0.25, 0.5, 0.0};
    const auto w = fam.sample(g);
    const double d = g.step(Factor::kFirst);
    CHECK(w.omega().at(0, 3) == doctest::Approx(std::pow(0.75 + d, -0.25) * std::pow(0.75 + d, -0.5)));
    CHECK(w.sigma().at(1, 2) == doctest::Approx(std::pow(0.25 + d, 0.25) * std::pow(0.25 + d, 0.5)));
    CHECK_THROWS_AS((void)fam.sample_composed(g, 1.0, 1.0), InvalidArgument);
    const PowerWeightFamily fixed{0.25, 0.5, 0.25, 0.5, 0.1};
    const auto c = fixed.sample_composed(g, 0.5, 2.0);
    CHECK(c.omega().at(0, 0) == doctest::Approx(fixed.omega({-0.375, 0}, 1, {-1.5, 0}, 1)));
}
