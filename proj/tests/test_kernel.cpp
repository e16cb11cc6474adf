#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "mfi/error.hpp"
#include "mfi/kernel.hpp"

using namespace mfi;

namespace {

// Graded midpoint rule on [0, h/2] with nodes (h/2)(i/N)^g, doubled for symmetry.
double graded_self_oracle_1d(double h, double alpha, int points) {
    const double half = h / 2.0;
    const double g = 6.0;
    double sum = 0.0;
    double c = 0.0;
    double left = 0.0;
    for (int i = 1; i <= points; ++i) {
        const double right = half * std::pow(static_cast<double>(i) / points, g);
        const double mid = 0.5 * (left + right);
        const double term = (right - left) * std::pow(mid, alpha - 1.0);
        const double y = term - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
        left = right;
    }
    return 2.0 * sum / h;
}

// Polar form of the square average: (8/h^2) int_0^{pi/4} ((h/2)/cos th)^alpha / alpha dth,
// with composite Simpson on a smooth integrand.
double polar_self_oracle_2d(double h, double alpha) {
    const int n = 20000;
    const double b = std::numbers::pi / 4.0;
    auto f = [&](double th) { return std::pow((h / 2.0) / std::cos(th), alpha) / alpha; };
    double s = f(0.0) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(b * i / n);
    return 8.0 * (s * b / (3.0 * n)) / (h * h);
}

double k1(double a, double b, double h, double alpha) {
    const std::array<double, 1> ca{a};
    const std::array<double, 1> cb{b};
    return kernel_factor(ca, cb, h, alpha, 1, SelfCellRule::kAnalytic1D);
}

}  // namespace

TEST_CASE("analytic self-cell example") {
    CHECK(k1(0.25, 0.25, 0.5, 0.5) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("distinct cells use the power law") {
    CHECK(k1(0.25, 0.75, 0.5, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("alpha out of range is rejected") {
    CHECK_THROWS_AS((void)k1(0.25, 0.75, 0.5, 1.5), InvalidArgument);
    CHECK_THROWS_AS((void)k1(0.25, 0.75, 0.5, 0.0), InvalidArgument);
    CHECK_THROWS_AS(KernelSpec(0.5, 1, 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(KernelSpec(1.5, 2, 0.5, 1, SelfCellRule::kAnalytic1D, SelfCellRule::kAnalytic1D),
                    InvalidArgument);
}

TEST_CASE("analytic self cell matches a graded quadrature oracle") {
    for (double alpha : {0.25, 0.5, 0.9}) {
        for (double h : {0.5, 0.03125, 3.0}) {
            const double exact = self_cell_average(h, alpha, 1, SelfCellRule::kAnalytic1D);
            const double oracle = graded_self_oracle_1d(h, alpha, 1000000);
            CHECK(std::abs(exact / oracle - 1.0) <= 1e-8);
        }
    }
}

TEST_CASE("refined subgrid agrees with the closed form in one dimension") {
    for (double alpha : {0.25, 0.5, 0.75}) {
        const double a = self_cell_average(0.25, alpha, 1, SelfCellRule::kAnalytic1D);
        const double r = self_cell_average(0.25, alpha, 1, SelfCellRule::kRefinedSubgrid);
        CHECK(std::abs(r / a - 1.0) <= 1e-10);
    }
}

TEST_CASE("refined subgrid matches the polar oracle in two dimensions") {
    for (double alpha : {0.3, 1.0, 1.7}) {
        for (double h : {0.125, 1.0}) {
            const double r = self_cell_average(h * h, alpha, 2, SelfCellRule::kRefinedSubgrid);
            const double oracle = polar_self_oracle_2d(h, alpha);
            CHECK(std::abs(r / oracle - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("drop-diagonal rule gives zero on the self cell") {
    CHECK(self_cell_average(0.25, 0.5, 1, SelfCellRule::kDropDiagonal) == 0.0);
    CHECK_THROWS_AS((void)self_cell_average(0.25, 0.5, 2, SelfCellRule::kAnalytic1D), InvalidArgument);
}

TEST_CASE("kernel_factor is symmetric and strictly decreasing in distance") {
    const auto g = make_grid(2, 1, 1.0, 1.0, 8, 8);
    for (Factor f : {Factor::kFirst, Factor::kSecond}) {
        const int dim = g.dim(f);
        const double alpha = 0.6;
        const auto rule = default_self_cell_rule(dim);
        for (std::size_t a = 0; a < g.factor_cells(f); ++a) {
            for (std::size_t b = 0; b < g.factor_cells(f); ++b) {
                const auto ca = g.center(f, a);
                const auto cb = g.center(f, b);
                const double kab = kernel_factor(std::span(ca).first(dim), std::span(cb).first(dim),
                                                 g.cell_volume(f), alpha, dim, rule);
                const double kba = kernel_factor(std::span(cb).first(dim), std::span(ca).first(dim),
                                                 g.cell_volume(f), alpha, dim, rule);
                CHECK(kab == kba);
            }
        }
    }
    double prev = INFINITY;
    for (int i = 1; i < 8; ++i) {
        const double v = k1(0.0, 0.125 * i, 0.125, 0.5);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("cone index examples") {
    CHECK(cone_index(1.0, 1.0) == 0);
    CHECK(cone_index(0.5, 1.0) == 1);
    CHECK(cone_index(0.75, 1.0) == 1);
    CHECK(cone_index(2.0, 1.0) == -1);
    CHECK(cone_index(1.999, 1.0) == 0);
    CHECK_FALSE(cone_index(0.0, 1.0).has_value());
    CHECK_FALSE(cone_index(1.0, 0.0).has_value());
}

TEST_CASE("exactly one cone holds every pair of an 8x8 grid") {
    const auto g = make_grid(1, 1, 1.0, 1.0, 8, 8);
    const double h = g.step(Factor::kFirst);
    for (int x = 0; x < 8; ++x) {
        for (int u = 0; u < 8; ++u) {
            for (int y = 0; y < 8; ++y) {
                for (int v = 0; v < 8; ++v) {
                    const double dx = std::abs(x - u) * h;
                    const double dy = std::abs(y - v) * h;
                    if (dx == 0.0 || dy == 0.0) {
                        CHECK_FALSE(cone_index(dx, dy).has_value());
                        continue;
                    }
                    int members = 0;
                    for (int ell = -10; ell <= 10; ++ell) {
                        const double r = dx / dy;
                        if (std::exp2(-ell) <= r && r < std::exp2(-ell + 1)) {
                            ++members;
                            CHECK(cone_index(dx, dy) == ell);
                        }
                    }
                    CHECK(members == 1);
                    CHECK(cone_index_squared(dx * dx, dy * dy) == cone_index(dx, dy));
                }
            }
        }
    }
}

TEST_CASE("squared cone index handles dyadic and negative boundaries") {
    for (int ell = -6; ell <= 6; ++ell) {
        const double r = std::exp2(-ell);
        CHECK(cone_index_squared(r * r, 1.0) == ell);
        CHECK(cone_index_squared(r * r * 3.9, 1.0) == ell);
        CHECK(cone_index_squared(r * r * 0.999, 1.0) == ell + 1);
    }
}

TEST_CASE("factor kernel table stores integer offsets") {
    const auto g = make_grid(2, 1, 1.0, 1.0, 4, 4);
    const auto t = build_factor_kernel(g, Factor::kFirst, 1.2, SelfCellRule::kRefinedSubgrid);
    CHECK(t.d2(0, 5) == 2);
    CHECK(t.k(0, 5) == doctest::Approx(std::pow(2.0 * t.step * t.step, 0.5 * (1.2 - 2))));
    CHECK(t.k(3, 3) == doctest::Approx(self_cell_average(t.step * t.step, 1.2, 2,
                                                         SelfCellRule::kRefinedSubgrid)));
}
