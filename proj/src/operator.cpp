#include "mfi/operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfi/error.hpp"
#include "mfi/parallel.hpp"
#include "mfi/summation.hpp"

namespace mfi {

namespace {

KernelSpec kernel_for(const GridFunction& f, const ExponentConfig& cfg) {
    cfg.check_grid(f.grid());
    return KernelSpec(cfg.alpha(), cfg.n(), cfg.beta(), cfg.m());
}

void check_kernel_grid(const GridFunction& f, const KernelSpec& kernel) {
    if (f.grid().n() != kernel.n || f.grid().m() != kernel.m) {
        throw InvalidArgument("dimension mismatch between kernel and grid");
    }
}

void check_guard(const ProductGrid& grid) {
    if (grid.size() > kDirectGuardCells) {
        throw GuardExceeded("pair-sum path: grid has " + std::to_string(grid.size()) +
                            " product cells, guard is " + std::to_string(kDirectGuardCells));
    }
}

GridFunction one_factor_pass(const std::vector<double>& in, const ProductGrid& grid,
                             const FactorKernelTable& table, Factor axis) {
    const std::size_t nx = grid.factor_cells(Factor::kFirst);
    const std::size_t ny = grid.factor_cells(Factor::kSecond);
    const double vol = grid.cell_volume(axis);
    std::vector<double> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t cell) {
        const std::size_t x = cell / ny;
        const std::size_t y = cell % ny;
        CompensatedSum acc;
        if (axis == Factor::kFirst) {
            for (std::size_t u = 0; u < nx; ++u) acc += in[u * ny + y] * table.k(x, u);
        } else {
            for (std::size_t v = 0; v < ny; ++v) acc += in[x * ny + v] * table.k(y, v);
        }
        out[cell] = acc.value() * vol;
    });
    return GridFunction(grid, std::move(out));
}

std::vector<double> to_vector(const GridFunction& f) {
    return {f.values().begin(), f.values().end()};
}

OperatorOutput full_output(GridFunction result) {
    const ProductGrid& g = result.grid();
    return OperatorOutput{std::move(result), 0.0, GridFunction(g), GridFunction(g), std::nullopt};
}

}  // namespace

GridFunction fractional_integral_1factor(const GridFunction& f, double alpha, Factor axis) {
    return fractional_integral_1factor(f, alpha, axis,
                                       default_self_cell_rule(f.grid().dim(axis)));
}

GridFunction fractional_integral_1factor(const GridFunction& f, double alpha, Factor axis,
                                         SelfCellRule rule) {
    const auto table = build_factor_kernel(f.grid(), axis, alpha, rule);
    return one_factor_pass(to_vector(f), f.grid(), table, axis);
}

std::vector<double> fractional_integral_1factor_at(const GridFunction& f, double alpha,
                                                   Factor axis, const FactorPoint& point) {
    const ProductGrid& grid = f.grid();
    const int dim = grid.dim(axis);
    const SelfCellRule rule = default_self_cell_rule(dim);
    const Factor other = axis == Factor::kFirst ? Factor::kSecond : Factor::kFirst;
    const std::size_t n_axis = grid.factor_cells(axis);
    const std::size_t n_other = grid.factor_cells(other);
    std::vector<double> weights(n_axis);
    for (std::size_t u = 0; u < n_axis; ++u) {
        const FactorPoint c = grid.center(axis, u);
        weights[u] = kernel_factor(point, c, grid.cell_volume(axis), alpha, dim, rule);
    }
    std::vector<double> out(n_other);
    for (std::size_t o = 0; o < n_other; ++o) {
        CompensatedSum acc;
        for (std::size_t u = 0; u < n_axis; ++u) {
            const double fv = axis == Factor::kFirst ? f.at(u, o) : f.at(o, u);
            acc += fv * weights[u];
        }
        out[o] = acc.value() * grid.cell_volume(axis);
    }
    return out;
}

OperatorOutput strong_fractional_integral(const GridFunction& f, const ExponentConfig& cfg) {
    return strong_fractional_integral(f, kernel_for(f, cfg));
}

OperatorOutput strong_fractional_integral(const GridFunction& f, const KernelSpec& kernel) {
    check_kernel_grid(f, kernel);
    const ProductGrid& grid = f.grid();
    const auto kx = build_factor_kernel(grid, Factor::kFirst, kernel.alpha, kernel.rule_x);
    const auto ky = build_factor_kernel(grid, Factor::kSecond, kernel.beta, kernel.rule_y);
    GridFunction first = one_factor_pass(to_vector(f), grid, kx, Factor::kFirst);
    return full_output(one_factor_pass(to_vector(first), grid, ky, Factor::kSecond));
}

OperatorOutput strong_fractional_integral_direct(const GridFunction& f,
                                                 const ExponentConfig& cfg) {
    return strong_fractional_integral_direct(f, kernel_for(f, cfg));
}

OperatorOutput strong_fractional_integral_direct(const GridFunction& f, const KernelSpec& kernel) {
    check_kernel_grid(f, kernel);
    const ProductGrid& grid = f.grid();
    check_guard(grid);
    const auto kx = build_factor_kernel(grid, Factor::kFirst, kernel.alpha, kernel.rule_x);
    const auto ky = build_factor_kernel(grid, Factor::kSecond, kernel.beta, kernel.rule_y);
    const std::size_t nx = kx.cells;
    const std::size_t ny = ky.cells;
    const double vol = grid.product_cell_volume();
    const auto values = f.values();
    std::vector<double> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t cell) {
        const std::size_t x = cell / ny;
        const std::size_t y = cell % ny;
        CompensatedSum acc;
        for (std::size_t u = 0; u < nx; ++u) {
            const double kxu = kx.k(x, u);
            for (std::size_t v = 0; v < ny; ++v) acc += values[u * ny + v] * kxu * ky.k(y, v);
        }
        out[cell] = acc.value() * vol;
    });
    return full_output(GridFunction(grid, std::move(out)));
}

EllRange achievable_cone_range(const ProductGrid& grid) {
    auto extremes = [&](Factor f) {
        // smallest and largest positive squared offsets, in physical units
        const int c = grid.cells_per_axis(f);
        const double h2 = grid.step(f) * grid.step(f);
        const double max_off = static_cast<double>(c - 1);
        return std::pair<double, double>{h2, max_off * max_off * grid.dim(f) * h2};
    };
    if (grid.cells_per_axis(Factor::kFirst) < 2 || grid.cells_per_axis(Factor::kSecond) < 2) {
        return {};
    }
    const auto [x_min, x_max] = extremes(Factor::kFirst);
    const auto [y_min, y_max] = extremes(Factor::kSecond);
    return {*cone_index_squared(x_max, y_min), *cone_index_squared(x_min, y_max)};
}

const GridFunction& ConeDecomposition::cone(int ell) const {
    if (!range.contains(ell)) throw InvalidArgument("cone decomposition: ell outside range");
    return cones[static_cast<std::size_t>(ell - range.min)];
}

ConeDecomposition cone_decomposition(const GridFunction& f, const KernelSpec& kernel,
                                     EllRange range) {
    check_kernel_grid(f, kernel);
    const ProductGrid& grid = f.grid();
    check_guard(grid);
    const auto kx = build_factor_kernel(grid, Factor::kFirst, kernel.alpha, kernel.rule_x);
    const auto ky = build_factor_kernel(grid, Factor::kSecond, kernel.beta, kernel.rule_y);
    const std::size_t nx = kx.cells;
    const std::size_t ny = ky.cells;
    const double hx2 = kx.step * kx.step;
    const double hy2 = ky.step * ky.step;
    const double vol = grid.product_cell_volume();
    const auto values = f.values();
    const auto buckets = static_cast<std::size_t>(range.size());

    std::vector<std::vector<double>> cone_vals(buckets, std::vector<double>(grid.size()));
    std::vector<double> excluded(grid.size());
    std::vector<double> residual(grid.size());
    std::vector<double> excluded_abs(grid.size());

    parallel_for(grid.size(), [&](std::size_t cell) {
        const std::size_t x = cell / ny;
        const std::size_t y = cell % ny;
        std::vector<CompensatedSum> acc(buckets);
        CompensatedSum exc;
        CompensatedSum exc_abs;
        CompensatedSum res;
        for (std::size_t u = 0; u < nx; ++u) {
            const long long dx2 = kx.d2(x, u);
            const double kxu = kx.k(x, u);
            for (std::size_t v = 0; v < ny; ++v) {
                const double term = values[u * ny + v] * kxu * ky.k(y, v);
                const long long dy2 = ky.d2(y, v);
                if (dx2 == 0 || dy2 == 0) {
                    exc += term;
                    exc_abs += std::abs(term);
                    continue;
                }
                const int ell = *cone_index_squared(static_cast<double>(dx2) * hx2,
                                                    static_cast<double>(dy2) * hy2);
                if (range.contains(ell)) {
                    acc[static_cast<std::size_t>(ell - range.min)] += term;
                } else {
                    res += term;
                }
            }
        }
        for (std::size_t b = 0; b < buckets; ++b) cone_vals[b][cell] = acc[b].value() * vol;
        excluded[cell] = exc.value() * vol;
        excluded_abs[cell] = exc_abs.value() * vol;
        residual[cell] = res.value() * vol;
    });

    ConeDecomposition out{range, {}, GridFunction(grid, std::move(excluded)),
                          GridFunction(grid, std::move(residual)), 0.0};
    out.cones.reserve(buckets);
    for (auto& v : cone_vals) out.cones.emplace_back(grid, std::move(v));
    CompensatedSum mass;
    for (double v : excluded_abs) mass += v;
    out.excluded_mass = mass.value();
    return out;
}

OperatorOutput cone_operator(const GridFunction& f, const ExponentConfig& cfg, int ell) {
    auto d = cone_decomposition(f, kernel_for(f, cfg), EllRange{ell, ell});
    return OperatorOutput{std::move(d.cones.front()), d.excluded_mass, std::move(d.excluded),
                          std::move(d.residual), EllRange{ell, ell}};
}

OperatorOutput cone_sum(const GridFunction& f, const ExponentConfig& cfg, int ell_min,
                        int ell_max) {
    if (ell_min > ell_max) throw InvalidArgument("cone sum: ell_min must not exceed ell_max");
    const EllRange reachable = achievable_cone_range(f.grid());
    const EllRange range{std::max(ell_min, reachable.min), std::min(ell_max, reachable.max)};
    auto d = cone_decomposition(f, kernel_for(f, cfg), range);
    const ProductGrid& grid = f.grid();
    std::vector<double> total(grid.size());
    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
        CompensatedSum acc;
        for (const auto& c : d.cones) acc += c[cell];
        total[cell] = acc.value();
    }
    return OperatorOutput{GridFunction(grid, std::move(total)), d.excluded_mass,
                          std::move(d.excluded), std::move(d.residual), range};
}

}  // namespace mfi
