#include "mfi/grid.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "mfi/error.hpp"

namespace mfi {

namespace {

std::size_t int_pow(std::size_t base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

int log2_exact(int v) {
    int e = 0;
    while ((1 << e) < v) ++e;
    return e;
}

std::string factor_name(Factor f) { return f == Factor::kFirst ? "first" : "second"; }

}  // namespace

bool is_power_of_two(long long v) noexcept { return v > 0 && (v & (v - 1)) == 0; }

ProductGrid::ProductGrid(int n, int m, double extent_x, double extent_y, int cells_x,
                         int cells_y) {
    if (n < 1 || n > kMaxFactorDim || m < 1 || m > kMaxFactorDim) {
        throw InvalidArgument("grid: factor dimensions must lie in {1, 2}");
    }
    if (!(extent_x > 0.0) || !(extent_y > 0.0) || !std::isfinite(extent_x) ||
        !std::isfinite(extent_y)) {
        throw InvalidArgument("grid: extents must be positive and finite");
    }
    if (!is_power_of_two(cells_x) || !is_power_of_two(cells_y)) {
        throw InvalidArgument("grid: cells per axis must be a power of two (got " +
                              std::to_string(cells_x) + ", " + std::to_string(cells_y) + ")");
    }
    dim_ = {n, m};
    extent_ = {extent_x, extent_y};
    cells_ = {cells_x, cells_y};
    for (int s = 0; s < 2; ++s) {
        step_[s] = 2.0 * extent_[s] / cells_[s];
        count_[s] = int_pow(static_cast<std::size_t>(cells_[s]), dim_[s]);
        volume_[s] = std::pow(step_[s], dim_[s]);
    }
}

double ProductGrid::box_volume(Factor f) const noexcept {
    return std::pow(2.0 * extent(f), dim(f));
}

double ProductGrid::axis_center(Factor f, int i) const noexcept {
    return -extent(f) + (i + 0.5) * step(f);
}

FactorIndex ProductGrid::multi_index(Factor f, std::size_t cell) const noexcept {
    FactorIndex idx{};
    const auto c = static_cast<std::size_t>(cells_per_axis(f));
    for (int k = dim(f) - 1; k >= 0; --k) {
        idx[k] = static_cast<int>(cell % c);
        cell /= c;
    }
    return idx;
}

std::size_t ProductGrid::flat_index(Factor f, const FactorIndex& idx) const noexcept {
    std::size_t cell = 0;
    const auto c = static_cast<std::size_t>(cells_per_axis(f));
    for (int k = 0; k < dim(f); ++k) cell = cell * c + static_cast<std::size_t>(idx[k]);
    return cell;
}

FactorPoint ProductGrid::center(Factor f, std::size_t cell) const noexcept {
    const FactorIndex idx = multi_index(f, cell);
    FactorPoint pt{};
    for (int k = 0; k < dim(f); ++k) pt[k] = axis_center(f, idx[k]);
    return pt;
}

ProductGrid ProductGrid::scaled(Factor f, double factor) const {
    const double ex = f == Factor::kFirst ? extent_[0] * factor : extent_[0];
    const double ey = f == Factor::kSecond ? extent_[1] * factor : extent_[1];
    return ProductGrid(dim_[0], dim_[1], ex, ey, cells_[0], cells_[1]);
}

ProductGrid make_grid(int n, int m, double extent_x, double extent_y, int cells_x,
                      int cells_y) {
    return ProductGrid(n, m, extent_x, extent_y, cells_x, cells_y);
}

GridFunction::GridFunction(ProductGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

GridFunction::GridFunction(ProductGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw InvalidArgument("grid function: expected " + std::to_string(grid_.size()) +
                              " values, got " + std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidArgument("grid function: non-finite sample");
    }
}

GridFunction GridFunction::from_function(
    const ProductGrid& grid,
    const std::function<double(const FactorPoint&, const FactorPoint&)>& fn) {
    std::vector<double> values(grid.size());
    const std::size_t nx = grid.factor_cells(Factor::kFirst);
    const std::size_t ny = grid.factor_cells(Factor::kSecond);
    for (std::size_t i = 0; i < nx; ++i) {
        const FactorPoint x = grid.center(Factor::kFirst, i);
        for (std::size_t j = 0; j < ny; ++j) {
            values[grid.index(i, j)] = fn(x, grid.center(Factor::kSecond, j));
        }
    }
    return GridFunction(grid, std::move(values));
}

GridFunction GridFunction::scaled(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::combined(double a, const GridFunction& other, double b) const {
    if (!(other.grid_ == grid_)) throw InvalidArgument("grid function: grid mismatch");
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * values_[i] + b * other.values_[i];
    return GridFunction(grid_, std::move(v));
}

void validate_rectangle(const ProductGrid& grid, const DyadicRectangle& r) {
    auto check = [&](Factor f, const Cube& c) {
        if (!is_power_of_two(c.side)) {
            throw InvalidArgument("rectangle: side in the " + factor_name(f) +
                                  " factor is not a power of two");
        }
        for (int k = 0; k < grid.dim(f); ++k) {
            if (c.corner[k] < 0 || c.corner[k] + c.side > grid.cells_per_axis(f)) {
                throw InvalidArgument("rectangle: cube in the " + factor_name(f) +
                                      " factor leaves the grid box");
            }
        }
    };
    check(Factor::kFirst, r.q);
    check(Factor::kSecond, r.p);
}

double cube_measure(const ProductGrid& grid, Factor f, const Cube& c) {
    return std::pow(c.side * grid.step(f), grid.dim(f));
}

double eccentricity_value(const ProductGrid& grid, const DyadicRectangle& r) {
    const double side_q = r.q.side * grid.step(Factor::kFirst);
    const double side_p = r.p.side * grid.step(Factor::kSecond);
    return -std::log2(side_q / side_p);
}

std::optional<int> eccentricity(const ProductGrid& grid, const DyadicRectangle& r) {
    // log2 of the sides is exact; only the step ratio can spoil integrality.
    int step_exp = 0;
    const double mant =
        std::frexp(grid.step(Factor::kSecond) / grid.step(Factor::kFirst), &step_exp);
    if (mant != 0.5) return std::nullopt;
    return log2_exact(r.p.side) - log2_exact(r.q.side) + (step_exp - 1);
}

std::vector<std::size_t> cube_cells(const ProductGrid& grid, Factor f, const Cube& c) {
    std::vector<std::size_t> cells;
    if (grid.dim(f) == 1) {
        cells.reserve(static_cast<std::size_t>(c.side));
        for (int i = 0; i < c.side; ++i) {
            cells.push_back(grid.flat_index(f, {c.corner[0] + i, 0}));
        }
    } else {
        cells.reserve(static_cast<std::size_t>(c.side) * static_cast<std::size_t>(c.side));
        for (int i = 0; i < c.side; ++i) {
            for (int j = 0; j < c.side; ++j) {
                cells.push_back(grid.flat_index(f, {c.corner[0] + i, c.corner[1] + j}));
            }
        }
    }
    return cells;
}

void for_each_cell(const ProductGrid& grid, const DyadicRectangle& r,
                   const std::function<void(std::size_t, std::size_t)>& fn) {
    const auto xs = cube_cells(grid, Factor::kFirst, r.q);
    const auto ys = cube_cells(grid, Factor::kSecond, r.p);
    for (std::size_t x : xs) {
        for (std::size_t y : ys) fn(x, y);
    }
}

bool RectangleFilter::accepts(const ProductGrid& grid, const DyadicRectangle& r) const {
    switch (kind) {
        case Kind::kAll:
            return true;
        case Kind::kEccentricity: {
            const auto e = eccentricity(grid, r);
            return e.has_value() && *e == ell;
        }
        case Kind::kDiagonal: {
            const auto e = eccentricity(grid, r);
            return e.has_value() && *e == 0;
        }
    }
    return false;
}

std::vector<Cube> dyadic_cubes(const ProductGrid& grid, Factor f) {
    std::vector<Cube> cubes;
    const int cells = grid.cells_per_axis(f);
    for (int side = 1; side <= cells; side *= 2) {
        const int positions = cells / side;
        if (grid.dim(f) == 1) {
            for (int i = 0; i < positions; ++i) cubes.push_back({{i * side, 0}, side});
        } else {
            for (int i = 0; i < positions; ++i) {
                for (int j = 0; j < positions; ++j) {
                    cubes.push_back({{i * side, j * side}, side});
                }
            }
        }
    }
    return cubes;
}

std::vector<DyadicRectangle> enumerate_dyadic_rectangles(const ProductGrid& grid,
                                                         const RectangleFilter& filter) {
    const auto qs = dyadic_cubes(grid, Factor::kFirst);
    const auto ps = dyadic_cubes(grid, Factor::kSecond);
    std::vector<DyadicRectangle> out;
    if (filter.kind == RectangleFilter::Kind::kAll) out.reserve(qs.size() * ps.size());
    for (const Cube& q : qs) {
        for (const Cube& p : ps) {
            DyadicRectangle r{q, p};
            if (filter.accepts(grid, r)) out.push_back(r);
        }
    }
    return out;
}

DyadicRectangle dilate_rectangle(const ProductGrid& grid, const DyadicRectangle& r, int ell,
                                 Factor f) {
    validate_rectangle(grid, r);
    if (ell < 0) throw InvalidArgument("dilate: ell must be nonnegative");
    DyadicRectangle out = r;
    Cube& c = f == Factor::kFirst ? out.q : out.p;
    if (ell >= 31 || (c.side >> ell) < 1) {
        std::ostringstream msg;
        msg << "dilate: side " << c.side << " cells cannot shrink by 2^" << ell
            << " below one cell";
        throw InvalidArgument(msg.str());
    }
    const int new_side = c.side >> ell;
    const int offset = (c.side - new_side) / 2;  // floor: ties shift to the lower corner
    for (int k = 0; k < grid.dim(f); ++k) c.corner[k] += offset;
    c.side = new_side;
    return out;
}

ExponentConfig::ExponentConfig(int n, int m, double alpha, double beta, double p, double q,
                               double theta)
    : n_(n), m_(m), alpha_(alpha), beta_(beta), p_(p), q_(q), theta_(theta) {
    if (n < 1 || n > kMaxFactorDim || m < 1 || m > kMaxFactorDim) {
        throw InvalidArgument("exponents: n and m must lie in {1, 2}");
    }
    if (!(alpha > 0.0 && alpha < n)) {
        throw InvalidArgument("exponents: alpha must satisfy 0 < alpha < n");
    }
    if (!(beta > 0.0 && beta < m)) {
        throw InvalidArgument("exponents: beta must satisfy 0 < beta < m");
    }
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("exponents: p must satisfy 1 < p");
    if (!(q >= p) || !std::isfinite(q)) throw InvalidArgument("exponents: q must satisfy p <= q");
    if (!(theta > 1.0) || !std::isfinite(theta)) {
        throw InvalidArgument("exponents: theta must satisfy theta > 1");
    }
}

void ExponentConfig::check_grid(const ProductGrid& grid) const {
    if (grid.n() != n_ || grid.m() != m_) {
        throw InvalidArgument("dimension mismatch between exponents and grid");
    }
}

}  // namespace mfi
