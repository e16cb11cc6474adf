#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace mfi {

inline constexpr int kMaxFactorDim = 2;

/// Selects one factor of the product space R^n x R^m.
enum class Factor { kFirst, kSecond };

/// A point (or a multi-index) in one factor; only the first `dim` entries are used.
using FactorPoint = std::array<double, kMaxFactorDim>;
using FactorIndex = std::array<int, kMaxFactorDim>;

[[nodiscard]] bool is_power_of_two(long long v) noexcept;

/// Uniform discretization of the centered box [-ex, ex]^n x [-ey, ey]^m.
///
/// Cells of one factor are numbered row-major over their per-axis indices; a
/// product cell is numbered `x_cell * factor_cells(kSecond) + y_cell`.
class ProductGrid {
public:
    ProductGrid(int n, int m, double extent_x, double extent_y, int cells_x, int cells_y);

    [[nodiscard]] int n() const noexcept { return dim_[0]; }
    [[nodiscard]] int m() const noexcept { return dim_[1]; }
    [[nodiscard]] int dim(Factor f) const noexcept { return dim_[slot(f)]; }
    [[nodiscard]] double extent(Factor f) const noexcept { return extent_[slot(f)]; }
    [[nodiscard]] int cells_per_axis(Factor f) const noexcept { return cells_[slot(f)]; }
    [[nodiscard]] double step(Factor f) const noexcept { return step_[slot(f)]; }
    [[nodiscard]] std::size_t factor_cells(Factor f) const noexcept { return count_[slot(f)]; }
    [[nodiscard]] double cell_volume(Factor f) const noexcept { return volume_[slot(f)]; }
    [[nodiscard]] double box_volume(Factor f) const noexcept;

    [[nodiscard]] std::size_t size() const noexcept { return count_[0] * count_[1]; }
    [[nodiscard]] double product_cell_volume() const noexcept { return volume_[0] * volume_[1]; }
    [[nodiscard]] std::size_t index(std::size_t x_cell, std::size_t y_cell) const noexcept {
        return x_cell * count_[1] + y_cell;
    }

    /// Midpoint of the i-th interval of one axis of factor f.
    [[nodiscard]] double axis_center(Factor f, int i) const noexcept;
    [[nodiscard]] FactorIndex multi_index(Factor f, std::size_t cell) const noexcept;
    [[nodiscard]] std::size_t flat_index(Factor f, const FactorIndex& idx) const noexcept;
    [[nodiscard]] FactorPoint center(Factor f, std::size_t cell) const noexcept;

    /// Same grid with one factor's box scaled by `factor` (cell counts kept).
    [[nodiscard]] ProductGrid scaled(Factor f, double factor) const;

    friend bool operator==(const ProductGrid&, const ProductGrid&) = default;

private:
    static constexpr int slot(Factor f) noexcept { return f == Factor::kFirst ? 0 : 1; }

    std::array<int, 2> dim_{};
    std::array<double, 2> extent_{};
    std::array<int, 2> cells_{};
    std::array<double, 2> step_{};
    std::array<std::size_t, 2> count_{};
    std::array<double, 2> volume_{};
};

[[nodiscard]] ProductGrid make_grid(int n, int m, double extent_x, double extent_y, int cells_x,
                                    int cells_y);

/// Real samples on every product cell of a grid.
class GridFunction {
public:
    explicit GridFunction(ProductGrid grid);
    GridFunction(ProductGrid grid, std::vector<double> values);

    /// Samples `fn(x, y)` at every product cell center.
    static GridFunction from_function(
        const ProductGrid& grid,
        const std::function<double(const FactorPoint&, const FactorPoint&)>& fn);

    [[nodiscard]] const ProductGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] double at(std::size_t x_cell, std::size_t y_cell) const noexcept {
        return values_[grid_.index(x_cell, y_cell)];
    }

    [[nodiscard]] GridFunction scaled(double c) const;
    /// a*this + b*other; grids must match.
    [[nodiscard]] GridFunction combined(double a, const GridFunction& other, double b) const;

    friend bool operator==(const GridFunction&, const GridFunction&) = default;

private:
    ProductGrid grid_;
    std::vector<double> values_;
};

/// A cube in one factor in cell units: corner index and side length (cells).
struct Cube {
    FactorIndex corner{};
    int side = 1;

    friend bool operator==(const Cube&, const Cube&) = default;
};

/// Product Q x P of a cube in each factor. Sides are powers of two in cells;
/// corners are integer cell indices (the enumerated family is also aligned to
/// multiples of the side, dilated rectangles need not be).
struct DyadicRectangle {
    Cube q;
    Cube p;

    friend bool operator==(const DyadicRectangle&, const DyadicRectangle&) = default;
};

/// Throws InvalidArgument unless r lies inside the grid with power-of-two sides.
void validate_rectangle(const ProductGrid& grid, const DyadicRectangle& r);

[[nodiscard]] double cube_measure(const ProductGrid& grid, Factor f, const Cube& c);

/// -log2(|Q|^{1/n} / |P|^{1/m}) as a real number.
[[nodiscard]] double eccentricity_value(const ProductGrid& grid, const DyadicRectangle& r);

/// The eccentricity when it is an exact integer.
[[nodiscard]] std::optional<int> eccentricity(const ProductGrid& grid, const DyadicRectangle& r);

/// All product cells (x_cell, y_cell) covered by r, visited row-major.
void for_each_cell(const ProductGrid& grid, const DyadicRectangle& r,
                   const std::function<void(std::size_t x_cell, std::size_t y_cell)>& fn);

[[nodiscard]] std::vector<std::size_t> cube_cells(const ProductGrid& grid, Factor f,
                                                  const Cube& c);

struct RectangleFilter {
    enum class Kind { kAll, kEccentricity, kDiagonal };

    Kind kind = Kind::kAll;
    int ell = 0;

    static RectangleFilter all() { return {Kind::kAll, 0}; }
    static RectangleFilter with_eccentricity(int ell) { return {Kind::kEccentricity, ell}; }
    static RectangleFilter diagonal() { return {Kind::kDiagonal, 0}; }

    [[nodiscard]] bool accepts(const ProductGrid& grid, const DyadicRectangle& r) const;

    friend bool operator==(const RectangleFilter&, const RectangleFilter&) = default;
};

/// Aligned dyadic cubes of one factor ordered by side, then row-major corner.
[[nodiscard]] std::vector<Cube> dyadic_cubes(const ProductGrid& grid, Factor f);

/// Every aligned dyadic rectangle accepted by the filter, each once, ordered
/// by Q (side, corner) and then by P (side, corner).
[[nodiscard]] std::vector<DyadicRectangle> enumerate_dyadic_rectangles(
    const ProductGrid& grid, const RectangleFilter& filter);

/// Concentric cube with side 2^{-ell} times the original in the chosen factor.
/// When exact concentricity is impossible the cube shifts toward the lower corner.
[[nodiscard]] DyadicRectangle dilate_rectangle(const ProductGrid& grid, const DyadicRectangle& r,
                                               int ell, Factor f);

/// Exponents (n, m, alpha, beta, p, q, theta). The constructor rejects
/// anything outside 0<alpha<n, 0<beta<m, 1<p<=q, theta>1.
class ExponentConfig {
public:
    ExponentConfig(int n, int m, double alpha, double beta, double p, double q, double theta);
    /// p = q form.
    ExponentConfig(int n, int m, double alpha, double beta, double p, double theta)
        : ExponentConfig(n, m, alpha, beta, p, p, theta) {}

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int m() const noexcept { return m_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] double q() const noexcept { return q_; }
    [[nodiscard]] double theta() const noexcept { return theta_; }

    /// Throws InvalidArgument when the grid's factor dimensions differ.
    void check_grid(const ProductGrid& grid) const;

    friend bool operator==(const ExponentConfig&, const ExponentConfig&) = default;

private:
    int n_;
    int m_;
    double alpha_;
    double beta_;
    double p_;
    double q_;
    double theta_;
};

}  // namespace mfi
