#pragma once

#include "mfi/grid.hpp"

namespace mfi {

/// The weight pair (omega, sigma) of a two-weight inequality.
///
/// omega and sigma must be nonnegative and share a grid. Cells where sigma is
/// zero are accepted here; any bump quantity over a rectangle containing one
/// raises TrivialWeight.
class WeightPair {
public:
    WeightPair(GridFunction omega, GridFunction sigma);

    [[nodiscard]] const GridFunction& omega() const noexcept { return omega_; }
    [[nodiscard]] const GridFunction& sigma() const noexcept { return sigma_; }
    [[nodiscard]] const ProductGrid& grid() const noexcept { return omega_.grid(); }

    [[nodiscard]] WeightPair with_omega_scaled(double c) const;
    [[nodiscard]] WeightPair with_sigma_scaled(double c) const;

private:
    GridFunction omega_;
    GridFunction sigma_;
};

[[nodiscard]] WeightPair unit_weights(const ProductGrid& grid);

/// omega(x,y) = (|x|+delta)^{-a} (|y|+delta)^{-b},
/// sigma(x,y) = (|x|+delta)^{c} (|y|+delta)^{d}.
struct PowerWeightFamily {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double delta = 0.0;

    [[nodiscard]] double omega(const FactorPoint& x, int n, const FactorPoint& y, int m) const;
    [[nodiscard]] double sigma(const FactorPoint& x, int n, const FactorPoint& y, int m) const;

    /// Samples at cell centers; delta <= 0 means one first-factor cell step.
    [[nodiscard]] WeightPair sample(const ProductGrid& grid) const;

    /// Samples omega(s_x x, s_y y), sigma(s_x x, s_y y) at the cell centers of grid.
    [[nodiscard]] WeightPair sample_composed(const ProductGrid& grid, double scale_x,
                                             double scale_y) const;
};

[[nodiscard]] double factor_norm(const FactorPoint& x, int dim) noexcept;

}  // namespace mfi
