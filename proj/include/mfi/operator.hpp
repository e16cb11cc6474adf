#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mfi/grid.hpp"
#include "mfi/kernel.hpp"

namespace mfi {

/// Largest product grid (in cells) accepted by the O(N^2) pair-sum paths.
inline constexpr std::size_t kDirectGuardCells = 1024;

/// Inclusive integer range of cone indices; empty when min > max.
struct EllRange {
    int min = 0;
    int max = -1;

    [[nodiscard]] bool empty() const noexcept { return min > max; }
    [[nodiscard]] bool contains(int ell) const noexcept { return ell >= min && ell <= max; }
    [[nodiscard]] int size() const noexcept { return empty() ? 0 : max - min + 1; }

    friend bool operator==(const EllRange&, const EllRange&) = default;
};

struct OperatorOutput {
    GridFunction result;
    /// Sum of |contribution| over cell pairs with a zero factor distance;
    /// always 0 for the full operator.
    double excluded_mass = 0.0;
    /// Per-output-cell sum of the excluded-pair contributions.
    GridFunction excluded;
    /// Per-output-cell sum of pairs whose cone index fell outside the range.
    GridFunction residual;
    std::optional<EllRange> ell_range_used;
};

/// Midpoint discretization of the one-parameter fractional integral applied
/// along one factor of the product grid.
[[nodiscard]] GridFunction fractional_integral_1factor(const GridFunction& f, double alpha,
                                                       Factor axis);
[[nodiscard]] GridFunction fractional_integral_1factor(const GridFunction& f, double alpha,
                                                       Factor axis, SelfCellRule rule);

/// The same quadrature evaluated at an arbitrary point of the chosen factor;
/// returns one value per cell of the other factor.
[[nodiscard]] std::vector<double> fractional_integral_1factor_at(const GridFunction& f,
                                                                 double alpha, Factor axis,
                                                                 const FactorPoint& point);

/// Strong fractional integral as two separable passes (first, then second factor).
[[nodiscard]] OperatorOutput strong_fractional_integral(const GridFunction& f,
                                                        const ExponentConfig& cfg);
[[nodiscard]] OperatorOutput strong_fractional_integral(const GridFunction& f,
                                                        const KernelSpec& kernel);

/// Literal sum over all cell pairs; the oracle for the separable path.
[[nodiscard]] OperatorOutput strong_fractional_integral_direct(const GridFunction& f,
                                                               const ExponentConfig& cfg);
[[nodiscard]] OperatorOutput strong_fractional_integral_direct(const GridFunction& f,
                                                               const KernelSpec& kernel);

/// Cone indices realized by cell pairs of the grid with both distances positive.
[[nodiscard]] EllRange achievable_cone_range(const ProductGrid& grid);

/// All partial operators of a range computed in one pass over the cell pairs.
struct ConeDecomposition {
    EllRange range;
    std::vector<GridFunction> cones;  ///< cones[k] is the partial operator for range.min + k
    GridFunction excluded;
    GridFunction residual;
    double excluded_mass = 0.0;

    [[nodiscard]] const GridFunction& cone(int ell) const;
};

[[nodiscard]] ConeDecomposition cone_decomposition(const GridFunction& f, const KernelSpec& kernel,
                                                   EllRange range);

/// Partial operator restricted to pairs in the cone of index ell.
[[nodiscard]] OperatorOutput cone_operator(const GridFunction& f, const ExponentConfig& cfg,
                                           int ell);

/// Sum of partial operators over [ell_min, ell_max]. The range is clamped to the
/// achievable cone indices; ell_range_used records the clamped range.
[[nodiscard]] OperatorOutput cone_sum(const GridFunction& f, const ExponentConfig& cfg,
                                      int ell_min, int ell_max);

}  // namespace mfi
