#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mfi/grid.hpp"
#include "mfi/weights.hpp"

namespace mfi {

/// Which bump characteristic a rectangle value follows.
enum class CharacteristicForm {
    /// |Q|^{a/n-1/t} |P|^{b/m-1/t} (int w^{pt})^{1/pt} (int s^{-pt/(p-1)})^{(p-1)/pt}
    kProductBump,
    /// |Q|^{a/n-1/p+1/q} |P|^{b/m-1/p+1/q} (avg w^{qt})^{1/qt} (avg s^{-pt/(p-1)})^{(p-1)/pt}
    kAveragedPQ,
};

/// Bump characteristic of a single rectangle; requires 1 < t <= theta.
[[nodiscard]] double bump_characteristic_rectangle(
    const WeightPair& w, const DyadicRectangle& r, const ExponentConfig& cfg, double t,
    CharacteristicForm form = CharacteristicForm::kProductBump);

/// The characteristic with its geometric prefactor stripped.
[[nodiscard]] double b_quantity(const WeightPair& w, const DyadicRectangle& r, double p,
                                double t);

struct RectangleValue {
    DyadicRectangle rectangle;
    double value = 0.0;
};

struct CharacteristicReport {
    double value = 0.0;
    DyadicRectangle argmax;
    std::size_t family_size = 0;
    RectangleFilter filter;
    double t = 0.0;
    std::optional<std::vector<RectangleValue>> per_rectangle_values;
};

/// Supremum of the rectangle value over the filtered lattice family. Ties go
/// to the first rectangle in enumeration order. Throws EmptyFamily.
[[nodiscard]] CharacteristicReport bump_characteristic_sup(
    const WeightPair& w, const ExponentConfig& cfg, double t, const RectangleFilter& filter,
    bool keep_table = false, CharacteristicForm form = CharacteristicForm::kProductBump);

struct BRatioProbe {
    double ratio = 0.0;
    double bound = 0.0;
    bool holds = false;
};

/// B[Q^ell x P] / B[Q x P] against 2^{ell (alpha - n/t)}, where Q^ell is the
/// concentric first-factor cube shrunk by 2^{-ell}. `holds` uses ratio <= slack * bound.
[[nodiscard]] BRatioProbe b_ratio_probe(const WeightPair& w, const DyadicRectangle& r,
                                        const ExponentConfig& cfg, double t, int ell,
                                        double slack = 1.0);

}  // namespace mfi
