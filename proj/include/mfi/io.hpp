#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mfi/characteristic.hpp"
#include "mfi/grid.hpp"
#include "mfi/operator.hpp"
#include "mfi/verify.hpp"

namespace mfi::io {

using nlohmann::json;

/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

[[nodiscard]] json grid_to_json(const ProductGrid& grid);
[[nodiscard]] ProductGrid grid_from_json(const json& j);

[[nodiscard]] json exponents_to_json(const ExponentConfig& cfg);
[[nodiscard]] json rectangle_to_json(const ProductGrid& grid, const DyadicRectangle& r);
[[nodiscard]] json filter_to_json(const RectangleFilter& filter);

/// Raw little-endian float64 samples, row-major (first-factor cell, then second).
[[nodiscard]] std::string encode_values(const GridFunction& f);
[[nodiscard]] GridFunction decode_values(const ProductGrid& grid, const std::string& bytes);

/// Writes `<stem>.bin` and the `<stem>.json` sidecar (grid, layout, and `metadata`).
void write_grid_function(const std::filesystem::path& stem, const GridFunction& f,
                         const json& metadata = json::object());
[[nodiscard]] GridFunction read_grid_function(const std::filesystem::path& stem);

[[nodiscard]] json operator_metadata(const OperatorOutput& out, const ExponentConfig& cfg);

[[nodiscard]] json characteristic_to_json(const ProductGrid& grid,
                                          const CharacteristicReport& report);
/// Columns: q_corner, q_side, p_corner, p_side, ell, value. Multi-axis corners
/// are written as `i;j`.
[[nodiscard]] std::string characteristic_table_csv(const ProductGrid& grid,
                                                   const CharacteristicReport& report);

[[nodiscard]] json decay_to_json(const DecayReport& report);
/// Columns: ell, quantity, kind.
[[nodiscard]] std::string decay_csv(const DecayReport& report);

[[nodiscard]] std::string kind_name(QuantityKind kind);

}  // namespace mfi::io
