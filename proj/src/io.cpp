#include "mfi/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

#include "mfi/error.hpp"

namespace mfi::io {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("io: cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string corner_text(const ProductGrid& grid, Factor f, const Cube& c) {
    std::string out;
    for (int k = 0; k < grid.dim(f); ++k) {
        if (k) out += ';';
        out += std::to_string(c.corner[k]);
    }
    return out;
}

json corner_json(const ProductGrid& grid, Factor f, const Cube& c) {
    json a = json::array();
    for (int k = 0; k < grid.dim(f); ++k) a.push_back(c.corner[k]);
    return a;
}

std::string format_double(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void atomic_write(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidArgument("io: cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw InvalidArgument("io: short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

json grid_to_json(const ProductGrid& grid) {
    return {{"n", grid.n()},
            {"m", grid.m()},
            {"extent_x", grid.extent(Factor::kFirst)},
            {"extent_y", grid.extent(Factor::kSecond)},
            {"cells_x", grid.cells_per_axis(Factor::kFirst)},
            {"cells_y", grid.cells_per_axis(Factor::kSecond)}};
}

ProductGrid grid_from_json(const json& j) {
    try {
        return make_grid(j.at("n").get<int>(), j.at("m").get<int>(),
                         j.at("extent_x").get<double>(), j.at("extent_y").get<double>(),
                         j.at("cells_x").get<int>(), j.at("cells_y").get<int>());
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("grid json: ") + e.what());
    }
}

json exponents_to_json(const ExponentConfig& cfg) {
    return {{"n", cfg.n()},         {"m", cfg.m()}, {"alpha", cfg.alpha()},
            {"beta", cfg.beta()},   {"p", cfg.p()}, {"q", cfg.q()},
            {"theta", cfg.theta()}};
}

json rectangle_to_json(const ProductGrid& grid, const DyadicRectangle& r) {
    json j = {{"q_corner", corner_json(grid, Factor::kFirst, r.q)},
              {"q_side", r.q.side},
              {"p_corner", corner_json(grid, Factor::kSecond, r.p)},
              {"p_side", r.p.side}};
    const auto e = eccentricity(grid, r);
    j["eccentricity"] = e ? json(*e) : json(eccentricity_value(grid, r));
    return j;
}

json filter_to_json(const RectangleFilter& filter) {
    switch (filter.kind) {
        case RectangleFilter::Kind::kAll:
            return "all";
        case RectangleFilter::Kind::kDiagonal:
            return "diagonal";
        case RectangleFilter::Kind::kEccentricity:
            return json{{"eccentricity", filter.ell}};
    }
    return nullptr;
}

std::string encode_values(const GridFunction& f) {
    std::string bytes;
    bytes.reserve(f.size() * 8);
    for (double v : f.values()) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
    }
    return bytes;
}

GridFunction decode_values(const ProductGrid& grid, const std::string& bytes) {
    if (bytes.size() != grid.size() * 8) {
        throw InvalidArgument("io: binary payload has " + std::to_string(bytes.size()) +
                              " bytes, expected " + std::to_string(grid.size() * 8));
    }
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) {
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + b]))
                    << (8 * b);
        }
        values[i] = std::bit_cast<double>(bits);
    }
    return GridFunction(grid, std::move(values));
}

void write_grid_function(const fs::path& stem, const GridFunction& f, const json& metadata) {
    fs::path bin = stem;
    bin += ".bin";
    fs::path side = stem;
    side += ".json";
    json j = {{"grid", grid_to_json(f.grid())},
              {"length", f.size()},
              {"dtype", "float64"},
              {"byte_order", "little"},
              {"layout", "row-major: first-factor cell, then second-factor cell"},
              {"data_file", bin.filename().string()},
              {"metadata", metadata}};
    atomic_write(bin, encode_values(f));
    atomic_write(side, j.dump(2) + "\n");
}

GridFunction read_grid_function(const fs::path& stem) {
    fs::path bin = stem;
    bin += ".bin";
    fs::path side = stem;
    side += ".json";
    json j;
    try {
        j = json::parse(read_file(side));
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("io: bad sidecar: ") + e.what());
    }
    return decode_values(grid_from_json(j.at("grid")), read_file(bin));
}

json operator_metadata(const OperatorOutput& out, const ExponentConfig& cfg) {
    json j = {{"exponents", exponents_to_json(cfg)}, {"excluded_mass", out.excluded_mass}};
    if (out.ell_range_used) {
        j["ell_range_used"] = {out.ell_range_used->min, out.ell_range_used->max};
    } else {
        j["ell_range_used"] = nullptr;
    }
    return j;
}

json characteristic_to_json(const ProductGrid& grid, const CharacteristicReport& report) {
    return {{"value", report.value},
            {"argmax", rectangle_to_json(grid, report.argmax)},
            {"family_size", report.family_size},
            {"filter", filter_to_json(report.filter)},
            {"t", report.t}};
}

std::string characteristic_table_csv(const ProductGrid& grid, const CharacteristicReport& report) {
    std::ostringstream s;
    s << "q_corner,q_side,p_corner,p_side,ell,value\n";
    if (!report.per_rectangle_values) return s.str();
    for (const auto& row : *report.per_rectangle_values) {
        const auto& r = row.rectangle;
        const auto e = eccentricity(grid, r);
        s << corner_text(grid, Factor::kFirst, r.q) << ',' << r.q.side << ','
          << corner_text(grid, Factor::kSecond, r.p) << ',' << r.p.side << ','
          << (e ? std::to_string(*e) : format_double(eccentricity_value(grid, r))) << ','
          << format_double(row.value) << '\n';
    }
    return s.str();
}

std::string kind_name(QuantityKind kind) {
    return kind == QuantityKind::kCharacteristic ? "CHARACTERISTIC" : "NORM_RATIO";
}

json decay_to_json(const DecayReport& report) {
    return {{"kind", kind_name(report.kind)},
            {"ell_values", report.ell_values},
            {"quantities", report.quantities},
            {"fitted_epsilon", nullable(report.fitted_epsilon)},
            {"fit_residual", nullable(report.fit_residual)},
            {"dropped_ells", report.dropped_ells}};
}

std::string decay_csv(const DecayReport& report) {
    std::ostringstream s;
    s << "ell,quantity,kind\n";
    for (std::size_t i = 0; i < report.ell_values.size(); ++i) {
        s << report.ell_values[i] << ',' << format_double(report.quantities[i]) << ','
          << kind_name(report.kind) << '\n';
    }
    return s.str();
}

}  // namespace mfi::io
