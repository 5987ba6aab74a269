#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "spwell/field.hpp"
#include "spwell/grid.hpp"

namespace spwell {

/// Field snapshot format: raw little-endian 64-bit floats in node order
/// (radial: by radius; box3d: row-major x,y,z) plus a JSON sidecar with
/// {kind, k, n, h}.
inline void dump_field(const Field& f, const std::filesystem::path& base) {
    const Grid& g = f.grid();
    std::ofstream bin(base.string() + ".f64", std::ios::binary);
    if (!bin) throw std::runtime_error("dump_field: cannot open " + base.string() + ".f64");
    static_assert(sizeof(double) == 8);
    bin.write(reinterpret_cast<const char*>(f.values().data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));

    nlohmann::json side;
    side["kind"] = g.kind() == GridKind::radial ? "radial" : "box3d";
    side["k"] = g.k();
    side["n"] = g.n();
    side["h"] = g.h();
    std::ofstream meta(base.string() + ".json");
    meta << side.dump(2) << "\n";
}

inline Field load_field(const std::filesystem::path& base) {
    std::ifstream meta(base.string() + ".json");
    if (!meta) throw std::runtime_error("load_field: cannot open " + base.string() + ".json");
    nlohmann::json side = nlohmann::json::parse(meta);
    const std::string kind = side.at("kind").get<std::string>();
    const double k = side.at("k").get<double>();
    const int n = side.at("n").get<int>();
    GridPtr grid = kind == "radial" ? Grid::radial(k, n) : Grid::box3d(k, n);

    std::ifstream bin(base.string() + ".f64", std::ios::binary);
    if (!bin) throw std::runtime_error("load_field: cannot open " + base.string() + ".f64");
    std::vector<double> values(grid->node_count());
    bin.read(reinterpret_cast<char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (static_cast<std::size_t>(bin.gcount()) != values.size() * sizeof(double))
        throw std::runtime_error("load_field: truncated data in " + base.string() + ".f64");
    return Field(std::move(grid), std::move(values));
}

} // namespace spwell
