#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/grid.hpp"

namespace g2sf {

/// A grid document: one grid geometry plus named fields sampled on it.
/// Serialized as a JSON manifest (format_version 1) with base64-encoded
/// little-endian IEEE-754 doubles per field; round-trips bit-exactly.
struct GridDoc {
    int dim = 0;
    std::array<std::size_t, 3> shape{1, 1, 1};
    std::array<double, 3> origin{0, 0, 0};
    std::array<double, 3> spacing{1, 1, 1};
    // insertion-ordered field list
    std::vector<std::pair<std::string, GridField>> fields;

    void add(const std::string& name, GridField f);
    const GridField& get(const std::string& name) const;
    bool has(const std::string& name) const;

    static GridDoc from_field(const std::string& name, GridField f);
};

std::string to_text(const GridDoc& doc);
GridDoc from_text(const std::string& text);

void write_grid_file(const std::string& path, const GridDoc& doc);
GridDoc read_grid_file(const std::string& path);

std::string base64_encode(const unsigned char* data, std::size_t len);
std::vector<unsigned char> base64_decode(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace g2sf
