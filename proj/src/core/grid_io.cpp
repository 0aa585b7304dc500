#include "core/grid_io.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "grid files store little-endian doubles; big-endian hosts are unsupported");

namespace g2sf {

using nlohmann::json;

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}
}  // namespace

std::string base64_encode(const unsigned char* data, std::size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= len; i += 3) {
        unsigned v = (unsigned(data[i]) << 16) | (unsigned(data[i + 1]) << 8) | unsigned(data[i + 2]);
        out += kB64[(v >> 18) & 63];
        out += kB64[(v >> 12) & 63];
        out += kB64[(v >> 6) & 63];
        out += kB64[v & 63];
    }
    if (i + 1 == len) {
        unsigned v = unsigned(data[i]) << 16;
        out += kB64[(v >> 18) & 63];
        out += kB64[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == len) {
        unsigned v = (unsigned(data[i]) << 16) | (unsigned(data[i + 1]) << 8);
        out += kB64[(v >> 18) & 63];
        out += kB64[(v >> 12) & 63];
        out += kB64[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    std::vector<unsigned char> out;
    out.reserve(text.size() / 4 * 3);
    unsigned acc = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        int v = b64_value(c);
        require(v >= 0, ErrorKind::invalid_argument, "base64: invalid character");
        acc = (acc << 6) | unsigned(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((acc >> bits) & 0xFF));
        }
    }
    return out;
}

void GridDoc::add(const std::string& name, GridField f) {
    if (fields.empty()) {
        dim = f.dim();
        shape = f.shape();
        origin = f.origin();
        spacing = f.spacing();
    } else {
        require(f.dim() == dim && f.shape() == shape && f.origin() == origin && f.spacing() == spacing,
                ErrorKind::invalid_argument, "GridDoc: all fields must share one grid");
    }
    for (auto& [n, _] : fields)
        require(n != name, ErrorKind::invalid_argument, "GridDoc: duplicate field name '" + name + "'");
    fields.emplace_back(name, std::move(f));
}

const GridField& GridDoc::get(const std::string& name) const {
    for (auto& [n, f] : fields)
        if (n == name) return f;
    fail_invalid("GridDoc: no field named '" + name + "'");
}

bool GridDoc::has(const std::string& name) const {
    for (auto& [n, _] : fields)
        if (n == name) return true;
    return false;
}

GridDoc GridDoc::from_field(const std::string& name, GridField f) {
    GridDoc d;
    d.add(name, std::move(f));
    return d;
}

std::string to_text(const GridDoc& doc) {
    require(!doc.fields.empty(), ErrorKind::invalid_argument, "GridDoc: nothing to serialize");
    json j;
    j["format_version"] = 1;
    j["kind"] = std::string("grid") + std::to_string(doc.dim) + "d";
    j["shape"] = std::vector<std::size_t>(doc.shape.begin(), doc.shape.begin() + doc.dim);
    j["origin"] = std::vector<double>(doc.origin.begin(), doc.origin.begin() + doc.dim);
    j["spacing"] = std::vector<double>(doc.spacing.begin(), doc.spacing.begin() + doc.dim);
    j["fields"] = json::array();
    for (const auto& [name, f] : doc.fields) {
        json jf;
        jf["name"] = name;
        jf["components"] = f.components();
        jf["dtype"] = "f64";
        jf["layout"] = "row-major";
        const auto& v = f.values();
        jf["data"] = base64_encode(reinterpret_cast<const unsigned char*>(v.data()),
                                   v.size() * sizeof(double));
        j["fields"].push_back(std::move(jf));
    }
    return j.dump(2) + "\n";
}

GridDoc from_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail_invalid(std::string("grid file: malformed JSON: ") + e.what());
    }
    try {
        require(j.at("format_version").get<int>() == 1, ErrorKind::invalid_argument,
                "grid file: unsupported format_version");
        std::string kind = j.at("kind").get<std::string>();
        int dim = 0;
        if (kind == "grid1d") dim = 1;
        else if (kind == "grid2d") dim = 2;
        else if (kind == "grid3d") dim = 3;
        else fail_invalid("grid file: unknown kind '" + kind + "'");

        auto shape = j.at("shape").get<std::vector<std::size_t>>();
        auto origin = j.at("origin").get<std::vector<double>>();
        auto spacing = j.at("spacing").get<std::vector<double>>();
        require(static_cast<int>(shape.size()) == dim && static_cast<int>(origin.size()) == dim &&
                    static_cast<int>(spacing.size()) == dim,
                ErrorKind::invalid_argument, "grid file: shape/origin/spacing length != dimension");

        std::array<std::size_t, 3> sh{1, 1, 1};
        std::array<double, 3> org{0, 0, 0}, sp{1, 1, 1};
        for (int a = 0; a < dim; ++a) {
            sh[static_cast<std::size_t>(a)] = shape[static_cast<std::size_t>(a)];
            org[static_cast<std::size_t>(a)] = origin[static_cast<std::size_t>(a)];
            sp[static_cast<std::size_t>(a)] = spacing[static_cast<std::size_t>(a)];
        }

        GridDoc doc;
        for (const auto& jf : j.at("fields")) {
            std::string name = jf.at("name").get<std::string>();
            int comps = jf.at("components").get<int>();
            require(jf.at("dtype").get<std::string>() == "f64", ErrorKind::invalid_argument,
                    "grid file: only dtype f64 is supported");
            require(jf.at("layout").get<std::string>() == "row-major", ErrorKind::invalid_argument,
                    "grid file: only row-major layout is supported");
            auto bytes = base64_decode(jf.at("data").get<std::string>());
            GridField f(dim, sh, org, sp, comps);
            require(bytes.size() == f.values().size() * sizeof(double), ErrorKind::invalid_argument,
                    "grid file: field '" + name + "' has wrong data length");
            std::memcpy(f.values().data(), bytes.data(), bytes.size());
            doc.add(name, std::move(f));
        }
        require(!doc.fields.empty(), ErrorKind::invalid_argument, "grid file: no fields");
        return doc;
    } catch (const json::exception& e) {
        fail_invalid(std::string("grid file: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot open '" + path + "' for writing");
    out << text;
    if (!out) fail_io("write failed for '" + path + "'");
}

void write_grid_file(const std::string& path, const GridDoc& doc) { write_file(path, to_text(doc)); }

GridDoc read_grid_file(const std::string& path) { return from_text(read_file(path)); }

}  // namespace g2sf
