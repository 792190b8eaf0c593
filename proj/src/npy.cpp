#include "actopo/npy.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <regex>

#include "actopo/error.hpp"
#include "actopo/text.hpp"

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

namespace actopo::npy {

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;

struct RawArray {
    Header header;
    std::vector<char> payload;
};

RawArray read_raw(const std::filesystem::path& path) {
    const std::string where = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestError(where + ": cannot open file");
    }
    char prefix[10] = {};
    in.read(prefix, sizeof prefix);
    if (in.gcount() < static_cast<std::streamsize>(sizeof prefix) || std::memcmp(prefix, kMagic, kMagicLen) != 0) {
        throw IngestError(where + ": bad magic bytes, not an NPY file");
    }
    const auto major = static_cast<unsigned char>(prefix[6]);
    const auto minor = static_cast<unsigned char>(prefix[7]);
    if (major != 1 || minor != 0) {
        throw IngestError(where + ": unsupported NPY version " + std::to_string(major) + "." + std::to_string(minor) +
                          " (only 1.0)");
    }
    const std::size_t header_len =
        static_cast<unsigned char>(prefix[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(prefix[9])) << 8);
    std::string dict(header_len, '\0');
    in.read(dict.data(), static_cast<std::streamsize>(header_len));
    if (static_cast<std::size_t>(in.gcount()) != header_len) {
        throw IngestError(where + ": truncated NPY header");
    }
    RawArray raw;
    raw.header = parse_header(dict, where);
    if (raw.header.fortran_order) {
        throw IngestError(where + ": Fortran-ordered arrays are not supported");
    }
    raw.payload.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return raw;
}

std::size_t element_count(const Header& h) {
    std::size_t n = 1;
    for (auto s : h.shape) {
        n *= s;
    }
    return n;
}

std::string shape_text(const std::vector<std::size_t>& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        s += std::to_string(shape[i]);
        s += (shape.size() == 1 || i + 1 < shape.size()) ? "," : "";
        if (i + 1 < shape.size()) {
            s += ' ';
        }
    }
    return s + ")";
}

void write_raw(const std::filesystem::path& path, const std::string& descr, const std::vector<std::size_t>& shape,
               const char* data, std::size_t bytes) {
    std::string dict = "{'descr': '" + descr + "', 'fortran_order': False, 'shape': " + shape_text(shape) + ", }";
    // Pad so magic + version + length + dict + '\n' is a multiple of 64.
    const std::size_t unpadded = kMagicLen + 2 + 2 + dict.size() + 1;
    dict.append((64 - unpadded % 64) % 64, ' ');
    dict.push_back('\n');

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IngestError(path.string() + ": cannot open for writing");
    }
    out.write(kMagic, kMagicLen);
    const char version[2] = {1, 0};
    out.write(version, 2);
    const char len[2] = {static_cast<char>(dict.size() & 0xff), static_cast<char>((dict.size() >> 8) & 0xff)};
    out.write(len, 2);
    out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
    out.write(data, static_cast<std::streamsize>(bytes));
}

}  // namespace

Header parse_header(const std::string& dict_text, const std::string& path) {
    static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
    static const std::regex fortran_re(R"('fortran_order'\s*:\s*(True|False))");
    static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
    Header h;
    std::smatch m;
    if (!std::regex_search(dict_text, m, descr_re)) {
        throw IngestError(path + ": NPY header lacks 'descr'");
    }
    h.descr = m[1].str();
    if (!std::regex_search(dict_text, m, fortran_re)) {
        throw IngestError(path + ": NPY header lacks 'fortran_order'");
    }
    h.fortran_order = m[1].str() == "True";
    if (!std::regex_search(dict_text, m, shape_re)) {
        throw IngestError(path + ": NPY header lacks 'shape'");
    }
    std::string dims = m[1].str();
    std::size_t pos = 0;
    while (pos < dims.size()) {
        auto comma = dims.find(',', pos);
        auto token = text::trim(std::string_view(dims).substr(pos, comma == std::string::npos ? std::string::npos
                                                                                              : comma - pos));
        if (!token.empty()) {
            auto v = text::parse_int(token);
            if (!v || *v < 0) {
                throw IngestError(path + ": malformed NPY shape '" + dims + "'");
            }
            h.shape.push_back(static_cast<std::size_t>(*v));
        }
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    return h;
}

bool has_magic(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    char prefix[kMagicLen] = {};
    in.read(prefix, kMagicLen);
    return in.gcount() == static_cast<std::streamsize>(kMagicLen) && std::memcmp(prefix, kMagic, kMagicLen) == 0;
}

Matrix read_matrix(const std::filesystem::path& path) {
    const std::string where = path.string();
    RawArray raw = read_raw(path);
    const Header& h = raw.header;
    if (h.shape.size() != 2) {
        throw IngestError(where + ": points array must be 2-D, got " + std::to_string(h.shape.size()) +
                          " dimensions");
    }
    const std::size_t count = element_count(h);
    Matrix m(h.shape[0], h.shape[1]);
    if (h.descr == "<f8") {
        if (raw.payload.size() < count * 8) {
            throw IngestError(where + ": truncated NPY payload");
        }
        std::memcpy(m.data().data(), raw.payload.data(), count * 8);
    } else if (h.descr == "<f4") {
        if (raw.payload.size() < count * 4) {
            throw IngestError(where + ": truncated NPY payload");
        }
        for (std::size_t i = 0; i < count; ++i) {
            float f = 0.0f;
            std::memcpy(&f, raw.payload.data() + i * 4, 4);
            m.data()[i] = static_cast<double>(f);
        }
    } else {
        throw IngestError(where + ": unsupported points dtype '" + h.descr + "' (expected <f4 or <f8)");
    }
    return m;
}

std::vector<std::int64_t> read_int_vector(const std::filesystem::path& path) {
    const std::string where = path.string();
    RawArray raw = read_raw(path);
    const Header& h = raw.header;
    if (h.shape.size() != 1) {
        throw IngestError(where + ": labels array must be 1-D");
    }
    const std::size_t count = h.shape[0];
    std::vector<std::int64_t> out(count);
    if (h.descr == "<i8") {
        if (raw.payload.size() < count * 8) {
            throw IngestError(where + ": truncated NPY payload");
        }
        std::memcpy(out.data(), raw.payload.data(), count * 8);
    } else if (h.descr == "<i4") {
        if (raw.payload.size() < count * 4) {
            throw IngestError(where + ": truncated NPY payload");
        }
        for (std::size_t i = 0; i < count; ++i) {
            std::int32_t v = 0;
            std::memcpy(&v, raw.payload.data() + i * 4, 4);
            out[i] = v;
        }
    } else {
        throw IngestError(where + ": unsupported labels dtype '" + h.descr + "' (expected <i4 or <i8)");
    }
    return out;
}

void write_matrix(const Matrix& m, const std::filesystem::path& path, FloatWidth width) {
    if (width == FloatWidth::f8) {
        write_raw(path, "<f8", {m.rows(), m.cols()}, reinterpret_cast<const char*>(m.data().data()),
                  m.data().size() * 8);
        return;
    }
    std::vector<float> narrow(m.data().begin(), m.data().end());
    write_raw(path, "<f4", {m.rows(), m.cols()}, reinterpret_cast<const char*>(narrow.data()), narrow.size() * 4);
}

void write_int_vector(const std::vector<std::int64_t>& v, const std::filesystem::path& path) {
    write_raw(path, "<i8", {v.size()}, reinterpret_cast<const char*>(v.data()), v.size() * 8);
}

}  // namespace actopo::npy
