#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "actopo/matrix.hpp"

// Minimal NPY v1.0 reader/writer: little-endian, C-order, the element types
// the extraction adapter emits. Not a general NPY implementation.
namespace actopo::npy {

struct Header {
    std::string descr;
    bool fortran_order = false;
    std::vector<std::size_t> shape;
};

Header parse_header(const std::string& dict_text, const std::string& path);

/// Reads a 2-D float array ('<f4' widened, or '<f8').
Matrix read_matrix(const std::filesystem::path& path);

/// Reads a 1-D integer array ('<i4' or '<i8').
std::vector<std::int64_t> read_int_vector(const std::filesystem::path& path);

enum class FloatWidth { f4, f8 };

void write_matrix(const Matrix& m, const std::filesystem::path& path, FloatWidth width = FloatWidth::f8);
void write_int_vector(const std::vector<std::int64_t>& v, const std::filesystem::path& path);

/// True when the file starts with the "\x93NUMPY" magic.
bool has_magic(const std::filesystem::path& path);

}  // namespace actopo::npy
