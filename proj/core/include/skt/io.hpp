#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "skt/types.hpp"

namespace skt::io {

// Ensemble snapshot CSV: header x0,...,x{d-1}, one particle per row,
// 17 significant digits.
void write_ensemble_csv(const std::filesystem::path& path, const RowMatrix& states);
// Throws IoError("<path>:<line>: ...") on malformed content.
RowMatrix read_ensemble_csv(const std::filesystem::path& path);

// One value per line, no header.
void write_vector(const std::filesystem::path& path, const Vector& v);
Vector read_vector(const std::filesystem::path& path);

// Generic numeric CSV matrix without header (reconstruction grids).
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Formats a double with 17 significant digits.
std::string format_double(double v);

// Hex SHA-256 of a byte string / file contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace skt::io
