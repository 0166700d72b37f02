#ifndef WIRESIM_GRIDIO_HPP
#define WIRESIM_GRIDIO_HPP

// Binary grid container. Layout, little-endian throughout:
//   magic   "WCG1"                      4 bytes
//   dtype   u8: 0=i64, 1=f64, 2=complex-f64 interleaved
//   reserved u8 x 3
//   n_rows  u64
//   n_cols  u64
//   payload row-major values
// Roundtrips are bitwise exact.

#include <cstdint>
#include <filesystem>
#include <variant>

#include "wiresim/core.hpp"
#include "wiresim/fft.hpp"

namespace wiresim {

enum class GridDtype : std::uint8_t { i64 = 0, f64 = 1, c128 = 2 };

using AnyGrid = std::variant<Matrix<std::int64_t>, Matrix<double>, Matrix<cdouble>>;

void write_grid(const std::filesystem::path& path, const Matrix<std::int64_t>& m);
void write_grid(const std::filesystem::path& path, const Matrix<double>& m);
void write_grid(const std::filesystem::path& path, const Matrix<cdouble>& m);

AnyGrid read_grid(const std::filesystem::path& path);

/// Typed readers; throw if the file holds a different dtype.
Matrix<std::int64_t> read_grid_i64(const std::filesystem::path& path);
Matrix<double> read_grid_f64(const std::filesystem::path& path);
Matrix<cdouble> read_grid_c128(const std::filesystem::path& path);

}  // namespace wiresim

#endif
