#include "wiresim/gridio.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace wiresim {

static_assert(std::endian::native == std::endian::little,
              "grid files are little-endian; byte-swapping I/O is not implemented");

namespace {

constexpr char kMagic[4] = {'W', 'C', 'G', '1'};

struct Header {
    char magic[4];
    std::uint8_t dtype;
    std::uint8_t reserved[3];
    std::uint64_t rows;
    std::uint64_t cols;
};

template <typename T>
void write_impl(const std::filesystem::path& path, const Matrix<T>& m, GridDtype dtype)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_grid: cannot open " + path.string());

    Header h{};
    std::memcpy(h.magic, kMagic, 4);
    h.dtype = static_cast<std::uint8_t>(dtype);
    h.rows = m.rows;
    h.cols = m.cols;
    out.write(h.magic, 4);
    out.put(static_cast<char>(h.dtype));
    out.write(reinterpret_cast<const char*>(h.reserved), 3);
    out.write(reinterpret_cast<const char*>(&h.rows), 8);
    out.write(reinterpret_cast<const char*>(&h.cols), 8);
    if (!m.data.empty())
        out.write(reinterpret_cast<const char*>(m.data.data()),
                  static_cast<std::streamsize>(m.data.size() * sizeof(T)));
    if (!out) throw std::runtime_error("write_grid: short write to " + path.string());
}

template <typename T>
Matrix<T> read_payload(std::ifstream& in, std::uint64_t rows, std::uint64_t cols,
                       const std::filesystem::path& path)
{
    // reject corrupt headers before allocating
    const std::uintmax_t available = std::filesystem::file_size(path);
    if (rows != 0 && cols != 0 &&
        (cols > available / sizeof(T) / rows))
        throw std::runtime_error("read_grid: truncated payload in " + path.string() + " (header claims " +
                                 std::to_string(rows) + "x" + std::to_string(cols) + ")");
    Matrix<T> m(rows, cols);
    if (!m.data.empty()) {
        in.read(reinterpret_cast<char*>(m.data.data()),
                static_cast<std::streamsize>(m.data.size() * sizeof(T)));
        if (static_cast<std::size_t>(in.gcount()) != m.data.size() * sizeof(T))
            throw std::runtime_error("read_grid: truncated payload in " + path.string() + " (expected " +
                                     std::to_string(m.data.size() * sizeof(T)) + " bytes)");
    }
    return m;
}

}  // namespace

void write_grid(const std::filesystem::path& path, const Matrix<std::int64_t>& m)
{
    write_impl(path, m, GridDtype::i64);
}

void write_grid(const std::filesystem::path& path, const Matrix<double>& m)
{
    write_impl(path, m, GridDtype::f64);
}

void write_grid(const std::filesystem::path& path, const Matrix<cdouble>& m)
{
    write_impl(path, m, GridDtype::c128);
}

AnyGrid read_grid(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_grid: cannot open " + path.string());

    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
        std::string found;
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "%02x", static_cast<unsigned char>(magic[i]));
            found += buf;
        }
        throw std::runtime_error("read_grid: bad magic in " + path.string() + " (found bytes 0x" + found +
                                 ", expected \"WCG1\")");
    }

    std::uint8_t dtype_code = 0;
    std::uint8_t reserved[3];
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&dtype_code), 1);
    in.read(reinterpret_cast<char*>(reserved), 3);
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    if (!in) throw std::runtime_error("read_grid: truncated header in " + path.string());

    switch (static_cast<GridDtype>(dtype_code)) {
        case GridDtype::i64:
            return read_payload<std::int64_t>(in, rows, cols, path);
        case GridDtype::f64:
            return read_payload<double>(in, rows, cols, path);
        case GridDtype::c128:
            return read_payload<cdouble>(in, rows, cols, path);
    }
    throw std::runtime_error("read_grid: unknown dtype code " + std::to_string(dtype_code) + " in " +
                             path.string());
}

Matrix<std::int64_t> read_grid_i64(const std::filesystem::path& path)
{
    AnyGrid g = read_grid(path);
    if (auto* m = std::get_if<Matrix<std::int64_t>>(&g)) return std::move(*m);
    throw std::runtime_error("read_grid_i64: " + path.string() + " does not hold an i64 grid");
}

Matrix<double> read_grid_f64(const std::filesystem::path& path)
{
    AnyGrid g = read_grid(path);
    if (auto* m = std::get_if<Matrix<double>>(&g)) return std::move(*m);
    throw std::runtime_error("read_grid_f64: " + path.string() + " does not hold an f64 grid");
}

Matrix<cdouble> read_grid_c128(const std::filesystem::path& path)
{
    AnyGrid g = read_grid(path);
    if (auto* m = std::get_if<Matrix<cdouble>>(&g)) return std::move(*m);
    throw std::runtime_error("read_grid_c128: " + path.string() + " does not hold a c128 grid");
}

}  // namespace wiresim
