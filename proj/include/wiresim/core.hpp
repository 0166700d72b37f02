#ifndef WIRESIM_CORE_HPP
#define WIRESIM_CORE_HPP

// Domain types shared by the whole simulation chain. Units are fixed
// project-wide: time in microseconds, length in millimeters, charge in
// electron counts.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wiresim {

/// Dense row-major 2D array. Rows index wires, columns index ticks
/// everywhere a matrix represents the readout plane.
template <typename T>
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

    T& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const T& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    T* row_ptr(std::size_t r) { return data.data() + r * cols; }
    const T* row_ptr(std::size_t r) const { return data.data() + r * cols; }

    std::size_t size() const { return data.size(); }

    bool operator==(const Matrix&) const = default;
};

/// Readout-plane geometry. The allocated grid is the active region plus a
/// guard band of pad_wires/pad_ticks on each side; the padding absorbs the
/// circular wrap-around of the frequency-domain convolution.
struct GridSpec {
    std::size_t n_wires = 1000;
    std::size_t n_ticks = 6000;
    std::size_t pad_wires = 100;
    std::size_t pad_ticks = 100;
    double pitch = 5.0;     // mm per wire
    double tick = 0.5;      // us per tick
    double origin_x = 0.0;  // mm, low edge of wire 0
    double origin_t = 0.0;  // us, low edge of tick 0

    std::size_t padded_wires() const { return n_wires + 2 * pad_wires; }
    std::size_t padded_ticks() const { return n_ticks + 2 * pad_ticks; }

    void validate() const {
        if (n_wires < 1 || n_ticks < 1) throw std::invalid_argument("GridSpec: active grid must be at least 1x1");
        if (pitch <= 0.0) throw std::invalid_argument("GridSpec: pitch must be > 0");
        if (tick <= 0.0) throw std::invalid_argument("GridSpec: tick must be > 0");
    }
};

/// One energy deposition: a Gaussian cloud of ionization electrons arriving
/// at the readout plane. `id` doubles as the RNG substream index so results
/// do not depend on processing order.
struct Depo {
    std::int64_t id = 0;
    double t = 0.0;        // us
    double x = 0.0;        // mm
    std::int64_t q = 0;    // electrons
    double sigma_t = 0.0;  // us
    double sigma_x = 0.0;  // mm
};

/// Small dense block of per-bin values with its placement on the padded
/// grid. ProbPatch holds bin probabilities (sums to 1), CountPatch holds
/// fluctuated integer electron counts.
template <typename T>
struct BasicPatch {
    long wire_offset = 0;  // padded-grid row of patch row 0
    long tick_offset = 0;  // padded-grid column of patch column 0
    std::size_t n_w = 0;
    std::size_t n_t = 0;
    std::vector<T> values;  // row-major, row = wire

    T& at(std::size_t w, std::size_t t) { return values[w * n_t + t]; }
    const T& at(std::size_t w, std::size_t t) const { return values[w * n_t + t]; }
    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
};

using ProbPatch = BasicPatch<double>;
using CountPatch = BasicPatch<std::int64_t>;

/// The large accumulation grid holding the binned charge distribution.
/// Integer counts keep parallel accumulation exactly associative.
struct ChargeGrid {
    GridSpec spec;
    Matrix<std::int64_t> counts;

    explicit ChargeGrid(const GridSpec& s = GridSpec{}) : spec(s), counts(s.padded_wires(), s.padded_ticks()) {}
};

/// Real-valued grid produced by the response convolution (and noise).
struct MeasurementGrid {
    GridSpec spec;
    Matrix<double> samples;

    explicit MeasurementGrid(const GridSpec& s = GridSpec{}) : spec(s), samples(s.padded_wires(), s.padded_ticks()) {}
};

/// Where a depo lands on the padded grid: its center bin and the inclusive
/// bin rectangle covering +-n_sigma of its widths. Bounds may extend
/// outside the padded grid; callers clip.
struct GridFootprint {
    long center_wire = 0;
    long center_tick = 0;
    long wire_lo = 0, wire_hi = 0;  // inclusive
    long tick_lo = 0, tick_hi = 0;  // inclusive
};

GridFootprint map_depo_to_grid(const Depo& depo, const GridSpec& spec, double n_sigma);

}  // namespace wiresim

#endif
