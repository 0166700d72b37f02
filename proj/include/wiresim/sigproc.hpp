#ifndef WIRESIM_SIGPROC_HPP
#define WIRESIM_SIGPROC_HPP

// Batched signal filtering: per-row frequency-domain multiply, inverse DFT
// back to real waveforms, padded-block extraction and per-row medians.
// Rows are independent, so every operation is row-parallel with
// thread-count-invariant output.

#include <span>
#include <vector>

#include "wiresim/core.hpp"
#include "wiresim/fft.hpp"

namespace wiresim {

/// A batch of constant-size signals: one row per signal, one column per
/// frequency sample. pad_rows guard rows precede the out_rows of interest.
struct SignalBatch {
    Matrix<cdouble> data;
    std::size_t pad_rows = 0;
    std::size_t out_rows = 0;

    void validate() const {
        if (data.cols < 1) throw std::invalid_argument("SignalBatch: need at least one column");
        if (pad_rows + out_rows > data.rows)
            throw std::invalid_argument("SignalBatch: pad_rows + out_rows exceeds the row count");
    }
};

/// out[r][c] = data[r][c] * filter[c].
SignalBatch apply_filter(const SignalBatch& batch, std::span<const cdouble> filter);
SignalBatch apply_filter(const SignalBatch& batch, std::span<const double> filter);

struct RowIdftResult {
    Matrix<double> values;
    double max_rel_imag = 0.0;  // worst per-sample imaginary residue over peak, reported if > 1e-6
};

/// Inverse DFT along each row (the time axis), real part kept. The axis
/// choice is isolated here; transpose inputs to flip it.
RowIdftResult idft_rows_to_real(const SignalBatch& batch, int workers = 1);

/// Rows [start_row, start_row + n_rows), all columns.
Matrix<double> extract_block(const Matrix<double>& m, std::size_t start_row, std::size_t n_rows);

/// Median by selection; even length averages the two central order
/// statistics. Cost O(n) expected.
double row_median(std::span<const double> signal);

/// Median by full sort; must agree with row_median exactly.
double row_median_by_sort(std::span<const double> signal);

struct ChainResult {
    Matrix<double> block;
    std::vector<double> medians;  // one per extracted row
    double max_rel_imag = 0.0;
};

/// filter -> inverse DFT -> block [pad_rows, pad_rows + out_rows) -> medians.
ChainResult sigproc_chain(const SignalBatch& batch, std::span<const cdouble> filter, int workers = 1);

}  // namespace wiresim

#endif
