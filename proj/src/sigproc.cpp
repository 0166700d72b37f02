#include "wiresim/sigproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "wiresim/threading.hpp"

namespace wiresim {

SignalBatch apply_filter(const SignalBatch& batch, std::span<const cdouble> filter)
{
    batch.validate();
    if (filter.size() != batch.data.cols)
        throw std::invalid_argument("apply_filter: filter length " + std::to_string(filter.size()) +
                                    " does not match " + std::to_string(batch.data.cols) + " columns");
    SignalBatch out = batch;
    for (std::size_t r = 0; r < out.data.rows; ++r) {
        cdouble* row = out.data.row_ptr(r);
        for (std::size_t c = 0; c < out.data.cols; ++c) row[c] *= filter[c];
    }
    return out;
}

SignalBatch apply_filter(const SignalBatch& batch, std::span<const double> filter)
{
    std::vector<cdouble> complex_filter(filter.begin(), filter.end());
    return apply_filter(batch, std::span<const cdouble>(complex_filter));
}

RowIdftResult idft_rows_to_real(const SignalBatch& batch, int workers)
{
    batch.validate();
    const std::size_t rows = batch.data.rows;
    const std::size_t cols = batch.data.cols;
    const FftPlan plan(cols);

    RowIdftResult result;
    result.values = Matrix<double>(rows, cols);
    std::vector<double> worst(std::max<std::size_t>(1, static_cast<std::size_t>(std::max(1, workers))), 0.0);

    parallel_for(rows, workers, [&](std::size_t begin, std::size_t end, int worker) {
        std::vector<cdouble> line(cols);
        std::vector<cdouble> scratch(plan.scratch_size());
        double peak = 0.0, residue = 0.0;
        for (std::size_t r = begin; r < end; ++r) {
            const cdouble* src = batch.data.row_ptr(r);
            std::copy(src, src + cols, line.begin());
            plan.execute(line.data(), FftDirection::inverse, scratch.data());
            double* dst = result.values.row_ptr(r);
            for (std::size_t c = 0; c < cols; ++c) {
                dst[c] = line[c].real();
                peak = std::max(peak, std::abs(line[c].real()));
                residue = std::max(residue, std::abs(line[c].imag()));
            }
        }
        worst[static_cast<std::size_t>(worker)] = peak > 0.0 ? residue / peak : residue;
    });

    for (double w : worst) result.max_rel_imag = std::max(result.max_rel_imag, w);
    if (result.max_rel_imag > 1e-6)
        std::fprintf(stderr, "idft_rows_to_real: imaginary residue %.3e relative (input not Hermitian?)\n",
                     result.max_rel_imag);
    return result;
}

Matrix<double> extract_block(const Matrix<double>& m, std::size_t start_row, std::size_t n_rows)
{
    if (start_row + n_rows > m.rows)
        throw std::out_of_range("extract_block: rows [" + std::to_string(start_row) + "," +
                                std::to_string(start_row + n_rows) + ") exceed " + std::to_string(m.rows));
    Matrix<double> out(n_rows, m.cols);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const double* src = m.row_ptr(start_row + r);
        std::copy(src, src + m.cols, out.row_ptr(r));
    }
    return out;
}

double row_median(std::span<const double> signal)
{
    if (signal.empty()) throw std::invalid_argument("row_median: empty input");
    std::vector<double> work(signal.begin(), signal.end());
    const std::size_t n = work.size();
    const std::size_t mid = n / 2;
    std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(mid), work.end());
    const double upper = work[mid];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lower + upper) / 2.0;
}

double row_median_by_sort(std::span<const double> signal)
{
    if (signal.empty()) throw std::invalid_argument("row_median_by_sort: empty input");
    std::vector<double> work(signal.begin(), signal.end());
    std::sort(work.begin(), work.end());
    const std::size_t n = work.size();
    if (n % 2 == 1) return work[n / 2];
    return (work[n / 2 - 1] + work[n / 2]) / 2.0;
}

ChainResult sigproc_chain(const SignalBatch& batch, std::span<const cdouble> filter, int workers)
{
    const SignalBatch filtered = apply_filter(batch, filter);
    RowIdftResult waveforms = idft_rows_to_real(filtered, workers);

    ChainResult result;
    result.max_rel_imag = waveforms.max_rel_imag;
    result.block = extract_block(waveforms.values, batch.pad_rows, batch.out_rows);
    result.medians.resize(batch.out_rows);
    parallel_for(batch.out_rows, workers, [&](std::size_t begin, std::size_t end, int) {
        for (std::size_t r = begin; r < end; ++r)
            result.medians[r] = row_median(std::span<const double>(result.block.row_ptr(r), result.block.cols));
    });
    return result;
}

}  // namespace wiresim
