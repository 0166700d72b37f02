#ifndef WIRESIM_FFT_HPP
#define WIRESIM_FFT_HPP

// Arbitrary-length DFT engine: mixed-radix Cooley-Tukey for lengths whose
// prime factors are small, Bluestein's chirp-z algorithm for the rest. The
// signal-processing workload runs at N = 6000 = 2^4*3*5^3, so power-of-two
// padding is not an option.
//
// Conventions: forward X_k = sum_n x_n exp(-2*pi*i*n*k/N); the inverse
// carries the 1/N factor, so inverse(forward(x)) = x.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "wiresim/core.hpp"

namespace wiresim {

enum class FftDirection { forward, inverse };

using cdouble = std::complex<double>;

/// Reusable transform plan for one length: factorization, twiddle table and
/// (when needed) the Bluestein chirp kernel. Plans are immutable after
/// construction and safe to share between threads.
class FftPlan {
  public:
    explicit FftPlan(std::size_t n);

    std::size_t size() const { return m_n; }

    /// In-place transform of exactly size() samples. `scratch` must hold at
    /// least scratch_size() elements; passing it explicitly lets batch
    /// callers reuse one buffer per worker.
    void execute(cdouble* data, FftDirection dir, cdouble* scratch) const;
    void execute(cdouble* data, FftDirection dir) const;

    std::size_t scratch_size() const;

  private:
    void forward_unscaled(cdouble* data, cdouble* scratch) const;
    void mixed_radix(const cdouble* in, std::size_t stride, cdouble* out, std::size_t len,
                     std::size_t factor_idx, std::size_t tw_stride) const;
    void bluestein(cdouble* data, cdouble* scratch) const;

    std::size_t m_n;
    std::vector<std::size_t> m_factors;  // smallest-first, product == m_n
    std::vector<cdouble> m_twiddles;     // exp(-2*pi*i*j/n)

    // Bluestein state (only when some prime factor is too large).
    bool m_use_bluestein = false;
    std::size_t m_conv_n = 0;  // power of two >= 2n-1
    std::unique_ptr<FftPlan> m_conv_plan;
    std::vector<cdouble> m_chirp;        // exp(-i*pi*k^2/n)
    std::vector<cdouble> m_chirp_spec;   // forward FFT of the wrapped conjugate chirp
};

/// One-shot transform (plans internally; prefer FftPlan for batches).
std::vector<cdouble> dft_1d(const std::vector<cdouble>& x, FftDirection dir);

/// 2D transform by row-column decomposition: along ticks (within each row)
/// first, then along wires. Lines are independent, so row/column passes may
/// run on several workers with thread-count-invariant output.
Matrix<cdouble> fft_2d(const Matrix<cdouble>& a, FftDirection dir, int workers = 1);

}  // namespace wiresim

#endif
