#include "wiresim/fft.hpp"

#include <cmath>
#include <stdexcept>

#include "wiresim/threading.hpp"

namespace wiresim {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

// Largest prime handled by the generic mixed-radix butterfly. Beyond this
// the O(p^2) combine loses to Bluestein.
constexpr std::size_t kMaxButterflyPrime = 37;

std::vector<std::size_t> factorize(std::size_t n)
{
    std::vector<std::size_t> factors;
    for (std::size_t p = 2; p * p <= n; p == 2 ? p = 3 : p += 2) {
        while (n % p == 0) {
            factors.push_back(p);
            n /= p;
        }
    }
    if (n > 1) factors.push_back(n);
    return factors;
}

std::size_t next_pow2(std::size_t n)
{
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

}  // namespace

FftPlan::FftPlan(std::size_t n) : m_n(n)
{
    if (n == 0) throw std::invalid_argument("FftPlan: transform length must be >= 1");

    m_factors = factorize(n);
    m_use_bluestein = !m_factors.empty() && m_factors.back() > kMaxButterflyPrime;

    if (!m_use_bluestein) {
        m_twiddles.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = -2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
            m_twiddles[j] = {std::cos(ang), std::sin(ang)};
        }
        return;
    }

    // Bluestein: DFT as a circular convolution with a chirp, evaluated at a
    // convenient power-of-two length.
    m_conv_n = next_pow2(2 * n - 1);
    m_conv_plan = std::make_unique<FftPlan>(m_conv_n);
    m_chirp.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        // angle = -pi * k^2 / n, with k^2 reduced mod 2n to keep it exact
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = -kPi * static_cast<double>(k2) / static_cast<double>(n);
        m_chirp[k] = {std::cos(ang), std::sin(ang)};
    }
    std::vector<cdouble> b(m_conv_n, cdouble{0.0, 0.0});
    b[0] = std::conj(m_chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
        b[k] = std::conj(m_chirp[k]);
        b[m_conv_n - k] = b[k];
    }
    std::vector<cdouble> scratch(m_conv_plan->scratch_size());
    m_conv_plan->forward_unscaled(b.data(), scratch.data());
    m_chirp_spec = std::move(b);
}

std::size_t FftPlan::scratch_size() const
{
    if (m_use_bluestein) return 2 * m_conv_n + m_conv_plan->scratch_size();
    return m_n;
}

void FftPlan::execute(cdouble* data, FftDirection dir) const
{
    std::vector<cdouble> scratch(scratch_size());
    execute(data, dir, scratch.data());
}

void FftPlan::execute(cdouble* data, FftDirection dir, cdouble* scratch) const
{
    if (dir == FftDirection::forward) {
        forward_unscaled(data, scratch);
        return;
    }
    // inverse via conjugation: ifft(x) = conj(fft(conj(x))) / n
    for (std::size_t i = 0; i < m_n; ++i) data[i] = std::conj(data[i]);
    forward_unscaled(data, scratch);
    const double inv = 1.0 / static_cast<double>(m_n);
    for (std::size_t i = 0; i < m_n; ++i) data[i] = std::conj(data[i]) * inv;
}

void FftPlan::forward_unscaled(cdouble* data, cdouble* scratch) const
{
    if (m_n == 1) return;
    if (m_use_bluestein) {
        bluestein(data, scratch);
        return;
    }
    mixed_radix(data, 1, scratch, m_n, 0, 1);
    for (std::size_t i = 0; i < m_n; ++i) data[i] = scratch[i];
}

// Decimation-in-time over the factor list. Reads `len` samples from `in`
// with the given stride, writes the contiguous transform to `out`.
void FftPlan::mixed_radix(const cdouble* in, std::size_t stride, cdouble* out, std::size_t len,
                          std::size_t factor_idx, std::size_t tw_stride) const
{
    if (len == 1) {
        out[0] = in[0];
        return;
    }
    const std::size_t p = m_factors[factor_idx];
    const std::size_t m = len / p;

    for (std::size_t r = 0; r < p; ++r)
        mixed_radix(in + r * stride, stride * p, out + r * m, m, factor_idx + 1, tw_stride * p);

    // Combine the p sub-transforms: for each output column k2, the p values
    // out[r*m + k2] are rotated by the level twiddle and mixed by a size-p
    // DFT. tw_stride maps level twiddles onto the full-size table.
    cdouble col[kMaxButterflyPrime];
    for (std::size_t k2 = 0; k2 < m; ++k2) {
        col[0] = out[k2];
        for (std::size_t r = 1; r < p; ++r)
            col[r] = out[r * m + k2] * m_twiddles[(r * k2 * tw_stride) % m_n];
        for (std::size_t k1 = 0; k1 < p; ++k1) {
            cdouble acc = col[0];
            for (std::size_t r = 1; r < p; ++r)
                acc += col[r] * m_twiddles[(r * k1 * m * tw_stride) % m_n];
            out[k1 * m + k2] = acc;
        }
    }
}

void FftPlan::bluestein(cdouble* data, cdouble* scratch) const
{
    cdouble* a = scratch;
    cdouble* sub_scratch = scratch + m_conv_n;

    for (std::size_t k = 0; k < m_n; ++k) a[k] = data[k] * m_chirp[k];
    for (std::size_t k = m_n; k < m_conv_n; ++k) a[k] = cdouble{0.0, 0.0};

    m_conv_plan->forward_unscaled(a, sub_scratch);
    for (std::size_t k = 0; k < m_conv_n; ++k) a[k] *= m_chirp_spec[k];
    // inverse convolution transform, unscaled conj trick
    for (std::size_t k = 0; k < m_conv_n; ++k) a[k] = std::conj(a[k]);
    m_conv_plan->forward_unscaled(a, sub_scratch);
    const double inv = 1.0 / static_cast<double>(m_conv_n);
    for (std::size_t k = 0; k < m_n; ++k) data[k] = std::conj(a[k]) * inv * m_chirp[k];
}

std::vector<cdouble> dft_1d(const std::vector<cdouble>& x, FftDirection dir)
{
    FftPlan plan(x.size());
    std::vector<cdouble> out = x;
    plan.execute(out.data(), dir);
    return out;
}

Matrix<cdouble> fft_2d(const Matrix<cdouble>& a, FftDirection dir, int workers)
{
    if (a.rows < 1 || a.cols < 1) throw std::invalid_argument("fft_2d: both dimensions must be >= 1");

    Matrix<cdouble> out = a;
    const FftPlan row_plan(a.cols);
    const FftPlan col_plan(a.rows);

    // along ticks: one transform per row
    parallel_for(a.rows, workers, [&](std::size_t begin, std::size_t end, int) {
        std::vector<cdouble> scratch(row_plan.scratch_size());
        for (std::size_t r = begin; r < end; ++r)
            row_plan.execute(out.row_ptr(r), dir, scratch.data());
    });

    // along wires: one transform per column, gathered through a contiguous buffer
    parallel_for(a.cols, workers, [&](std::size_t begin, std::size_t end, int) {
        std::vector<cdouble> scratch(col_plan.scratch_size());
        std::vector<cdouble> column(a.rows);
        for (std::size_t c = begin; c < end; ++c) {
            for (std::size_t r = 0; r < a.rows; ++r) column[r] = out.at(r, c);
            col_plan.execute(column.data(), dir, scratch.data());
            for (std::size_t r = 0; r < a.rows; ++r) out.at(r, c) = column[r];
        }
    });

    return out;
}

}  // namespace wiresim
