#include "wiresim/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wiresim/rasterize.hpp"
#include "wiresim/rng.hpp"
#include "wiresim/threading.hpp"

namespace wiresim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Amplitude below which the semi-Gaussian shaper tail is treated as ended.
constexpr double kShaperTailCut = 1e-14;

// stream-id salts so noise never shares a substream with fluctuation
constexpr std::uint64_t kWhiteNoiseSalt = 0x77686974656e6f69ULL;
constexpr std::uint64_t kSpectrumNoiseSalt = 0x737065636e6f6973ULL;

double gauss_pdf(double t, double sigma)
{
    const double z = t / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
}

// Field response samples over tick lags [-half, +half], bins centered on
// the lag. Collection: bin-integrated unit-area Gaussian. Induction: the
// bin-integrated first derivative (telescoping Gaussian differences),
// scaled to a unit positive lobe.
std::vector<double> field_samples(const ResponseParams& params, double tick, long& half)
{
    if (params.field_sigma_t <= 0.0) {
        half = 0;
        return {1.0};
    }
    const double sigma = params.field_sigma_t;
    half = static_cast<long>(std::ceil(8.0 * sigma / tick));
    const std::size_t n = static_cast<std::size_t>(2 * half + 1);
    std::vector<double> f(n);

    if (params.plane_kind == PlaneKind::collection) {
        const double lo = (-static_cast<double>(half) - 0.5) * tick;
        f = gauss_bin_integrals(0.0, sigma, lo, tick, n);
        double sum = 0.0;
        for (double v : f) sum += v;
        for (double& v : f) v /= sum;
        return f;
    }

    // induction: integral of g' over each bin is g(edge_hi) - g(edge_lo)
    double pos = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = (static_cast<double>(i) - static_cast<double>(half) - 0.5) * tick;
        const double hi = lo + tick;
        f[i] = gauss_pdf(hi, sigma) - gauss_pdf(lo, sigma);
        if (f[i] > 0.0) pos += f[i];
    }
    for (double& v : f) v /= pos;
    return f;
}

// Semi-Gaussian shaper s(t) = (t/tau)^n exp(-n(t/tau - 1)) sampled at tick
// steps from t = 0; unit peak at t = tau.
std::vector<double> shaper_samples(const ResponseParams& params, double tick)
{
    if (params.shaper_peaking <= 0.0) return {1.0};
    const double tau = params.shaper_peaking;
    const int order = params.shaper_order;
    std::vector<double> s;
    for (long k = 0;; ++k) {
        const double t = static_cast<double>(k) * tick;
        const double z = t / tau;
        const double v = std::pow(z, order) * std::exp(-static_cast<double>(order) * (z - 1.0));
        s.push_back(v);
        if (t > tau && v < kShaperTailCut) break;
        if (k > 2'000'000) throw std::runtime_error("build_response: shaper tail does not decay");
    }
    return s;
}

}  // namespace

ResponseKernel build_response(const GridSpec& spec, const ResponseParams& params)
{
    spec.validate();
    if (params.shaper_order < 1) throw std::invalid_argument("build_response: shaper_order must be >= 1");
    if (params.wire_weights.empty() || params.wire_weights.size() % 2 == 0)
        throw std::invalid_argument("build_response: wire_weights must have odd length");

    long field_half = 0;
    const std::vector<double> field = field_samples(params, spec.tick, field_half);
    const std::vector<double> shaper = shaper_samples(params, spec.tick);

    double shaper_sum = 0.0;
    for (double v : shaper) shaper_sum += v;
    const double amplitude = params.gain / shaper_sum;

    // combined kernel over lags [-field_half, field_half + len(shaper) - 1]
    const long lo_lag = -field_half;
    const std::size_t n_lags = field.size() + shaper.size() - 1;
    std::vector<double> combined(n_lags, 0.0);
    for (std::size_t i = 0; i < field.size(); ++i)
        for (std::size_t j = 0; j < shaper.size(); ++j) combined[i + j] += field[i] * shaper[j] * amplitude;

    ResponseKernel kernel;
    kernel.spec = spec;
    kernel.params = params;
    kernel.support_ticks = std::max<long>(-lo_lag, lo_lag + static_cast<long>(n_lags) - 1);
    kernel.support_wires = static_cast<long>(params.wire_weights.size() / 2);

    const std::size_t n_w = spec.padded_wires();
    const std::size_t n_t = spec.padded_ticks();
    if (n_lags > n_t)
        throw std::invalid_argument("build_response: kernel time support " + std::to_string(n_lags) +
                                    " exceeds the padded tick count " + std::to_string(n_t));
    if (params.wire_weights.size() > n_w)
        throw std::invalid_argument("build_response: wire_weights exceed the padded wire count");

    Matrix<cdouble> kernel_td(n_w, n_t);
    const long w_half = kernel.support_wires;
    for (long dw = -w_half; dw <= w_half; ++dw) {
        const double ww = params.wire_weights[static_cast<std::size_t>(dw + w_half)];
        if (ww == 0.0) continue;
        const std::size_t row = static_cast<std::size_t>((dw + static_cast<long>(n_w)) % static_cast<long>(n_w));
        for (std::size_t i = 0; i < n_lags; ++i) {
            const long lag = lo_lag + static_cast<long>(i);
            const std::size_t col =
                static_cast<std::size_t>((lag + static_cast<long>(n_t)) % static_cast<long>(n_t));
            kernel_td.at(row, col) += ww * combined[i];
        }
    }

    kernel.values = fft_2d(kernel_td, FftDirection::forward);
    return kernel;
}

MeasurementGrid convolve(const ChargeGrid& s, const ResponseKernel& r, int workers)
{
    const std::size_t n_w = s.spec.padded_wires();
    const std::size_t n_t = s.spec.padded_ticks();
    if (r.values.rows != n_w || r.values.cols != n_t)
        throw std::invalid_argument("convolve: kernel dimensions do not match the padded grid");
    if (r.support_ticks > static_cast<long>(s.spec.pad_ticks) ||
        r.support_wires > static_cast<long>(s.spec.pad_wires))
        throw std::invalid_argument(
            "convolve: kernel support (" + std::to_string(r.support_wires) + " wires, " +
            std::to_string(r.support_ticks) + " ticks) exceeds the padding; pad_wires >= " +
            std::to_string(r.support_wires) + " and pad_ticks >= " + std::to_string(r.support_ticks) +
            " required");

    Matrix<cdouble> spectrum(n_w, n_t);
    for (std::size_t i = 0; i < spectrum.data.size(); ++i)
        spectrum.data[i] = cdouble{static_cast<double>(s.counts.data[i]), 0.0};

    spectrum = fft_2d(spectrum, FftDirection::forward, workers);
    for (std::size_t i = 0; i < spectrum.data.size(); ++i) spectrum.data[i] *= r.values.data[i];
    spectrum = fft_2d(spectrum, FftDirection::inverse, workers);

    double max_real = 0.0, max_imag = 0.0;
    for (const cdouble& v : spectrum.data) {
        max_real = std::max(max_real, std::abs(v.real()));
        max_imag = std::max(max_imag, std::abs(v.imag()));
    }
    if (max_real > 0.0 && max_imag > 1e-9 * max_real)
        throw std::runtime_error("convolve: imaginary residue " + std::to_string(max_imag) +
                                 " exceeds 1e-9 of the real peak " + std::to_string(max_real));

    MeasurementGrid m(s.spec);
    for (std::size_t i = 0; i < spectrum.data.size(); ++i) m.samples.data[i] = spectrum.data[i].real();
    return m;
}

MeasurementGrid add_noise(const MeasurementGrid& m, const NoiseModel& model, std::uint64_t seed,
                          int workers)
{
    if (model.sigma < 0.0) throw std::invalid_argument("add_noise: sigma must be >= 0");
    if (model.mode == NoiseMode::off) return m;
    if (model.mode == NoiseMode::white && model.sigma == 0.0) return m;

    MeasurementGrid out = m;
    const std::size_t n_w = m.samples.rows;
    const std::size_t n_t = m.samples.cols;

    if (model.mode == NoiseMode::white) {
        parallel_for(n_w, workers, [&](std::size_t begin, std::size_t end, int) {
            for (std::size_t w = begin; w < end; ++w) {
                StreamSource src(substream(seed ^ kWhiteNoiseSalt, w));
                double* row = out.samples.row_ptr(w);
                for (std::size_t t = 0; t < n_t; ++t) row[t] += model.sigma * src.normal();
            }
        });
        return out;
    }

    // spectrum mode
    if (model.amplitude_spectrum.size() != n_t)
        throw std::invalid_argument("add_noise: amplitude_spectrum length " +
                                    std::to_string(model.amplitude_spectrum.size()) +
                                    " does not match the padded tick count " + std::to_string(n_t));

    const FftPlan plan(n_t);
    parallel_for(n_w, workers, [&](std::size_t begin, std::size_t end, int) {
        std::vector<cdouble> freq(n_t);
        std::vector<cdouble> scratch(plan.scratch_size());
        for (std::size_t w = begin; w < end; ++w) {
            StreamSource src(substream(seed ^ kSpectrumNoiseSalt, w));
            const auto& amp = model.amplitude_spectrum;
            freq[0] = cdouble{amp[0] * std::cos(kTwoPi * src.uniform()), 0.0};
            for (std::size_t k = 1; k <= (n_t - 1) / 2; ++k) {
                const double phase = kTwoPi * src.uniform();
                freq[k] = std::polar(amp[k], phase);
                freq[n_t - k] = std::conj(freq[k]);
            }
            if (n_t % 2 == 0 && n_t >= 2)
                freq[n_t / 2] = cdouble{amp[n_t / 2] * std::cos(kTwoPi * src.uniform()), 0.0};
            plan.execute(freq.data(), FftDirection::inverse, scratch.data());
            double* row = out.samples.row_ptr(w);
            for (std::size_t t = 0; t < n_t; ++t) row[t] += freq[t].real();
        }
    });
    return out;
}

Matrix<std::int32_t> digitize(const MeasurementGrid& m, double scale, double offset, int bits)
{
    if (bits < 1 || bits > 16) throw std::invalid_argument("digitize: bits must be in [1,16]");
    const double max_code = static_cast<double>((1 << bits) - 1);
    Matrix<std::int32_t> adc(m.samples.rows, m.samples.cols);
    for (std::size_t i = 0; i < m.samples.data.size(); ++i) {
        const double v = std::round(m.samples.data[i] * scale + offset);
        adc.data[i] = static_cast<std::int32_t>(v < 0.0 ? 0.0 : (v > max_code ? max_code : v));
    }
    return adc;
}

}  // namespace wiresim
