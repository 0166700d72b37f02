#ifndef WIRESIM_SPECTRAL_HPP
#define WIRESIM_SPECTRAL_HPP

// Frequency-domain assembly of the measurement: response-kernel
// construction, the FT / multiply / IFT convolution, additive noise and
// ADC digitization.

#include <cstdint>
#include <vector>

#include "wiresim/core.hpp"
#include "wiresim/fft.hpp"

namespace wiresim {

enum class PlaneKind { induction, collection };

struct ResponseParams {
    PlaneKind plane_kind = PlaneKind::collection;
    double field_sigma_t = 1.0;   // us; 0 selects a single-bin delta
    double shaper_peaking = 2.0;  // us; 0 selects a single-sample delta
    int shaper_order = 2;
    double gain = 14.0;           // output units per electron
    // cross-wire coupling, odd length, centered on lag 0; default single wire
    std::vector<double> wire_weights{1.0};
};

/// Pre-computed detector response in the frequency domain, over the padded
/// grid dimensions. Time-domain support is kept so the convolution can
/// check that wrap-around stays inside the padding.
struct ResponseKernel {
    GridSpec spec;
    Matrix<cdouble> values;
    ResponseParams params;
    long support_ticks = 0;  // max |tick lag| of the time-domain kernel
    long support_wires = 0;  // max |wire lag|
};

/// Field response (unipolar Gaussian for collection planes, its bipolar
/// first derivative for induction planes) convolved with a semi-Gaussian
/// shaper, scaled so a collection kernel's time-domain samples sum to the
/// gain, placed at origin (0,0) with negative lags wrapped, transformed.
ResponseKernel build_response(const GridSpec& spec, const ResponseParams& params);

/// M = IFT(R . FT(S)). The imaginary residue of the inverse transform must
/// stay below 1e-9 of the real peak and is discarded.
MeasurementGrid convolve(const ChargeGrid& s, const ResponseKernel& r, int workers = 1);

enum class NoiseMode { off, white, spectrum };

struct NoiseModel {
    NoiseMode mode = NoiseMode::off;
    double sigma = 0.0;  // white-noise std dev, output units
    std::vector<double> amplitude_spectrum;  // per-frequency amplitude, length = padded n_ticks
};

/// Additive electronics noise. White noise draws per-wire substream
/// normals; spectrum mode synthesizes each wire's waveform from the given
/// amplitudes with uniform random phases (Hermitian-symmetrized so the
/// waveform is real).
MeasurementGrid add_noise(const MeasurementGrid& m, const NoiseModel& model, std::uint64_t seed,
                          int workers = 1);

/// adc = clamp(round(m*scale + offset), 0, 2^bits - 1), bits in [1,16].
Matrix<std::int32_t> digitize(const MeasurementGrid& m, double scale, double offset, int bits);

}  // namespace wiresim

#endif
