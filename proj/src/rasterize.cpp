#include "wiresim/rasterize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wiresim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

double now_s()
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

}  // namespace

Depo drift_depo(const Depo& depo, const DriftParams& params)
{
    if (params.drift_speed <= 0.0) throw std::invalid_argument("drift_depo: drift_speed must be > 0");
    if (depo.x < params.response_plane_x)
        throw std::domain_error("drift_depo: depo " + std::to_string(depo.id) + " at x=" +
                                std::to_string(depo.x) + " mm is behind the response plane at " +
                                std::to_string(params.response_plane_x) + " mm");

    const double dx = depo.x - params.response_plane_x;
    const double drift_time = dx / params.drift_speed;

    Depo out = depo;
    out.t = depo.t + drift_time;
    out.x = params.response_plane_x;
    // sigma'^2 = sigma^2 + 2*D*t_drift; the longitudinal term converts from
    // length to time through the drift speed.
    const double v2 = params.drift_speed * params.drift_speed;
    out.sigma_t = std::sqrt(depo.sigma_t * depo.sigma_t + 2.0 * params.diffusion_long * drift_time / v2);
    out.sigma_x = std::sqrt(depo.sigma_x * depo.sigma_x + 2.0 * params.diffusion_tran * drift_time);
    return out;
}

std::vector<double> gauss_bin_integrals(double center, double sigma, double lo_edge, double spacing,
                                        std::size_t n)
{
    std::vector<double> vals(n, 0.0);
    if (n == 0) return vals;
    if (sigma <= 0.0) {
        // degenerate delta: all mass to the bin containing the center
        auto idx = static_cast<long>(std::floor((center - lo_edge) / spacing));
        idx = std::clamp<long>(idx, 0, static_cast<long>(n) - 1);
        vals[static_cast<std::size_t>(idx)] = 1.0;
        return vals;
    }
    const double inv = kInvSqrt2 / sigma;
    double prev = std::erf((lo_edge - center) * inv);
    for (std::size_t i = 0; i < n; ++i) {
        const double next = std::erf((lo_edge + static_cast<double>(i + 1) * spacing - center) * inv);
        vals[i] = 0.5 * (next - prev);
        prev = next;
    }
    return vals;
}

SampledPatch sample_patch(const Depo& depo, const GridSpec& spec, double n_sigma)
{
    const GridFootprint fp = map_depo_to_grid(depo, spec, n_sigma);

    const long max_w = static_cast<long>(spec.padded_wires()) - 1;
    const long max_t = static_cast<long>(spec.padded_ticks()) - 1;
    const long wire_lo = std::max(fp.wire_lo, 0L);
    const long wire_hi = std::min(fp.wire_hi, max_w);
    const long tick_lo = std::max(fp.tick_lo, 0L);
    const long tick_hi = std::min(fp.tick_hi, max_t);

    SampledPatch out;
    out.clipped = wire_lo != fp.wire_lo || wire_hi != fp.wire_hi || tick_lo != fp.tick_lo ||
                  tick_hi != fp.tick_hi;
    if (wire_lo > wire_hi || tick_lo > tick_hi) return out;  // fully outside

    const std::size_t n_w = static_cast<std::size_t>(wire_hi - wire_lo + 1);
    const std::size_t n_t = static_cast<std::size_t>(tick_hi - tick_lo + 1);

    // bin low edges in detector coordinates (padded index - pad = active index)
    const double wire_edge =
        spec.origin_x + (static_cast<double>(wire_lo) - static_cast<double>(spec.pad_wires)) * spec.pitch;
    const double tick_edge =
        spec.origin_t + (static_cast<double>(tick_lo) - static_cast<double>(spec.pad_ticks)) * spec.tick;

    const std::vector<double> wv = gauss_bin_integrals(depo.x, depo.sigma_x, wire_edge, spec.pitch, n_w);
    const std::vector<double> tv = gauss_bin_integrals(depo.t, depo.sigma_t, tick_edge, spec.tick, n_t);

    ProbPatch& patch = out.patch;
    patch.wire_offset = wire_lo;
    patch.tick_offset = tick_lo;
    patch.n_w = n_w;
    patch.n_t = n_t;
    patch.values.resize(n_w * n_t);

    double total = 0.0;
    for (std::size_t w = 0; w < n_w; ++w) {
        const double pw = wv[w];
        for (std::size_t t = 0; t < n_t; ++t) {
            const double v = pw * tv[t];
            patch.values[w * n_t + t] = v;
            total += v;
        }
    }
    out.captured_mass = total;
    if (total <= 0.0) {
        // numerically empty (center many sigma outside the clipped window)
        out.patch = ProbPatch{};
        out.captured_mass = 0.0;
        return out;
    }
    const double norm = 1.0 / total;
    for (double& v : patch.values) v *= norm;
    return out;
}

namespace {

template <typename DrawBin>
CountPatch fluctuate_sequential(const ProbPatch& patch, std::int64_t q, DrawBin&& draw_bin)
{
    if (q < 0) throw std::invalid_argument("fluctuate: charge must be >= 0");
    CountPatch out;
    out.wire_offset = patch.wire_offset;
    out.tick_offset = patch.tick_offset;
    out.n_w = patch.n_w;
    out.n_t = patch.n_t;
    out.values.assign(patch.values.size(), 0);
    if (patch.values.empty()) return out;

    std::int64_t remaining = q;
    double p_rem = 1.0;
    const std::size_t last = patch.values.size() - 1;
    for (std::size_t i = 0; i < last; ++i) {
        if (remaining == 0) break;
        const double p = p_rem > 0.0 ? std::clamp(patch.values[i] / p_rem, 0.0, 1.0) : 1.0;
        const std::int64_t k = draw_bin(remaining, p);
        out.values[i] = k;
        remaining -= k;
        p_rem -= patch.values[i];
    }
    out.values[last] += remaining;  // remainder keeps the total exact
    return out;
}

}  // namespace

CountPatch fluctuate(const ProbPatch& patch, std::int64_t q, RandomSource& src)
{
    return fluctuate_sequential(patch, q,
                                [&src](std::int64_t n, double p) { return binomial(n, p, src); });
}

CountPatch fluctuate_approx(const ProbPatch& patch, std::int64_t q, RandomSource& src)
{
    return fluctuate_sequential(patch, q, [&src](std::int64_t n, double p) -> std::int64_t {
        if (p <= 0.0) return 0;
        if (p >= 1.0) return n;
        const double mean = static_cast<double>(n) * p;
        const double k = std::round(mean + std::sqrt(mean * (1.0 - p)) * src.normal());
        if (k < 0.0) return 0;
        if (k > static_cast<double>(n)) return n;
        return static_cast<std::int64_t>(k);
    });
}

CountPatch rasterize_depo(const Depo& depo, const GridSpec& spec, double n_sigma, RngMode mode,
                          const RandomPool* pool, std::uint64_t seed, RngState* inline_state,
                          StageClock& clock)
{
    const double t0 = now_s();
    SampledPatch sampled = sample_patch(depo, spec, n_sigma);
    const double t1 = now_s();
    clock.sampling_s += t1 - t0;
    if (sampled.clipped) ++clock.clipped_patches;

    CountPatch counts;
    switch (mode) {
        case RngMode::pool: {
            if (!pool) throw std::invalid_argument("rasterize_depo: pool mode without a pool");
            PoolSource src(*pool, depo.id);
            counts = fluctuate_approx(sampled.patch, sampled.patch.empty() ? 0 : depo.q, src);
            break;
        }
        case RngMode::substream: {
            StreamSource src(substream(seed, static_cast<std::uint64_t>(depo.id)));
            counts = fluctuate(sampled.patch, sampled.patch.empty() ? 0 : depo.q, src);
            break;
        }
        case RngMode::inline_stream: {
            if (!inline_state) throw std::invalid_argument("rasterize_depo: inline mode without a state");
            StreamSource src(*inline_state);
            counts = fluctuate(sampled.patch, sampled.patch.empty() ? 0 : depo.q, src);
            *inline_state = src.state();
            break;
        }
    }
    clock.fluctuation_s += now_s() - t1;
    return counts;
}

}  // namespace wiresim
