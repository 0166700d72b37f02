#include "wiresim/pipeline.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wiresim/threading.hpp"

namespace wiresim {

using nlohmann::json;

namespace {

using clock_type = std::chrono::steady_clock;

double elapsed_s(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

}  // namespace

std::string to_string(RngMode mode)
{
    switch (mode) {
        case RngMode::inline_stream: return "inline";
        case RngMode::pool: return "pool";
        case RngMode::substream: return "substream";
    }
    return "?";
}

std::string to_string(DispatchMode mode)
{
    return mode == DispatchMode::per_depo ? "per_depo" : "batched";
}

RngMode rng_mode_from_string(const std::string& s)
{
    if (s == "inline") return RngMode::inline_stream;
    if (s == "pool") return RngMode::pool;
    if (s == "substream") return RngMode::substream;
    throw std::invalid_argument("unknown rng mode \"" + s + "\" (inline|pool|substream)");
}

DispatchMode dispatch_mode_from_string(const std::string& s)
{
    if (s == "per_depo") return DispatchMode::per_depo;
    if (s == "batched") return DispatchMode::batched;
    throw std::invalid_argument("unknown dispatch mode \"" + s + "\" (per_depo|batched)");
}

void SimConfig::validate() const
{
    grid.validate();
    if (n_sigma <= 0.0) throw std::invalid_argument("config: n_sigma must be > 0");
    if (batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (rng.mode == RngMode::inline_stream && workers > 1)
        throw std::invalid_argument(
            "config: inline rng draws are order-dependent and therefore serial-only; "
            "use pool or substream mode with workers > 1");
    if (adc.bits < 1 || adc.bits > 16) throw std::invalid_argument("config: adc.bits must be in [1,16]");
}

namespace {

template <typename T>
void maybe_get(const json& j, const char* key, T& out)
{
    if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

SimConfig config_from_json(const json& j)
{
    SimConfig c;
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        maybe_get(g, "n_wires", c.grid.n_wires);
        maybe_get(g, "n_ticks", c.grid.n_ticks);
        maybe_get(g, "pad_wires", c.grid.pad_wires);
        maybe_get(g, "pad_ticks", c.grid.pad_ticks);
        maybe_get(g, "pitch", c.grid.pitch);
        maybe_get(g, "tick", c.grid.tick);
        maybe_get(g, "origin_x", c.grid.origin_x);
        maybe_get(g, "origin_t", c.grid.origin_t);
    }
    if (j.contains("drift")) {
        const json& d = j.at("drift");
        maybe_get(d, "enabled", c.drift.enabled);
        maybe_get(d, "response_plane_x", c.drift.response_plane_x);
        maybe_get(d, "drift_speed", c.drift.drift_speed);
        maybe_get(d, "diffusion_long", c.drift.diffusion_long);
        maybe_get(d, "diffusion_tran", c.drift.diffusion_tran);
    }
    if (j.contains("response")) {
        const json& r = j.at("response");
        if (r.contains("plane_kind")) {
            const std::string kind = r.at("plane_kind").get<std::string>();
            if (kind == "induction")
                c.response.plane_kind = PlaneKind::induction;
            else if (kind == "collection")
                c.response.plane_kind = PlaneKind::collection;
            else
                throw std::invalid_argument("config: plane_kind must be induction or collection");
        }
        maybe_get(r, "field_sigma_t", c.response.field_sigma_t);
        maybe_get(r, "shaper_peaking", c.response.shaper_peaking);
        maybe_get(r, "shaper_order", c.response.shaper_order);
        maybe_get(r, "gain", c.response.gain);
        maybe_get(r, "wire_weights", c.response.wire_weights);
    }
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        if (n.contains("mode")) {
            const std::string mode = n.at("mode").get<std::string>();
            if (mode == "off")
                c.noise.mode = NoiseMode::off;
            else if (mode == "white")
                c.noise.mode = NoiseMode::white;
            else if (mode == "spectrum")
                c.noise.mode = NoiseMode::spectrum;
            else
                throw std::invalid_argument("config: noise mode must be off, white or spectrum");
        }
        maybe_get(n, "sigma", c.noise.sigma);
        maybe_get(n, "amplitude_spectrum", c.noise.amplitude_spectrum);
    }
    maybe_get(j, "n_sigma", c.n_sigma);
    if (j.contains("rng")) {
        const json& r = j.at("rng");
        if (r.contains("mode")) c.rng.mode = rng_mode_from_string(r.at("mode").get<std::string>());
        maybe_get(r, "seed", c.rng.seed);
        maybe_get(r, "slice_len", c.rng.slice_len);
    }
    if (j.contains("dispatch")) c.dispatch = dispatch_mode_from_string(j.at("dispatch").get<std::string>());
    maybe_get(j, "batch_size", c.batch_size);
    maybe_get(j, "workers", c.workers);
    if (j.contains("adc")) {
        const json& a = j.at("adc");
        maybe_get(a, "scale", c.adc.scale);
        maybe_get(a, "offset", c.adc.offset);
        maybe_get(a, "bits", c.adc.bits);
    }
    if (j.contains("scatter_strategy")) {
        const std::string s = j.at("scatter_strategy").get<std::string>();
        if (s == "banded")
            c.scatter = ScatterStrategy::banded;
        else if (s == "atomic")
            c.scatter = ScatterStrategy::atomic;
        else
            throw std::invalid_argument("config: scatter_strategy must be banded or atomic");
    }
    c.validate();
    return c;
}

json config_to_json(const SimConfig& c)
{
    json j;
    j["grid"] = {{"n_wires", c.grid.n_wires},   {"n_ticks", c.grid.n_ticks},
                 {"pad_wires", c.grid.pad_wires}, {"pad_ticks", c.grid.pad_ticks},
                 {"pitch", c.grid.pitch},        {"tick", c.grid.tick},
                 {"origin_x", c.grid.origin_x},  {"origin_t", c.grid.origin_t}};
    j["drift"] = {{"enabled", c.drift.enabled},
                  {"response_plane_x", c.drift.response_plane_x},
                  {"drift_speed", c.drift.drift_speed},
                  {"diffusion_long", c.drift.diffusion_long},
                  {"diffusion_tran", c.drift.diffusion_tran}};
    j["response"] = {{"plane_kind", c.response.plane_kind == PlaneKind::induction ? "induction" : "collection"},
                     {"field_sigma_t", c.response.field_sigma_t},
                     {"shaper_peaking", c.response.shaper_peaking},
                     {"shaper_order", c.response.shaper_order},
                     {"gain", c.response.gain},
                     {"wire_weights", c.response.wire_weights}};
    j["noise"] = {{"mode", c.noise.mode == NoiseMode::off      ? "off"
                           : c.noise.mode == NoiseMode::white ? "white"
                                                              : "spectrum"},
                  {"sigma", c.noise.sigma}};
    if (!c.noise.amplitude_spectrum.empty()) j["noise"]["amplitude_spectrum"] = c.noise.amplitude_spectrum;
    j["n_sigma"] = c.n_sigma;
    j["rng"] = {{"mode", to_string(c.rng.mode)}, {"seed", c.rng.seed}, {"slice_len", c.rng.slice_len}};
    j["dispatch"] = to_string(c.dispatch);
    j["batch_size"] = c.batch_size;
    j["workers"] = c.workers;
    j["adc"] = {{"scale", c.adc.scale}, {"offset", c.adc.offset}, {"bits", c.adc.bits}};
    j["scatter_strategy"] = c.scatter == ScatterStrategy::banded ? "banded" : "atomic";
    return j;
}

SimConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("load_config: " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

json timing_to_json(const TimingReport& r)
{
    return json{{"rasterization_total_s", r.rasterization_total_s},
                {"sampling_2d_s", r.sampling_2d_s},
                {"fluctuation_s", r.fluctuation_s},
                {"scatter_add_s", r.scatter_add_s},
                {"ft_s", r.ft_s},
                {"total_s", r.total_s},
                {"rng_mode", r.rng_mode},
                {"dispatch_mode", r.dispatch_mode},
                {"workers", r.workers},
                {"clipped_patch_count", r.clipped_patch_count}};
}

std::vector<Depo> load_depos(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_depos: cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_depos: " + path.string() + " is empty");
    if (line != "id,t_us,x_mm,q,sigma_t_us,sigma_x_mm")
        throw std::runtime_error("load_depos: " + path.string() + ": line 1: bad header \"" + line + "\"");

    std::vector<Depo> depos;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Depo d;
        char trailing = 0;
        const int got = std::sscanf(line.c_str(), "%" SCNd64 ",%lf,%lf,%" SCNd64 ",%lf,%lf%c", &d.id,
                                    &d.t, &d.x, &d.q, &d.sigma_t, &d.sigma_x, &trailing);
        if (got != 6)
            throw std::runtime_error("load_depos: " + path.string() + ": line " + std::to_string(lineno) +
                                     ": malformed row \"" + line + "\"");
        const auto row_index = static_cast<std::int64_t>(depos.size());
        if (d.id != row_index)
            throw std::runtime_error("load_depos: " + path.string() + ": line " + std::to_string(lineno) +
                                     ": id " + std::to_string(d.id) + " must equal the row index " +
                                     std::to_string(row_index));
        if (d.q < 0)
            throw std::runtime_error("load_depos: " + path.string() + ": line " + std::to_string(lineno) +
                                     ": negative charge " + std::to_string(d.q));
        if (d.sigma_t < 0.0 || d.sigma_x < 0.0)
            throw std::runtime_error("load_depos: " + path.string() + ": line " + std::to_string(lineno) +
                                     ": negative width");
        depos.push_back(d);
    }
    return depos;
}

void gen_depos(std::size_t n, std::uint64_t seed, const GridSpec& spec, const DepoGenRanges& ranges,
               const std::filesystem::path& path)
{
    spec.validate();
    if (ranges.q_min < 0 || ranges.q_max < ranges.q_min)
        throw std::invalid_argument("gen_depos: bad charge range");

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("gen_depos: cannot open " + path.string());
    out << "id,t_us,x_mm,q,sigma_t_us,sigma_x_mm\n";

    RngState st = seed_state(seed);
    const double t_span = static_cast<double>(spec.n_ticks) * spec.tick;
    const double x_span = static_cast<double>(spec.n_wires) * spec.pitch;
    char buf[256];
    for (std::size_t i = 0; i < n; ++i) {
        const double t = spec.origin_t + uniform01(st) * t_span;
        const double x = spec.origin_x + uniform01(st) * x_span;
        const auto q = ranges.q_min +
                       static_cast<std::int64_t>(uniform01(st) *
                                                 static_cast<double>(ranges.q_max - ranges.q_min + 1));
        const double sigma_t =
            ranges.sigma_t_min + uniform01(st) * (ranges.sigma_t_max - ranges.sigma_t_min);
        const double sigma_x =
            ranges.sigma_x_min + uniform01(st) * (ranges.sigma_x_max - ranges.sigma_x_min);
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%" PRId64 ",%.17g,%.17g\n", i, t, x, q, sigma_t,
                      sigma_x);
        out << buf;
    }
    if (!out) throw std::runtime_error("gen_depos: short write to " + path.string());
}

namespace {

struct RasterOutput {
    std::vector<CountPatch> patches;
    StageClock clock;
    std::int64_t clipped_charge = 0;
};

// Rasterize depos [begin, end) of `depos`, one task per depo; patches land
// at their depo's index so results are order-independent.
void rasterize_range(const SimConfig& config, const std::vector<Depo>& depos, std::size_t begin,
                     std::size_t end, const RandomPool* pool, RngState* inline_state, bool per_task,
                     RasterOutput& out)
{
    const std::size_t count = end - begin;
    out.patches.assign(count, CountPatch{});

    if (config.rng.mode == RngMode::inline_stream) {
        for (std::size_t i = 0; i < count; ++i)
            out.patches[i] = rasterize_depo(depos[begin + i], config.grid, config.n_sigma,
                                            config.rng.mode, pool, config.rng.seed, inline_state,
                                            out.clock);
    } else {
        std::vector<StageClock> clocks(static_cast<std::size_t>(config.workers));
        auto work = [&](std::size_t i, int worker) {
            out.patches[i] = rasterize_depo(depos[begin + i], config.grid, config.n_sigma,
                                            config.rng.mode, pool, config.rng.seed, nullptr,
                                            clocks[static_cast<std::size_t>(worker)]);
        };
        if (per_task)
            parallel_tasks(count, config.workers, work);
        else
            parallel_for(count, config.workers,
                         [&](std::size_t lo, std::size_t hi, int worker) {
                             for (std::size_t i = lo; i < hi; ++i) work(i, worker);
                         });
        for (const StageClock& c : clocks) {
            out.clock.sampling_s += c.sampling_s;
            out.clock.fluctuation_s += c.fluctuation_s;
            out.clock.clipped_patches += c.clipped_patches;
        }
    }

    for (std::size_t i = 0; i < count; ++i)
        if (out.patches[i].empty()) out.clipped_charge += depos[begin + i].q;
}

}  // namespace

SimResult run_simulation(const SimConfig& config, const std::vector<Depo>& depos)
{
    config.validate();
    const auto t_start = clock_type::now();

    TimingReport timing;
    timing.rng_mode = to_string(config.rng.mode);
    timing.dispatch_mode = to_string(config.dispatch);
    timing.workers = config.workers;

    // drift
    std::vector<Depo> drifted;
    const std::vector<Depo>* working = &depos;
    if (config.drift.enabled) {
        drifted.reserve(depos.size());
        for (const Depo& d : depos) drifted.push_back(drift_depo(d, config.drift));
        working = &drifted;
    }

    // pre-factored pool covers every depo id present
    RandomPool pool;
    if (config.rng.mode == RngMode::pool) {
        std::int64_t max_id = -1;
        for (const Depo& d : *working) max_id = std::max(max_id, d.id);
        pool = build_pool(config.rng.seed, static_cast<std::size_t>(max_id + 1), config.rng.slice_len);
    }
    const RandomPool* pool_ptr = config.rng.mode == RngMode::pool ? &pool : nullptr;
    RngState inline_state = seed_state(config.rng.seed);

    // rasterize + scatter-add
    SimResult result{Matrix<std::int32_t>{}, timing, ChargeGrid(config.grid), 0};
    {
        const auto t_raster = clock_type::now();
        double scatter_s = 0.0;
        if (config.dispatch == DispatchMode::per_depo) {
            RasterOutput out;
            rasterize_range(config, *working, 0, working->size(), pool_ptr, &inline_state,
                            /*per_task=*/true, out);
            result.timing.sampling_2d_s = out.clock.sampling_s;
            result.timing.fluctuation_s = out.clock.fluctuation_s;
            result.timing.clipped_patch_count = out.clock.clipped_patches;
            result.clipped_charge = out.clipped_charge;
            result.timing.rasterization_total_s = elapsed_s(t_raster);

            const auto t_scatter = clock_type::now();
            scatter_add_parallel(result.charge, out.patches, config.workers, config.scatter);
            scatter_s = elapsed_s(t_scatter);
        } else {
            double raster_s = 0.0;
            for (std::size_t begin = 0; begin < working->size(); begin += config.batch_size) {
                const std::size_t end = std::min(working->size(), begin + config.batch_size);
                const auto t_batch = clock_type::now();
                RasterOutput out;
                rasterize_range(config, *working, begin, end, pool_ptr, &inline_state,
                                /*per_task=*/false, out);
                raster_s += elapsed_s(t_batch);
                result.timing.sampling_2d_s += out.clock.sampling_s;
                result.timing.fluctuation_s += out.clock.fluctuation_s;
                result.timing.clipped_patch_count += out.clock.clipped_patches;
                result.clipped_charge += out.clipped_charge;

                const auto t_scatter = clock_type::now();
                scatter_add_parallel(result.charge, out.patches, config.workers, config.scatter);
                scatter_s += elapsed_s(t_scatter);
            }
            result.timing.rasterization_total_s = raster_s;
        }
        result.timing.scatter_add_s = scatter_s;
    }

    // convolve (FT / multiply / IFT)
    const auto t_ft = clock_type::now();
    const ResponseKernel kernel = build_response(config.grid, config.response);
    MeasurementGrid m = convolve(result.charge, kernel, config.workers);
    result.timing.ft_s = elapsed_s(t_ft);

    // noise + digitize
    m = add_noise(m, config.noise, config.rng.seed, config.workers);
    result.adc = digitize(m, config.adc.scale, config.adc.offset, config.adc.bits);

    result.timing.total_s = elapsed_s(t_start);
    return result;
}

json bench(const SimConfig& config, const std::vector<Depo>& depos,
           const std::vector<BenchVariant>& variants, int repeats)
{
    if (repeats < 1) throw std::invalid_argument("bench: repeats must be >= 1");

    const char* stage_keys[] = {"rasterization_total_s", "sampling_2d_s", "fluctuation_s",
                                "scatter_add_s",         "ft_s",          "total_s"};

    json records = json::array();
    for (const BenchVariant& variant : variants) {
        SimConfig run_config = config;
        run_config.rng.mode = variant.rng;
        run_config.dispatch = variant.dispatch;
        run_config.workers = variant.workers;
        run_config.validate();

        json runs = json::array();
        for (int r = 0; r < repeats; ++r) {
            const SimResult result = run_simulation(run_config, depos);
            runs.push_back(timing_to_json(result.timing));
        }

        json record;
        record["rng_mode"] = to_string(variant.rng);
        record["dispatch_mode"] = to_string(variant.dispatch);
        record["workers"] = variant.workers;
        record["repeats"] = repeats;
        for (const char* key : stage_keys) {
            double sum = 0.0, lo = 0.0, hi = 0.0;
            for (std::size_t r = 0; r < runs.size(); ++r) {
                const double v = runs[r].at(key).get<double>();
                sum += v;
                lo = r == 0 ? v : std::min(lo, v);
                hi = r == 0 ? v : std::max(hi, v);
            }
            record["mean"][key] = sum / static_cast<double>(repeats);
            record["min"][key] = lo;
            record["max"][key] = hi;
        }
        record["runs"] = std::move(runs);
        records.push_back(std::move(record));
    }

    json doc;
    doc["repeats"] = repeats;
    doc["records"] = std::move(records);
    return doc;
}

}  // namespace wiresim
