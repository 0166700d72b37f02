// wiresim command-line driver: simulate | bench | sigproc | gen-depos |
// gen-response.

#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wiresim/gridio.hpp"
#include "wiresim/pipeline.hpp"
#include "wiresim/sigproc.hpp"

using namespace wiresim;
using nlohmann::json;

namespace {

SimConfig load_config_or_default(const std::string& path)
{
    if (path.empty()) return SimConfig{};
    return load_config(path);
}

Matrix<std::int64_t> to_i64(const Matrix<std::int32_t>& adc)
{
    Matrix<std::int64_t> out(adc.rows, adc.cols);
    for (std::size_t i = 0; i < adc.data.size(); ++i) out.data[i] = adc.data[i];
    return out;
}

struct SimulateArgs {
    std::string config_path, depos_path, out_path, timing_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> dispatch, rng;
};

int run_simulate(const SimulateArgs& args)
{
    SimConfig config = load_config_or_default(args.config_path);
    if (args.seed) config.rng.seed = *args.seed;
    if (args.workers) config.workers = *args.workers;
    if (args.dispatch) config.dispatch = dispatch_mode_from_string(*args.dispatch);
    if (args.rng) config.rng.mode = rng_mode_from_string(*args.rng);
    config.validate();

    const std::vector<Depo> depos = load_depos(args.depos_path);
    const SimResult result = run_simulation(config, depos);
    write_grid(args.out_path, to_i64(result.adc));

    const json timing = timing_to_json(result.timing);
    if (!args.timing_path.empty()) {
        std::ofstream out(args.timing_path);
        out << timing.dump(2) << "\n";
    }
    std::cout << timing.dump(2) << "\n";
    return 0;
}

struct BenchArgs {
    std::string config_path, depos_path, out_path, scaling_path;
    std::vector<std::string> variants;
    int repeats = 5;
};

int run_bench(const BenchArgs& args)
{
    const SimConfig config = load_config_or_default(args.config_path);
    const std::vector<Depo> depos = load_depos(args.depos_path);

    std::vector<BenchVariant> variants;
    for (const std::string& spec_str : args.variants) {
        // rng:dispatch:workers, e.g. pool:batched:4
        BenchVariant v;
        const auto first = spec_str.find(':');
        const auto second = spec_str.find(':', first + 1);
        if (first == std::string::npos || second == std::string::npos)
            throw std::invalid_argument("variant \"" + spec_str + "\" is not rng:dispatch:workers");
        v.rng = rng_mode_from_string(spec_str.substr(0, first));
        v.dispatch = dispatch_mode_from_string(spec_str.substr(first + 1, second - first - 1));
        v.workers = std::stoi(spec_str.substr(second + 1));
        variants.push_back(v);
    }
    if (variants.empty())
        variants.push_back({config.rng.mode, config.dispatch, config.workers});

    const json doc = bench(config, depos, variants, args.repeats);
    if (!args.out_path.empty()) {
        std::ofstream out(args.out_path);
        out << doc.dump(2) << "\n";
    } else {
        std::cout << doc.dump(2) << "\n";
    }

    if (!args.scaling_path.empty()) {
        // scatter scaling side-report on this depo set's patches
        SimConfig raster_config = config;
        raster_config.rng.mode = RngMode::substream;
        std::vector<CountPatch> patches;
        patches.reserve(depos.size());
        StageClock clock;
        for (const Depo& d : depos)
            patches.push_back(rasterize_depo(d, raster_config.grid, raster_config.n_sigma,
                                             RngMode::substream, nullptr, raster_config.rng.seed,
                                             nullptr, clock));
        const auto rows = scatter_scaling_report(raster_config.grid, patches, {1, 2, 4, 8});
        std::ofstream out(args.scaling_path);
        out << scaling_report_csv(rows);
    }
    return 0;
}

struct SigprocArgs {
    std::string in_path, filter_path, out_path, medians_path;
    std::size_t pad = 0, rows = 0;
    int workers = 1;
};

int run_sigproc(const SigprocArgs& args)
{
    SignalBatch batch;
    batch.data = read_grid_c128(args.in_path);
    batch.pad_rows = args.pad;
    batch.out_rows = args.rows != 0 ? args.rows : batch.data.rows - args.pad;
    batch.validate();

    std::vector<cdouble> filter;
    const AnyGrid fgrid = read_grid(args.filter_path);
    if (const auto* f = std::get_if<Matrix<double>>(&fgrid))
        filter.assign(f->data.begin(), f->data.end());
    else if (const auto* c = std::get_if<Matrix<cdouble>>(&fgrid))
        filter = c->data;
    else
        throw std::runtime_error("sigproc: filter grid must be f64 or c128");

    const ChainResult result = sigproc_chain(batch, filter, args.workers);
    write_grid(args.out_path, result.block);
    if (!args.medians_path.empty()) {
        Matrix<double> medians(result.medians.size(), 1);
        medians.data = result.medians;
        write_grid(args.medians_path, medians);
    }
    std::fprintf(stderr, "sigproc: %zu rows filtered, block %zux%zu, max imag residue %.3e\n",
                 batch.data.rows, result.block.rows, result.block.cols, result.max_rel_imag);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"LArTPC detector-signal simulation engine"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run the full simulation chain on a depo file");
    simulate->add_option("--config", sim.config_path, "JSON config file (defaults used when omitted)");
    simulate->add_option("--depos", sim.depos_path, "input depo CSV")->required();
    simulate->add_option("--out", sim.out_path, "output ADC grid file")->required();
    simulate->add_option("--timing", sim.timing_path, "also write the timing report JSON here");
    std::uint64_t seed_arg = 0;
    int workers_arg = 0;
    std::string dispatch_arg, rng_arg;
    simulate->add_option("--seed", seed_arg, "override rng.seed");
    simulate->add_option("--workers", workers_arg, "override workers");
    simulate->add_option("--dispatch", dispatch_arg, "override dispatch (per_depo|batched)");
    simulate->add_option("--rng", rng_arg, "override rng mode (inline|pool|substream)");

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "time the pipeline stage by stage across variants");
    bench_cmd->add_option("--config", bench_args.config_path, "JSON config file");
    bench_cmd->add_option("--depos", bench_args.depos_path, "input depo CSV")->required();
    bench_cmd->add_option("--variants", bench_args.variants,
                          "variants as rng:dispatch:workers (e.g. inline:batched:1 pool:batched:4)");
    bench_cmd->add_option("--repeats", bench_args.repeats, "runs per variant (default 5)");
    bench_cmd->add_option("--out", bench_args.out_path, "report JSON path (stdout when omitted)");
    bench_cmd->add_option("--scatter-scaling-out", bench_args.scaling_path,
                          "also write a scatter-add scaling CSV for workers 1,2,4,8");

    SigprocArgs sp;
    auto* sigproc = app.add_subcommand("sigproc", "filter + inverse DFT + block cut + row medians");
    sigproc->add_option("--in", sp.in_path, "input c128 grid (rows = signals)")->required();
    sigproc->add_option("--filter", sp.filter_path, "filter grid, f64 or c128, one value per column")
        ->required();
    sigproc->add_option("--pad", sp.pad, "guard rows before the block");
    sigproc->add_option("--rows", sp.rows, "rows to extract (default: all after pad)");
    sigproc->add_option("--out", sp.out_path, "output f64 grid for the extracted block")->required();
    sigproc->add_option("--medians", sp.medians_path, "output f64 grid (n x 1) of per-row medians");
    sigproc->add_option("--workers", sp.workers, "row-parallel workers");

    std::size_t gen_n = 0;
    std::uint64_t gen_seed = 1;
    std::string gen_out, gen_config;
    DepoGenRanges ranges;
    auto* gen = app.add_subcommand("gen-depos", "write a synthetic depo CSV");
    gen->add_option("--n", gen_n, "number of depos")->required();
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--out", gen_out, "output CSV path")->required();
    gen->add_option("--config", gen_config, "JSON config supplying the grid geometry");
    gen->add_option("--q-min", ranges.q_min, "minimum charge (electrons)");
    gen->add_option("--q-max", ranges.q_max, "maximum charge (electrons)");
    gen->add_option("--sigma-t-min", ranges.sigma_t_min, "minimum time width (us)");
    gen->add_option("--sigma-t-max", ranges.sigma_t_max, "maximum time width (us)");
    gen->add_option("--sigma-x-min", ranges.sigma_x_min, "minimum transverse width (mm)");
    gen->add_option("--sigma-x-max", ranges.sigma_x_max, "maximum transverse width (mm)");

    std::string resp_config, resp_out;
    auto* gen_resp = app.add_subcommand("gen-response", "build the response kernel and export it");
    gen_resp->add_option("--config", resp_config, "JSON config file");
    gen_resp->add_option("--out", resp_out, "output c128 grid path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            if (simulate->count("--seed")) sim.seed = seed_arg;
            if (simulate->count("--workers")) sim.workers = workers_arg;
            if (simulate->count("--dispatch")) sim.dispatch = dispatch_arg;
            if (simulate->count("--rng")) sim.rng = rng_arg;
            return run_simulate(sim);
        }
        if (bench_cmd->parsed()) return run_bench(bench_args);
        if (sigproc->parsed()) return run_sigproc(sp);
        if (gen->parsed()) {
            const SimConfig config = load_config_or_default(gen_config);
            gen_depos(gen_n, gen_seed, config.grid, ranges, gen_out);
            return 0;
        }
        if (gen_resp->parsed()) {
            const SimConfig config = load_config_or_default(resp_config);
            const ResponseKernel kernel = build_response(config.grid, config.response);
            write_grid(resp_out, kernel.values);
            std::fprintf(stderr, "gen-response: %zux%zu kernel, support %ld wires x %ld ticks\n",
                         kernel.values.rows, kernel.values.cols, kernel.support_wires,
                         kernel.support_ticks);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
