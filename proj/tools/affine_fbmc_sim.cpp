// affine_fbmc_sim - Monte Carlo MSE/BER sweeps for affine-precoded FBMC/OQAM.
//
// Precedence: built-in desk defaults < --preset < --config file < flags.
#include "affine_fbmc/affine_fbmc.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

using namespace affine_fbmc;

namespace {

void write_to(const std::string& path, auto&& writer)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    writer(f);
    if (!f)
        throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Affine-precoded FBMC/OQAM link simulator: LS channel-estimation MSE and "
                 "uncoded QPSK BER over SNR, training power and redundancy.\n"
                 "Bits fill subcarriers first, then frames; Gray QPSK (b1 -> Re, b0 -> Im)."};

    std::string preset, config_path, out_path, dump_filter, dump_transmux;
    std::string redundancy_text, sigma_text, snr_text, mode_text, basis_text;
    std::size_t N = 0, K = 0, trials = 0, Lh = 0;
    std::uint64_t seed = 0;
    bool perfect_csi = false;
    int transmux_span = 2;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());

    app.add_option("--preset", preset, "Named parameter set: 'paper' (N=256, Lp=4N, Lh=12, 100 trials)")
        ->check(CLI::IsMember({"paper"}));
    app.add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);
    auto* o_N = app.add_option("--subcarriers", N, "Subcarrier count N");
    auto* o_K = app.add_option("--frames", K, "OQAM frames per burst K (default N)");
    auto* o_n = app.add_option("--redundancy", redundancy_text,
                               "Redundancy n: comma list, absolute or multiples of N (1N,2N,5N)");
    auto* o_sigma = app.add_option("--sigma-c2", sigma_text, "Training power list, e.g. 0.1,0.2,0.3");
    auto* o_snr = app.add_option("--snr-db", snr_text, "SNR list in dB (inf disables noise)");
    auto* o_trials = app.add_option("--trials", trials, "Monte Carlo trials per grid point");
    auto* o_seed = app.add_option("--seed", seed, "Master seed");
    auto* o_Lh = app.add_option("--taps", Lh, "Channel tap count Lh");
    auto* o_mode = app.add_option("--estimator-mode", mode_text, "raw | normalized")
                       ->check(CLI::IsMember({"raw", "normalized"}));
    auto* o_basis = app.add_option("--basis", basis_text, "Orthogonal basis: dct | hadamard")
                        ->check(CLI::IsMember({"dct", "hadamard"}));
    auto* o_csi = app.add_flag("--perfect-csi", perfect_csi, "Detect with the true channel response");
    app.add_option("--workers", workers, "Worker threads (results do not depend on this)");
    app.add_option("--out", out_path, "CSV output path (stdout when omitted)");
    app.add_option("--dump-filter", dump_filter, "Write prototype taps, one per line, to this path");
    app.add_option("--dump-transmux", dump_transmux, "Write the transmultiplexer table as CSV to this path");
    app.add_option("--transmux-span", transmux_span, "Max |dm|, |dn| in the transmultiplexer dump");

    CLI11_PARSE(app, argc, argv);

    try {
        SimConfig cfg = preset == "paper" ? SimConfig::paper() : SimConfig::desk();
        if (!config_path.empty())
            apply_config_file(cfg, config_path);

        if (o_N->count())
            cfg.N = N;
        if (o_K->count())
            cfg.K = K;
        if (o_n->count())
            cfg.redundancy = parse_redundancy_list(redundancy_text, cfg.N);
        if (o_sigma->count())
            cfg.sigma_c2 = parse_double_list(sigma_text);
        if (o_snr->count())
            cfg.snr_db = parse_double_list(snr_text);
        if (o_trials->count())
            cfg.trials = trials;
        if (o_seed->count())
            cfg.seed = seed;
        if (o_Lh->count())
            cfg.Lh = Lh;
        if (o_mode->count())
            cfg.mode = parse_estimator_mode(mode_text);
        if (o_basis->count())
            cfg.basis = parse_basis_kind(basis_text);
        if (o_csi->count())
            cfg.perfect_csi = perfect_csi;

        const bool dumping = !dump_filter.empty() || !dump_transmux.empty();
        if (!dump_filter.empty())
            write_to(dump_filter, [&](std::ostream& os) { write_taps(os, design_phydyas(cfg.N, cfg.overlap_factor)); });
        if (!dump_transmux.empty()) {
            const BasisFunctionSpec spec(design_phydyas(cfg.N, cfg.overlap_factor));
            write_to(dump_transmux, [&](std::ostream& os) { write_transmux_csv(os, transmux_response(spec, transmux_span)); });
        }
        if (dumping && out_path.empty())
            return 0;

        const auto t0 = std::chrono::steady_clock::now();
        const SweepResult result = sweep(cfg, workers);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (out_path.empty())
            write_csv(std::cout, result);
        else
            emit_results(result, out_path);

        std::size_t fades = 0;
        for (const auto& r : result.records)
            fades += r.fade_events;
        std::cerr << result.records.size() << " grid points x " << cfg.trials << " trials in " << secs
                  << " s (N=" << cfg.N << ", K=" << cfg.frames() << ", Lh=" << cfg.Lh << ", basis="
                  << to_string(cfg.basis) << ", estimator=" << to_string(cfg.mode) << ", fade events="
                  << fades << ")\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
