// stfsim: command-line front end for the spreading simulator.
// Talks to the engine exclusively through the C API in stfspread/stfs.h.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stfspread/stfs.h"

namespace {

int exit_code_for(stfs_status st) {
    switch (st) {
        case STFS_OK: return 0;
        case STFS_ERR_IO: return 3;
        default: return 2;
    }
}

int fail(stfs_status st) {
    std::fprintf(stderr, "error: %s\n", stfs_last_error());
    return exit_code_for(st);
}

struct ConfigHandle {
    stfs_config* cfg = nullptr;
    ~ConfigHandle() { stfs_config_free(cfg); }
};

struct ResultHandle {
    stfs_result* res = nullptr;
    ~ResultHandle() { stfs_result_free(res); }
};

struct CodebookHandle {
    stfs_codebook* cb = nullptr;
    ~CodebookHandle() { stfs_codebook_free(cb); }
};

int cmd_run(const std::string& config_path, const std::string& preset_name, std::uint64_t seed,
            bool seed_set, long trials, const std::string& out_dir,
            const std::vector<std::string>& formats, int workers) {
    ConfigHandle h;
    stfs_status st;
    if (!preset_name.empty()) {
        st = stfs_config_preset(preset_name.c_str(), &h.cfg);
        if (st != STFS_OK) return fail(st);
        if (!config_path.empty()) {
            st = stfs_config_apply_file(h.cfg, config_path.c_str());
            if (st != STFS_OK) return fail(st);
        }
    } else if (!config_path.empty()) {
        st = stfs_config_load(config_path.c_str(), &h.cfg);
        if (st != STFS_OK) return fail(st);
    } else {
        std::fprintf(stderr, "error: run requires --config or --preset\n");
        return 2;
    }
    if (seed_set) {
        st = stfs_config_set(h.cfg, "master_seed", std::to_string(seed).c_str());
        if (st != STFS_OK) return fail(st);
    }
    if (trials > 0) {
        st = stfs_config_set(h.cfg, "n_trials", std::to_string(trials).c_str());
        if (st != STFS_OK) return fail(st);
    }
    st = stfs_config_validate(h.cfg);
    if (st != STFS_OK) return fail(st);

    ResultHandle r;
    st = stfs_run(h.cfg, workers, &r.res);
    if (st != STFS_OK) return fail(st);

    for (const std::string& format : formats) {
        const char* ext = format == "csv" ? "csv" : format == "json" ? "json" : "txt";
        const std::string path = out_dir + "/results." + ext;
        st = stfs_result_emit(r.res, format.c_str(), path.c_str());
        if (st != STFS_OK) return fail(st);
        std::printf("wrote %s\n", path.c_str());
    }
    std::printf("rows: %zu\n", stfs_result_rows(r.res));
    return 0;
}

int cmd_validate(const std::string& config_path) {
    ConfigHandle h;
    stfs_status st = stfs_config_load(config_path.c_str(), &h.cfg);
    if (st != STFS_OK) return fail(st);
    st = stfs_config_validate(h.cfg);
    if (st != STFS_OK) return fail(st);
    std::printf("ok\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo link-level simulator for block-exclusive "
                 "space-time/frequency spreading"};
    app.require_subcommand(1);

    // run -------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "run an experiment sweep");
    std::string config_path, preset_name, out_dir = ".";
    std::uint64_t seed = 0;
    long trials = 0;
    int workers = 1;
    std::vector<std::string> formats = {"csv"};
    run->add_option("--config", config_path, "config file (key = value lines)");
    run->add_option("--preset", preset_name, "named preset fig3..fig7")
        ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6", "fig7"}));
    auto* seed_opt = run->add_option("--seed", seed, "master seed (u64)");
    run->add_option("--trials", trials, "Monte-Carlo trials per sweep point");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--format", formats, "csv|json|plotdata (repeatable)")
        ->check(CLI::IsMember({"csv", "json", "plotdata"}));
    run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

    // codebook --------------------------------------------------------------
    auto* cb = app.add_subcommand("codebook", "generate or optimize codebooks");
    cb->require_subcommand(1);
    std::string cb_construction = "random_gaussian", cb_out, cb_criterion = "max_min_distance",
                cb_modulation = "qpsk";
    std::uint32_t cb_q = 8, cb_t = 8;
    std::uint64_t cb_seed = 1;
    int cb_budget = 1000;
    double cb_snr = 10.0;

    auto* gen = cb->add_subcommand("gen", "generate a codebook");
    gen->add_option("--construction", cb_construction, "random_gaussian|unitary")
        ->check(CLI::IsMember({"random_gaussian", "unitary"}));
    gen->add_option("--q", cb_q, "number of vectors")->required();
    gen->add_option("--t", cb_t, "vector length")->required();
    gen->add_option("--seed", cb_seed, "seed for the random construction");
    gen->add_option("--out", cb_out, "output file")->required();

    auto* opt = cb->add_subcommand("optimize", "budgeted search over candidates");
    opt->add_option("--construction", cb_construction, "random_gaussian|unitary")
        ->check(CLI::IsMember({"random_gaussian", "unitary"}));
    opt->add_option("--q", cb_q, "number of vectors")->required();
    opt->add_option("--t", cb_t, "vector length")->required();
    opt->add_option("--criterion", cb_criterion,
                    "max_min_distance|min_error_prob|max_capacity")
        ->check(CLI::IsMember({"max_min_distance", "min_error_prob", "max_capacity"}));
    opt->add_option("--budget", cb_budget, "candidates to score")->check(CLI::PositiveNumber);
    opt->add_option("--modulation", cb_modulation, "bpsk|qpsk|qam16")
        ->check(CLI::IsMember({"bpsk", "qpsk", "qam16"}));
    opt->add_option("--snr", cb_snr, "operating SNR (dB) for scoring");
    opt->add_option("--seed", cb_seed, "seed for candidate generation");
    opt->add_option("--out", cb_out, "output file")->required();

    // validate ---------------------------------------------------------------
    auto* val = app.add_subcommand("validate", "check a config file");
    std::string val_config;
    val->add_option("--config", val_config, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (run->parsed())
        return cmd_run(config_path, preset_name, seed, seed_opt->count() > 0, trials, out_dir,
                       formats, workers);
    if (val->parsed()) return cmd_validate(val_config);

    if (cb->parsed()) {
        CodebookHandle h;
        stfs_status st;
        if (gen->parsed()) {
            st = cb_construction == "unitary"
                     ? stfs_codebook_unitary(cb_q, cb_t, &h.cb)
                     : stfs_codebook_random(cb_q, cb_t, cb_seed, &h.cb);
        } else {
            st = stfs_codebook_optimize(cb_construction.c_str(), cb_q, cb_t,
                                        cb_criterion.c_str(), cb_budget, cb_modulation.c_str(),
                                        cb_snr, cb_seed, &h.cb);
        }
        if (st != STFS_OK) return fail(st);
        st = stfs_codebook_save(h.cb, cb_out.c_str());
        if (st != STFS_OK) return fail(st);
        std::printf("wrote %s (q=%" PRIu32 ", t=%" PRIu32 ")\n", cb_out.c_str(),
                    stfs_codebook_q(h.cb), stfs_codebook_t(h.cb));
        return 0;
    }
    return 2;
}
