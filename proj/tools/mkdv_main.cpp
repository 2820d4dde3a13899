#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "mkdv/experiments.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    std::string snapshot;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration (JSON)")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "RNG seed override")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--threads", args.threads, "worker count override");
    cmd->add_option("--snapshot", args.snapshot, "snapshot path override");
}

int run(const std::string& experiment, const CommonArgs& args) {
    mkdv::RunConfig cfg = mkdv::load_run_config(args.config_path);
    cfg.experiment = experiment;
    if (args.seed_set) cfg.seed = args.seed;
    if (args.threads > 0) cfg.threads = args.threads;
    if (!args.snapshot.empty()) cfg.snapshot_path = args.snapshot;

    const mkdv::RunReport report = mkdv::run_experiment(cfg);
    report.write(args.out_dir);
    for (const mkdv::ReportItem& item : report.items)
        std::cout << (item.pass ? "PASS " : "FAIL ") << item.name << "  value=" << item.value
                  << "  tol=" << item.tolerance << "\n";
    std::cout << (report.pass() ? "OK" : "FAILED") << "  (" << report.wall_clock_s << " s, report in "
              << args.out_dir << ")\n";
    return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for solitons, breathers, and multi-breather construction"};
    app.require_subcommand(1);

    const std::vector<std::string> experiments = {
        "verify-identities", "conservation-drift", "build-multibreather", "hs-decay-scan",
        "coercivity-scan",   "monotonicity",       "modulation-recovery"};

    std::vector<CommonArgs> args(experiments.size());
    std::vector<CLI::App*> cmds;
    for (size_t i = 0; i < experiments.size(); ++i) {
        CLI::App* cmd = app.add_subcommand(experiments[i]);
        add_common(cmd, args[i]);
        cmds.push_back(cmd);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (size_t i = 0; i < experiments.size(); ++i)
            if (cmds[i]->parsed()) return run(experiments[i], args[i]);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
