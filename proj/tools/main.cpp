#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "solpath/config.hpp"
#include "solpath/runner.hpp"

namespace {

solpath::Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
    solpath::Config cfg = solpath::Config::parse_file(path);
    for (const std::string& s : overrides) {
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--set expects section.key=value, got '" + s + "'");
        cfg.set_override(s.substr(0, eq), s.substr(eq + 1));
    }
    return cfg;
}

struct SubArgs {
    std::string config;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, SubArgs& args) {
    sub->add_option("config", args.config, "run configuration file")->required();
    sub->add_option("--set", args.overrides,
                    "override a config key (section.key=value); repeatable");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "solpath: learn the optimal-solution path of a parametric convex problem by\n"
        "stochastic optimization over a basis expansion, with a calibrated\n"
        "discretization baseline and inequality audits"};
    app.require_subcommand(1);

    SubArgs run_args, gt_args, audit_args, spectra_args, frontier_args;
    std::vector<std::string> compare_configs;
    std::vector<std::string> compare_overrides;

    CLI::App* run = app.add_subcommand("run", "run lsp/alsp/discretization and write artifacts");
    add_common(run, run_args);
    CLI::App* gt = app.add_subcommand("groundtruth", "compute and cache a ground-truth grid");
    add_common(gt, gt_args);
    CLI::App* audit = app.add_subcommand("audit", "check the growth/decomposition inequalities");
    add_common(audit, audit_args);
    CLI::App* spectra = app.add_subcommand("spectra", "report basis spectral constants C and c");
    add_common(spectra, spectra_args);
    CLI::App* frontier =
        app.add_subcommand("frontier", "discretization work/accuracy frontier over deltas");
    add_common(frontier, frontier_args);
    CLI::App* compare =
        app.add_subcommand("compare", "merge path error vs gradient calls across methods");
    compare->add_option("configs", compare_configs, "one config per method")->required();
    compare->add_option("--set", compare_overrides,
                        "override a key in every config (section.key=value); repeatable");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return solpath::cmd_run(load_config(run_args.config, run_args.overrides));
        if (gt->parsed())
            return solpath::cmd_groundtruth(load_config(gt_args.config, gt_args.overrides));
        if (audit->parsed())
            return solpath::cmd_audit(load_config(audit_args.config, audit_args.overrides));
        if (spectra->parsed())
            return solpath::cmd_spectra(load_config(spectra_args.config, spectra_args.overrides));
        if (frontier->parsed())
            return solpath::cmd_frontier(
                load_config(frontier_args.config, frontier_args.overrides));
        if (compare->parsed()) {
            std::vector<solpath::Config> cfgs;
            for (const std::string& path : compare_configs)
                cfgs.push_back(load_config(path, compare_overrides));
            return solpath::cmd_compare(cfgs);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return solpath::kExitConfig;
    }
    return solpath::kExitConfig;
}
