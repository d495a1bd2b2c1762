// Command-line front end: run, verify, measure and discriminate experiments.
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "phasescat/cli.hpp"
#include "phasescat/errors.hpp"

#ifndef PHASESCAT_DEFAULT_BASELINES
#define PHASESCAT_DEFAULT_BASELINES "baselines/discrimination.json"
#endif

namespace {

using namespace phasescat;

struct Common {
    std::string out;
    std::optional<std::uint64_t> seed;
    bool record = false;
    std::string baselines;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--out", c.out, "Output directory (default: config output_dir, $PHASESCAT_OUT, ./phasescat-out)");
    app->add_option("--seed", c.seed, "Random seed for sampled checks (overrides the config)");
    app->add_flag("--record-baseline", c.record, "Store measured discrepancies as the regression baselines");
    app->add_option("--baselines", c.baselines, "Baseline file (default: $PHASESCAT_BASELINES or the repository file)");
}

cli::RunOptions options_for(const Common& c, const cli::ExperimentConfig& cfg) {
    cli::RunOptions o;
    o.output_dir = cli::resolve_output_dir(c.out, cfg);
    if (!c.baselines.empty()) {
        o.baseline_path = c.baselines;
    } else if (const char* env = std::getenv("PHASESCAT_BASELINES"); env && *env) {
        o.baseline_path = env;
    } else {
        o.baseline_path = PHASESCAT_DEFAULT_BASELINES;
    }
    o.record_baseline = c.record;
    o.seed = c.seed;
    return o;
}

int report_and_exit(const cli::RunReport& r, const std::filesystem::path& dir) {
    std::printf("run %s (%s)\n", r.run_id.c_str(), cli::to_string(r.kind).c_str());
    for (const auto& c : r.checks) {
        std::printf("  %-28s %-5s measured %.6e %s %.6e", c.name.c_str(), cli::to_string(c.status).c_str(), c.measured,
                    c.comparator.empty() ? "?" : c.comparator.c_str(), c.tolerance);
        if (c.status != cli::CheckStatus::pass && !c.detail.empty()) std::printf("  [%s]", c.detail.c_str());
        std::printf("\n");
    }
    std::printf("%s; report in %s\n", r.passed() ? "PASS" : "FAIL", dir.string().c_str());
    return r.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phaseless near-field scattering laboratory"};
    app.require_subcommand(1);

    Common common;
    std::string config_path, config_b;
    std::vector<std::string> checks;

    auto* run = app.add_subcommand("run", "Execute the pipeline named by the config's run field");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    add_common(run, common);

    auto* verify = app.add_subcommand("verify", "Run the identity and regression suite");
    verify->add_option("config", config_path, "Experiment config (JSON)")->required();
    verify->add_option("--check", checks, "Restrict to the named rows (repeatable)");
    add_common(verify, common);

    auto* measure = app.add_subcommand("measure", "Synthesize the phaseless triple");
    measure->add_option("config", config_path, "Experiment config (JSON)")->required();
    add_common(measure, common);

    auto* disc = app.add_subcommand("discriminate", "Compare the triples of two scatterers on one layout");
    disc->add_option("config_a", config_path, "First config")->required();
    disc->add_option("config_b", config_b, "Second config")->required();
    add_common(disc, common);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = cli::load_config(config_path);
        auto options = options_for(common, cfg);
        if (*disc) {
            const auto cfg_b = cli::load_config(config_b);
            return report_and_exit(cli::discriminate(cfg, cfg_b, options), options.output_dir);
        }
        std::optional<cli::RunKind> kind;
        if (*verify) {
            kind = cli::RunKind::verify;
            for (const auto& name : checks) {
                const auto& known = cli::verify_check_names();
                if (std::find(known.begin(), known.end(), name) == known.end()) {
                    throw ConfigError("unknown check '" + name + "'");
                }
            }
            options.checks = checks;
        }
        if (*measure) kind = cli::RunKind::measure;
        return report_and_exit(cli::run(cfg, options, kind), options.output_dir);
    } catch (const AdmissibilityError& e) {
        std::fprintf(stderr, "admissibility violation: %s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
