#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "evidence/config.hpp"
#include "evidence/consistency.hpp"
#include "evidence/experiment.hpp"

namespace {

int do_run(const std::string& config_path, const std::optional<std::uint64_t>& seed_flag,
           const std::string& out_dir, bool strict, int workers) {
    evidence::ExperimentConfig config = evidence::parse_config_file(config_path);

    evidence::RunOptions options;
    options.out_dir = out_dir;
    options.strict = strict;
    options.workers = workers;
    if (seed_flag.has_value()) {
        options.master_seed = *seed_flag;
        options.seed_source = "flag";
    } else if (config.seed.has_value()) {
        options.master_seed = *config.seed;
        options.seed_source = "config";
    } else if (const char* env = std::getenv("EVIDENCE_LAB_SEED"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0' || env[0] == '-')
            throw evidence::ConfigError({std::string("EVIDENCE_LAB_SEED = ") + env +
                                         " is not an unsigned integer"});
        options.master_seed = static_cast<std::uint64_t>(v);
        options.seed_source = "env";
    } else {
        options.master_seed = 0;
        options.seed_source = "default";
    }
    return evidence::run_experiment(config, options);
}

int do_validate(const std::string& config_path) {
    const evidence::ExperimentConfig config = evidence::parse_config_file(config_path);
    std::printf("ok: %s\n", config_path.c_str());
    std::printf("measures:");
    for (evidence::MeasureId id : config.setup.suite.measures)
        std::printf(" %s", evidence::to_string(id).c_str());
    std::printf("\n");
    return evidence::kExitOk;
}

int do_oracle(double alpha_s, double w) {
    std::printf("%.9g\n", evidence::pvalue_limit(alpha_s, w));
    return evidence::kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"evidence-lab: convergence experiments for measures of statistical evidence"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    bool strict = false;
    int workers = 1;
    std::uint64_t seed_value = 0;

    CLI::App* run = app.add_subcommand("run", "Run a configured experiment sweep");
    run->add_option("--config", config_path, "experiment configuration file")->required();
    CLI::Option* seed_opt = run->add_option("--seed", seed_value, "master seed override");
    run->add_option("--out-dir", out_dir, "output directory (default: current)");
    run->add_flag("--strict", strict, "exit 4 when any verdict is inconclusive");
    run->add_option("--workers", workers, "worker thread count")->check(CLI::PositiveNumber);

    CLI::App* validate = app.add_subcommand("validate", "Validate a configuration document");
    validate->add_option("--config", config_path, "experiment configuration file")->required();

    double alpha_s = 0.0;
    double w = 0.0;
    CLI::App* oracle = app.add_subcommand("oracle", "Print the limiting Pr(H1 | pvalue in S)");
    oracle->add_option("--alpha-s", alpha_s, "strong-evidence level alpha_S in (0,1)")->required();
    oracle->add_option("--w", w, "prior mass w of Theta1 in [0,1]")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::optional<std::uint64_t> seed_flag;
            if (seed_opt->count() > 0) seed_flag = seed_value;
            return do_run(config_path, seed_flag, out_dir, strict, workers);
        }
        if (validate->parsed()) return do_validate(config_path);
        if (oracle->parsed()) return do_oracle(alpha_s, w);
    } catch (const evidence::ConfigError& ex) {
        std::fprintf(stderr, "%s\n", ex.what());
        return evidence::kExitValidation;
    } catch (const evidence::DomainError& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return evidence::kExitValidation;
    } catch (const evidence::UnsupportedConfiguration& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return evidence::kExitValidation;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return evidence::kExitNumerical;
    }
    return evidence::kExitOk;
}
