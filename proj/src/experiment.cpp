#include "evidence/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string_view>

#include "json.hpp"

namespace evidence {

namespace {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

std::string render_csv(const std::vector<ConvergenceCurve>& curves) {
    std::string out;
    out += "# schema_version=" + std::to_string(kCsvSchemaVersion) + "\n";
    out += "measure,n,M,count_S,count_S_and_H1,estimate,std_error,oracle,defined\n";
    for (const ConvergenceCurve& curve : curves) {
        for (const ConvergenceRow& row : curve.rows) {
            const ConsistencyEstimate& e = row.estimate;
            out += to_string(curve.measure_id);
            out += ',' + std::to_string(row.n);
            out += ',' + std::to_string(e.replications);
            out += ',' + std::to_string(e.count_S);
            out += ',' + std::to_string(e.count_S_and_H1);
            out += ',';
            if (e.defined) out += fmt9(e.estimate);
            out += ',';
            if (e.defined) out += fmt9(e.std_error);
            out += ',';
            if (row.oracle.has_value()) out += fmt9(*row.oracle);
            out += ',';
            out += e.defined ? "true" : "false";
            out += '\n';
        }
    }
    return out;
}

struct MeasureLimit {
    double value;
    std::string kind;
};

/// The n -> infinity limit the verdict compares against: Eq.-style positive
/// limit for the point-null p-value experiment, zero for the ratio family
/// (and for composite-null p-values, where the strong-evidence probability
/// under H1 itself vanishes).
MeasureLimit limit_for(const ReplicationSetup& setup, MeasureId id) {
    if (id == MeasureId::pvalue) {
        const bool point_null = setup.hypotheses.theta1.is_point() &&
                                setup.hypotheses.theta2.is_point() &&
                                setup.prior.within1().kind() == WithinKind::point &&
                                setup.prior.within2().kind() == WithinKind::point;
        if (point_null)
            return {pvalue_limit(setup.suite.alpha_s, setup.prior.w()),
                    "alpha_S w / (1 - w (1 - alpha_S))"};
    }
    return {0.0, "0"};
}

const char* oracle_formula(MeasureId id) {
    switch (id) {
        case MeasureId::pvalue:
            return "w p1 / (w p1 + (1-w) p2), p1 = alpha_S, "
                   "p2 = Phi(sqrt(n) delta - z_{1-alpha_S})";
        case MeasureId::rl:
        case MeasureId::erl:
            return "w p1 / (w p1 + (1-w) p2), p_j = Phi(-+ sqrt(n) delta / 2 "
                   "- ln(k_S) / (delta sqrt(n)))";
        case MeasureId::bf:
            return "rl form with k = bf_threshold (point priors make b21 = r21)";
        case MeasureId::posterior_odds:
            return "rl form with k = bf_threshold q(Theta1) / q(Theta2)";
    }
    return "";
}

nlohmann::json truncation_report(std::string_view name, const RegionDistribution& dist) {
    nlohmann::json entry;
    entry["prior"] = std::string(name);
    entry["distribution"] = dist.to_string();
    entry["region"] = dist.region().to_string();
    if (dist.kind() == WithinKind::truncated_gaussian)
        entry["quadrature_mass_outside_window"] = dist.quadrature_window().mass_outside;
    else
        entry["quadrature_mass_outside_window"] = 0.0;
    return entry;
}

nlohmann::json render_manifest(const ExperimentConfig& config, const RunOptions& options,
                               double wall_clock_seconds, const std::string& csv_name,
                               const std::string& verdict_name) {
    const ReplicationSetup& setup = config.setup;
    nlohmann::json m;
    m["schema_version"] = kJsonSchemaVersion;
    m["artifact_version"] = kArtifactVersion;
    m["config_text"] = canonical_config_text(config, options.master_seed);
    m["master_seed"] = options.master_seed;
    m["seed_source"] = options.seed_source;
    m["workers"] = options.workers;
    m["fast_path"] = setup.use_sufficient_fast_path;

    nlohmann::json ranges = nlohmann::json::array();
    for (std::size_t i = 0; i < config.grid.n_grid.size(); ++i) {
        ranges.push_back({{"n", config.grid.n_grid[i]},
                          {"stream_base", curve_stream_base(i)},
                          {"count", config.grid.replications_per_n}});
    }
    m["stream_ranges"] = ranges;

    nlohmann::json measures = nlohmann::json::array();
    for (MeasureId id : setup.suite.measures) measures.push_back(to_string(id));
    m["measures"] = measures;
    m["calibrations"] = {{"alpha_s", setup.suite.alpha_s},
                         {"k_s", setup.suite.k_s},
                         {"bf_threshold", setup.suite.bf_threshold}};
    m["conventions"] = {{"posterior_odds_strong_region",
                         "log p21 >= ln(bf_threshold); the Bayes-factor threshold reused on "
                         "the odds scale"},
                        {"std_error", "binomial on the conditioned count, "
                                      "sqrt(p (1-p) / count_S)"}};

    nlohmann::json formulas = nlohmann::json::object();
    for (MeasureId id : setup.suite.measures)
        if (closed_form_oracle(setup, id, config.grid.n_grid.front()).has_value())
            formulas[to_string(id)] = oracle_formula(id);
    m["oracle_formulas"] = formulas;

    nlohmann::json truncation = nlohmann::json::array();
    truncation.push_back(truncation_report("prior.within1", setup.prior.within1()));
    truncation.push_back(truncation_report("prior.within2", setup.prior.within2()));
    if (setup.evidence_prior.has_value()) {
        truncation.push_back(truncation_report("evidence_prior.within1", setup.evidence_prior->q1()));
        truncation.push_back(truncation_report("evidence_prior.within2", setup.evidence_prior->q2()));
    }
    m["priors"] = truncation;

    m["wall_clock_seconds"] = wall_clock_seconds;
    m["outputs"] = {{"csv", csv_name}, {"verdict", verdict_name}};
    return m;
}

} // namespace

void emit_convergence_csv(const std::vector<ConvergenceCurve>& curves, const std::string& path) {
    for (const ConvergenceCurve& curve : curves)
        if (curve.rows.empty()) throw DomainError("emit_convergence_csv: empty curve");
    write_file_atomic(path, render_csv(curves));
}

void emit_convergence_csv(const ConvergenceCurve& curve, const std::string& path) {
    emit_convergence_csv(std::vector<ConvergenceCurve>{curve}, path);
}

int run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();

    const fs::path dir(options.out_dir);
    const std::string csv_name = config.output_prefix + "_curves.csv";
    const std::string manifest_name = config.output_prefix + "_manifest.json";
    const std::string verdict_name = config.output_prefix + "_verdict.json";

    const auto write_error_summary = [&](const std::string& stage, const std::string& what) {
        nlohmann::json summary;
        summary["schema_version"] = kJsonSchemaVersion;
        summary["status"] = "error";
        summary["errors"] = nlohmann::json::array({{{"stage", stage}, {"message", what}}});
        try {
            write_file_atomic((dir / verdict_name).string(), summary.dump(2) + "\n");
        } catch (const std::exception&) {
            // The summary is best effort; the exit code still reports the failure.
        }
    };

    try {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

        if (options.workers < 1) throw DomainError("run_experiment: workers must be >= 1");

        const std::vector<ConvergenceCurve> curves = build_convergence_curves(
            config.setup, config.grid, options.master_seed, options.workers);

        emit_convergence_csv(curves, (dir / csv_name).string());

        const TolerancePolicy policy;
        bool any_inconclusive = false;
        nlohmann::json verdicts = nlohmann::json::array();
        for (const ConvergenceCurve& curve : curves) {
            const MeasureLimit limit = limit_for(config.setup, curve.measure_id);
            const Verdict v = verdict(curve, limit.value, policy);
            any_inconclusive = any_inconclusive || v == Verdict::inconclusive;
            const ConsistencyEstimate& last = curve.rows.back().estimate;
            nlohmann::json entry;
            entry["measure"] = to_string(curve.measure_id);
            entry["limit"] = limit.value;
            entry["limit_kind"] = limit.kind;
            entry["verdict"] = to_string(v);
            entry["final_n"] = curve.rows.back().n;
            entry["final_defined"] = last.defined;
            if (last.defined) {
                entry["final_estimate"] = last.estimate;
                entry["final_std_error"] = last.std_error;
            }
            entry["policy"] = {{"se_multiplier", policy.se_multiplier},
                               {"abs_slack", policy.abs_slack}};
            verdicts.push_back(entry);
        }

        nlohmann::json summary;
        summary["schema_version"] = kJsonSchemaVersion;
        summary["status"] = "ok";
        summary["verdicts"] = verdicts;
        write_file_atomic((dir / verdict_name).string(), summary.dump(2) + "\n");

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_file_atomic((dir / manifest_name).string(),
                          render_manifest(config, options, wall, csv_name, verdict_name).dump(2) +
                              "\n");

        if (options.strict && any_inconclusive) return kExitInconclusive;
        return kExitOk;
    } catch (const UnsupportedConfiguration& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        write_error_summary("validation", ex.what());
        return kExitValidation;
    } catch (const DomainError& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        write_error_summary("validation", ex.what());
        return kExitValidation;
    } catch (const std::exception& ex) { // NumericalError, IoError, bad_alloc
        std::fprintf(stderr, "error: %s\n", ex.what());
        write_error_summary("run", ex.what());
        return kExitNumerical;
    }
}

} // namespace evidence
