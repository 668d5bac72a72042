#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evidence/config.hpp"
#include "evidence/consistency.hpp"

namespace evidence {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kCsvSchemaVersion = 1;
inline constexpr int kJsonSchemaVersion = 1;

/// Process exit codes (shared by run_experiment and the CLI).
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitInconclusive = 4;

struct RunOptions {
    std::string out_dir = ".";
    int workers = 1;
    bool strict = false;
    std::uint64_t master_seed = 0;
    std::string seed_source = "default"; // flag | config | env | default
};

/// Convergence table: `# schema_version=...` comment, pinned header, one row
/// per (measure, n), 9 significant digits, UTF-8 with LF endings, written
/// atomically (temp file + rename).
void emit_convergence_csv(const std::vector<ConvergenceCurve>& curves, const std::string& path);
void emit_convergence_csv(const ConvergenceCurve& curve, const std::string& path);

/// Runs the configured sweep and writes <prefix>_curves.csv,
/// <prefix>_manifest.json and <prefix>_verdict.json under options.out_dir.
/// Returns the process exit code; failures are also recorded in the verdict
/// summary when it can still be written.
int run_experiment(const ExperimentConfig& config, const RunOptions& options);

} // namespace evidence
