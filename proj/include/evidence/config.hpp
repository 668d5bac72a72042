#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "evidence/consistency.hpp"
#include "evidence/sampler.hpp"

namespace evidence {

/// A fully validated experiment definition. `setup.n` holds the first grid
/// point; the curve builders override it per n.
struct ExperimentConfig {
    ReplicationSetup setup;
    CurveGrid grid;
    std::optional<std::uint64_t> seed; // seed key, if the document had one
    std::string output_prefix;
};

/// Parses the flat key-value experiment grammar (`#` comments, dotted keys,
/// one `key = value` per line; see docs/formats.md). Collects every
/// validation problem and throws one ConfigError listing all of them.
ExperimentConfig parse_config(const std::string& text);

/// parse_config over a file's bytes. Unreadable path: IoError.
ExperimentConfig parse_config_file(const std::string& path);

/// The resolved document: every key explicit, defaults materialized, values
/// in canonical form, seed pinned. parse_config on this text reproduces the
/// configuration exactly; the run manifest embeds it.
std::string canonical_config_text(const ExperimentConfig& config, std::uint64_t resolved_seed);

} // namespace evidence
