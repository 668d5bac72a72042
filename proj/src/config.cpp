#include "evidence/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string_view>

namespace evidence {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<std::string_view, 19> kKnownKeys = {
    "model.variance",
    "hypotheses.theta1",
    "hypotheses.theta2",
    "hypotheses.delta",
    "prior.w",
    "prior.within1",
    "prior.within2",
    "measures",
    "calibration.alpha_s",
    "calibration.k_s",
    "calibration.bf_threshold",
    "evidence_prior.q1_mass",
    "evidence_prior.within1",
    "evidence_prior.within2",
    "sweep.n_grid",
    "sweep.replications",
    "seed",
    "sampling.fast_path",
    "output.prefix",
};

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(trim(s.substr(start)));
            return parts;
        }
        parts.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
}

std::optional<double> parse_number(const std::string& text, bool allow_inf = false) {
    if (text.empty()) return std::nullopt;
    if (allow_inf) {
        if (text == "inf" || text == "+inf") return kInf;
        if (text == "-inf") return -kInf;
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::int64_t> parse_int(const std::string& text) {
    if (text.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size() || errno == ERANGE) return std::nullopt;
    return static_cast<std::int64_t>(v);
}

std::optional<std::uint64_t> parse_uint(const std::string& text) {
    if (text.empty() || text[0] == '-' || text[0] == '+') return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size() || errno == ERANGE) return std::nullopt;
    return static_cast<std::uint64_t>(v);
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Region literal: a bare number (point) or an interval like `(-inf, 0]`.
std::optional<ParameterRegion> parse_region(const std::string& text,
                                            std::vector<std::string>& issues,
                                            const std::string& key) {
    if (const std::optional<double> v = parse_number(text)) {
        return ParameterRegion::point(*v);
    }
    if (text.size() >= 5 && (text.front() == '(' || text.front() == '[') &&
        (text.back() == ')' || text.back() == ']')) {
        const std::vector<std::string> parts = split(text.substr(1, text.size() - 2), ',');
        if (parts.size() == 2) {
            const std::optional<double> lo = parse_number(parts[0], /*allow_inf=*/true);
            const std::optional<double> hi = parse_number(parts[1], /*allow_inf=*/true);
            if (lo && hi) {
                if (!(*lo < *hi)) {
                    issues.push_back(key + " = " + text + " violates lower < upper");
                    return std::nullopt;
                }
                return ParameterRegion::interval(*lo, *hi, text.front() == '[',
                                                 text.back() == ']');
            }
        }
    }
    issues.push_back(key + " = " + text +
                     " is not a region (expected a number or an interval like `(-inf, 0]`)");
    return std::nullopt;
}

struct DistributionLiteral {
    std::string name;
    std::vector<double> args;
};

std::optional<DistributionLiteral> parse_distribution_literal(const std::string& text) {
    const std::size_t open = text.find('(');
    if (open == std::string::npos || text.back() != ')') return std::nullopt;
    DistributionLiteral lit;
    lit.name = trim(text.substr(0, open));
    const std::string inner = trim(text.substr(open + 1, text.size() - open - 2));
    if (!inner.empty()) {
        for (const std::string& part : split(inner, ',')) {
            const std::optional<double> v = parse_number(part);
            if (!v) return std::nullopt;
            lit.args.push_back(*v);
        }
    }
    return lit;
}

/// Within-distribution literal on a host region: `point(v)`, `uniform()`,
/// or `trunc_gaussian(center, sd)`.
std::optional<RegionDistribution> parse_within(const std::string& text,
                                               const ParameterRegion& host,
                                               std::vector<std::string>& issues,
                                               const std::string& key) {
    const std::optional<DistributionLiteral> lit = parse_distribution_literal(text);
    if (!lit) {
        issues.push_back(key + " = " + text +
                         " is not a distribution (expected point(v), uniform(), or "
                         "trunc_gaussian(center, sd))");
        return std::nullopt;
    }
    try {
        if (lit->name == "point" && lit->args.size() == 1) {
            const double v = lit->args[0];
            if (host.is_point() && v != host.point_value()) {
                issues.push_back(key + " = " + text + " must sit at the hypothesis point " +
                                 format_number(host.point_value()));
                return std::nullopt;
            }
            if (!host.contains(v)) {
                issues.push_back(key + " = " + text + " lies outside the hypothesis region " +
                                 host.to_string());
                return std::nullopt;
            }
            return RegionDistribution::point_mass(host.is_point() ? host
                                                                  : ParameterRegion::point(v));
        }
        if (lit->name == "uniform" && lit->args.empty())
            return RegionDistribution::uniform(host);
        if (lit->name == "trunc_gaussian" && lit->args.size() == 2)
            return RegionDistribution::truncated_gaussian(host, lit->args[0], lit->args[1]);
    } catch (const std::exception& ex) {
        issues.push_back(key + " = " + text + ": " + ex.what());
        return std::nullopt;
    }
    issues.push_back(key + " = " + text +
                     " is not a distribution (expected point(v), uniform(), or "
                     "trunc_gaussian(center, sd))");
    return std::nullopt;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    std::vector<std::string> issues;

    // Pass 1: lines -> key/value map, every syntax problem recorded.
    std::map<std::string, std::string> kv;
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (const std::size_t hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            issues.push_back("line " + std::to_string(line_no) + ": expected `key = value`, got `" +
                             stripped + "`");
            continue;
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty()) {
            issues.push_back("line " + std::to_string(line_no) + ": empty key or value");
            continue;
        }
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
            issues.push_back("unknown key '" + key + "'");
            continue;
        }
        if (!kv.emplace(key, value).second) issues.push_back("duplicate key '" + key + "'");
    }

    const auto get = [&kv](std::string_view key) -> std::optional<std::string> {
        const auto it = kv.find(std::string(key));
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    const auto get_number = [&](std::string_view key) -> std::optional<double> {
        const std::optional<std::string> raw = get(key);
        if (!raw) return std::nullopt;
        const std::optional<double> v = parse_number(*raw);
        if (!v) issues.push_back(std::string(key) + " = " + *raw + " is not a number");
        return v;
    };

    // Model.
    double variance = 1.0;
    if (const std::optional<double> v = get_number("model.variance")) {
        if (*v > 0.0)
            variance = *v;
        else
            issues.push_back("model.variance = " + format_number(*v) + " violates variance > 0");
    }

    // Hypotheses: theta1 plus either theta2 or delta.
    std::optional<ParameterRegion> region1;
    std::optional<ParameterRegion> region2;
    if (const std::optional<std::string> raw = get("hypotheses.theta1"))
        region1 = parse_region(*raw, issues, "hypotheses.theta1");
    else
        issues.push_back("missing required key 'hypotheses.theta1'");

    const std::optional<std::string> theta2_raw = get("hypotheses.theta2");
    const std::optional<std::string> delta_raw = get("hypotheses.delta");
    if (theta2_raw && delta_raw)
        issues.push_back("hypotheses.theta2 and hypotheses.delta are mutually exclusive");
    else if (theta2_raw)
        region2 = parse_region(*theta2_raw, issues, "hypotheses.theta2");
    else if (delta_raw) {
        const std::optional<double> delta = parse_number(*delta_raw);
        if (!delta)
            issues.push_back("hypotheses.delta = " + *delta_raw + " is not a number");
        else if (!(*delta > 0.0))
            issues.push_back("hypotheses.delta = " + *delta_raw + " violates delta > 0");
        else if (region1 && !region1->is_point())
            issues.push_back("hypotheses.delta requires a point hypotheses.theta1");
        else if (region1)
            region2 = ParameterRegion::point(region1->point_value() + *delta);
    } else {
        issues.push_back("missing required key 'hypotheses.theta2' (or 'hypotheses.delta')");
    }

    std::optional<HypothesisPair> hypotheses;
    if (region1 && region2) {
        try {
            hypotheses.emplace(*region1, *region2);
        } catch (const std::exception& ex) {
            issues.push_back(std::string("hypotheses: ") + ex.what());
        }
    }

    // Two-level prior.
    std::optional<double> w;
    if (const std::optional<std::string> raw = get("prior.w")) {
        const std::optional<double> v = parse_number(*raw);
        if (!v)
            issues.push_back("prior.w = " + *raw + " is not a number");
        else if (*v > 0.0 && *v < 1.0)
            w = *v;
        else
            issues.push_back("prior.w = " + *raw + " violates w ∈ (0,1)");
    } else {
        issues.push_back("missing required key 'prior.w'");
    }

    const auto resolve_within = [&](std::string_view key, const std::optional<ParameterRegion>& host)
        -> std::optional<RegionDistribution> {
        if (!host) return std::nullopt; // the hypothesis issue is already recorded
        const std::optional<std::string> raw = get(key);
        if (!raw) {
            if (host->is_point()) {
                return RegionDistribution::point_mass(*host);
            }
            issues.push_back("missing required key '" + std::string(key) +
                             "' (interval hypotheses need an explicit within-region "
                             "distribution)");
            return std::nullopt;
        }
        return parse_within(*raw, *host, issues, std::string(key));
    };

    std::optional<RegionDistribution> within1 = resolve_within("prior.within1", region1);
    std::optional<RegionDistribution> within2 = resolve_within("prior.within2", region2);

    std::optional<TwoLevelPrior> prior;
    if (w && within1 && within2) {
        try {
            prior.emplace(*w, *within1, *within2);
        } catch (const std::exception& ex) {
            issues.push_back(std::string("prior: ") + ex.what());
        }
    }

    // Measures and calibrations. Default selection needs the evidence prior
    // (bf / posterior_odds are only defaulted in when one conforms), so it
    // happens after that prior is assembled below.
    MeasureSuite suite;
    const bool measures_explicit = get("measures").has_value();
    if (const std::optional<std::string> raw = get("measures")) {
        for (const std::string& name : split(*raw, ',')) {
            try {
                suite.measures.push_back(measure_from_string(name));
            } catch (const std::exception&) {
                issues.push_back("measures: unknown measure '" + name + "'");
            }
        }
    }

    if (const std::optional<double> v = get_number("calibration.alpha_s")) {
        if (*v > 0.0 && *v < 1.0)
            suite.alpha_s = *v;
        else
            issues.push_back("calibration.alpha_s = " + format_number(*v) +
                             " violates alpha_S ∈ (0,1)");
    }
    if (const std::optional<double> v = get_number("calibration.k_s")) {
        if (*v > 1.0)
            suite.k_s = *v;
        else
            issues.push_back("calibration.k_s = " + format_number(*v) + " violates k_S > 1");
    }
    if (const std::optional<double> v = get_number("calibration.bf_threshold")) {
        if (*v > 1.0)
            suite.bf_threshold = *v;
        else
            issues.push_back("calibration.bf_threshold = " + format_number(*v) +
                             " violates bf_threshold > 1");
    }

    // Evidence prior for bf / posterior_odds; defaults to the sampling prior.
    std::optional<double> q1_mass = w;
    if (const std::optional<std::string> raw = get("evidence_prior.q1_mass")) {
        const std::optional<double> v = parse_number(*raw);
        if (!v)
            issues.push_back("evidence_prior.q1_mass = " + *raw + " is not a number");
        else if (*v > 0.0 && *v < 1.0)
            q1_mass = *v;
        else
            issues.push_back("evidence_prior.q1_mass = " + *raw + " violates q(Θ1) ∈ (0,1)");
    }

    std::optional<RegionDistribution> eq1 = within1;
    if (const std::optional<std::string> raw = get("evidence_prior.within1")) {
        if (region1) eq1 = parse_within(*raw, *region1, issues, "evidence_prior.within1");
    }
    std::optional<RegionDistribution> eq2 = within2;
    if (const std::optional<std::string> raw = get("evidence_prior.within2")) {
        if (region2) eq2 = parse_within(*raw, *region2, issues, "evidence_prior.within2");
    }

    std::optional<PriorWithinRegions> evidence_prior;
    if (q1_mass && eq1 && eq2) {
        try {
            evidence_prior.emplace(*eq1, *eq2, *q1_mass);
        } catch (const std::exception& ex) {
            issues.push_back(std::string("evidence_prior: ") + ex.what());
        }
    }

    // bf / posterior_odds need an evidence prior spanning each full
    // hypothesis region; a sampling within concentrated inside an interval
    // region does not qualify as a default.
    const bool evidence_prior_conforms =
        hypotheses && evidence_prior &&
        evidence_prior->q1().region() == hypotheses->theta1 &&
        evidence_prior->q2().region() == hypotheses->theta2;
    if (!measures_explicit && hypotheses) {
        if (hypotheses->theta1.is_point() || hypotheses->theta1.bounded_above())
            suite.measures = {MeasureId::pvalue};
        if (hypotheses->theta1.is_point() && hypotheses->theta2.is_point())
            suite.measures.push_back(MeasureId::rl);
        suite.measures.push_back(MeasureId::erl);
        if (evidence_prior_conforms) {
            suite.measures.push_back(MeasureId::bf);
            suite.measures.push_back(MeasureId::posterior_odds);
        }
    }
    if (measures_explicit && !evidence_prior_conforms &&
        (suite.contains(MeasureId::bf) || suite.contains(MeasureId::posterior_odds)) &&
        hypotheses && evidence_prior) {
        issues.push_back(
            "measures: bf / posterior_odds need an evidence prior over the full hypothesis "
            "regions; set evidence_prior.within1 / evidence_prior.within2 explicitly");
    }

    // Sweep.
    CurveGrid grid;
    if (const std::optional<std::string> raw = get("sweep.n_grid")) {
        bool ok = true;
        for (const std::string& part : split(*raw, ',')) {
            const std::optional<std::int64_t> v = parse_int(part);
            if (!v || *v < 1) {
                issues.push_back("sweep.n_grid = " + *raw + " violates n ≥ 1 (entry '" + part +
                                 "')");
                ok = false;
                break;
            }
            grid.n_grid.push_back(*v);
        }
        if (ok && std::adjacent_find(grid.n_grid.begin(), grid.n_grid.end(),
                                     [](std::int64_t a, std::int64_t b) { return a >= b; }) !=
                      grid.n_grid.end())
            issues.push_back("sweep.n_grid = " + *raw + " violates n_grid strictly increasing");
    } else {
        issues.push_back("missing required key 'sweep.n_grid'");
    }
    if (const std::optional<std::string> raw = get("sweep.replications")) {
        const std::optional<std::int64_t> v = parse_int(*raw);
        if (v && *v >= 1)
            grid.replications_per_n = *v;
        else
            issues.push_back("sweep.replications = " + *raw + " violates M ≥ 1");
    } else {
        issues.push_back("missing required key 'sweep.replications'");
    }

    // Seed, sampling mode, output naming.
    std::optional<std::uint64_t> seed;
    if (const std::optional<std::string> raw = get("seed")) {
        seed = parse_uint(*raw);
        if (!seed) issues.push_back("seed = " + *raw + " is not an unsigned integer");
    }

    bool fast_path = true;
    if (const std::optional<std::string> raw = get("sampling.fast_path")) {
        if (*raw == "true")
            fast_path = true;
        else if (*raw == "false")
            fast_path = false;
        else
            issues.push_back("sampling.fast_path = " + *raw + " is not a boolean (true/false)");
    }

    std::string output_prefix = "experiment";
    if (const std::optional<std::string> raw = get("output.prefix")) {
        const bool ok = !raw->empty() &&
                        std::all_of(raw->begin(), raw->end(), [](unsigned char c) {
                            return std::isalnum(c) || c == '_' || c == '-';
                        });
        if (ok)
            output_prefix = *raw;
        else
            issues.push_back("output.prefix = " + *raw +
                             " must use only letters, digits, '_' or '-'");
    }

    if (!issues.empty()) throw ConfigError(issues);

    ExperimentConfig config{
        ReplicationSetup{GaussianMeanModel(variance), *hypotheses, *prior, suite, evidence_prior,
                         grid.n_grid.front(), fast_path},
        grid, seed, output_prefix};

    // Semantic validation of the whole setup (measure/hypothesis fit), with
    // the offending configuration named in the single collected error.
    try {
        validate_setup(config.setup);
    } catch (const std::exception& ex) {
        throw ConfigError({ex.what()});
    }
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

namespace {

std::string region_literal(const ParameterRegion& region) {
    if (region.is_point()) return format_number(region.point_value());
    std::string s;
    s += region.lower_closed() ? '[' : '(';
    s += format_number(region.lower());
    s += ", ";
    s += format_number(region.upper());
    s += region.upper_closed() ? ']' : ')';
    return s;
}

} // namespace

std::string canonical_config_text(const ExperimentConfig& config, std::uint64_t resolved_seed) {
    const ReplicationSetup& s = config.setup;
    std::ostringstream out;
    out << "# resolved experiment configuration (schema_version 1)\n";
    out << "model.variance = " << format_number(s.model.variance()) << "\n";
    out << "hypotheses.theta1 = " << region_literal(s.hypotheses.theta1) << "\n";
    out << "hypotheses.theta2 = " << region_literal(s.hypotheses.theta2) << "\n";
    out << "prior.w = " << format_number(s.prior.w()) << "\n";
    out << "prior.within1 = " << s.prior.within1().to_string() << "\n";
    out << "prior.within2 = " << s.prior.within2().to_string() << "\n";
    out << "measures = ";
    for (std::size_t i = 0; i < s.suite.measures.size(); ++i) {
        if (i > 0) out << ", ";
        out << to_string(s.suite.measures[i]);
    }
    out << "\n";
    out << "calibration.alpha_s = " << format_number(s.suite.alpha_s) << "\n";
    out << "calibration.k_s = " << format_number(s.suite.k_s) << "\n";
    out << "calibration.bf_threshold = " << format_number(s.suite.bf_threshold) << "\n";
    if (s.evidence_prior.has_value()) {
        out << "evidence_prior.q1_mass = " << format_number(s.evidence_prior->q_theta1_mass())
            << "\n";
        out << "evidence_prior.within1 = " << s.evidence_prior->q1().to_string() << "\n";
        out << "evidence_prior.within2 = " << s.evidence_prior->q2().to_string() << "\n";
    }
    out << "sweep.n_grid = ";
    for (std::size_t i = 0; i < config.grid.n_grid.size(); ++i) {
        if (i > 0) out << ", ";
        out << config.grid.n_grid[i];
    }
    out << "\n";
    out << "sweep.replications = " << config.grid.replications_per_n << "\n";
    out << "seed = " << resolved_seed << "\n";
    out << "sampling.fast_path = " << (s.use_sufficient_fast_path ? "true" : "false") << "\n";
    out << "output.prefix = " << config.output_prefix << "\n";
    return out.str();
}

} // namespace evidence
