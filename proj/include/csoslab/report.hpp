#pragma once

#include <iosfwd>
#include <optional>

#include "csoslab/spectrum.hpp"

namespace csos {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key = value experiment configuration.
///
/// Grammar: one `key = value` per line; `#` starts a comment; lists are
/// comma-separated integers; complex values are given as two real keys.
/// Keys: N, j, L, ell_list, Q_list, kprime, mu_re, mu_im, rng_seed,
/// eps_radius, eps_points, jobs, suites, yb_pairs, tol.<name>.
struct ExperimentConfig {
    int N = 3, j = 2, L = 3;
    std::vector<int> ell_list;
    std::vector<int> Q_list;
    double kprime = 0.6;
    Cplx mu_seed{0.8, 0.35};
    std::uint64_t rng_seed = 1;
    double eps_radius = 0.06;
    int eps_points = 12;
    int jobs = 1;
    int yb_pairs = 100;
    std::vector<std::string> suites;
    std::map<std::string, double> tol;

    double tolerance(const std::string& name, double fallback) const;
    void validate() const;  // throws ConfigError / DimensionCapError
    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse(std::istream& in);
};

/// One report line: an identity check or a degeneracy-ledger row.
struct SuiteEntry {
    std::string suite;
    std::string id;        // registry name of the identity, or "cluster"
    std::string params;    // human-readable parameter string
    double residual = 0.0; // scaled residual (ratio)
    double tol = 0.0;
    bool pass = true;
    bool flagged = false;  // vacuous/outside-hypotheses/anomaly entries
    std::string note;
    std::optional<DegeneracyRow> row;
};

struct RunReport {
    ExperimentConfig config;
    std::vector<SuiteEntry> entries;
    int n_pass = 0, n_fail = 0, n_flagged = 0;
};

/// Registry metadata served by `explain`.
struct IdentityInfo {
    std::string name;
    std::string statement;  // ASCII rendering of the identity
    std::string anchor;     // what part of the theory it validates
    std::string params;     // default test parameters
};
const std::vector<IdentityInfo>& identity_registry();
const IdentityInfo* find_identity(const std::string& name);

/// Execute the configured suites. Deterministic for fixed (config, seed).
RunReport run_suites(const ExperimentConfig& cfg);

/// Writers: JSON (schema-stable field order, no timing fields) and the flat
/// degeneracy table (tab-separated, one row per cluster).
void write_json_report(const RunReport& rep, const std::string& path);
void write_degeneracy_table(const RunReport& rep, const std::string& path);
void print_human_report(const RunReport& rep, std::ostream& os);

}  // namespace csos
