#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "redsm/montecarlo.hpp"

namespace redsm {

struct Scenario {
    std::string name = "custom";
    std::vector<int> d_grid{2};
    std::vector<double> theta_grid{1.5707963267948966};
    std::vector<double> nu_grid{0.0};
    std::vector<long long> nc_grid;
    std::vector<Protocol> protocols;
    StateKind states = StateKind::pure_nonneg;
    CMatrix fixed_rho;                       // used when states == fixed
    int batches = 100;
    BudgetMode budget = BudgetMode::paper_P0;
    BatchMode batch_mode = BatchMode::paper;
    bool exact = false;
    std::uint64_t seed = 42;
    std::string out_path;                    // default "<name>.csv"
    bool mub_primes_only = false;            // skip the MUB rows at composite d
    bool mub_constant_in_theta = false;      // compute MUB once, replicate per theta
    bool echo_reconstruction = false;        // print the reconstructed matrix
};

struct CsvRow {
    std::string scenario;
    std::string protocol;
    int d = 0;
    double theta = 0.0;
    double nu = 0.0;
    long long n_c = 0;
    double mean_trace_dist = 0.0;
    double std_trace_dist = 0.0;
    int batches = 0;
    std::uint64_t seed = 0;
};

struct ScenarioReport {
    std::vector<CsvRow> rows;
    std::string summary;
};

using KvList = std::vector<std::pair<std::string, std::string>>;

// "0.25pi" (multiples of pi) or a plain radian value.
double parse_theta_value(const std::string& text, const std::string& key);

// key = value lines, '#' starts a comment, blank lines ignored.
KvList parse_kv_text(const std::string& text);

// Baseline grids and protocol sets for the named scenario; BadIndex on an
// unknown name.
Scenario scenario_defaults(const std::string& name);

// Defaults, then file entries, then flag overrides, validated as applied.
// Errors carry the offending key name.
Scenario parse_config(const std::string& name, const KvList& file_entries,
                      const KvList& flag_entries);

// All grid points in deterministic order (d, theta, nu, N_c, protocol).
ScenarioReport run_scenario(const Scenario& s);

std::string csv_header();
std::string csv_line(const CsvRow& r);
void write_csv(const std::string& path, const std::vector<CsvRow>& rows);

// The mixed-state worked example used by the fig5 scenario.
CMatrix reference_mixed_state();

} // namespace redsm
