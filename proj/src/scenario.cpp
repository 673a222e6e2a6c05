#include "redsm/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace redsm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = 1.5707963267948966;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double to_double(const std::string& key, const std::string& tok) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw Error("BadIndex", "key " + key + ": expected a number, got '" + tok + "'");
    }
    if (pos != tok.size())
        throw Error("BadIndex", "key " + key + ": expected a number, got '" + tok + "'");
    return v;
}

long long to_ll(const std::string& key, const std::string& tok) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        throw Error("BadIndex", "key " + key + ": expected an integer, got '" + tok + "'");
    }
    if (pos != tok.size())
        throw Error("BadIndex", "key " + key + ": expected an integer, got '" + tok + "'");
    return v;
}

bool to_bool(const std::string& key, const std::string& tok) {
    if (tok == "true" || tok == "1" || tok == "yes") return true;
    if (tok == "false" || tok == "0" || tok == "no") return false;
    throw Error("BadIndex", "key " + key + ": expected a boolean, got '" + tok + "'");
}

bool small_prime(int n) {
    if (n < 2) return false;
    for (int k = 2; k * k <= n; ++k)
        if (n % k == 0) return false;
    return true;
}

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace

double parse_theta_value(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double v;
    if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
        const std::string head = trim(t.substr(0, t.size() - 2));
        v = (head.empty() ? 1.0 : to_double(key, head)) * kPi;
    } else {
        v = to_double(key, t);
    }
    if (!(v > 0.0) || v > kHalfPi + 1e-12)
        throw Error("BadTheta",
                    "key " + key + ": range violation, need 0<θ≤π/2, got " + t);
    return v;
}

KvList parse_kv_text(const std::string& text) {
    KvList out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("BadIndex",
                        "config line " + std::to_string(lineno) + ": expected key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

CMatrix reference_mixed_state() {
    CMatrix rho(2, 2);
    rho(0, 0) = 0.40693;
    rho(0, 1) = Cplx(0.18711, 0.32119);
    rho(1, 0) = Cplx(0.18711, -0.32119);
    rho(1, 1) = 0.59307;
    return rho;
}

Scenario scenario_defaults(const std::string& name) {
    Scenario s;
    s.name = name;
    const std::vector<long long> nc_sweep{10000, 100000, 1000000, 10000000};
    const std::vector<Protocol> pure_set{Protocol::dsm_pure, Protocol::redsm_pure,
                                         Protocol::mub_qst};
    const std::vector<Protocol> mixed_set{Protocol::redsm_ssb, Protocol::redsm_bbb,
                                          Protocol::dsm_mixed, Protocol::mub_qst};
    if (name == "fig2a") {
        s.nc_grid = nc_sweep;
        s.protocols = pure_set;
        s.states = StateKind::pure_nonneg;
    } else if (name == "fig2b") {
        s.nc_grid = {10000000};
        s.d_grid = {2, 3, 4, 5, 6, 7};
        s.protocols = pure_set;
        s.states = StateKind::pure_nonneg;
        s.mub_primes_only = true;
    } else if (name == "fig3a") {
        s.nc_grid = nc_sweep;
        s.protocols = mixed_set;
        s.states = StateKind::mixed_full;
    } else if (name == "fig3b") {
        s.nc_grid = {10000000};
        s.theta_grid.clear();
        for (int k = 2; k <= 10; ++k) s.theta_grid.push_back(0.05 * k * kPi);
        s.protocols = mixed_set;
        s.states = StateKind::mixed_full;
        s.mub_constant_in_theta = true;
    } else if (name == "fig4a") {
        s.nc_grid = nc_sweep;
        s.nu_grid = {0.10};
        s.protocols = mixed_set;
        s.states = StateKind::nearly_pure;
    } else if (name == "fig4b") {
        s.nc_grid = {1000000};
        s.nu_grid.clear();
        for (int k = 1; k <= 10; ++k) s.nu_grid.push_back(0.01 * k);
        s.protocols = mixed_set;
        s.states = StateKind::nearly_pure;
    } else if (name == "fig5") {
        s.nc_grid = {10000000};
        s.protocols = {Protocol::redsm_ssb};
        s.states = StateKind::fixed;
        s.fixed_rho = reference_mixed_state();
        s.batches = 1;
        s.batch_mode = BatchMode::fixed_state;
        s.echo_reconstruction = true;
    } else if (name == "custom") {
        s.nc_grid = {1000000};
        s.protocols = {};
    } else {
        throw Error("BadIndex", "unknown scenario: " + name);
    }
    s.out_path = name + ".csv";
    return s;
}

namespace {

void apply_entry(Scenario& s, const std::string& key, const std::string& value,
                 bool& states_set) {
    if (key == "d") {
        s.d_grid.clear();
        for (const auto& tok : split_list(value)) {
            const long long d = to_ll(key, tok);
            if (d < 2 || d > 64)
                throw Error("BadIndex", "key d: range violation, need 2 ≤ d ≤ 64, got " + tok);
            s.d_grid.push_back(static_cast<int>(d));
        }
        if (s.d_grid.empty()) throw Error("BadIndex", "key d: empty list");
    } else if (key == "theta") {
        s.theta_grid.clear();
        for (const auto& tok : split_list(value))
            s.theta_grid.push_back(parse_theta_value(tok, key));
        if (s.theta_grid.empty()) throw Error("BadIndex", "key theta: empty list");
    } else if (key == "nu") {
        s.nu_grid.clear();
        for (const auto& tok : split_list(value)) {
            const double nu = to_double(key, tok);
            if (nu < 0.0 || nu > 1.0)
                throw Error("NuOutOfRange", "key nu: range violation, need 0 ≤ ν ≤ 1, got " + tok);
            s.nu_grid.push_back(nu);
        }
        if (s.nu_grid.empty()) throw Error("BadIndex", "key nu: empty list");
    } else if (key == "nc") {
        s.nc_grid.clear();
        for (const auto& tok : split_list(value)) {
            const long long nc = to_ll(key, tok);
            if (nc < 1)
                throw Error("BadIndex", "key nc: range violation, need N_c ≥ 1, got " + tok);
            s.nc_grid.push_back(nc);
        }
        if (s.nc_grid.empty()) throw Error("BadIndex", "key nc: empty list");
    } else if (key == "protocols") {
        s.protocols.clear();
        for (const auto& tok : split_list(value)) {
            try {
                s.protocols.push_back(protocol_from_name(tok));
            } catch (const Error&) {
                throw Error("BadIndex", "key protocols: unknown protocol '" + tok + "'");
            }
        }
    } else if (key == "seed") {
        s.seed = static_cast<std::uint64_t>(to_ll(key, value));
    } else if (key == "batches") {
        const long long m = to_ll(key, value);
        if (m < 1 || m > 1000000)
            throw Error("BadIndex", "key batches: range violation, need M ≥ 1, got " + value);
        s.batches = static_cast<int>(m);
    } else if (key == "budget-mode") {
        if (value == "paper") s.budget = BudgetMode::paper_P0;
        else if (value == "physical") s.budget = BudgetMode::physical_norm;
        else throw Error("BadIndex", "key budget-mode: expected paper or physical, got '" + value + "'");
    } else if (key == "batch-mode") {
        if (value == "paper") s.batch_mode = BatchMode::paper;
        else if (value == "fixed-state") s.batch_mode = BatchMode::fixed_state;
        else throw Error("BadIndex", "key batch-mode: expected paper or fixed-state, got '" + value + "'");
    } else if (key == "exact") {
        s.exact = to_bool(key, value);
    } else if (key == "states") {
        states_set = true;
        if (value == "nonneg") s.states = StateKind::pure_nonneg;
        else if (value == "haar") s.states = StateKind::pure_haar;
        else if (value == "mixed") s.states = StateKind::mixed_full;
        else if (value == "nearly-pure" || value == "nearly_pure") s.states = StateKind::nearly_pure;
        else throw Error("BadIndex", "key states: expected nonneg, haar, mixed or nearly-pure, got '" + value + "'");
    } else if (key == "out") {
        if (value.empty()) throw Error("BadIndex", "key out: empty path");
        s.out_path = value;
    } else {
        throw Error("BadIndex", "unknown key: " + key);
    }
}

} // namespace

Scenario parse_config(const std::string& name, const KvList& file_entries,
                      const KvList& flag_entries) {
    Scenario s = scenario_defaults(name);
    bool states_set = false;
    for (const auto& [k, v] : file_entries) apply_entry(s, k, v, states_set);
    for (const auto& [k, v] : flag_entries) apply_entry(s, k, v, states_set);

    if (s.protocols.empty())
        throw Error("BadIndex", "key protocols: empty protocol list");
    if (name == "custom" && !states_set) {
        bool any_mixed = false;
        for (Protocol p : s.protocols)
            if (!protocol_is_pure(p) && p != Protocol::mub_qst) any_mixed = true;
        bool any_nu = false;
        for (double nu : s.nu_grid)
            if (nu > 0.0) any_nu = true;
        s.states = any_nu ? StateKind::nearly_pure
                          : (any_mixed ? StateKind::mixed_full : StateKind::pure_nonneg);
    }
    for (long long nc : s.nc_grid)
        if (nc < s.batches)
            throw Error("BadIndex", "key nc: range violation, need N_c ≥ batches, got " +
                                            std::to_string(nc));
    return s;
}

namespace {

struct RowPlan {
    int d;
    double theta, nu;
    long long nc;
    Protocol p;
    std::size_t job;
};

} // namespace

ScenarioReport run_scenario(const Scenario& s) {
    std::vector<RunConfig> jobs;
    std::vector<RowPlan> plan;
    std::map<std::string, std::size_t> mub_cache; // one MUB job per (d,nu,nc)

    for (int d : s.d_grid)
        for (double theta : s.theta_grid)
            for (double nu : s.nu_grid)
                for (long long nc : s.nc_grid)
                    for (Protocol p : s.protocols) {
                        if (p == Protocol::mub_qst && s.mub_primes_only && !small_prime(d))
                            continue;
                        if (p == Protocol::mub_qst && s.mub_constant_in_theta) {
                            const std::string key = std::to_string(d) + "|" + fmt9(nu) + "|" +
                                                    std::to_string(nc);
                            auto it = mub_cache.find(key);
                            if (it != mub_cache.end()) {
                                plan.push_back({d, theta, nu, nc, p, it->second});
                                continue;
                            }
                            mub_cache.emplace(key, jobs.size());
                        }
                        RunConfig cfg;
                        cfg.protocol = p;
                        cfg.d = d;
                        cfg.theta = theta;
                        cfg.nu = nu;
                        cfg.states = s.states;
                        cfg.fixed_rho = s.fixed_rho;
                        cfg.n_c = nc;
                        cfg.batches = s.batches;
                        cfg.budget = s.budget;
                        cfg.batch_mode = s.batch_mode;
                        cfg.exact = s.exact;
                        cfg.seed = s.seed;
                        plan.push_back({d, theta, nu, nc, p, jobs.size()});
                        jobs.push_back(std::move(cfg));
                    }

    std::vector<AggregateResult> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    const unsigned workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(jobs.size())));
    std::atomic<std::size_t> cursor{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                results[i] = run_batches(jobs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);

    ScenarioReport rep;
    rep.rows.reserve(plan.size());
    for (const auto& rp : plan) {
        const AggregateResult& a = results[rp.job];
        CsvRow r;
        r.scenario = s.name;
        r.protocol = protocol_name(rp.p);
        r.d = rp.d;
        r.theta = rp.theta;
        r.nu = rp.nu;
        r.n_c = rp.nc;
        r.mean_trace_dist = a.mean;
        r.std_trace_dist = a.stddev;
        r.batches = s.batches;
        r.seed = s.seed;
        rep.rows.push_back(std::move(r));
    }

    // summary: protocols ranked by mean at each grid point
    std::ostringstream sum;
    std::size_t i = 0;
    while (i < rep.rows.size()) {
        std::size_t j = i;
        while (j < rep.rows.size() && rep.rows[j].d == rep.rows[i].d &&
               rep.rows[j].theta == rep.rows[i].theta && rep.rows[j].nu == rep.rows[i].nu &&
               rep.rows[j].n_c == rep.rows[i].n_c)
            ++j;
        std::vector<const CsvRow*> grp;
        for (std::size_t k = i; k < j; ++k) grp.push_back(&rep.rows[k]);
        std::stable_sort(grp.begin(), grp.end(), [](const CsvRow* a, const CsvRow* b) {
            return a->mean_trace_dist < b->mean_trace_dist;
        });
        sum << s.name << " d=" << rep.rows[i].d << " theta=" << fmt_short(rep.rows[i].theta)
            << " nu=" << fmt_short(rep.rows[i].nu) << " N_c=" << rep.rows[i].n_c << ":";
        for (std::size_t k = 0; k < grp.size(); ++k)
            sum << (k ? " < " : " ") << grp[k]->protocol << " ("
                << fmt_short(grp[k]->mean_trace_dist) << ")";
        sum << "\n";
        i = j;
    }

    if (s.echo_reconstruction && s.states == StateKind::fixed && !s.protocols.empty()) {
        const Prng master(s.seed);
        Prng sub = master.split(0);
        const SampleBudget b{s.nc_grid.front(), 1, s.budget};
        const ReconResult rc =
            reconstruct_mixed(s.protocols.front(), s.fixed_rho, s.theta_grid.front(), b, sub);
        sum << "reconstructed state (" << rc.protocol << ", d=" << s.fixed_rho.rows
            << ", N_c=" << s.nc_grid.front() << "):\n";
        for (int r = 0; r < rc.state.rows; ++r) {
            sum << "  [";
            for (int c = 0; c < rc.state.cols; ++c) {
                char buf[64];
                std::snprintf(buf, sizeof buf, " %+.6f%+.6fi", rc.state(r, c).real(),
                              rc.state(r, c).imag());
                sum << buf;
            }
            sum << " ]\n";
        }
        sum << "min eigenvalue " << fmt_short(rc.min_eigenvalue) << ", trace distance "
            << fmt_short(rc.trace_dist) << "\n";
    }
    rep.summary = sum.str();
    return rep;
}

std::string csv_header() {
    return "scenario,protocol,d,theta,nu,N_c,mean_trace_dist,std_trace_dist,batches,seed";
}

std::string csv_line(const CsvRow& r) {
    std::ostringstream os;
    os << r.scenario << ',' << r.protocol << ',' << r.d << ',' << fmt9(r.theta) << ','
       << fmt9(r.nu) << ',' << r.n_c << ',' << fmt9(r.mean_trace_dist) << ','
       << fmt9(r.std_trace_dist) << ',' << r.batches << ',' << r.seed;
    return os.str();
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("BadIndex", "cannot open output file: " + path);
    f << csv_header() << "\n";
    for (const auto& r : rows) f << csv_line(r) << "\n";
    f.flush();
    if (!f) throw Error("BadIndex", "write failed: " + path);
}

} // namespace redsm
