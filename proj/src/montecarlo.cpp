#include "redsm/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "redsm/coupling.hpp"

namespace redsm {

std::string protocol_name(Protocol p) {
    switch (p) {
        case Protocol::dsm_pure: return "dsm";
        case Protocol::redsm_pure: return "redsm_pure";
        case Protocol::redsm_ssb: return "redsm_ssb";
        case Protocol::redsm_bbb: return "redsm_bbb";
        case Protocol::dsm_mixed: return "dsm_mixed";
        case Protocol::mub_qst: return "mub_qst";
    }
    return "?";
}

Protocol protocol_from_name(const std::string& name) {
    if (name == "dsm") return Protocol::dsm_pure;
    if (name == "redsm_pure") return Protocol::redsm_pure;
    if (name == "redsm_ssb") return Protocol::redsm_ssb;
    if (name == "redsm_bbb") return Protocol::redsm_bbb;
    if (name == "dsm_mixed") return Protocol::dsm_mixed;
    if (name == "mub_qst") return Protocol::mub_qst;
    throw Error("BadIndex", "unknown protocol: " + name);
}

bool protocol_is_pure(Protocol p) {
    return p == Protocol::dsm_pure || p == Protocol::redsm_pure;
}

int categorical_sample(const std::vector<double>& cdf, double u) {
    if (cdf.empty() || !(cdf.back() > 0.0))
        throw Error("EmptyDistribution", "categorical distribution has no mass");
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(it - cdf.begin());
}

std::vector<long long> split_alloc(long long total, int cells) {
    const long long base = total / cells;
    const long long rem = total % cells;
    std::vector<long long> out(static_cast<std::size_t>(cells), base);
    for (long long i = 0; i < rem; ++i) out[static_cast<std::size_t>(i)] += 1;
    return out;
}

namespace {

// counts over len(w) outcomes from `draws` copies; w are nonnegative weights
std::vector<long long> draw_counts(const std::vector<double>& w, long long draws, Prng& rng) {
    std::vector<long long> counts(w.size(), 0);
    if (draws <= 0) return counts;
    std::vector<double> cdf(w.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        acc += std::max(w[k], 0.0);
        cdf[k] = acc;
    }
    for (long long c = 0; c < draws; ++c) {
        const double u = rng.next_double() * acc;
        int k = categorical_sample(cdf, u);
        if (k >= static_cast<int>(w.size())) k = static_cast<int>(w.size()) - 1;
        counts[static_cast<std::size_t>(k)] += 1;
    }
    return counts;
}

std::vector<double> setting_weights(const CMatrix& state, const MeasurementSetting& s) {
    std::vector<double> w(s.projectors.size());
    for (std::size_t k = 0; k < s.projectors.size(); ++k)
        w[k] = std::max(expect(s.projectors[k], state).real(), 0.0);
    return w;
}

ReconResult finish_mixed(const CMatrix& rec, const CMatrix& rho, Protocol p) {
    ReconResult r;
    r.state = rec;
    r.trace_dist = trace_distance(rec, rho);
    r.min_eigenvalue = hermitian_eig(rec).eigenvalues.back();
    r.protocol = protocol_name(p);
    return r;
}

ReconResult finish_pure(const CVector& est, const CVector& psi, Protocol p) {
    const CMatrix rec = outer(est, est);
    ReconResult r;
    r.state = rec;
    r.trace_dist = trace_distance(rec, outer(psi, psi));
    r.min_eigenvalue = hermitian_eig(rec).eigenvalues.back();
    r.protocol = protocol_name(p);
    return r;
}

ReconResult sample_redsm_pure(const CVector& psi, double theta, long long copies,
                              BudgetMode mode, Prng& rng, long long& accepted) {
    const int d = static_cast<int>(psi.dim());
    std::vector<double> p11(static_cast<std::size_t>(d)), p01(static_cast<std::size_t>(d));
    if (mode == BudgetMode::paper_P0) {
        // budget counts accepted copies: copies/d survivors per probe, and the
        // conditional frequencies are rescaled by the nominal acceptance 1/d
        const long long a = copies / d;
        if (a <= 0) throw Error("BudgetTooSmall", "no accepted copies per probe");
        for (int n = 0; n < d; ++n) {
            const PostselectedPure ps = postselect_pure(psi, n, theta);
            std::vector<double> w(4);
            for (int k = 0; k < 4; ++k) w[static_cast<std::size_t>(k)] = std::norm(ps.eta.v[static_cast<std::size_t>(k)]);
            const auto counts = draw_counts(w, a, rng);
            p11[static_cast<std::size_t>(n)] = static_cast<double>(counts[3]) / a / d;
            p01[static_cast<std::size_t>(n)] = static_cast<double>(counts[1]) / a / d;
            accepted += a;
        }
    } else {
        const auto alloc = split_alloc(copies, d);
        for (int n = 0; n < d; ++n) {
            const long long sent = alloc[static_cast<std::size_t>(n)];
            if (sent <= 0) throw Error("BudgetTooSmall", "no copies sent at a probe");
            const PostselectedPure ps = postselect_pure(psi, n, theta);
            std::vector<double> w(5);
            double tot = 0.0;
            for (int k = 0; k < 4; ++k) {
                w[static_cast<std::size_t>(k)] = std::norm(ps.eta.v[static_cast<std::size_t>(k)]);
                tot += w[static_cast<std::size_t>(k)];
            }
            w[4] = std::max(1.0 - tot, 0.0); // rejected postselection branches
            const auto counts = draw_counts(w, sent, rng);
            p11[static_cast<std::size_t>(n)] = static_cast<double>(counts[3]) / sent;
            p01[static_cast<std::size_t>(n)] = static_cast<double>(counts[1]) / sent;
            accepted += counts[0] + counts[1] + counts[2] + counts[3];
        }
    }
    return finish_pure(redsm_pure_estimate(p11, p01, theta), psi, Protocol::redsm_pure);
}

ReconResult sample_dsm_pure(const CVector& psi, double theta, long long copies,
                            BudgetMode mode, Prng& rng, long long& accepted) {
    const int d = static_cast<int>(psi.dim());
    const auto settings = pointer_settings();
    std::vector<double> p1(static_cast<std::size_t>(d));
    std::vector<Cplx> coh(static_cast<std::size_t>(d));
    for (int n = 0; n < d; ++n) {
        const CMatrix m = dsm_pure_forward(psi, n, theta);
        const double wacc = trace(m).real();
        const long long per_probe = mode == BudgetMode::paper_P0
                                        ? copies / d
                                        : split_alloc(copies, d)[static_cast<std::size_t>(n)];
        const auto setc = split_alloc(per_probe, 3);
        ProbTable t;
        for (std::size_t si = 0; si < settings.size(); ++si) {
            const long long a = setc[si];
            if (a <= 0) throw Error("BudgetTooSmall", "no copies for a pointer setting");
            std::vector<double> w = setting_weights(m, settings[si]);
            std::vector<Cplx> freqs(w.size());
            if (mode == BudgetMode::paper_P0) {
                const auto counts = draw_counts(w, a, rng);
                for (std::size_t k = 0; k < w.size(); ++k)
                    freqs[k] = static_cast<double>(counts[k]) / a / d;
                accepted += a;
            } else {
                std::vector<double> w5 = w;
                w5.push_back(std::max(1.0 - wacc, 0.0));
                const auto counts = draw_counts(w5, a, rng);
                for (std::size_t k = 0; k < w.size(); ++k) {
                    freqs[k] = static_cast<double>(counts[k]) / a;
                    accepted += counts[k];
                }
            }
            t.put(n, 0, settings[si].id, std::move(freqs), static_cast<double>(a));
        }
        p1[static_cast<std::size_t>(n)] = t.at(n, 0, "Z").vals[1].real();
        coh[static_cast<std::size_t>(n)] = pointer_coherence(t, n, 0);
    }
    return finish_pure(dsm_pure_estimate(p1, coh, theta), psi, Protocol::dsm_pure);
}

ReconResult sample_mub(const CMatrix& rho, long long copies, bool split_over_bases,
                       Prng& rng, long long& accepted) {
    const int d = static_cast<int>(rho.rows);
    const auto bases = mub_bases(d);
    const auto alloc = split_over_bases
                           ? split_alloc(copies, static_cast<int>(bases.size()))
                           : std::vector<long long>(bases.size(), copies);
    ProbTable t;
    for (std::size_t b = 0; b < bases.size(); ++b) {
        const long long a = alloc[b];
        if (a <= 0) throw Error("BudgetTooSmall", "no copies for a basis");
        const std::vector<double> w = setting_weights(rho, bases[b]);
        const auto counts = draw_counts(w, a, rng);
        std::vector<Cplx> freqs(w.size());
        for (std::size_t k = 0; k < w.size(); ++k)
            freqs[k] = static_cast<double>(counts[k]) / a;
        t.put(0, 0, bases[b].id, std::move(freqs), static_cast<double>(a));
        accepted += a;
    }
    CMatrix rec = mub_qst_estimate(bases, t);
    ReconResult r = finish_mixed(rec, rho, Protocol::mub_qst);
    return r;
}

ReconResult sample_redsm_mixed(Protocol p, const CMatrix& rho, double theta, long long copies,
                               Prng& rng, long long& accepted) {
    const int d = static_cast<int>(rho.rows);
    const auto settings = p == Protocol::redsm_ssb ? ssb_settings() : bbb_settings();
    const auto alloc = split_alloc(copies, d);
    ProbTable table;
    for (int n = 0; n < d; ++n) {
        const long long an = alloc[static_cast<std::size_t>(n)];
        if (an <= 0) throw Error("BudgetTooSmall", "no copies at a probe");
        const std::vector<CMatrix> outs[2] = {channel_outputs(rho, n, theta, 0),
                                              channel_outputs(rho, n, theta, 1)};
        // every copy is kept: draw its branch once, then tally one outcome per
        // channel/setting table from the branch-conditional distribution
        std::vector<double> pj(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j)
            pj[static_cast<std::size_t>(j)] = std::max(trace(outs[0][static_cast<std::size_t>(j)]).real(), 0.0);
        const auto jc = draw_counts(pj, an, rng);
        accepted += an;
        std::vector<std::vector<std::vector<std::vector<double>>>> freq(
            2, std::vector<std::vector<std::vector<double>>>(settings.size()));
        for (int e = 0; e < 2; ++e)
            for (std::size_t si = 0; si < settings.size(); ++si) {
                auto& rows = freq[static_cast<std::size_t>(e)][si];
                rows.resize(static_cast<std::size_t>(d));
                for (int j = 0; j < d; ++j) {
                    const std::vector<double> w =
                        setting_weights(outs[e][static_cast<std::size_t>(j)], settings[si]);
                    const auto counts = draw_counts(w, jc[static_cast<std::size_t>(j)], rng);
                    auto& row = rows[static_cast<std::size_t>(j)];
                    row.resize(w.size());
                    for (std::size_t k = 0; k < w.size(); ++k)
                        row[k] = static_cast<double>(counts[k]) / an;
                }
            }
        for (std::size_t si = 0; si < settings.size(); ++si) {
            const auto cells = combine_channels(freq[0][si], freq[1][si], settings[si].id);
            for (int j = 0; j < d; ++j)
                table.put(n, j, settings[si].id, cells[static_cast<std::size_t>(j)],
                          static_cast<double>(an));
        }
    }
    const MixedElements el = collect_elements(
        table, d, p == Protocol::redsm_ssb ? ExtractRoute::ssb : ExtractRoute::bbb);
    return finish_mixed(redsm_mixed_estimate(el, theta), rho, p);
}

ReconResult sample_dsm_mixed(const CMatrix& rho, double theta, long long copies, Prng& rng,
                             long long& accepted) {
    const int d = static_cast<int>(rho.rows);
    const auto settings = pointer_settings();
    const auto alloc = split_alloc(copies, d);
    std::vector<double> pop(static_cast<std::size_t>(d), 0.0);
    std::vector<std::vector<Cplx>> coh(static_cast<std::size_t>(d),
                                       std::vector<Cplx>(static_cast<std::size_t>(d)));
    for (int n = 0; n < d; ++n) {
        const long long an = alloc[static_cast<std::size_t>(n)];
        if (an <= 0) throw Error("BudgetTooSmall", "no copies at a probe");
        const auto outs = dsm_mixed_forward(rho, n, theta);
        std::vector<double> pj(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j)
            pj[static_cast<std::size_t>(j)] = std::max(trace(outs[static_cast<std::size_t>(j)]).real(), 0.0);
        const auto jc = draw_counts(pj, an, rng);
        accepted += an;
        ProbTable t;
        for (const auto& s : settings) {
            for (int j = 0; j < d; ++j) {
                const std::vector<double> w = setting_weights(outs[static_cast<std::size_t>(j)], s);
                const auto counts = draw_counts(w, jc[static_cast<std::size_t>(j)], rng);
                std::vector<Cplx> freqs(w.size());
                for (std::size_t k = 0; k < w.size(); ++k)
                    freqs[k] = static_cast<double>(counts[k]) / an;
                t.put(n, j, s.id, std::move(freqs), static_cast<double>(an));
            }
        }
        for (int j = 0; j < d; ++j) {
            pop[static_cast<std::size_t>(n)] +=
                t.at(n, j, "Z").vals[1].real() / static_cast<double>(d);
            coh[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] =
                pointer_coherence(t, n, j);
        }
    }
    return finish_mixed(dsm_mixed_estimate(pop, coh, theta), rho, Protocol::dsm_mixed);
}

} // namespace

ReconResult reconstruct_pure(Protocol p, const CVector& psi, double theta,
                             const SampleBudget& budget, Prng& rng, long long* accepted) {
    long long acc = 0;
    ReconResult r;
    switch (p) {
        case Protocol::redsm_pure:
            r = sample_redsm_pure(psi, theta, budget.n_c, budget.mode, rng, acc);
            break;
        case Protocol::dsm_pure:
            r = sample_dsm_pure(psi, theta, budget.n_c, budget.mode, rng, acc);
            break;
        case Protocol::mub_qst: {
            const CMatrix rho = outer(psi, psi);
            r = sample_mub(rho, budget.n_c, /*split_over_bases=*/true, rng, acc);
            break;
        }
        default:
            throw Error("BadIndex", "protocol needs a mixed-state input");
    }
    if (accepted) *accepted = acc;
    return r;
}

ReconResult reconstruct_mixed(Protocol p, const CMatrix& rho, double theta,
                              const SampleBudget& budget, Prng& rng, long long* accepted) {
    long long acc = 0;
    ReconResult r;
    switch (p) {
        case Protocol::redsm_ssb:
        case Protocol::redsm_bbb:
            r = sample_redsm_mixed(p, rho, theta, budget.n_c, rng, acc);
            break;
        case Protocol::dsm_mixed:
            r = sample_dsm_mixed(rho, theta, budget.n_c, rng, acc);
            break;
        case Protocol::mub_qst:
            r = sample_mub(rho, budget.n_c, /*split_over_bases=*/false, rng, acc);
            break;
        default:
            throw Error("BadIndex", "protocol needs a pure-state input");
    }
    if (accepted) *accepted = acc;
    return r;
}

TrialOutcome simulate_pure(Protocol p, const CVector& psi, double theta,
                           const SampleBudget& budget, Prng& rng) {
    TrialOutcome out;
    out.protocol = protocol_name(p);
    out.seed = rng.s;
    long long acc = 0;
    out.trace_dist = reconstruct_pure(p, psi, theta, budget, rng, &acc).trace_dist;
    out.accepted_copies = acc;
    return out;
}

TrialOutcome simulate_mixed(Protocol p, const CMatrix& rho, double theta,
                            const SampleBudget& budget, Prng& rng) {
    TrialOutcome out;
    out.protocol = protocol_name(p);
    out.seed = rng.s;
    long long acc = 0;
    out.trace_dist = reconstruct_mixed(p, rho, theta, budget, rng, &acc).trace_dist;
    out.accepted_copies = acc;
    return out;
}

ReconResult exact_pure(Protocol p, const CVector& psi, double theta) {
    const int d = static_cast<int>(psi.dim());
    switch (p) {
        case Protocol::redsm_pure: {
            std::vector<double> p11(static_cast<std::size_t>(d)), p01(static_cast<std::size_t>(d));
            for (int n = 0; n < d; ++n) {
                const PostselectedPure ps = postselect_pure(psi, n, theta);
                p11[static_cast<std::size_t>(n)] = std::norm(ps.eta.v[3]);
                p01[static_cast<std::size_t>(n)] = std::norm(ps.eta.v[1]);
            }
            return finish_pure(redsm_pure_estimate(p11, p01, theta), psi, p);
        }
        case Protocol::dsm_pure: {
            std::vector<double> p1(static_cast<std::size_t>(d));
            std::vector<Cplx> coh(static_cast<std::size_t>(d));
            for (int n = 0; n < d; ++n) {
                const CMatrix m = dsm_pure_forward(psi, n, theta);
                p1[static_cast<std::size_t>(n)] = m(1, 1).real();
                coh[static_cast<std::size_t>(n)] = m(1, 0);
            }
            return finish_pure(dsm_pure_estimate(p1, coh, theta), psi, p);
        }
        case Protocol::mub_qst:
            return exact_mixed(p, outer(psi, psi), theta);
        default:
            throw Error("BadIndex", "protocol needs a mixed-state input");
    }
}

ReconResult exact_mixed(Protocol p, const CMatrix& rho, double theta) {
    const int d = static_cast<int>(rho.rows);
    switch (p) {
        case Protocol::redsm_ssb:
        case Protocol::redsm_bbb: {
            const auto settings = p == Protocol::redsm_ssb ? ssb_settings() : bbb_settings();
            ProbTable table;
            for (int n = 0; n < d; ++n)
                for (int j = 0; j < d; ++j) {
                    const CMatrix f = postselect_mixed(rho, n, j, theta).rho_out;
                    for (const auto& s : settings) {
                        std::vector<Cplx> vals(s.projectors.size());
                        for (std::size_t k = 0; k < s.projectors.size(); ++k)
                            vals[k] = expect(s.projectors[k], f);
                        table.put(n, j, s.id, std::move(vals));
                    }
                }
            const MixedElements el = collect_elements(
                table, d, p == Protocol::redsm_ssb ? ExtractRoute::ssb : ExtractRoute::bbb);
            return finish_mixed(redsm_mixed_estimate(el, theta), rho, p);
        }
        case Protocol::dsm_mixed: {
            std::vector<double> pop(static_cast<std::size_t>(d), 0.0);
            std::vector<std::vector<Cplx>> coh(static_cast<std::size_t>(d),
                                               std::vector<Cplx>(static_cast<std::size_t>(d)));
            for (int n = 0; n < d; ++n) {
                const auto outs = dsm_mixed_forward(rho, n, theta);
                for (int j = 0; j < d; ++j) {
                    pop[static_cast<std::size_t>(n)] +=
                        outs[static_cast<std::size_t>(j)](1, 1).real() / static_cast<double>(d);
                    coh[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] =
                        outs[static_cast<std::size_t>(j)](1, 0);
                }
            }
            return finish_mixed(dsm_mixed_estimate(pop, coh, theta), rho, p);
        }
        case Protocol::mub_qst: {
            const auto bases = mub_bases(d);
            ProbTable t;
            for (const auto& b : bases) {
                std::vector<Cplx> vals(b.projectors.size());
                for (std::size_t k = 0; k < b.projectors.size(); ++k)
                    vals[k] = expect(b.projectors[k], rho);
                t.put(0, 0, b.id, std::move(vals));
            }
            return finish_mixed(mub_qst_estimate(bases, t), rho, p);
        }
        default:
            throw Error("BadIndex", "protocol needs a pure-state input");
    }
}

AggregateResult run_batches(const RunConfig& cfg) {
    if (cfg.batches < 1)
        throw Error("BudgetTooSmall", "batch count must be positive");
    const long long per =
        cfg.batch_mode == BatchMode::paper ? cfg.n_c / cfg.batches : cfg.n_c;
    if (!cfg.exact && per <= 0)
        throw Error("BudgetTooSmall", "no copies per trial");

    const Prng master(cfg.seed);
    const bool pure_input =
        protocol_is_pure(cfg.protocol) ||
        (cfg.protocol == Protocol::mub_qst &&
         (cfg.states == StateKind::pure_nonneg || cfg.states == StateKind::pure_haar ||
          (cfg.states == StateKind::fixed && cfg.fixed_psi.dim() > 0)));

    const bool pure_source = cfg.states == StateKind::pure_nonneg ||
                             cfg.states == StateKind::pure_haar;
    if (pure_input && !pure_source && cfg.states != StateKind::fixed)
        throw Error("BadIndex", "pure protocol needs a pure state source");

    // fixed-state mode shares one state across trials; stream index `batches`
    // cannot collide with any trial stream
    CVector shared_psi = cfg.fixed_psi;
    CMatrix shared_rho = cfg.fixed_rho;
    if (cfg.states == StateKind::fixed && !pure_input && shared_rho.rows == 0 &&
        shared_psi.dim() > 0)
        shared_rho = outer(shared_psi, shared_psi);
    if (cfg.batch_mode == BatchMode::fixed_state && cfg.states != StateKind::fixed) {
        Prng gen = master.split(static_cast<std::uint64_t>(cfg.batches));
        if (pure_source) {
            shared_psi = random_pure(cfg.d,
                                     cfg.states == StateKind::pure_haar ? PureMode::haar
                                                                        : PureMode::nonneg,
                                     gen);
            if (!pure_input) shared_rho = outer(shared_psi, shared_psi);
        } else if (cfg.states == StateKind::nearly_pure) {
            const CVector psi = random_pure(cfg.d, PureMode::haar, gen);
            shared_rho = nearly_pure(psi, cfg.nu);
        } else {
            shared_rho = random_mixed(cfg.d, gen);
        }
    }

    AggregateResult agg;
    agg.trials.reserve(static_cast<std::size_t>(cfg.batches));
    for (int i = 0; i < cfg.batches; ++i) {
        Prng sub = master.split(static_cast<std::uint64_t>(i));
        CVector psi = shared_psi;
        CMatrix rho = shared_rho;
        if (cfg.batch_mode == BatchMode::paper && cfg.states != StateKind::fixed) {
            if (pure_source) {
                psi = random_pure(cfg.d,
                                  cfg.states == StateKind::pure_haar ? PureMode::haar
                                                                     : PureMode::nonneg,
                                  sub);
                if (!pure_input) rho = outer(psi, psi);
            } else if (cfg.states == StateKind::nearly_pure) {
                const CVector base = random_pure(cfg.d, PureMode::haar, sub);
                rho = nearly_pure(base, cfg.nu);
            } else {
                rho = random_mixed(cfg.d, sub);
            }
        }
        TrialOutcome t;
        if (cfg.exact) {
            const ReconResult r = pure_input ? exact_pure(cfg.protocol, psi, cfg.theta)
                                             : exact_mixed(cfg.protocol, rho, cfg.theta);
            t.protocol = r.protocol;
            t.trace_dist = r.trace_dist;
            t.seed = sub.s;
        } else {
            const SampleBudget b{per, cfg.batches, cfg.budget};
            t = pure_input ? simulate_pure(cfg.protocol, psi, cfg.theta, b, sub)
                           : simulate_mixed(cfg.protocol, rho, cfg.theta, b, sub);
        }
        agg.trials.push_back(std::move(t));
    }

    double mean = 0.0;
    for (const auto& t : agg.trials) mean += t.trace_dist;
    mean /= static_cast<double>(agg.trials.size());
    double var = 0.0;
    if (agg.trials.size() > 1) {
        for (const auto& t : agg.trials) {
            const double dlt = t.trace_dist - mean;
            var += dlt * dlt;
        }
        var /= static_cast<double>(agg.trials.size() - 1);
    }
    agg.mean = mean;
    agg.stddev = std::sqrt(var);
    return agg;
}

} // namespace redsm
