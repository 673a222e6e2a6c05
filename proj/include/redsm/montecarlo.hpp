#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "redsm/qmath.hpp"
#include "redsm/tomography.hpp"

namespace redsm {

enum class Protocol { dsm_pure, redsm_pure, redsm_ssb, redsm_bbb, dsm_mixed, mub_qst };

std::string protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name); // BadIndex
bool protocol_is_pure(Protocol p); // true for the pure-state-only protocols

enum class BudgetMode { paper_P0, physical_norm };
enum class BatchMode { paper, fixed_state };

struct SampleBudget {
    long long n_c = 0; // copies for one trial
    int batches = 1;
    BudgetMode mode = BudgetMode::paper_P0;
};

struct TrialOutcome {
    std::string protocol;
    double trace_dist = 0.0;
    long long accepted_copies = 0;
    std::uint64_t seed = 0;
};

struct AggregateResult {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation over trials
    std::vector<TrialOutcome> trials;
};

// Smallest index k with u < cdf[k], found by bisection. cdf must be
// nondecreasing and end at the distribution total; u lies in [0, total).
int categorical_sample(const std::vector<double>& cdf, double u); // EmptyDistribution

// Floor split of total over cells; the remainder goes to the lowest indices.
std::vector<long long> split_alloc(long long total, int cells);

// One finite-copy trial. budget.n_c copies are spent on this trial alone.
// Pure protocols discard rejected copies (paper_P0 budgets the accepted
// count per probe directly; physical_norm spends sent copies and samples the
// rejection branch). mub_qst on a pure input splits copies across bases.
TrialOutcome simulate_pure(Protocol p, const CVector& psi, double theta,
                           const SampleBudget& budget, Prng& rng); // BudgetTooSmall

// Mixed-state trial: every postselection branch is kept, so each copy lands
// in some j and contributes one outcome to every setting table of its probe.
// mub_qst on a mixed input measures every basis with the full trial budget.
TrialOutcome simulate_mixed(Protocol p, const CMatrix& rho, double theta,
                            const SampleBudget& budget, Prng& rng); // BudgetTooSmall

// Same trials, but returning the full reconstruction.
ReconResult reconstruct_pure(Protocol p, const CVector& psi, double theta,
                             const SampleBudget& budget, Prng& rng,
                             long long* accepted = nullptr);
ReconResult reconstruct_mixed(Protocol p, const CMatrix& rho, double theta,
                              const SampleBudget& budget, Prng& rng,
                              long long* accepted = nullptr);

// Infinite-statistics path: each estimator is fed its exact probability
// tables instead of sampled frequencies.
ReconResult exact_pure(Protocol p, const CVector& psi, double theta);
ReconResult exact_mixed(Protocol p, const CMatrix& rho, double theta);

enum class StateKind { pure_nonneg, pure_haar, mixed_full, nearly_pure, fixed };

struct RunConfig {
    Protocol protocol = Protocol::redsm_pure;
    int d = 2;
    double theta = 1.5707963267948966;
    double nu = 0.0;                        // mixing weight for nearly_pure
    StateKind states = StateKind::pure_nonneg;
    CVector fixed_psi;                      // used when states == fixed
    CMatrix fixed_rho;
    long long n_c = 0;                      // total copies across the run
    int batches = 1;
    BudgetMode budget = BudgetMode::paper_P0;
    BatchMode batch_mode = BatchMode::paper;
    bool exact = false;
    std::uint64_t seed = 0;
};

// M trials on substreams split from the master seed. Paper mode draws a
// fresh state per trial and gives each n_c/batches copies; fixed-state mode
// shares one state and gives each trial the full n_c.
AggregateResult run_batches(const RunConfig& cfg);

} // namespace redsm
