#pragma once

#include <map>
#include <string>
#include <vector>

#include "redsm/qmath.hpp"

namespace redsm {

struct MeasurementSetting {
    std::string id;
    std::vector<CVector> projectors; // orthonormal, complete over the measured space
};

// Two-qubit (e,p) settings for the rebit protocols. SSB: the four Pauli pair
// bases XX, XY, YX, YY (product D/A and L/R vectors) plus the computational
// basis. BBB: the Bell basis, its i-phase variant, and the computational basis.
std::vector<MeasurementSetting> ssb_settings();
std::vector<MeasurementSetting> bbb_settings();

// Single-qubit pointer bases Z, X, Y for the plain DSM runs.
std::vector<MeasurementSetting> pointer_settings();

// d+1 mutually unbiased bases: computational plus the d quadratic-phase
// Fourier bases. Defined for prime d only.
std::vector<MeasurementSetting> mub_bases(int d); // NotPrime

// Conjugate-run relabeling for a two-qubit setting: outcome k observed at
// branch j of the sign-flipped channel carries the same information as
// outcome perm[k] at branch d-j of the reference channel.
const std::vector<int>& conjugate_permutation(const std::string& setting_id);

struct ProbKey {
    int n;
    int j;
    std::string setting;
    bool operator<(const ProbKey& o) const {
        if (n != o.n) return n < o.n;
        if (j != o.j) return j < o.j;
        return setting < o.setting;
    }
};

struct ProbCell {
    std::vector<Cplx> vals; // exact probabilities, frequencies, or combined complex cells
    double copies = 0.0;
};

struct ProbTable {
    std::map<ProbKey, ProbCell> cells;
    void put(int n, int j, const std::string& setting, std::vector<Cplx> vals, double copies = 0.0);
    bool has(int n, int j, const std::string& setting) const;
    const ProbCell& at(int n, int j, const std::string& setting) const; // MissingSetting
};

// Combine per-channel joint (j,outcome) frequency tables f0, f1 (indexed
// [j][k]) into the complex cells the extractors read:
//   cell[j][k] = (f0[j][k] + f0[d-j][perm[k]])/2 + (f1[j][k] - f1[d-j][perm[k]])/(2i)
// with perm the setting's conjugate permutation.
std::vector<std::vector<Cplx>> combine_channels(const std::vector<std::vector<double>>& f0,
                                                const std::vector<std::vector<double>>& f1,
                                                const std::string& setting_id);

// Pure rebit protocol: amplitudes from the |11> and |01> outcome
// probabilities, then L2 normalization. Component n uses
// sqrt(d*p11[n])/sin(theta) for the real part, p01 for the imaginary part.
CVector redsm_pure_estimate(const std::vector<double>& p11, const std::vector<double>& p01,
                            double theta); // ZeroNorm

// Plain DSM forward model for a pure state: unnormalized 2x2 pointer state
// (1/d) v v^dagger with v = (Sigma - eps*psi_n, i*sin(theta)*psi_n).
CMatrix dsm_pure_forward(const CVector& psi, int n, double theta);

// Inverts the forward model: alpha_n = -i*d*coh[n]/sin(theta)
// + d*eps*p1[n]/sin^2(theta) recovers psi_n * conj(Sigma); the global phase
// is fixed so that sum_n alpha_n (= |Sigma|^2) is real nonnegative.
CVector dsm_pure_estimate(const std::vector<double>& p1, const std::vector<Cplx>& coh,
                          double theta); // DegenerateSigma

// (<X> + i<Y>)/2 from the X and Y setting cells at (n,j); with unnormalized
// frequencies this is the acceptance-weighted pointer coherence rho^p_{1,0}.
Cplx pointer_coherence(const ProbTable& t, int n, int j); // MissingSetting

struct ExtractedCell {
    Cplx rho30, rho12, rho33, rho11;
};

// Element extraction at one (n,j) from the five SSB cells: Pauli correlators
// give rho30 = (XX - YY + iXY + iYX)/4, rho12 = (XX + YY + iXY - iYX)/4;
// populations come from the computational cell.
ExtractedCell ssb_extract(const ProbTable& t, int n, int j); // MissingSetting

// Same elements from the three BBB cells via Bell-pair differences.
ExtractedCell bbb_extract(const ProbTable& t, int n, int j); // MissingSetting

struct MixedElements {
    std::vector<std::vector<Cplx>> e30, e12; // [n][j]
    std::vector<Cplx> e33, e11;              // [n], averaged over j
};

enum class ExtractRoute { ssb, bbb };

// Run the chosen extractor over all (n,j) cells of the table.
MixedElements collect_elements(const ProbTable& t, int d, ExtractRoute route);

// Fourier inversion of the extracted elements, then Hermitization and trace
// normalization.
CMatrix redsm_mixed_estimate(const MixedElements& el, double theta); // SingularTheta

// Plain DSM forward model for a density matrix: the d unnormalized 2x2
// pointer blocks conditioned on conjugate outcome j, in closed form.
std::vector<CMatrix> dsm_mixed_forward(const CMatrix& rho, int n, double theta);

// Fourier inversion of pointer populations pop[n] and coherences coh[n][j],
// then Hermitization and trace normalization.
CMatrix dsm_mixed_estimate(const std::vector<double>& pop,
                           const std::vector<std::vector<Cplx>>& coh,
                           double theta); // SingularTheta

// rho = sum_{b,k} p_{b,k} |e_{b,k}><e_{b,k}| - I, Hermitized and normalized.
// Reads cell (0,0,basis.id) for every basis.
CMatrix mub_qst_estimate(const std::vector<MeasurementSetting>& bases,
                         const ProbTable& t); // IncompleteData

// (rho + rho^dagger)/2, then divide by the real trace.
CMatrix hermitize_normalize(const CMatrix& rho);

struct ReconResult {
    CMatrix state;
    double trace_dist = 0.0;
    double min_eigenvalue = 0.0;
    std::string protocol;
};

} // namespace redsm
