#pragma once

#include <vector>

#include "redsm/qmath.hpp"

namespace redsm {

// Tensor factor order of the three-body coupling.
// pure:  system (x) extra (x) pointer
// mixed: extra (x) system (x) pointer
enum class Layout { pure, mixed };

struct InteractionSpec {
    int d = 2;          // system dimension
    int n = 0;          // probed basis index, 0 <= n < d
    double theta = 0.0; // coupling angle, 0 < theta <= pi/2
    Layout layout = Layout::pure;
};

// Coupling unitary on the 4d-dimensional system+extra+pointer space.
// Acts as cos(theta)*I + i*sin(theta)*sigma_y(x)sigma_y on the (e,p) pair
// of the probed system level n, identity elsewhere.
CMatrix interaction(const InteractionSpec& spec);

// Global Molmer-Sorensen gate exp[-i(phi/4)(cos(varphi)Sx + sin(varphi)Sy)^2]
// on n_qubits qubits, built spectrally from the collective spin operator.
CMatrix ms_gate(double phi, double varphi, int n_qubits);

// d=2 gate sequence equal to interaction(): a two-body extra-pointer factor
// times an MS-conjugated z rotation on the system qubit. The two factors
// commute exactly.
CMatrix decomposed_interaction(const InteractionSpec& spec);

struct PostselectedPure {
    CVector eta;        // (e,p) amplitudes in order |00>,|01>,|10>,|11>, unnormalized
    double accept_prob; // = |eta|^2
};

// Pure-state branch after coupling at level n and projecting the system onto
// the uniform conjugate state. eta is left unnormalized so its entries carry
// the raw amplitudes the estimators invert.
PostselectedPure postselect_pure(const CVector& psi, int n, double theta);

struct PostselectedMixed {
    CMatrix rho_out; // 4x4 over (e,p), unnormalized; trace = branch weight
    int n = 0;
    int j = 0;
};

// Mixed-state branch: the block-encoded density operator is coupled at
// level n and the system is contracted against conjugate ket j. The result
// is a formal bookkeeping object (not Hermitian in general) whose entries
// (3,0),(1,2),(3,3),(1,1) encode column n of Re(rho) and Im(rho).
PostselectedMixed postselect_mixed(const CMatrix& rho, int n, int j, double theta);

// Physical forward model for sampling: extra qubit prepared in |e>, system
// in rho, pointer in |0>. Returns the d conditional 4x4 (e,p) operators,
// one per conjugate-basis outcome j; each is Hermitian PSD with trace equal
// to the outcome probability, and the traces are independent of e.
std::vector<CMatrix> channel_outputs(const CMatrix& rho, int n, double theta, int e);

} // namespace redsm
