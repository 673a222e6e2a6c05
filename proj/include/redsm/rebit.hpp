#pragma once
// Real enlarged-space encoding: complex amplitudes stored in an extra qubit.
// Two index layouts coexist deliberately. Pure states use system-major order
// (amplitude of |n>|e> at 2n+e); mixed-state bookkeeping puts the extra qubit
// first (block diagonal over e). Conversion never happens implicitly.

#include "redsm/qmath.hpp"

namespace redsm {

// Pure layout: entries (psi_0^r, psi_0^i, psi_1^r, psi_1^i, ...).
struct RebitState {
    int dim_system = 0;
    CVector amplitudes;  // length 2d, all entries real up to 1e-12
};

// Mixed layout: 2d x 2d with |0><0|_e (x) Re(rho) and |1><1|_e (x) Im(rho)
// blocks; the off-diagonal e-blocks are identically zero. This is a
// bookkeeping object, not a physical density matrix (Im block antisymmetric).
struct RebitDensity {
    int dim_system = 0;
    CMatrix matrix;
};

RebitState embed_pure(const CVector& psi);
CVector unembed_pure(const RebitState& r);  // NotReal above 1e-10 residue

// 2d x 2d real orthogonal matrix acting on the pure layout:
// block (m,n) = [[Re u_mn, -Im u_mn], [Im u_mn, Re u_mn]].
CMatrix real_form_gate(const CMatrix& u);  // NotUnitary

RebitDensity embed_mixed(const CMatrix& rho);  // NotDensityMatrix

}  // namespace redsm
