#include "redsm/rebit.hpp"

#include <cmath>

namespace redsm {

RebitState embed_pure(const CVector& psi) {
    const int d = psi.dim();
    RebitState r;
    r.dim_system = d;
    r.amplitudes = CVector(2 * d);
    for (int n = 0; n < d; ++n) {
        r.amplitudes[2 * n] = psi[n].real();
        r.amplitudes[2 * n + 1] = psi[n].imag();
    }
    return r;
}

CVector unembed_pure(const RebitState& r) {
    const int d = r.dim_system;
    for (int i = 0; i < 2 * d; ++i)
        if (std::abs(r.amplitudes[i].imag()) > 1e-10)
            throw Error("NotReal", "rebit amplitude has imaginary residue");
    CVector psi(d);
    for (int n = 0; n < d; ++n)
        psi[n] = Cplx(r.amplitudes[2 * n].real(), r.amplitudes[2 * n + 1].real());
    return psi;
}

CMatrix real_form_gate(const CMatrix& u) {
    if (u.rows != u.cols) throw Error("NotUnitary", "not square");
    const int d = u.rows;
    if (max_abs_diff(mul(dagger(u), u), CMatrix::identity(d)) > 1e-10)
        throw Error("NotUnitary", "U^dag U != I");
    CMatrix q(2 * d, 2 * d);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
            double re = u(m, n).real(), im = u(m, n).imag();
            q(2 * m, 2 * n) = re;
            q(2 * m, 2 * n + 1) = -im;
            q(2 * m + 1, 2 * n) = im;
            q(2 * m + 1, 2 * n + 1) = re;
        }
    return q;
}

RebitDensity embed_mixed(const CMatrix& rho) {
    if (rho.rows != rho.cols) throw Error("NotDensityMatrix", "not square");
    const int d = rho.rows;
    if (max_abs_diff(rho, dagger(rho)) > 1e-10)
        throw Error("NotDensityMatrix", "not Hermitian");
    if (std::abs(trace(rho).real() - 1.0) > 1e-10 || std::abs(trace(rho).imag()) > 1e-10)
        throw Error("NotDensityMatrix", "trace != 1");
    RebitDensity rd;
    rd.dim_system = d;
    rd.matrix = CMatrix(2 * d, 2 * d);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
            rd.matrix(m, n) = rho(m, n).real();
            rd.matrix(d + m, d + n) = rho(m, n).imag();
        }
    return rd;
}

}  // namespace redsm
