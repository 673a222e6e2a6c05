#include "redsm/coupling.hpp"

#include <cmath>

#include "redsm/rebit.hpp"

namespace redsm {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_spec(const InteractionSpec& spec) {
    if (!(spec.theta > 0.0) || spec.theta > kPi / 2 + 1e-12)
        throw Error("BadTheta", "coupling angle must lie in (0, pi/2]");
    if (spec.d < 2 || spec.n < 0 || spec.n >= spec.d)
        throw Error("BadIndex", "probed index out of range");
}

// 4x4 block cos(a)*I + i*sin(a)*sigma_y(x)sigma_y over (e,p).
CMatrix ep_block(double a) {
    CMatrix b = CMatrix::zero(4, 4);
    const double c = std::cos(a);
    const Cplx is(0.0, std::sin(a));
    b(0, 0) = c; b(1, 1) = c; b(2, 2) = c; b(3, 3) = c;
    b(0, 3) = -is; b(3, 0) = -is;
    b(1, 2) = is;  b(2, 1) = is;
    return b;
}

std::size_t global_index(const InteractionSpec& spec, int sys, int e, int p) {
    if (spec.layout == Layout::pure)
        return static_cast<std::size_t>(sys) * 4 + e * 2 + p;
    return static_cast<std::size_t>(e) * 2 * spec.d + sys * 2 + p;
}

} // namespace

CMatrix interaction(const InteractionSpec& spec) {
    check_spec(spec);
    CMatrix u = CMatrix::identity(4 * static_cast<std::size_t>(spec.d));
    const CMatrix b = ep_block(spec.theta);
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c)
            u(global_index(spec, spec.n, a / 2, a % 2),
              global_index(spec, spec.n, c / 2, c % 2)) = b(a, c);
    return u;
}

CMatrix ms_gate(double phi, double varphi, int n_qubits) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    CMatrix h = CMatrix::zero(dim, dim);
    const double cx = std::cos(varphi), sy = std::sin(varphi);
    // H = sum_k cos(varphi) sigma_x^(k) + sin(varphi) sigma_y^(k); each term
    // flips bit k, with the sigma_y phase depending on the flipped bit value.
    for (std::size_t r = 0; r < dim; ++r) {
        for (int k = 0; k < n_qubits; ++k) {
            const std::size_t bit = dim >> (k + 1);
            const std::size_t c = r ^ bit;
            const bool r_has = (r & bit) != 0;
            h(r, c) += Cplx(cx, 0.0) + (r_has ? Cplx(0.0, 1.0) : Cplx(0.0, -1.0)) * sy;
        }
    }
    Spectrum sp = hermitian_eig(h);
    CMatrix u = CMatrix::zero(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) {
            Cplx acc(0.0, 0.0);
            for (std::size_t k = 0; k < dim; ++k) {
                const double lam = sp.eigenvalues[k];
                const Cplx ph = std::exp(Cplx(0.0, -phi / 4.0 * lam * lam));
                acc += sp.eigenvectors(r, k) * ph * std::conj(sp.eigenvectors(c, k));
            }
            u(r, c) = acc;
        }
    return u;
}

CMatrix decomposed_interaction(const InteractionSpec& spec) {
    if (spec.d != 2)
        throw Error("UnsupportedDimension", "gate decomposition is defined for d = 2 only");
    check_spec(spec);

    // Two-body factor exp(i*theta/2 * I(x)sigma_y(x)sigma_y) in (s,e,p) order.
    CMatrix f1 = CMatrix::zero(8, 8);
    const CMatrix blk = ep_block(spec.theta / 2.0);
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c)
                f1(static_cast<std::size_t>(s) * 4 + a, static_cast<std::size_t>(s) * 4 + c) = blk(a, c);

    // MS conjugation sends sigma_z on the system qubit to
    // -sigma_z(x)sigma_y(x)sigma_y, so a z rotation with sign -(+) for
    // n=0(1) reproduces the level-projected three-body factor.
    const double sign = (spec.n == 0) ? -1.0 : 1.0;
    CMatrix rot = CMatrix::zero(8, 8);
    for (int s = 0; s < 2; ++s) {
        const Cplx ph = std::exp(Cplx(0.0, sign * spec.theta / 2.0 * (s == 0 ? 1.0 : -1.0)));
        for (int a = 0; a < 4; ++a)
            rot(static_cast<std::size_t>(s) * 4 + a, static_cast<std::size_t>(s) * 4 + a) = ph;
    }
    const CMatrix ums = ms_gate(-kPi / 2, kPi / 2, 3);
    CMatrix u = mul(f1, mul(ums, mul(rot, dagger(ums))));

    if (spec.layout == Layout::mixed) {
        // Permute (s,e,p) -> (e,s,p).
        CMatrix perm = CMatrix::zero(8, 8);
        for (int s = 0; s < 2; ++s)
            for (int e = 0; e < 2; ++e)
                for (int p = 0; p < 2; ++p)
                    perm(static_cast<std::size_t>(e) * 4 + s * 2 + p,
                         static_cast<std::size_t>(s) * 4 + e * 2 + p) = 1.0;
        u = mul(perm, mul(u, dagger(perm)));
    }
    return u;
}

PostselectedPure postselect_pure(const CVector& psi, int n, double theta) {
    const std::size_t d = psi.dim();
    if (n < 0 || static_cast<std::size_t>(n) >= d)
        throw Error("BadIndex", "probed index out of range");
    if (!(theta > 0.0) || theta > kPi / 2 + 1e-12)
        throw Error("BadTheta", "coupling angle must lie in (0, pi/2]");

    double sum_r = 0.0, sum_i = 0.0;
    for (std::size_t m = 0; m < d; ++m) {
        sum_r += psi.v[m].real();
        sum_i += psi.v[m].imag();
    }
    const double s = std::sin(theta);
    const double eps = 2.0 * std::sin(theta / 2.0) * std::sin(theta / 2.0);
    const double rd = 1.0 / std::sqrt(static_cast<double>(d));
    const double pr = psi.v[static_cast<std::size_t>(n)].real();
    const double pi = psi.v[static_cast<std::size_t>(n)].imag();

    PostselectedPure out;
    out.eta.v = {Cplx((sum_r - eps * pr) * rd, 0.0),
                 Cplx(0.0, s * pi * rd),
                 Cplx((sum_i - eps * pi) * rd, 0.0),
                 Cplx(0.0, -s * pr * rd)};
    out.accept_prob = norm2(out.eta) * norm2(out.eta);
    return out;
}

namespace {

// Evolve an extra(x)system(x)pointer input under the coupling at level n and
// contract the system factor against conjugate ket j, yielding 4x4 over (e,p).
CMatrix evolve_and_project(const CMatrix& rext, int d, int n, int j, double theta) {
    const InteractionSpec spec{d, n, theta, Layout::mixed};
    const CMatrix u = interaction(spec);
    const CMatrix m = mul(u, mul(rext, dagger(u)));
    const CVector cj = fourier_ket(static_cast<std::size_t>(d), static_cast<std::size_t>(j));
    CMatrix out = CMatrix::zero(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            Cplx acc(0.0, 0.0);
            for (int mm = 0; mm < d; ++mm)
                for (int mp = 0; mp < d; ++mp)
                    acc += std::conj(cj.v[mm]) *
                           m((a / 2) * 2 * static_cast<std::size_t>(d) + mm * 2 + a % 2,
                             (b / 2) * 2 * static_cast<std::size_t>(d) + mp * 2 + b % 2) *
                           cj.v[mp];
            out(a, b) = acc;
        }
    return out;
}

} // namespace

PostselectedMixed postselect_mixed(const CMatrix& rho, int n, int j, double theta) {
    const int d = static_cast<int>(rho.rows);
    if (j < 0 || j >= d)
        throw Error("BadIndex", "conjugate outcome index out of range");
    const RebitDensity rt = embed_mixed(rho); // validates rho
    // Append pointer |0><0| as the last factor.
    CMatrix rext = CMatrix::zero(4 * static_cast<std::size_t>(d), 4 * static_cast<std::size_t>(d));
    for (std::size_t r = 0; r < 2 * static_cast<std::size_t>(d); ++r)
        for (std::size_t c = 0; c < 2 * static_cast<std::size_t>(d); ++c)
            rext(r * 2, c * 2) = rt.matrix(r, c);
    PostselectedMixed out;
    out.rho_out = evolve_and_project(rext, d, n, j, theta);
    out.n = n;
    out.j = j;
    return out;
}

std::vector<CMatrix> channel_outputs(const CMatrix& rho, int n, double theta, int e) {
    const int d = static_cast<int>(rho.rows);
    if (e != 0 && e != 1)
        throw Error("BadIndex", "extra-qubit preparation must be 0 or 1");
    if (rho.cols != rho.rows)
        throw Error("DimMismatch", "density matrix must be square");
    CMatrix rext = CMatrix::zero(4 * static_cast<std::size_t>(d), 4 * static_cast<std::size_t>(d));
    const std::size_t off = static_cast<std::size_t>(e) * 2 * d;
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            rext(off + static_cast<std::size_t>(r) * 2, off + static_cast<std::size_t>(c) * 2) = rho(r, c);
    std::vector<CMatrix> outs;
    outs.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        outs.push_back(evolve_and_project(rext, d, n, j, theta));
    return outs;
}

} // namespace redsm
