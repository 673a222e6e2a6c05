#include "redsm/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace redsm {

CMatrix CMatrix::identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix mul(const CMatrix& a, const CMatrix& b) {
    if (a.cols != b.rows) throw Error("DimMismatch", "mul shapes");
    CMatrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            Cplx aik = a(i, k);
            if (aik == Cplx(0.0)) continue;
            for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CVector mul(const CMatrix& a, const CVector& x) {
    if (a.cols != x.dim()) throw Error("DimMismatch", "mul vector");
    CVector y(a.rows);
    for (int i = 0; i < a.rows; ++i) {
        Cplx acc = 0.0;
        for (int k = 0; k < a.cols; ++k) acc += a(i, k) * x[k];
        y[i] = acc;
    }
    return y;
}

CMatrix add(const CMatrix& a, const CMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw Error("DimMismatch", "add");
    CMatrix c = a;
    for (size_t i = 0; i < c.a.size(); ++i) c.a[i] += b.a[i];
    return c;
}

CMatrix sub(const CMatrix& a, const CMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw Error("DimMismatch", "sub");
    CMatrix c = a;
    for (size_t i = 0; i < c.a.size(); ++i) c.a[i] -= b.a[i];
    return c;
}

CMatrix scale(Cplx s, const CMatrix& a) {
    CMatrix c = a;
    for (auto& z : c.a) z *= s;
    return c;
}

CMatrix dagger(const CMatrix& a) {
    CMatrix c(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) c(j, i) = std::conj(a(i, j));
    return c;
}

Cplx trace(const CMatrix& a) {
    Cplx t = 0.0;
    for (int i = 0; i < std::min(a.rows, a.cols); ++i) t += a(i, i);
    return t;
}

CMatrix outer(const CVector& u, const CVector& w) {
    CMatrix m(u.dim(), w.dim());
    for (int i = 0; i < u.dim(); ++i)
        for (int j = 0; j < w.dim(); ++j) m(i, j) = u[i] * std::conj(w[j]);
    return m;
}

Cplx inner(const CVector& u, const CVector& w) {
    if (u.dim() != w.dim()) throw Error("DimMismatch", "inner");
    Cplx t = 0.0;
    for (int i = 0; i < u.dim(); ++i) t += std::conj(u[i]) * w[i];
    return t;
}

Cplx expect(const CVector& u, const CMatrix& m) {
    Cplx t = 0.0;
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) t += std::conj(u[i]) * m(i, j) * u[j];
    return t;
}

double norm2(const CVector& u) {
    double t = 0.0;
    for (const auto& z : u.v) t += std::norm(z);
    return std::sqrt(t);
}

double max_abs(const CMatrix& a) {
    double m = 0.0;
    for (const auto& z : a.a) m = std::max(m, std::abs(z));
    return m;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    return max_abs(sub(a, b));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix c(a.rows * b.rows, a.cols * b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) {
            Cplx aij = a(i, j);
            if (aij == Cplx(0.0)) continue;
            for (int k = 0; k < b.rows; ++k)
                for (int l = 0; l < b.cols; ++l)
                    c(i * b.rows + k, j * b.cols + l) = aij * b(k, l);
        }
    return c;
}

CVector kron(const CVector& a, const CVector& b) {
    CVector c(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int k = 0; k < b.dim(); ++k) c[i * b.dim() + k] = a[i] * b[k];
    return c;
}

static double off_diag_frob(const CMatrix& a) {
    double t = 0.0;
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j)
            if (i != j) t += std::norm(a(i, j));
    return std::sqrt(t);
}

Spectrum hermitian_eig(const CMatrix& h) {
    if (h.rows != h.cols) throw Error("NotHermitian", "not square");
    const int n = h.rows;
    if (max_abs_diff(h, dagger(h)) > 1e-10) throw Error("NotHermitian", "symmetry check failed");

    CMatrix A = h, V = CMatrix::identity(n);
    double frob = 0.0;
    for (const auto& z : A.a) frob += std::norm(z);
    frob = std::sqrt(frob);
    const double tol = 1e-13 * std::max(1.0, frob);

    for (int sweep = 0; sweep < 100 && off_diag_frob(A) > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                Cplx apq = A(p, q);
                double ab = std::abs(apq);
                if (ab <= tol / n) continue;
                double app = A(p, p).real(), aqq = A(q, q).real();
                // zero the (p,q) element with the unitary plane rotation
                // R = [[c, s e^{i phi}], [-s e^{-i phi}, c]], phi = arg(apq)
                Cplx phase = apq / ab;
                double tau = (aqq - app) / (2.0 * ab);
                double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                        : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
                Cplx sp = s * phase, spc = s * std::conj(phase);
                for (int i = 0; i < n; ++i) {  // columns p,q of A and V
                    Cplx aip = A(i, p), aiq = A(i, q);
                    A(i, p) = c * aip - spc * aiq;
                    A(i, q) = sp * aip + c * aiq;
                    Cplx vip = V(i, p), viq = V(i, q);
                    V(i, p) = c * vip - spc * viq;
                    V(i, q) = sp * vip + c * viq;
                }
                for (int j = 0; j < n; ++j) {  // rows p,q of A
                    Cplx apj = A(p, j), aqj = A(q, j);
                    A(p, j) = c * apj - sp * aqj;
                    A(q, j) = spc * apj + c * aqj;
                }
            }
    }

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[static_cast<size_t>(i)] = A(i, i).real();
    std::sort(idx.begin(), idx.end(), [&](int a_, int b_) { return ev[a_] > ev[b_]; });

    Spectrum sp;
    sp.eigenvalues.resize(n);
    sp.eigenvectors = CMatrix(n, n);
    for (int k = 0; k < n; ++k) {
        sp.eigenvalues[static_cast<size_t>(k)] = ev[idx[k]];
        for (int i = 0; i < n; ++i) sp.eigenvectors(i, k) = V(i, idx[k]);
    }
    return sp;
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw Error("DimMismatch", "trace_distance");
    Spectrum sp = hermitian_eig(sub(a, b));
    double t = 0.0;
    for (double l : sp.eigenvalues) t += std::abs(l);
    return 0.5 * t;
}

CVector fourier_ket(int d, int j) {
    if (j < 0 || j >= d) throw Error("IndexOutOfRange", "fourier_ket j");
    CVector c(d);
    const double w = 2.0 * M_PI * j / d;
    for (int n = 0; n < d; ++n)
        c[n] = Cplx(std::cos(w * n), std::sin(w * n)) / std::sqrt(static_cast<double>(d));
    return c;
}

static uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

uint64_t Prng::next_u64() {
    uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Prng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Prng::next_normal() {
    // two uniforms per draw keeps the stream position deterministic
    double u1 = next_double(), u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Prng Prng::split(uint64_t stream) const {
    return Prng(mix64(s ^ mix64(stream + 0x632BE59BD9B4E019ULL)));
}

CVector random_pure(int d, PureMode mode, Prng& g) {
    CVector v(d);
    for (int n = 0; n < d; ++n) {
        double re = g.next_normal(), im = g.next_normal();
        if (mode == PureMode::nonneg) {
            re = std::abs(re);
            im = std::abs(im);
        }
        v[n] = Cplx(re, im);
    }
    double nrm = norm2(v);
    for (auto& z : v.v) z /= nrm;
    return v;
}

CMatrix random_mixed(int d, Prng& g) {
    CMatrix G(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) G(i, j) = Cplx(g.next_normal(), g.next_normal());
    CMatrix r = mul(G, dagger(G));
    Cplx t = trace(r);
    return scale(1.0 / t.real(), r);
}

CMatrix nearly_pure(const CVector& psi, double nu) {
    if (nu < 0.0 || nu > 1.0) throw Error("NuOutOfRange", "nu must lie in [0,1]");
    const int d = psi.dim();
    CMatrix r = scale(1.0 - nu, outer(psi, psi));
    for (int i = 0; i < d; ++i) r(i, i) += nu / d;
    return r;
}

}  // namespace redsm
