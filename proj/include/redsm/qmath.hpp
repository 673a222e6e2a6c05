#pragma once
// Dense complex linear algebra, spectral routines, metrics and random states.
// Matrices here are tiny (at most a few dozen rows), so everything is plain
// row-major storage and O(n^3) loops. No BLAS, no views.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace redsm {

using Cplx = std::complex<double>;

// All library failures carry a short machine-checkable code plus a message.
struct Error : std::runtime_error {
    std::string code;
    Error(std::string c, const std::string& msg)
        : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct CVector {
    std::vector<Cplx> v;
    CVector() = default;
    explicit CVector(int dim) : v(static_cast<size_t>(dim)) {}
    int dim() const { return static_cast<int>(v.size()); }
    Cplx& operator[](int i) { return v[static_cast<size_t>(i)]; }
    const Cplx& operator[](int i) const { return v[static_cast<size_t>(i)]; }
};

struct CMatrix {
    int rows = 0, cols = 0;
    std::vector<Cplx> a;  // row-major
    CMatrix() = default;
    CMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
    Cplx& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const Cplx& operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
    static CMatrix identity(int n);
    static CMatrix zero(int r, int c) { return CMatrix(r, c); }
};

CMatrix mul(const CMatrix& a, const CMatrix& b);
CVector mul(const CMatrix& a, const CVector& x);
CMatrix add(const CMatrix& a, const CMatrix& b);
CMatrix sub(const CMatrix& a, const CMatrix& b);
CMatrix scale(Cplx s, const CMatrix& a);
CMatrix dagger(const CMatrix& a);
Cplx trace(const CMatrix& a);
CMatrix outer(const CVector& u, const CVector& w);  // |u><w|
Cplx inner(const CVector& u, const CVector& w);     // <u|w>
Cplx expect(const CVector& u, const CMatrix& m);    // <u|M|u>
double norm2(const CVector& u);
double max_abs(const CMatrix& a);
double max_abs_diff(const CMatrix& a, const CMatrix& b);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(const CVector& a, const CVector& b);

struct Spectrum {
    std::vector<double> eigenvalues;  // descending
    CMatrix eigenvectors;             // columns, same order
};

// Cyclic complex Jacobi. Throws NotHermitian when max |h - h^dag| element > 1e-10.
Spectrum hermitian_eig(const CMatrix& h);

// Half the absolute-eigenvalue sum of a-b. Throws DimMismatch.
double trace_distance(const CMatrix& a, const CMatrix& b);

// Conjugate-basis ket: component n is omega^{nj}/sqrt(d), omega = exp(2 pi i/d).
CVector fourier_ket(int d, int j);  // IndexOutOfRange

// Counter-based splittable generator (splitmix64 core). One instance per
// owner; substreams come from split(), never from sharing a stream.
struct Prng {
    uint64_t s;
    explicit Prng(uint64_t seed) : s(seed) {}
    uint64_t next_u64();
    double next_double();     // uniform [0,1)
    double next_normal();     // standard normal, Box-Muller, no cached spare
    Prng split(uint64_t stream) const;
};

enum class PureMode { haar, nonneg };
CVector random_pure(int d, PureMode mode, Prng& g);
CMatrix random_mixed(int d, Prng& g);  // Ginibre: GG^dag normalized
CMatrix nearly_pure(const CVector& psi, double nu);  // NuOutOfRange

}  // namespace redsm
