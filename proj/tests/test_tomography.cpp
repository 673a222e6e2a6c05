#include "doctest.h"

#include <cmath>
#include <complex>

#include "redsm/coupling.hpp"
#include "redsm/scenario.hpp"
#include "redsm/tomography.hpp"

using namespace redsm;

namespace {

const double pi = std::acos(-1.0);
const Cplx iu(0.0, 1.0);

template <class F>
std::string error_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code;
    }
    return "";
}

CMatrix random_density(int d, Prng& g) {
    CMatrix a(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            a(r, c) = Cplx(g.next_normal(), g.next_normal());
    CMatrix rho = mul(a, dagger(a));
    return scale(Cplx(1.0 / trace(rho).real(), 0.0), rho);
}

// Pointer-only coupling exp(i*theta*P_n (x) sigma_x) on system (x) pointer,
// in closed form from the projector structure.
CMatrix pointer_coupling(int d, int n, double theta) {
    CMatrix u = CMatrix::identity(2 * d);
    const double c = std::cos(theta);
    const Cplx is(0.0, std::sin(theta));
    u(2 * n, 2 * n) = c;
    u(2 * n + 1, 2 * n + 1) = c;
    u(2 * n, 2 * n + 1) = is;
    u(2 * n + 1, 2 * n) = is;
    return u;
}

// Cells for every setting from the formal conditioned output at (n,j).
ProbTable formal_table(const CMatrix& rho, double theta,
                       const std::vector<MeasurementSetting>& settings) {
    const int d = rho.rows;
    ProbTable t;
    for (int n = 0; n < d; ++n)
        for (int j = 0; j < d; ++j) {
            const CMatrix out = postselect_mixed(rho, n, j, theta).rho_out;
            for (const auto& ms : settings) {
                std::vector<Cplx> vals;
                for (const auto& pk : ms.projectors)
                    vals.push_back(expect(pk, out));
                t.put(n, j, ms.id, vals);
            }
        }
    return t;
}

void check_basis(const MeasurementSetting& ms) {
    const int d = ms.projectors.front().dim();
    CMatrix sum = CMatrix::zero(d, d);
    for (std::size_t a = 0; a < ms.projectors.size(); ++a) {
        for (std::size_t b = 0; b < ms.projectors.size(); ++b) {
            const Cplx ov = inner(ms.projectors[a], ms.projectors[b]);
            CHECK(std::abs(ov - (a == b ? Cplx(1, 0) : Cplx(0, 0))) < 1e-12);
        }
        sum = add(sum, outer(ms.projectors[a], ms.projectors[a]));
    }
    CHECK(max_abs_diff(sum, CMatrix::identity(d)) < 1e-12);
}

} // namespace

TEST_CASE("measurement settings are orthonormal and complete") {
    for (const auto& ms : ssb_settings())
        check_basis(ms);
    for (const auto& ms : bbb_settings())
        check_basis(ms);
    for (const auto& ms : pointer_settings())
        check_basis(ms);
    CHECK(ssb_settings().size() == 5);
    CHECK(bbb_settings().size() == 3);
    CHECK(pointer_settings().size() == 3);
}

TEST_CASE("mutually unbiased bases are unbiased and guard composites") {
    for (int d : {2, 3, 5}) {
        auto bases = mub_bases(d);
        CHECK(static_cast<int>(bases.size()) == d + 1);
        for (const auto& b : bases)
            check_basis(b);
        for (std::size_t a = 0; a < bases.size(); ++a)
            for (std::size_t b = a + 1; b < bases.size(); ++b)
                for (const auto& u : bases[a].projectors)
                    for (const auto& w : bases[b].projectors)
                        CHECK(std::abs(std::norm(inner(u, w)) - 1.0 / d) < 1e-12);
    }
    // For a qubit these are the three Pauli eigenbases.
    auto qb = mub_bases(2);
    CHECK(std::abs(qb[0].projectors[0][0] - Cplx(1, 0)) < 1e-12);
    CVector plus(2);
    plus[0] = plus[1] = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(std::norm(inner(qb[1].projectors[0], plus)) - 1.0) < 1e-12);
    CHECK(error_code([] { mub_bases(4); }) == "NotPrime");
    CHECK(error_code([] { mub_bases(6); }) == "NotPrime");
}

TEST_CASE("pure rebit estimator inverts exact branch probabilities") {
    // Probing |0> at full strength puts half the weight on |11>.
    CVector est = redsm_pure_estimate({0.5, 0.0}, {0.0, 0.0}, pi / 2);
    CHECK(std::abs(est[0] - Cplx(1, 0)) < 1e-12);
    CHECK(std::abs(est[1]) < 1e-12);

    Prng g{400};
    for (int d : {2, 3, 5})
        for (int rep = 0; rep < 20; ++rep) {
            const double theta = 0.2 + g.next_double() * (pi / 2 - 0.2);
            CVector psi = random_pure(d, PureMode::nonneg, g);
            std::vector<double> p11(d), p01(d);
            for (int n = 0; n < d; ++n) {
                PostselectedPure ps = postselect_pure(psi, n, theta);
                p11[n] = std::norm(ps.eta[3]);
                p01[n] = std::norm(ps.eta[1]);
            }
            CVector rec = redsm_pure_estimate(p11, p01, theta);
            for (int m = 0; m < d; ++m)
                CHECK(std::abs(rec[m] - psi[m]) < 1e-12);
        }

    // Zero shifted-branch weight means a purely real estimate.
    CVector re = redsm_pure_estimate({0.3, 0.1}, {0.0, 0.0}, 0.7);
    CHECK(std::abs(re[0].imag()) < 1e-14);
    CHECK(std::abs(re[1].imag()) < 1e-14);
    CHECK(error_code([] { redsm_pure_estimate({0.0, 0.0}, {0.0, 0.0}, 0.7); }) == "ZeroNorm");
}

TEST_CASE("plain pointer forward model matches the explicit circuit") {
    CVector zero(2);
    zero[0] = 1.0;
    CMatrix m = dsm_pure_forward(zero, 0, pi / 2);
    CHECK(std::abs(m(1, 1) - Cplx(0.5, 0)) < 1e-14);
    CHECK(std::abs(m(0, 0)) < 1e-14);
    CMatrix m1 = dsm_pure_forward(zero, 1, pi / 2);
    CHECK(std::abs(m1(0, 0) - Cplx(0.5, 0)) < 1e-14);
    CHECK(std::abs(m1(1, 1)) < 1e-14);

    Prng g{401};
    for (int rep = 0; rep < 30; ++rep) {
        const int d = 2 + rep % 3;
        const int n = static_cast<int>(g.next_double() * d);
        const double theta = 1e-3 + g.next_double() * (pi / 2 - 1e-3);
        CVector psi = random_pure(d, PureMode::haar, g);

        // Couple psi (x) |0>_p, then contract the system against <c_0|.
        CVector in(2 * d);
        for (int k = 0; k < d; ++k)
            in[2 * k] = psi[k];
        CVector out = mul(pointer_coupling(d, n, theta), in);
        CVector c0 = fourier_ket(d, 0);
        CVector w(2);
        for (int p = 0; p < 2; ++p)
            for (int k = 0; k < d; ++k)
                w[p] += std::conj(c0[k]) * out[2 * k + p];

        CMatrix f = dsm_pure_forward(psi, n, theta);
        CHECK(max_abs_diff(f, outer(w, w)) < 1e-12);
        CHECK(std::abs(trace(f).real() - norm2(w) * norm2(w)) < 1e-12);
    }
}

TEST_CASE("plain pointer estimator recovers the state up to phase") {
    Prng g{402};
    for (int d : {2, 3, 4, 5})
        for (int rep = 0; rep < 15; ++rep) {
            const double theta = 0.2 + g.next_double() * (pi / 2 - 0.2);
            CVector psi = random_pure(d, PureMode::haar, g);
            std::vector<double> p1(d);
            std::vector<Cplx> coh(d);
            for (int n = 0; n < d; ++n) {
                CMatrix f = dsm_pure_forward(psi, n, theta);
                p1[n] = f(1, 1).real();
                coh[n] = f(1, 0);
            }
            CVector rec = dsm_pure_estimate(p1, coh, theta);
            CHECK(trace_distance(outer(rec, rec), outer(psi, psi)) < 1e-10);
        }

    CVector zero(2);
    zero[0] = 1.0;
    CMatrix f0 = dsm_pure_forward(zero, 0, pi / 2);
    CMatrix f1 = dsm_pure_forward(zero, 1, pi / 2);
    CVector rec = dsm_pure_estimate({f0(1, 1).real(), f1(1, 1).real()},
                                    {f0(1, 0), f1(1, 0)}, pi / 2);
    CHECK(std::abs(rec[0] - Cplx(1, 0)) < 1e-12);
    CHECK(std::abs(rec[1]) < 1e-12);

    // A zero-sum state is invisible to the protocol.
    CVector minus(2);
    minus[0] = 1.0 / std::sqrt(2.0);
    minus[1] = -minus[0];
    std::vector<double> p1(2);
    std::vector<Cplx> coh(2);
    for (int n = 0; n < 2; ++n) {
        CMatrix f = dsm_pure_forward(minus, n, 0.9);
        p1[n] = f(1, 1).real();
        coh[n] = f(1, 0);
    }
    CHECK(error_code([&] { dsm_pure_estimate(p1, coh, 0.9); }) == "DegenerateSigma");
}

TEST_CASE("pointer coherence reads the X and Y cells") {
    ProbTable t;
    t.put(0, 0, "X", {Cplx(1, 0), Cplx(0, 0)});
    t.put(0, 0, "Y", {Cplx(0.5, 0), Cplx(0.5, 0)});
    CHECK(std::abs(pointer_coherence(t, 0, 0) - Cplx(0.5, 0)) < 1e-14);

    ProbTable u;
    u.put(1, 0, "X", {Cplx(0.5, 0), Cplx(0.5, 0)});
    u.put(1, 0, "Y", {Cplx(1, 0), Cplx(0, 0)});
    CHECK(std::abs(pointer_coherence(u, 1, 0) - Cplx(0, 0.5)) < 1e-14);
    CHECK(error_code([&] { pointer_coherence(u, 0, 0); }) == "MissingSetting");
}

TEST_CASE("element extraction on Bell-type inputs") {
    CVector bell(4), comp00(4);
    bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
    comp00[0] = 1.0;

    for (const CMatrix& rho : {outer(bell, bell), outer(comp00, comp00)}) {
        ProbTable t;
        for (const auto& group : {ssb_settings(), bbb_settings()})
            for (const auto& ms : group) {
                std::vector<Cplx> vals;
                for (const auto& pk : ms.projectors)
                    vals.push_back(expect(pk, rho));
                t.put(0, 0, ms.id, vals);
            }
        const bool is_bell = std::abs(rho(0, 3)) > 0.1;
        ExtractedCell s = ssb_extract(t, 0, 0);
        ExtractedCell b = bbb_extract(t, 0, 0);
        const Cplx want30 = is_bell ? Cplx(0.5, 0) : Cplx(0, 0);
        CHECK(std::abs(s.rho30 - want30) < 1e-12);
        CHECK(std::abs(s.rho12) < 1e-12);
        CHECK(std::abs(b.rho30 - want30) < 1e-12);
        CHECK(std::abs(b.rho12) < 1e-12);
        CHECK(std::abs(s.rho33 - (is_bell ? 0.5 : 0.0)) < 1e-12);
        CHECK(std::abs(s.rho11) < 1e-12);
    }

    // Maximally mixed input leaves no coherences on either route.
    CMatrix mm = scale(Cplx(0.25, 0), CMatrix::identity(4));
    ProbTable t;
    for (const auto& ms : bbb_settings()) {
        std::vector<Cplx> vals;
        for (const auto& pk : ms.projectors)
            vals.push_back(expect(pk, mm));
        t.put(0, 0, ms.id, vals);
    }
    ExtractedCell e = bbb_extract(t, 0, 0);
    CHECK(std::abs(e.rho30) < 1e-12);
    CHECK(std::abs(e.rho12) < 1e-12);
    CHECK(error_code([&] { ssb_extract(t, 0, 0); }) == "MissingSetting");
}

TEST_CASE("both extraction routes read off the conditioned elements") {
    Prng g{403};
    std::vector<MeasurementSetting> all = ssb_settings();
    for (const auto& ms : bbb_settings())
        all.push_back(ms);
    for (int d : {2, 3}) {
        CMatrix rho = random_density(d, g);
        const double theta = 0.3 + g.next_double();
        ProbTable t = formal_table(rho, std::min(theta, pi / 2), all);
        for (int n = 0; n < d; ++n)
            for (int j = 0; j < d; ++j) {
                const CMatrix out =
                    postselect_mixed(rho, n, j, std::min(theta, pi / 2)).rho_out;
                ExtractedCell s = ssb_extract(t, n, j);
                ExtractedCell b = bbb_extract(t, n, j);
                CHECK(std::abs(s.rho30 - out(3, 0)) < 1e-12);
                CHECK(std::abs(s.rho12 - out(1, 2)) < 1e-12);
                CHECK(std::abs(s.rho33 - out(3, 3)) < 1e-12);
                CHECK(std::abs(s.rho11 - out(1, 1)) < 1e-12);
                CHECK(std::abs(b.rho30 - s.rho30) < 1e-12);
                CHECK(std::abs(b.rho12 - s.rho12) < 1e-12);
                CHECK(std::abs(b.rho33 - s.rho33) < 1e-12);
                CHECK(std::abs(b.rho11 - s.rho11) < 1e-12);
            }
    }
}

TEST_CASE("channel combination follows the conjugate relabeling") {
    CHECK(conjugate_permutation("XX") == std::vector<int>{1, 0, 3, 2});
    CHECK(conjugate_permutation("XY") == std::vector<int>{0, 1, 2, 3});
    CHECK(conjugate_permutation("YX") == std::vector<int>{3, 2, 1, 0});
    CHECK(conjugate_permutation("YY") == std::vector<int>{2, 3, 0, 1});
    CHECK(conjugate_permutation("bell") == std::vector<int>{1, 0, 3, 2});
    CHECK(conjugate_permutation("bell_i") == std::vector<int>{0, 1, 2, 3});
    CHECK(conjugate_permutation("comp") == std::vector<int>{0, 1, 2, 3});

    Prng g{404};
    for (const char* id : {"XX", "YX", "comp"})
        for (int d : {2, 3}) {
            std::vector<std::vector<double>> f0(d, std::vector<double>(4));
            auto f1 = f0;
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < 4; ++k) {
                    f0[j][k] = g.next_double();
                    f1[j][k] = g.next_double();
                }
            auto cells = combine_channels(f0, f1, id);
            const auto& perm = conjugate_permutation(id);
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < 4; ++k) {
                    const int jr = (d - j) % d;
                    const Cplx want =
                        Cplx((f0[j][k] + f0[jr][perm[k]]) / 2.0,
                             -(f1[j][k] - f1[jr][perm[k]]) / 2.0);
                    CHECK(std::abs(cells[j][k] - want) < 1e-14);
                }
        }
}

TEST_CASE("mixed rebit reconstruction is exact on exact data") {
    const CMatrix ref = reference_mixed_state();
    for (ExtractRoute route : {ExtractRoute::ssb, ExtractRoute::bbb}) {
        const auto& settings = route == ExtractRoute::ssb ? ssb_settings() : bbb_settings();
        ProbTable t = formal_table(ref, pi / 2, settings);
        CMatrix rec = redsm_mixed_estimate(collect_elements(t, 2, route), pi / 2);
        CHECK(trace_distance(rec, ref) < 1e-10);
        CHECK(max_abs_diff(rec, ref) < 1e-12);
    }

    // Fixed point and random round trips across dimension and angle.
    Prng g{405};
    for (int d : {2, 3, 5}) {
        CMatrix mm = scale(Cplx(1.0 / d, 0), CMatrix::identity(d));
        ProbTable tm = formal_table(mm, 0.8, ssb_settings());
        CHECK(max_abs_diff(redsm_mixed_estimate(collect_elements(tm, d, ExtractRoute::ssb), 0.8),
                           mm) < 1e-12);
        for (int rep = 0; rep < 5; ++rep) {
            const double theta = 0.2 + g.next_double() * (pi / 2 - 0.2);
            CMatrix rho = random_density(d, g);
            ProbTable t = formal_table(rho, theta, ssb_settings());
            CMatrix rec = redsm_mixed_estimate(collect_elements(t, d, ExtractRoute::ssb), theta);
            CHECK(trace_distance(rec, rho) < 1e-10);
        }
    }

    MixedElements el;
    el.e30.assign(2, std::vector<Cplx>(2));
    el.e12 = el.e30;
    el.e33.assign(2, Cplx(0, 0));
    el.e11 = el.e33;
    CHECK(error_code([&] { redsm_mixed_estimate(el, 0.0); }) == "SingularTheta");
}

TEST_CASE("plain pointer density model matches the circuit and inverts") {
    Prng g{406};
    for (int d : {2, 3}) {
        CMatrix rho = random_density(d, g);
        for (int n = 0; n < d; ++n) {
            const double theta = 0.2 + g.next_double() * (pi / 2 - 0.2);
            auto blocks = dsm_mixed_forward(rho, n, theta);

            // Circuit oracle: evolve rho (x) |0><0|_p, condition on <c_j|.
            CMatrix u = pointer_coupling(d, n, theta);
            CMatrix big = CMatrix::zero(2 * d, 2 * d);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c)
                    big(2 * r, 2 * c) = rho(r, c);
            CMatrix ev = mul(u, mul(big, dagger(u)));
            for (int j = 0; j < d; ++j) {
                CVector cj = fourier_ket(d, j);
                CMatrix blk = CMatrix::zero(2, 2);
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int m = 0; m < d; ++m)
                            for (int mp = 0; mp < d; ++mp)
                                blk(a, b) += std::conj(cj[m]) * ev(2 * m + a, 2 * mp + b) * cj[mp];
                CHECK(max_abs_diff(blocks[j], blk) < 1e-12);
            }
        }

        // Exact data inverts back to the input.
        const double theta = 0.9;
        std::vector<double> pop(d, 0.0);
        std::vector<std::vector<Cplx>> coh(d, std::vector<Cplx>(d));
        for (int n = 0; n < d; ++n) {
            auto blocks = dsm_mixed_forward(rho, n, theta);
            for (int j = 0; j < d; ++j) {
                pop[n] += blocks[j](1, 1).real() / d;
                coh[n][j] = blocks[j](1, 0);
            }
        }
        CHECK(trace_distance(dsm_mixed_estimate(pop, coh, theta), rho) < 1e-10);
    }

    // Shifted pointer population of the maximally mixed state.
    CMatrix mm = scale(Cplx(0.5, 0), CMatrix::identity(2));
    auto blocks = dsm_mixed_forward(mm, 0, 0.7);
    const double s2 = std::sin(0.7) * std::sin(0.7);
    CHECK(blocks[0](1, 1).real() == doctest::Approx(s2 / 4).epsilon(1e-12));

    CHECK(error_code([] {
              dsm_mixed_estimate({0.0, 0.0}, {{Cplx(), Cplx()}, {Cplx(), Cplx()}}, 0.0);
          }) == "SingularTheta");
}

TEST_CASE("mub reconstruction inverts exact probabilities") {
    // Hand-checked qubit probabilities for |0><0|.
    auto bases = mub_bases(2);
    ProbTable t;
    t.put(0, 0, bases[0].id, {Cplx(1, 0), Cplx(0, 0)});
    t.put(0, 0, bases[1].id, {Cplx(0.5, 0), Cplx(0.5, 0)});
    t.put(0, 0, bases[2].id, {Cplx(0.5, 0), Cplx(0.5, 0)});
    CMatrix rec = mub_qst_estimate(bases, t);
    CHECK(std::abs(rec(0, 0) - Cplx(1, 0)) < 1e-12);
    CHECK(std::abs(rec(0, 1)) < 1e-12);
    CHECK(std::abs(rec(1, 1)) < 1e-12);

    Prng g{407};
    for (int d : {2, 3, 5}) {
        auto bs = mub_bases(d);
        for (const CMatrix& rho :
             {random_density(d, g), scale(Cplx(1.0 / d, 0), CMatrix::identity(d))}) {
            ProbTable tab;
            for (const auto& b : bs) {
                std::vector<Cplx> vals;
                for (const auto& pk : b.projectors)
                    vals.push_back(expect(pk, rho));
                tab.put(0, 0, b.id, vals);
            }
            CHECK(trace_distance(mub_qst_estimate(bs, tab), rho) < 1e-10);
        }
    }

    ProbTable missing;
    missing.put(0, 0, bases[0].id, {Cplx(1, 0), Cplx(0, 0)});
    CHECK(error_code([&] { mub_qst_estimate(bases, missing); }) == "IncompleteData");
}

TEST_CASE("hermitize and normalize") {
    CMatrix m(2, 2);
    m(0, 0) = Cplx(1, 0.3);
    m(0, 1) = Cplx(0.2, 0.1);
    m(1, 0) = Cplx(0.4, 0.3);
    m(1, 1) = Cplx(2, -0.3);
    CMatrix h = hermitize_normalize(m);
    CHECK(max_abs_diff(h, dagger(h)) < 1e-14);
    CHECK(std::abs(trace(h) - Cplx(1, 0)) < 1e-14);
    // Off-diagonal becomes the average of the two entries.
    CHECK(std::abs(h(0, 1) - Cplx(0.3, -0.1) / 3.0) < 1e-14);
}
