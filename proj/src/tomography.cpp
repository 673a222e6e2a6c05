#include "redsm/tomography.hpp"

#include <algorithm>
#include <cmath>

namespace redsm {

namespace {

CVector qv(std::initializer_list<Cplx> xs) {
    CVector v;
    v.v.assign(xs);
    return v;
}

const double kInvS2 = 1.0 / std::sqrt(2.0);
const Cplx kI(0.0, 1.0);

CVector basis4(int k) {
    CVector v;
    v.v.assign(4, Cplx(0.0, 0.0));
    v.v[static_cast<std::size_t>(k)] = 1.0;
    return v;
}

bool is_prime(int d) {
    if (d < 2) return false;
    for (int q = 2; q * q <= d; ++q)
        if (d % q == 0) return false;
    return true;
}

} // namespace

std::vector<MeasurementSetting> ssb_settings() {
    const CVector D = qv({kInvS2, kInvS2});
    const CVector A = qv({kInvS2, -kInvS2});
    const CVector L = qv({kInvS2, kI * kInvS2});
    const CVector R = qv({kInvS2, -kI * kInvS2});
    const std::vector<CVector> xs = {D, A}, ys = {L, R};
    std::vector<MeasurementSetting> out;
    const struct { const char* id; const std::vector<CVector>* a; const std::vector<CVector>* b; } pairs[] = {
        {"XX", &xs, &xs}, {"XY", &xs, &ys}, {"YX", &ys, &xs}, {"YY", &ys, &ys}};
    for (const auto& p : pairs) {
        MeasurementSetting s;
        s.id = p.id;
        for (const auto& u : *p.a)
            for (const auto& v : *p.b)
                s.projectors.push_back(kron(u, v));
        out.push_back(std::move(s));
    }
    MeasurementSetting comp;
    comp.id = "comp";
    for (int k = 0; k < 4; ++k) comp.projectors.push_back(basis4(k));
    out.push_back(std::move(comp));
    return out;
}

std::vector<MeasurementSetting> bbb_settings() {
    auto mix = [](int a, int b, Cplx phase) {
        CVector v;
        v.v.assign(4, Cplx(0.0, 0.0));
        v.v[static_cast<std::size_t>(a)] = kInvS2;
        v.v[static_cast<std::size_t>(b)] = phase * kInvS2;
        return v;
    };
    std::vector<MeasurementSetting> out(3);
    out[0].id = "bell";
    out[0].projectors = {mix(0, 3, 1.0), mix(0, 3, -1.0), mix(1, 2, 1.0), mix(1, 2, -1.0)};
    out[1].id = "bell_i";
    out[1].projectors = {mix(0, 3, kI), mix(0, 3, -kI), mix(1, 2, kI), mix(1, 2, -kI)};
    out[2].id = "comp";
    for (int k = 0; k < 4; ++k) out[2].projectors.push_back(basis4(k));
    return out;
}

std::vector<MeasurementSetting> pointer_settings() {
    std::vector<MeasurementSetting> out(3);
    out[0] = {"Z", {qv({1.0, 0.0}), qv({0.0, 1.0})}};
    out[1] = {"X", {qv({kInvS2, kInvS2}), qv({kInvS2, -kInvS2})}};
    out[2] = {"Y", {qv({kInvS2, kI * kInvS2}), qv({kInvS2, -kI * kInvS2})}};
    return out;
}

std::vector<MeasurementSetting> mub_bases(int d) {
    if (!is_prime(d))
        throw Error("NotPrime", "unbiased basis construction needs a prime dimension");
    std::vector<MeasurementSetting> out;
    if (d == 2) {
        auto p = pointer_settings();
        for (int k = 0; k < 3; ++k) {
            out.push_back({std::string("b") + std::to_string(k), p[static_cast<std::size_t>(k)].projectors});
        }
        return out;
    }
    MeasurementSetting compb;
    compb.id = "b0";
    for (int k = 0; k < d; ++k) {
        CVector v;
        v.v.assign(static_cast<std::size_t>(d), Cplx(0.0, 0.0));
        v.v[static_cast<std::size_t>(k)] = 1.0;
        compb.projectors.push_back(std::move(v));
    }
    out.push_back(std::move(compb));
    const double rd = 1.0 / std::sqrt(static_cast<double>(d));
    for (int b = 0; b < d; ++b) {
        MeasurementSetting s;
        s.id = std::string("b") + std::to_string(b + 1);
        for (int k = 0; k < d; ++k) {
            CVector v;
            v.v.resize(static_cast<std::size_t>(d));
            for (int m = 0; m < d; ++m) {
                const int e = (b * m * m + k * m) % d;
                v.v[static_cast<std::size_t>(m)] =
                    std::exp(Cplx(0.0, 2.0 * 3.14159265358979323846 * e / d)) * rd;
            }
            s.projectors.push_back(std::move(v));
        }
        out.push_back(std::move(s));
    }
    return out;
}

const std::vector<int>& conjugate_permutation(const std::string& setting_id) {
    static const std::map<std::string, std::vector<int>> perms = {
        {"XX", {1, 0, 3, 2}}, {"XY", {0, 1, 2, 3}}, {"YX", {3, 2, 1, 0}},
        {"YY", {2, 3, 0, 1}}, {"comp", {0, 1, 2, 3}},
        {"bell", {1, 0, 3, 2}}, {"bell_i", {0, 1, 2, 3}}};
    auto it = perms.find(setting_id);
    if (it == perms.end())
        throw Error("MissingSetting", "no conjugate relabeling for setting " + setting_id);
    return it->second;
}

void ProbTable::put(int n, int j, const std::string& setting, std::vector<Cplx> vals, double copies) {
    cells[ProbKey{n, j, setting}] = ProbCell{std::move(vals), copies};
}

bool ProbTable::has(int n, int j, const std::string& setting) const {
    return cells.count(ProbKey{n, j, setting}) != 0;
}

const ProbCell& ProbTable::at(int n, int j, const std::string& setting) const {
    auto it = cells.find(ProbKey{n, j, setting});
    if (it == cells.end())
        throw Error("MissingSetting", "no cell for setting " + setting + " at n=" +
                                          std::to_string(n) + " j=" + std::to_string(j));
    return it->second;
}

std::vector<std::vector<Cplx>> combine_channels(const std::vector<std::vector<double>>& f0,
                                                const std::vector<std::vector<double>>& f1,
                                                const std::string& setting_id) {
    const auto& perm = conjugate_permutation(setting_id);
    const int d = static_cast<int>(f0.size());
    std::vector<std::vector<Cplx>> out(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        const int jr = (d - j) % d;
        auto& row = out[static_cast<std::size_t>(j)];
        row.resize(perm.size());
        for (std::size_t k = 0; k < perm.size(); ++k) {
            const auto pk = static_cast<std::size_t>(perm[k]);
            const double re = 0.5 * (f0[static_cast<std::size_t>(j)][k] +
                                     f0[static_cast<std::size_t>(jr)][pk]);
            // 1/(2i) = -i/2
            const double im = -0.5 * (f1[static_cast<std::size_t>(j)][k] -
                                      f1[static_cast<std::size_t>(jr)][pk]);
            row[k] = Cplx(re, im);
        }
    }
    return out;
}

CVector redsm_pure_estimate(const std::vector<double>& p11, const std::vector<double>& p01,
                            double theta) {
    const std::size_t d = p11.size();
    const double s = std::sin(theta);
    CVector v;
    v.v.resize(d);
    for (std::size_t n = 0; n < d; ++n)
        v.v[n] = Cplx(std::sqrt(static_cast<double>(d) * std::max(p11[n], 0.0)) / s,
                      std::sqrt(static_cast<double>(d) * std::max(p01[n], 0.0)) / s);
    const double nn = norm2(v);
    if (nn < 1e-300)
        throw Error("ZeroNorm", "all outcome probabilities vanish");
    for (auto& x : v.v) x /= nn;
    return v;
}

CMatrix dsm_pure_forward(const CVector& psi, int n, double theta) {
    const std::size_t d = psi.dim();
    const double s = std::sin(theta);
    const double eps = 2.0 * std::sin(theta / 2.0) * std::sin(theta / 2.0);
    Cplx sum(0.0, 0.0);
    for (const auto& x : psi.v) sum += x;
    CVector v;
    v.v = {sum - eps * psi.v[static_cast<std::size_t>(n)],
           kI * s * psi.v[static_cast<std::size_t>(n)]};
    CMatrix m = outer(v, v);
    return scale(1.0 / static_cast<double>(d), m);
}

CVector dsm_pure_estimate(const std::vector<double>& p1, const std::vector<Cplx>& coh,
                          double theta) {
    const std::size_t d = p1.size();
    const double s = std::sin(theta);
    const double eps = 2.0 * std::sin(theta / 2.0) * std::sin(theta / 2.0);
    CVector alpha;
    alpha.v.resize(d);
    Cplx tot(0.0, 0.0);
    for (std::size_t n = 0; n < d; ++n) {
        alpha.v[n] = -kI * static_cast<double>(d) * coh[n] / s +
                     static_cast<double>(d) * eps * p1[n] / (s * s);
        tot += alpha.v[n];
    }
    // sum_n alpha_n estimates |Sigma|^2; its phase is the recoverable gauge.
    // The cutoff sits well above the roundoff floor of exact zero-sum inputs.
    if (std::abs(tot) < 1e-12)
        throw Error("DegenerateSigma", "component sum too small to fix the global phase");
    const Cplx ph = std::exp(Cplx(0.0, -std::arg(tot)));
    for (auto& x : alpha.v) x *= ph;
    const double nn = norm2(alpha);
    if (nn < 1e-300)
        throw Error("ZeroNorm", "estimated amplitudes vanish");
    for (auto& x : alpha.v) x /= nn;
    return alpha;
}

Cplx pointer_coherence(const ProbTable& t, int n, int j) {
    const auto& x = t.at(n, j, "X").vals;
    const auto& y = t.at(n, j, "Y").vals;
    return ((x[0] - x[1]) + kI * (y[0] - y[1])) / 2.0;
}

ExtractedCell ssb_extract(const ProbTable& t, int n, int j) {
    auto corr = [&](const char* id) {
        const auto& p = t.at(n, j, id).vals;
        return p[0] - p[1] - p[2] + p[3];
    };
    const Cplx xx = corr("XX"), xy = corr("XY"), yx = corr("YX"), yy = corr("YY");
    const auto& pc = t.at(n, j, "comp").vals;
    ExtractedCell e;
    e.rho30 = (xx - yy + kI * xy + kI * yx) / 4.0;
    e.rho12 = (xx + yy + kI * xy - kI * yx) / 4.0;
    e.rho33 = pc[3];
    e.rho11 = pc[1];
    return e;
}

ExtractedCell bbb_extract(const ProbTable& t, int n, int j) {
    const auto& p = t.at(n, j, "bell").vals;
    const auto& q = t.at(n, j, "bell_i").vals;
    const auto& pc = t.at(n, j, "comp").vals;
    ExtractedCell e;
    e.rho30 = (p[0] - p[1]) / 2.0 + kI * (q[0] - q[1]) / 2.0;
    e.rho12 = (p[2] - p[3]) / 2.0 + kI * (q[3] - q[2]) / 2.0;
    e.rho33 = pc[3];
    e.rho11 = pc[1];
    return e;
}

MixedElements collect_elements(const ProbTable& t, int d, ExtractRoute route) {
    MixedElements el;
    el.e30.assign(static_cast<std::size_t>(d), std::vector<Cplx>(static_cast<std::size_t>(d)));
    el.e12 = el.e30;
    el.e33.assign(static_cast<std::size_t>(d), Cplx(0.0, 0.0));
    el.e11 = el.e33;
    for (int n = 0; n < d; ++n)
        for (int j = 0; j < d; ++j) {
            const ExtractedCell c =
                route == ExtractRoute::ssb ? ssb_extract(t, n, j) : bbb_extract(t, n, j);
            el.e30[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] = c.rho30;
            el.e12[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] = c.rho12;
            el.e33[static_cast<std::size_t>(n)] += c.rho33 / static_cast<double>(d);
            el.e11[static_cast<std::size_t>(n)] += c.rho11 / static_cast<double>(d);
        }
    return el;
}

CMatrix redsm_mixed_estimate(const MixedElements& el, double theta) {
    const int d = static_cast<int>(el.e33.size());
    const double s = std::sin(theta);
    if (std::abs(s) < 1e-12)
        throw Error("SingularTheta", "inversion undefined at sin(theta) = 0");
    const double t2 = std::tan(theta / 2.0);
    CMatrix rec = CMatrix::zero(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m) {
            Cplx sr(0.0, 0.0), si(0.0, 0.0);
            for (int j = 0; j < d; ++j) {
                const Cplx om = std::exp(Cplx(0.0, 2.0 * 3.14159265358979323846 *
                                                       ((n - m) * j) / d));
                sr += el.e30[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] * om;
                si += el.e12[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] * om;
            }
            const Cplx diag = (n == m) ? Cplx(d, 0.0) * t2 : Cplx(0.0, 0.0);
            const double rr = ((diag * el.e33[static_cast<std::size_t>(n)] + kI * sr) / s).real();
            // the imaginary channel needs the opposite sign on the j sum to
            // come out antisymmetric
            const double ri = ((diag * el.e11[static_cast<std::size_t>(n)] - kI * si) / s).real();
            rec(static_cast<std::size_t>(n), static_cast<std::size_t>(m)) = Cplx(rr, ri);
        }
    return hermitize_normalize(rec);
}

std::vector<CMatrix> dsm_mixed_forward(const CMatrix& rho, int n, double theta) {
    const int d = static_cast<int>(rho.rows);
    const double s = std::sin(theta);
    const double eps = 2.0 * std::sin(theta / 2.0) * std::sin(theta / 2.0);
    std::vector<CMatrix> outs;
    outs.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        Cplx g(0.0, 0.0);
        for (int k = 0; k < d; ++k)
            g += rho(static_cast<std::size_t>(n), static_cast<std::size_t>(k)) *
                 std::exp(Cplx(0.0, 2.0 * 3.14159265358979323846 * ((k - n) * j) / d));
        const CVector cj = fourier_ket(static_cast<std::size_t>(d), static_cast<std::size_t>(j));
        const Cplx cjr = expect(cj, rho);
        const double rnn = rho(static_cast<std::size_t>(n), static_cast<std::size_t>(n)).real();
        const Cplx r10 = kI * s / static_cast<double>(d) * (g - eps * rnn);
        const double r11 = s * s * rnn / static_cast<double>(d);
        const double r00 = cjr.real() - 2.0 * g.real() * eps / static_cast<double>(d) +
                           eps * eps * rnn / static_cast<double>(d);
        CMatrix m = CMatrix::zero(2, 2);
        m(0, 0) = r00;
        m(0, 1) = std::conj(r10);
        m(1, 0) = r10;
        m(1, 1) = r11;
        outs.push_back(std::move(m));
    }
    return outs;
}

CMatrix dsm_mixed_estimate(const std::vector<double>& pop,
                           const std::vector<std::vector<Cplx>>& coh, double theta) {
    const int d = static_cast<int>(pop.size());
    const double s = std::sin(theta);
    if (std::abs(s) < 1e-12)
        throw Error("SingularTheta", "inversion undefined at sin(theta) = 0");
    const double t2 = std::tan(theta / 2.0);
    CMatrix rec = CMatrix::zero(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m) {
            Cplx sum(0.0, 0.0);
            for (int j = 0; j < d; ++j)
                sum += coh[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] *
                       std::exp(Cplx(0.0, 2.0 * 3.14159265358979323846 * ((n - m) * j) / d));
            Cplx val = -kI * sum;
            if (n == m) val += Cplx(d, 0.0) * t2 * pop[static_cast<std::size_t>(n)];
            rec(static_cast<std::size_t>(n), static_cast<std::size_t>(m)) = val / s;
        }
    return hermitize_normalize(rec);
}

CMatrix mub_qst_estimate(const std::vector<MeasurementSetting>& bases, const ProbTable& t) {
    if (bases.empty())
        throw Error("IncompleteData", "no bases supplied");
    const std::size_t d = bases[0].projectors[0].dim();
    CMatrix acc = scale(-1.0, CMatrix::identity(d));
    for (const auto& b : bases) {
        if (!t.has(0, 0, b.id))
            throw Error("IncompleteData", "missing probabilities for basis " + b.id);
        const auto& vals = t.at(0, 0, b.id).vals;
        if (vals.size() != b.projectors.size())
            throw Error("IncompleteData", "outcome count mismatch for basis " + b.id);
        for (std::size_t k = 0; k < vals.size(); ++k) {
            const CMatrix pr = outer(b.projectors[k], b.projectors[k]);
            acc = add(acc, scale(vals[k].real(), pr));
        }
    }
    return hermitize_normalize(acc);
}

CMatrix hermitize_normalize(const CMatrix& rho) {
    CMatrix h = scale(0.5, add(rho, dagger(rho)));
    const double tr = trace(h).real();
    if (std::abs(tr) < 1e-300)
        throw Error("ZeroNorm", "reconstruction has vanishing trace");
    return scale(1.0 / tr, h);
}

} // namespace redsm
