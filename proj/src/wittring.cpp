#include "mzv/wittring.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>
#include <sstream>

namespace mzv {

namespace {

using Poly = std::vector<Int>;

long pdeg(const Poly& f) {
    for (long i = (long)f.size() - 1; i >= 0; --i)
        if (f[i] != 0) return i;
    return -1;
}

void ptrim(Poly& f) { f.resize((std::size_t)std::max<long>(pdeg(f) + 1, 0)); }

Int imod(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

Poly pmod(Poly f, const Int& m) {
    for (auto& c : f) c = imod(c, m);
    ptrim(f);
    return f;
}

Poly padd(const Poly& a, const Poly& b, const Int& m) {
    Poly r(std::max(a.size(), b.size()), Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return pmod(std::move(r), m);
}

Poly psub(const Poly& a, const Poly& b, const Int& m) {
    Poly r(std::max(a.size(), b.size()), Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return pmod(std::move(r), m);
}

Poly pmul(const Poly& a, const Poly& b, const Int& m) {
    if (pdeg(a) < 0 || pdeg(b) < 0) return {};
    Poly r(a.size() + b.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (b[j] != 0) r[i + j] += a[i] * b[j];
    }
    return pmod(std::move(r), m);
}

// Integer extended gcd; returns g and x with a*x = g mod m-context usage.
Int int_inverse(const Int& a, const Int& m) {
    Int old_r = imod(a, m), r = m;
    Int old_s = 1, s = 0;
    while (r != 0) {
        Int q = old_r / r;
        Int t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1) throw std::invalid_argument("int_inverse: not invertible");
    return imod(old_s, m);
}

// Division with remainder by a monic polynomial, coefficients mod m.
std::pair<Poly, Poly> pdivrem_monic(const Poly& a, const Poly& b, const Int& m) {
    long db = pdeg(b);
    Poly rem = pmod(a, m);
    if ((long)rem.size() <= db) return {{}, rem};
    Poly quo(rem.size() - db, Int(0));
    for (long i = (long)rem.size() - 1; i >= db; --i) {
        Int q = rem[i];
        if (q == 0) continue;
        quo[i - db] = q;
        for (long j = 0; j <= db; ++j) rem[i - db + j] = imod(rem[i - db + j] - q * b[j], m);
    }
    ptrim(rem);
    ptrim(quo);
    return {quo, rem};
}

// Division with remainder over F_p by an arbitrary nonzero polynomial.
std::pair<Poly, Poly> pdivrem_fp(const Poly& a, const Poly& b, const Int& p) {
    long db = pdeg(b);
    if (db < 0) throw std::invalid_argument("pdivrem_fp: zero divisor");
    Int lead_inv = int_inverse(b[db], p);
    Poly rem = pmod(a, p);
    if ((long)pdeg(rem) < db) return {{}, rem};
    Poly quo(rem.size() - db, Int(0));
    for (long i = (long)rem.size() - 1; i >= db; --i) {
        Int q = imod(rem[i] * lead_inv, p);
        if (q == 0) continue;
        quo[i - db] = q;
        for (long j = 0; j <= db; ++j) rem[i - db + j] = imod(rem[i - db + j] - q * b[j], p);
    }
    ptrim(rem);
    ptrim(quo);
    return {quo, rem};
}

Poly pgcd_fp(Poly a, Poly b, const Int& p) {
    a = pmod(std::move(a), p);
    b = pmod(std::move(b), p);
    while (pdeg(b) >= 0) {
        Poly r = pdivrem_fp(a, b, p).second;
        a = std::move(b);
        b = std::move(r);
    }
    long d = pdeg(a);
    if (d >= 0) {
        Int inv = int_inverse(a[d], p);
        for (auto& c : a) c = imod(c * inv, p);
    }
    return a;
}

// Bezout over F_p: returns (u, v) with u*a + v*b = 1; requires gcd = 1.
std::pair<Poly, Poly> pbezout_fp(const Poly& a, const Poly& b, const Int& p) {
    Poly r0 = pmod(a, p), r1 = pmod(b, p);
    Poly s0 = {Int(1)}, s1 = {};
    Poly t0 = {}, t1 = {Int(1)};
    while (pdeg(r1) >= 0) {
        auto [q, r] = pdivrem_fp(r0, r1, p);
        Poly s2 = psub(s0, pmul(q, s1, p), p);
        Poly t2 = psub(t0, pmul(q, t1, p), p);
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (pdeg(r0) != 0) throw std::logic_error("pbezout_fp: inputs not coprime");
    Int inv = int_inverse(r0[0], p);
    for (auto& c : s0) c = imod(c * inv, p);
    for (auto& c : t0) c = imod(c * inv, p);
    return {s0, t0};
}

Poly ppowmod(Poly base, Int e, const Poly& f, const Int& m) {
    Poly r = {Int(1)};
    base = pdivrem_monic(base, f, m).second;
    while (e > 0) {
        if ((e & 1) != 0) r = pdivrem_monic(pmul(r, base, m), f, m).second;
        base = pdivrem_monic(pmul(base, base, m), f, m).second;
        e >>= 1;
    }
    return r;
}

// Extracts one monic irreducible factor of degree f from a squarefree monic
// polynomial g mod p, all of whose irreducible factors have degree f
// (equal-degree factorization, deterministic seed).
Poly extract_degree_f_factor(Poly g, unsigned f, const Int& p, std::mt19937_64& rng) {
    while ((unsigned)pdeg(g) > f) {
        Poly r((std::size_t)pdeg(g), Int(0));
        for (auto& c : r) c = Int((unsigned long long)(rng() % 1000000007ULL)) % p;
        if (pdeg(r) < 1) continue;
        Poly s;
        if (p == 2) {
            // trace map sum_{i<f} r^{2^i}
            Poly t = pdivrem_fp(r, g, p).second;
            s = t;
            for (unsigned i = 1; i < f; ++i) {
                t = pdivrem_monic(pmul(t, t, p), g, p).second;
                s = padd(s, t, p);
            }
        } else {
            Int e = (int_pow(p, f) - 1) / 2;
            s = ppowmod(r, e, g, p);
            if (s.empty()) s = {Int(0)};
            s[0] = imod(s[0] - 1, p);
        }
        Poly d = pgcd_fp(s, g, p);
        long dd = pdeg(d), dg = pdeg(g);
        if (dd <= 0 || dd >= dg) continue;
        g = (2 * dd <= dg) ? d : pdivrem_fp(g, d, p).first;
    }
    return g;
}

// Lifts a factorization F = g*h mod p (g monic, degree f) to mod p^k,
// one power of p at a time; returns the lifted g.
Poly hensel_lift_factor(const Poly& F, Poly g, const Int& p, int k,
                        const std::vector<Int>& pk) {
    Poly h = pdivrem_fp(F, g, p).first;
    {
        Poly check = psub(F, pmul(g, h, pk[k]), p);
        if (pdeg(check) >= 0) throw std::logic_error("hensel: not a factorization mod p");
    }
    auto [u, v] = pbezout_fp(g, h, p);
    for (int j = 1; j < k; ++j) {
        const Int& mod_next = pk[j + 1];
        Poly e = psub(F, pmul(g, h, mod_next), mod_next);
        // e is divisible by p^j
        Poly ebar = e;
        for (auto& c : ebar) c = c / pk[j];
        ebar = pmod(std::move(ebar), p);
        Poly dg = pdivrem_fp(pmul(v, ebar, p), g, p).second;
        auto [dh, rem] = pdivrem_fp(psub(ebar, pmul(dg, h, p), p), g, p);
        if (pdeg(rem) >= 0) throw std::logic_error("hensel: division not exact");
        g = padd(g, pmul(dg, {pk[j]}, mod_next), mod_next);
        h = padd(h, pmul(dh, {pk[j]}, mod_next), mod_next);
    }
    return g;
}

}  // namespace

const Int& MzvContext::ppow(int j) const {
    if (j < 0 || j >= (int)pk.size()) throw std::logic_error("MzvContext::ppow: out of range");
    return pk[(std::size_t)j];
}

namespace {

bool is_prime(long p) {
    if (p < 2) return false;
    for (long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

void canon(WittElem& e) {
    if (e.is_exact_zero()) return;
    const MzvContext& ctx = *e.ctx;
    if (e.aprec > e.shift + ctx.wprec) e.aprec = e.shift + ctx.wprec;
    int cap = e.aprec - e.shift;
    e.m.resize(ctx.D, Int(0));
    if (cap <= 0) {
        for (auto& c : e.m) c = 0;
        return;
    }
    const Int& mod = ctx.ppow(cap);
    for (auto& c : e.m) c = imod(c, mod);
}

}  // namespace

WittElem w_zero() { return WittElem{}; }

WittElem w_from_int(const MzvContext& ctx, const Int& x) {
    WittElem e;
    e.ctx = &ctx;
    e.shift = 0;
    e.aprec = ctx.wprec;
    e.vfloor = 0;
    e.m.assign(ctx.D, Int(0));
    e.m[0] = x;
    canon(e);
    return e;
}

std::shared_ptr<MzvContext> ctx_create(long p, unsigned N, unsigned alpha, int M, int wprec) {
    if (!is_prime(p)) throw ContextError("ctx_create: p is not prime");
    if (N < 1) throw ContextError("ctx_create: N must be >= 1");
    if (N % (unsigned)p == 0) throw ContextError("ctx_create: p divides N");
    if (alpha < 1) throw ContextError("ctx_create: alpha must be >= 1");
    if (M < 1) throw ContextError("ctx_create: precision must be >= 1");
    auto ctx = std::make_shared<MzvContext>();
    ctx->p = p;
    ctx->N = N;
    ctx->alpha = alpha;
    ctx->M = M;
    ctx->wprec = wprec > 0 ? wprec : M + 50;
    if (ctx->wprec <= M) throw ContextError("ctx_create: working precision too small");
    ctx->pk.resize((std::size_t)ctx->wprec + 1);
    ctx->pk[0] = 1;
    for (int j = 1; j <= ctx->wprec; ++j) ctx->pk[j] = ctx->pk[j - 1] * p;
    ctx->Pint = int_pow(Int(p), alpha);
    if (ctx->Pint > std::numeric_limits<long>::max() / 4)
        throw ContextError("ctx_create: p^alpha too large");
    ctx->P = (long)ctx->Pint;
    // multiplicative order of p mod N
    unsigned f = 1;
    {
        unsigned long r = (unsigned long)(p % N == 0 ? 0 : p % N);
        if (N == 1) {
            f = 1;
        } else {
            unsigned long acc = r % N;
            f = 1;
            while (acc != 1 % N) {
                acc = (acc * (unsigned long)(p % N)) % N;
                ++f;
                if (f > N) throw ContextError("ctx_create: order computation failed");
            }
        }
    }
    ctx->D = f;
    // (p^alpha)^{-1} mod N
    if (N == 1) {
        ctx->xi_inv_palpha = 0;
    } else {
        unsigned long pa = 1;
        for (unsigned a = 0; a < alpha; ++a) pa = (pa * (unsigned long)(p % N)) % N;
        unsigned long inv = 1, e = 0;
        // brute force inverse (N is small)
        for (inv = 1; inv < N; ++inv)
            if ((inv * pa) % N == 1 % N) break;
        if (N > 1 && (inv * pa) % N != 1 % N) throw ContextError("ctx_create: p^alpha not invertible mod N");
        (void)e;
        ctx->xi_inv_palpha = (unsigned)(N == 1 ? 0 : inv % N);
    }

    // Choose fhat: a monic degree-f factor of Phi_N over Z_p, to working precision.
    auto phiN_int = cyclotomic_polynomial(N);
    unsigned phiN = (unsigned)phiN_int.size() - 1;
    const Int& W = ctx->pk[(std::size_t)ctx->wprec];
    Poly F(phiN_int.size());
    for (std::size_t i = 0; i < phiN_int.size(); ++i) F[i] = imod(phiN_int[i], W);
    if (f == phiN) {
        ctx->fhat = F;
    } else if (f == 1) {
        // find a root of Phi_N mod p and lift it by Newton iteration
        Int pp(p);
        long root = -1;
        for (long a = 1; a < p; ++a) {
            Int val = 0;
            for (long i = (long)phiN_int.size() - 1; i >= 0; --i) val = imod(val * a + phiN_int[i], pp);
            if (val == 0) {
                root = a;
                break;
            }
        }
        if (root < 0) throw ContextError("ctx_create: no root of Phi_N mod p (internal)");
        Int a(root);
        int prec = 1;
        while (prec < ctx->wprec) {
            prec = std::min(2 * prec, ctx->wprec);
            const Int& mod = ctx->pk[(std::size_t)prec];
            Int val = 0, der = 0;
            for (long i = (long)phiN_int.size() - 1; i >= 0; --i) {
                der = imod(der * a + val, mod);
                val = imod(val * a + phiN_int[i], mod);
            }
            a = imod(a - val * int_inverse(der, mod), mod);
        }
        ctx->fhat = {imod(-a, W), Int(1)};
    } else {
        std::mt19937_64 rng(0xC0FFEEULL);
        Poly gbar = extract_degree_f_factor(pmod(F, Int(p)), f, Int(p), rng);
        ctx->fhat = hensel_lift_factor(F, gbar, Int(p), ctx->wprec, ctx->pk);
    }
    ctx->fhat.resize(f + 1, Int(0));

    // xi = x mod fhat; precompute xi^0..xi^{N-1} and check the order.
    WittElem one = w_from_int(*ctx, 1);
    WittElem xi;
    xi.ctx = ctx.get();
    xi.shift = 0;
    xi.aprec = ctx->wprec;
    xi.m.assign(f, Int(0));
    if (f == 1) {
        xi.m[0] = imod(-ctx->fhat[0], W);  // the lifted root
    } else {
        xi.m[1] = 1;
    }
    canon(xi);
    ctx->xi_pow.clear();
    ctx->xi_pow.push_back(one);
    for (unsigned k = 1; k < N; ++k) ctx->xi_pow.push_back(ctx->xi_pow.back() * xi);
    WittElem xiN = ctx->xi_pow.back() * xi;
    if (!w_eq_mod(xiN, one, ctx->wprec)) throw ContextError("ctx_create: xi^N != 1");
    for (unsigned q = 2; q <= N; ++q)
        if (N % q == 0 && is_prime((long)q)) {
            if (w_eq_mod(ctx->xi_pow[N / q], one, 1))
                throw ContextError("ctx_create: root of unity has order < N");
        }
    return ctx;
}

std::string ctx_to_json(const MzvContext& ctx) {
    nlohmann::json j;
    j["p"] = ctx.p;
    j["N"] = ctx.N;
    j["alpha"] = ctx.alpha;
    j["precision"] = ctx.M;
    j["working_precision"] = ctx.wprec;
    j["residue_degree"] = ctx.D;
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : ctx.fhat) coeffs.push_back(c.str());
    j["fhat"] = coeffs;
    j["xi_inv_palpha"] = ctx.xi_inv_palpha;
    return j.dump();
}

WittElem reduce(const MzvContext& ctx, const Rational& q) {
    if (q == 0) return w_zero();
    Int num = numerator(q), den = denominator(q);
    Int pp(ctx.p);
    int vn = (int)padic_valuation(num, pp), vd = (int)padic_valuation(den, pp);
    num /= int_pow(pp, (unsigned long)vn);
    den /= int_pow(pp, (unsigned long)vd);
    WittElem e;
    e.ctx = &ctx;
    e.shift = vn - vd;
    e.aprec = e.shift + ctx.wprec;
    e.vfloor = e.shift;
    e.m.assign(ctx.D, Int(0));
    const Int& W = ctx.ppow(ctx.wprec);
    e.m[0] = imod(imod(num, W) * int_inverse(imod(den, W), W), W);
    canon(e);
    return e;
}

WittElem reduce(const MzvContext& ctx, const CycRational& x) {
    if (x.N != ctx.N) throw std::invalid_argument("reduce: CycRational field mismatch");
    if (x.is_zero()) return w_zero();
    Int den = 1;
    for (const auto& c : x.c) den = lcm(den, denominator(c));
    Int pp(ctx.p);
    int vd = (int)padic_valuation(den, pp);
    Int den_unit = den / int_pow(pp, (unsigned long)vd);
    const Int& W = ctx.ppow(ctx.wprec);
    Int den_inv = int_inverse(imod(den_unit, W), W);
    WittElem acc;
    for (std::size_t j = 0; j < x.c.size(); ++j) {
        if (x.c[j] == 0) continue;
        Int aj = numerator(x.c[j]) * (den / denominator(x.c[j]));  // integer
        WittElem term = ctx.xi_pow[j % ctx.N];
        // scale mantissa by aj * den_inv
        Int s = imod(imod(aj, W) * den_inv, W);
        for (auto& c : term.m) c = imod(c * s, W);
        term.aprec = ctx.wprec;
        acc = acc.is_exact_zero() ? term : acc + term;
    }
    if (acc.is_exact_zero()) {
        // numerators all vanished mod p^wprec: value is 0 to working precision
        WittElem e = w_from_int(ctx, 0);
        e.shift = -vd;
        e.aprec = ctx.wprec - vd;
        return e;
    }
    acc.shift -= vd;
    acc.aprec -= vd;
    acc.vfloor = acc.shift;
    canon(acc);
    return acc;
}

WittElem operator+(const WittElem& a, const WittElem& b) {
    if (a.is_exact_zero()) return b;
    if (b.is_exact_zero()) return a;
    if (a.ctx != b.ctx) throw std::invalid_argument("WittElem: mixed contexts");
    const MzvContext& ctx = *a.ctx;
    WittElem r;
    r.ctx = a.ctx;
    r.shift = std::min(a.shift, b.shift);
    r.aprec = std::min(a.aprec, b.aprec);
    r.vfloor = std::min(a.vfloor, b.vfloor);
    r.m.assign(ctx.D, Int(0));
    int cap = r.aprec - r.shift;
    if (cap > 0) {
        const Int& sa = ctx.ppow(std::min(a.shift - r.shift, ctx.wprec));
        const Int& sb = ctx.ppow(std::min(b.shift - r.shift, ctx.wprec));
        for (unsigned j = 0; j < ctx.D; ++j) r.m[j] = a.m[j] * sa + b.m[j] * sb;
    }
    canon(r);
    return r;
}

WittElem operator-(const WittElem& a) {
    if (a.is_exact_zero()) return a;
    WittElem r = a;
    int cap = r.aprec - r.shift;
    if (cap > 0) {
        const Int& mod = a.ctx->ppow(cap);
        for (auto& c : r.m) c = imod(-c, mod);
    }
    return r;
}

WittElem operator-(const WittElem& a, const WittElem& b) { return a + (-b); }

WittElem& operator+=(WittElem& a, const WittElem& b) {
    a = a + b;
    return a;
}

ValInfo w_valuation(const WittElem& a) {
    if (a.is_exact_zero()) return {std::numeric_limits<int>::max() / 4, false};
    const MzvContext& ctx = *a.ctx;
    int cap = a.aprec - a.shift;
    if (cap <= 0) return {a.aprec, false};
    Int pp(ctx.p);
    long best = -1;
    for (const auto& c : a.m) {
        if (c == 0) continue;
        long v = padic_valuation(c, pp);
        if (best < 0 || v < best) best = v;
    }
    if (best < 0 || best >= cap) return {a.aprec, false};
    return {a.shift + best, true};
}

bool w_is_zero_mod(const WittElem& a, int k) {
    if (a.is_exact_zero()) return true;
    if (a.aprec < k) throw PrecisionError("w_is_zero_mod: insufficient precision");
    int cap = k - a.shift;
    if (cap <= 0) return true;
    if (cap > a.ctx->wprec) throw PrecisionError("w_is_zero_mod: beyond working precision");
    const Int& mod = a.ctx->ppow(cap);
    for (const auto& c : a.m)
        if (imod(c, mod) != 0) return false;
    return true;
}

WittElem operator*(const WittElem& a, const WittElem& b) {
    if (a.is_exact_zero() || b.is_exact_zero()) return w_zero();
    if (a.ctx != b.ctx) throw std::invalid_argument("WittElem: mixed contexts");
    const MzvContext& ctx = *a.ctx;
    ValInfo va = w_valuation(a), vb = w_valuation(b);
    WittElem r;
    r.ctx = a.ctx;
    r.shift = a.shift + b.shift;
    long ap = std::min((long)a.aprec + vb.v, (long)b.aprec + va.v);
    r.aprec = (int)std::min<long>(ap, r.shift + ctx.wprec);
    r.vfloor = a.vfloor + b.vfloor;
    int cap = r.aprec - r.shift;
    if (cap <= 0) {
        r.m.assign(ctx.D, Int(0));
        canon(r);
        return r;
    }
    const Int& mod = ctx.ppow(cap);
    if (ctx.D == 1) {
        r.m = {imod(a.m[0] * b.m[0], mod)};
    } else {
        Poly prod = pmul(a.m, b.m, mod);
        r.m = pdivrem_monic(prod, ctx.fhat, mod).second;
    }
    canon(r);
    return r;
}

WittElem w_inverse(const WittElem& a) {
    if (a.is_exact_zero()) throw std::invalid_argument("w_inverse: zero");
    const MzvContext& ctx = *a.ctx;
    ValInfo v = w_valuation(a);
    if (!v.exact) throw PrecisionError("w_inverse: element is zero to known precision");
    int rel = (int)(a.aprec - v.v);
    if (rel <= 0) throw PrecisionError("w_inverse: no relative precision");
    // normalize: pull p^k out of the mantissa
    int k = (int)(v.v - a.shift);
    Poly unit = a.m;
    if (k > 0) {
        const Int& pk = ctx.ppow(k);
        for (auto& c : unit) c = c / pk;
    }
    int cap = std::min(rel, ctx.wprec);
    const Int& mod = ctx.ppow(cap);
    for (auto& c : unit) c = imod(c, mod);
    Poly x;
    if (ctx.D == 1) {
        x = {int_inverse(unit[0], mod)};
    } else {
        // inverse mod (p, fhat), then Newton lifting x <- x(2 - u x)
        Poly fbar = pmod(ctx.fhat, Int(ctx.p));
        x = pbezout_fp(pmod(unit, Int(ctx.p)), fbar, Int(ctx.p)).first;
        int prec = 1;
        while (prec < cap) {
            prec = std::min(2 * prec, cap);
            const Int& mm = ctx.ppow(prec);
            Poly ux = pdivrem_monic(pmul(unit, x, mm), ctx.fhat, mm).second;
            Poly two_minus = psub({Int(2)}, ux, mm);
            x = pdivrem_monic(pmul(x, two_minus, mm), ctx.fhat, mm).second;
        }
    }
    WittElem r;
    r.ctx = a.ctx;
    r.shift = (int)-v.v;
    r.aprec = (int)(a.aprec - 2 * v.v);
    r.vfloor = (int)-v.v;
    r.m = std::move(x);
    r.m.resize(ctx.D, Int(0));
    canon(r);
    return r;
}

WittElem w_shift(const WittElem& a, int k) {
    if (a.is_exact_zero()) return a;
    WittElem r = a;
    r.shift += k;
    r.aprec += k;
    r.vfloor += k;
    return r;
}

WittElem w_div_int(const WittElem& a, long long n) {
    if (n == 0) throw std::invalid_argument("w_div_int: division by zero");
    if (a.is_exact_zero()) return a;
    const MzvContext& ctx = *a.ctx;
    bool neg = n < 0;
    unsigned long long un = neg ? (unsigned long long)(-n) : (unsigned long long)n;
    int t = 0;
    while (un % (unsigned long long)ctx.p == 0) {
        un /= (unsigned long long)ctx.p;
        ++t;
    }
    WittElem r = w_shift(a, -t);
    if (un != 1) {
        auto it = ctx.small_inv_cache.find((long long)un);
        if (it == ctx.small_inv_cache.end()) {
            Int inv = int_inverse(Int(un), ctx.ppow(ctx.wprec));
            it = ctx.small_inv_cache.emplace((long long)un, Poly{inv}).first;
        }
        const Int& inv = it->second[0];
        int cap = r.aprec - r.shift;
        if (cap > 0) {
            const Int& mod = ctx.ppow(std::min(cap, ctx.wprec));
            for (auto& c : r.m) c = imod(c * inv, mod);
        }
    }
    if (neg) r = -r;
    return r;
}

WittElem w_scale(const WittElem& a, const Rational& q) {
    if (a.is_exact_zero() || q == 0) return w_zero();
    return a * reduce(*a.ctx, q);
}

bool w_eq_mod(const WittElem& a, const WittElem& b, int k) {
    WittElem d = a - b;
    if (!d.is_exact_zero() && d.aprec < k)
        throw PrecisionError("w_eq_mod: operands not known to requested precision");
    return w_is_zero_mod(d, k);
}

std::vector<std::vector<long>> w_digits(const WittElem& a, int digits) {
    if (a.is_exact_zero()) return {std::vector<long>((std::size_t)digits, 0)};
    const MzvContext& ctx = *a.ctx;
    std::vector<std::vector<long>> out;
    for (const auto& c : a.m) {
        std::vector<long> d;
        Int x = imod(c, ctx.ppow(std::min(digits, ctx.wprec)));
        for (int j = 0; j < digits; ++j) {
            d.push_back((long)(x % ctx.p));
            x /= ctx.p;
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::string w_to_string(const WittElem& a) {
    if (a.is_exact_zero()) return "0";
    std::ostringstream os;
    os << "p^" << a.shift << "*(";
    for (std::size_t j = 0; j < a.m.size(); ++j) {
        if (j) os << " + ";
        os << a.m[j].str();
        if (j) os << "*x^" << j;
    }
    os << ") + O(p^" << a.aprec << ")";
    return os.str();
}

}  // namespace mzv
