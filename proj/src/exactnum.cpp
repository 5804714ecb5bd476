#include "mzv/exactnum.hpp"

#include <map>
#include <numeric>

namespace mzv {

Int int_pow(const Int& base, unsigned long e) {
    Int r = 1, b = base;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

Int binomial(long n, long k) {
    if (k < 0 || k > n || n < 0) return 0;
    if (k > n - k) k = n - k;
    Int r = 1;
    for (long j = 1; j <= k; ++j) {
        r *= (n - k + j);
        r /= j;
    }
    return r;
}

Rational binomial_general(const Rational& a, long l) {
    if (l < 0) return 0;
    Rational r = 1;
    for (long k = 0; k < l; ++k) {
        r *= (a - k);
        r /= (k + 1);
    }
    return r;
}

const Rational& bernoulli(std::size_t l) {
    static std::vector<Rational> table{Rational(1)};
    while (table.size() <= l) {
        // sum_{j=0}^{m} binom(m+1, j) B_j = 0  =>  solve for B_m.
        std::size_t m = table.size();
        Rational s = 0;
        for (std::size_t j = 0; j < m; ++j)
            s += Rational(binomial((long)m + 1, (long)j)) * table[j];
        table.push_back(-s / Rational((long)m + 1));
    }
    return table[l];
}

long padic_valuation(const Int& x, const Int& p) {
    if (x == 0) throw std::invalid_argument("padic_valuation: zero argument");
    Int a = abs(x);
    long v = 0;
    while (a % p == 0) {
        a /= p;
        ++v;
    }
    return v;
}

long padic_valuation(const Rational& x, const Int& p) {
    if (x == 0) throw std::invalid_argument("padic_valuation: zero argument");
    return padic_valuation(numerator(x), p) - padic_valuation(denominator(x), p);
}

unsigned euler_phi(unsigned n) {
    unsigned result = n;
    for (unsigned q = 2; (unsigned long)q * q <= n; ++q) {
        if (n % q == 0) {
            result -= result / q;
            while (n % q == 0) n /= q;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

namespace {

// Exact division of integer polynomials (low degree first), divisor monic.
std::vector<Int> poly_div_exact(const std::vector<Int>& num, const std::vector<Int>& den) {
    std::vector<Int> rem = num;
    std::vector<Int> quo(num.size() - den.size() + 1, Int(0));
    for (long i = (long)quo.size() - 1; i >= 0; --i) {
        Int q = rem[i + den.size() - 1];
        quo[i] = q;
        if (q != 0)
            for (std::size_t j = 0; j < den.size(); ++j) rem[i + j] -= q * den[j];
    }
    return quo;
}

}  // namespace

std::vector<Int> cyclotomic_polynomial(unsigned N) {
    static std::map<unsigned, std::vector<Int>> cache;
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    // (x^N - 1) / prod_{d | N, d < N} Phi_d.
    std::vector<Int> poly(N + 1, Int(0));
    poly[0] = -1;
    poly[N] = 1;
    for (unsigned d = 1; d < N; ++d)
        if (N % d == 0) poly = poly_div_exact(poly, cyclotomic_polynomial(d));
    cache[N] = poly;
    return poly;
}

namespace {

// Per-N reduction data: Phi_N as rationals plus reductions of x^k,
// k = phi(N) .. 2 phi(N) - 2, modulo Phi_N.
struct CycCtx {
    unsigned phi;
    std::vector<std::vector<Rational>> xpow;  // xpow[j] = x^{phi+j} mod Phi_N
};

const CycCtx& cyc_ctx(unsigned N) {
    static std::map<unsigned, CycCtx> cache;
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    CycCtx ctx;
    auto phi_poly = cyclotomic_polynomial(N);
    ctx.phi = (unsigned)phi_poly.size() - 1;
    // x^phi = -(low part of Phi_N); then multiply by x repeatedly.
    std::vector<Rational> cur(ctx.phi);
    for (unsigned k = 0; k < ctx.phi; ++k) cur[k] = -Rational(phi_poly[k]);
    // Powers x^{phi+j} are needed up to x^{2 phi - 2} by products and up to
    // x^{N-1} by root powers.
    unsigned count = std::max(ctx.phi >= 1 ? ctx.phi - 1 : 0, N > ctx.phi ? N - ctx.phi : 0);
    count = std::max(count, 1u);
    for (unsigned j = 0; j < count; ++j) {
        ctx.xpow.push_back(cur);
        // cur <- x * cur mod Phi_N
        std::vector<Rational> nxt(ctx.phi);
        Rational top = cur[ctx.phi - 1];
        for (unsigned k = ctx.phi - 1; k >= 1; --k) nxt[k] = cur[k - 1];
        nxt[0] = 0;
        if (top != 0)
            for (unsigned k = 0; k < ctx.phi; ++k) nxt[k] -= top * Rational(phi_poly[k]);
        cur = nxt;
    }
    return cache.emplace(N, std::move(ctx)).first->second;
}

void check_same_field(const CycRational& a, const CycRational& b) {
    if (a.N != b.N) throw std::invalid_argument("CycRational: mixed cyclotomic fields");
}

}  // namespace

bool CycRational::is_zero() const {
    for (const auto& x : c)
        if (x != 0) return false;
    return true;
}

std::optional<Rational> CycRational::as_rational() const {
    for (std::size_t k = 1; k < c.size(); ++k)
        if (c[k] != 0) return std::nullopt;
    return c.empty() ? Rational(0) : c[0];
}

CycRational cyc_zero(unsigned N) {
    CycRational r;
    r.N = N;
    r.c.assign(euler_phi(N), Rational(0));
    return r;
}

CycRational cyc_one(unsigned N) { return cyc_from_rational(N, 1); }

CycRational cyc_from_rational(unsigned N, const Rational& q) {
    CycRational r = cyc_zero(N);
    r.c[0] = q;
    return r;
}

CycRational cyc_root_power(unsigned N, long k) {
    unsigned phi = euler_phi(N);
    long e = ((k % (long)N) + (long)N) % (long)N;
    CycRational r = cyc_zero(N);
    if ((unsigned)e < phi) {
        r.c[e] = 1;
        return r;
    }
    const CycCtx& ctx = cyc_ctx(N);
    r.c = ctx.xpow[e - phi];
    return r;
}

CycRational operator+(const CycRational& a, const CycRational& b) {
    check_same_field(a, b);
    CycRational r = a;
    for (std::size_t k = 0; k < r.c.size(); ++k) r.c[k] += b.c[k];
    return r;
}

CycRational operator-(const CycRational& a, const CycRational& b) {
    check_same_field(a, b);
    CycRational r = a;
    for (std::size_t k = 0; k < r.c.size(); ++k) r.c[k] -= b.c[k];
    return r;
}

CycRational operator-(const CycRational& a) {
    CycRational r = a;
    for (auto& x : r.c) x = -x;
    return r;
}

CycRational operator*(const CycRational& a, const CycRational& b) {
    check_same_field(a, b);
    unsigned phi = (unsigned)a.c.size();
    std::vector<Rational> prod(2 * phi - 1, Rational(0));
    for (unsigned i = 0; i < phi; ++i) {
        if (a.c[i] == 0) continue;
        for (unsigned j = 0; j < phi; ++j)
            if (b.c[j] != 0) prod[i + j] += a.c[i] * b.c[j];
    }
    CycRational r = cyc_zero(a.N);
    for (unsigned k = 0; k < phi; ++k) r.c[k] = prod[k];
    if (phi > 1) {
        const CycCtx& ctx = cyc_ctx(a.N);
        for (unsigned k = phi; k < 2 * phi - 1; ++k) {
            if (prod[k] == 0) continue;
            const auto& red = ctx.xpow[k - phi];
            for (unsigned j = 0; j < phi; ++j) r.c[j] += prod[k] * red[j];
        }
    }
    return r;
}

CycRational operator*(const CycRational& a, const Rational& s) {
    CycRational r = a;
    for (auto& x : r.c) x *= s;
    return r;
}

CycRational& operator+=(CycRational& a, const CycRational& b) {
    a = a + b;
    return a;
}

bool operator==(const CycRational& a, const CycRational& b) {
    return a.N == b.N && a.c == b.c;
}

CycRational cyc_inverse(const CycRational& a) {
    if (a.is_zero()) throw std::invalid_argument("cyc_inverse: zero argument");
    unsigned phi = (unsigned)a.c.size();
    if (phi == 1) {
        CycRational r = a;
        r.c[0] = 1 / a.c[0];
        return r;
    }
    // Extended Euclid in Q[x] for gcd(a, Phi_N) = 1: find u with u*a = 1 mod Phi_N.
    using Poly = std::vector<Rational>;
    auto deg = [](const Poly& f) {
        for (long i = (long)f.size() - 1; i >= 0; --i)
            if (f[i] != 0) return i;
        return (long)-1;
    };
    auto phi_ints = cyclotomic_polynomial(a.N);
    Poly r0(phi_ints.size());
    for (std::size_t i = 0; i < phi_ints.size(); ++i) r0[i] = Rational(phi_ints[i]);
    Poly r1 = a.c;
    Poly s0 = {Rational(0)}, s1 = {Rational(1)};  // coefficients of `a`
    while (deg(r1) > 0) {
        long d0 = deg(r0), d1 = deg(r1);
        if (d0 < d1) {
            std::swap(r0, r1);
            std::swap(s0, s1);
            continue;
        }
        // r0 -= (lead ratio) x^{d0-d1} r1, same for s.
        Rational q = r0[d0] / r1[d1];
        long sh = d0 - d1;
        for (long i = 0; i <= d1; ++i) r0[i + sh] -= q * r1[i];
        if ((long)s0.size() < (long)s1.size() + sh) s0.resize(s1.size() + sh, Rational(0));
        for (long i = 0; i < (long)s1.size(); ++i) s0[i + sh] -= q * s1[i];
        if (deg(r0) < deg(r1)) {
            std::swap(r0, r1);
            std::swap(s0, s1);
        }
    }
    long d1 = deg(r1);
    if (d1 != 0) throw std::invalid_argument("cyc_inverse: element is a zero divisor");
    CycRational out = cyc_zero(a.N);
    for (std::size_t i = 0; i < s1.size() && i < out.c.size(); ++i) out.c[i] = s1[i] / r1[0];
    // s1 may exceed degree phi-1 only by cancellation; verify the inverse.
    CycRational chk = out * a;
    if (!(chk == cyc_one(a.N))) throw std::logic_error("cyc_inverse: verification failed");
    return out;
}

std::complex<double> cyc_to_complex(const CycRational& a) {
    std::complex<double> xi = std::polar(1.0, 2.0 * 3.14159265358979323846 / (double)a.N);
    std::complex<double> r = 0.0, pw = 1.0;
    for (const auto& x : a.c) {
        r += pw * static_cast<double>(x);
        pw *= xi;
    }
    return r;
}

}  // namespace mzv
