#include "mzv/harmonic.hpp"

#include <tuple>

namespace mzv {

namespace {

using CPoly = std::vector<CycRational>;  // low degree first

CPoly cp_zero() { return {}; }

void cp_add_inplace(CPoly& a, const CPoly& b, unsigned N) {
    if (a.size() < b.size()) a.resize(b.size(), cyc_zero(N));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
}

CPoly cp_scale(const CPoly& a, const CycRational& s) {
    CPoly r = a;
    for (auto& c : r) c = c * s;
    return r;
}

CPoly cp_mul(const CPoly& a, const CPoly& b, unsigned N) {
    if (a.empty() || b.empty()) return {};
    CPoly r(a.size() + b.size() - 1, cyc_zero(N));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// p(u) -> p(u + 1)
CPoly cp_shift1(const CPoly& a, unsigned N) {
    CPoly r(a.size(), cyc_zero(N));
    for (std::size_t t = 0; t < a.size(); ++t)
        for (std::size_t j = 0; j <= t; ++j)
            r[j] += a[t] * Rational(binomial((long)t, (long)j));
    return r;
}

CycRational cp_eval(const CPoly& a, long u, unsigned N) {
    CycRational r = cyc_zero(N);
    CycRational uu = cyc_from_rational(N, Rational(u));
    for (std::size_t i = a.size(); i-- > 0;) r = r * uu + a[i];
    return r;
}

void ep_add(ExpPoly& f, unsigned channel, const CPoly& poly) {
    if (poly.empty()) return;
    auto& slot = f.ch[channel % f.N];
    cp_add_inplace(slot, poly, f.N);
}

// Core sum: sum_{u1=0}^{u-1} u1^m xi^{k u1}.
ExpPoly base_open(unsigned N, int m, unsigned k) {
    ExpPoly f;
    f.N = N;
    k %= N;
    if (k == 0) {
        // Faulhaber polynomial (B_1 = -1/2 convention matches the [0, u-1] range).
        CPoly F((std::size_t)m + 2, cyc_zero(N));
        for (int j = 0; j <= m; ++j) {
            Rational coeff = Rational(binomial(m + 1, j)) * bernoulli((std::size_t)j) /
                             Rational(m + 1);
            F[(std::size_t)(m + 1 - j)] = cyc_from_rational(N, coeff);
        }
        ep_add(f, 0, F);
        return f;
    }
    // Solve z*A(u+1) - A(u) = u^m triangularly; B = -A(0).
    CycRational z = cyc_root_power(N, (long)k);
    CycRational zm1_inv = cyc_inverse(z - cyc_one(N));
    CPoly A((std::size_t)m + 1, cyc_zero(N));
    for (int j = m; j >= 0; --j) {
        CycRational rhs = (j == m) ? cyc_one(N) : cyc_zero(N);
        for (int t = j + 1; t <= m; ++t)
            rhs = rhs - z * A[(std::size_t)t] * Rational(binomial(t, j));
        A[(std::size_t)j] = rhs * zm1_inv;
    }
    ep_add(f, k, A);
    ep_add(f, 0, CPoly{-A[0]});
    return f;
}

// Core sum over [0, u]: substitute u -> u + 1 in base_open.
ExpPoly base_closed(unsigned N, int m, unsigned k) {
    ExpPoly g = base_open(N, m, k);
    ExpPoly f;
    f.N = N;
    for (auto& [ch, poly] : g.ch) {
        CPoly shifted = cp_shift1(poly, N);
        if (ch != 0) shifted = cp_scale(shifted, cyc_root_power(N, (long)ch));
        ep_add(f, ch, shifted);
    }
    return f;
}

// Multiply an exponential polynomial by a plain polynomial in u.
ExpPoly ep_mul_poly(const ExpPoly& f, const CPoly& poly) {
    ExpPoly r;
    r.N = f.N;
    for (const auto& [ch, p] : f.ch) ep_add(r, ch, cp_mul(p, poly, f.N));
    return r;
}

CPoly monomial(unsigned N, int deg, const CycRational& coeff) {
    CPoly r((std::size_t)deg + 1, cyc_zero(N));
    r[(std::size_t)deg] = coeff;
    return r;
}

// (u - 1)^e expanded in u.
CPoly um1_pow(unsigned N, int e) {
    CPoly r((std::size_t)e + 1, cyc_zero(N));
    for (int j = 0; j <= e; ++j) {
        Rational c = Rational(binomial(e, j)) * ((e - j) % 2 == 0 ? 1 : -1);
        r[(std::size_t)j] = cyc_from_rational(N, c);
    }
    return r;
}

}  // namespace

CycRational exp_poly_eval(const ExpPoly& f, long u) {
    CycRational r = cyc_zero(f.N);
    for (const auto& [ch, poly] : f.ch)
        r += cyc_root_power(f.N, (long)ch * u) * cp_eval(poly, u, f.N);
    return r;
}

const ExpPoly& twisted_power_sum_closed_form(unsigned N, int m, int mprime, unsigned k,
                                             SumRange variant) {
    static std::map<std::tuple<unsigned, int, int, unsigned, int>, ExpPoly> cache;
    auto key = std::make_tuple(N, m, mprime, k % N, (int)variant);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (m < 0 || mprime < 0) throw std::invalid_argument("twisted_power_sum: negative exponent");

    ExpPoly f;
    f.N = N;
    if (variant == SumRange::shifted) {
        // (u-1-u1)^{m'} = sum_t binom(m',t) (u-1)^{m'-t} (-u1)^t
        for (int t = 0; t <= mprime; ++t) {
            Rational c = Rational(binomial(mprime, t)) * (t % 2 == 0 ? 1 : -1);
            ExpPoly part = ep_mul_poly(base_open(N, m + t, k),
                                       cp_scale(um1_pow(N, mprime - t), cyc_from_rational(N, c)));
            for (auto& [ch, poly] : part.ch) ep_add(f, ch, poly);
        }
    } else {
        // (u-u1)^{m'} = sum_t binom(m',t) u^{m'-t} (-u1)^t
        bool closed = (variant == SumRange::closed_right || variant == SumRange::closed_both);
        for (int t = 0; t <= mprime; ++t) {
            Rational c = Rational(binomial(mprime, t)) * (t % 2 == 0 ? 1 : -1);
            ExpPoly inner = closed ? base_closed(N, m + t, k) : base_open(N, m + t, k);
            ExpPoly part = ep_mul_poly(inner, monomial(N, mprime - t, cyc_from_rational(N, c)));
            for (auto& [ch, poly] : part.ch) ep_add(f, ch, poly);
        }
        if (variant != SumRange::closed_both && m == 0) {
            // remove the u1 = 0 term, which equals u^{m'}
            ep_add(f, 0, monomial(N, mprime, cyc_from_rational(N, -1)));
        }
    }
    // drop zero channels / trailing zero coefficients
    for (auto it2 = f.ch.begin(); it2 != f.ch.end();) {
        CPoly& p = it2->second;
        while (!p.empty() && p.back().is_zero()) p.pop_back();
        it2 = p.empty() ? f.ch.erase(it2) : std::next(it2);
    }
    return cache.emplace(key, std::move(f)).first->second;
}

CycRational har(unsigned N, long n, const HarmonicIndex& idx) {
    std::size_t d = idx.s.size();
    if (idx.dec.size() != d + 1)
        throw std::invalid_argument("har: need d+1 decorations for depth d");
    for (unsigned i : idx.dec)
        if (i < 1 || i > N) throw std::invalid_argument("har: decoration out of range");
    if (n < 1) throw std::invalid_argument("har: n must be >= 1");
    // S_j = partial sum over 0 < n_1 < .. < n_j <= m of the first j factors.
    std::vector<CycRational> S(d + 1, cyc_zero(N));
    S[0] = cyc_one(N);
    for (long m = 1; m < n; ++m) {
        for (std::size_t j = d; j >= 1; --j) {
            if (S[j - 1].is_zero()) continue;
            long kexp = ((long)idx.dec[j] - (long)idx.dec[j - 1]) * m;
            Rational ms = Rational(1) / Rational(int_pow(Int(m), (unsigned long)idx.s[j - 1]));
            S[j] += S[j - 1] * cyc_root_power(N, kexp) * ms;
        }
    }
    long wt = 0;
    for (int x : idx.s) wt += x;
    CycRational r = S[d] * cyc_root_power(N, -(long)idx.dec[d] * n);
    return r * Rational(int_pow(Int(n), (unsigned long)wt));
}

WittElem har_prime(const MzvContext& ctx, const HarmonicIndex& idx) {
    return reduce(ctx, har(ctx.N, ctx.P, idx));
}

namespace {

// Generalized harmonic term for the stuffle check: list of (twist, exponent)
// pairs (innermost first) plus an outer twist applied at n.
struct GenHar {
    std::vector<std::pair<long, int>> ks;
    long outer = 0;
};

CycRational gen_har(unsigned N, long n, const GenHar& g) {
    std::size_t d = g.ks.size();
    std::vector<CycRational> S(d + 1, cyc_zero(N));
    S[0] = cyc_one(N);
    for (long m = 1; m < n; ++m)
        for (std::size_t j = d; j >= 1; --j) {
            if (S[j - 1].is_zero()) continue;
            Rational ms = Rational(1) / Rational(int_pow(Int(m), (unsigned long)g.ks[j - 1].second));
            S[j] += S[j - 1] * cyc_root_power(N, g.ks[j - 1].first * m) * ms;
        }
    long wt = 0;
    for (auto& [k, s] : g.ks) wt += s;
    return S[d] * cyc_root_power(N, g.outer * n) * Rational(int_pow(Int(n), (unsigned long)wt));
}

// Quasi-shuffle of two twist/exponent lists (peeling the outermost entries).
void stuffle(const std::vector<std::pair<long, int>>& a, std::size_t na,
             const std::vector<std::pair<long, int>>& b, std::size_t nb,
             std::vector<std::pair<long, int>>& acc,
             std::vector<std::vector<std::pair<long, int>>>& out) {
    if (na == 0 && nb == 0) {
        std::vector<std::pair<long, int>> term(acc.rbegin(), acc.rend());
        out.push_back(std::move(term));
        return;
    }
    if (na > 0) {
        acc.push_back(a[na - 1]);
        stuffle(a, na - 1, b, nb, acc, out);
        acc.pop_back();
    }
    if (nb > 0) {
        acc.push_back(b[nb - 1]);
        stuffle(a, na, b, nb - 1, acc, out);
        acc.pop_back();
    }
    if (na > 0 && nb > 0) {
        acc.emplace_back(a[na - 1].first + b[nb - 1].first, a[na - 1].second + b[nb - 1].second);
        stuffle(a, na - 1, b, nb - 1, acc, out);
        acc.pop_back();
    }
}

GenHar to_gen(unsigned N, const HarmonicIndex& idx) {
    GenHar g;
    for (std::size_t j = 0; j + 1 <= idx.s.size(); ++j)
        g.ks.emplace_back((long)idx.dec[j + 1] - (long)idx.dec[j], idx.s[j]);
    g.outer = -(long)idx.dec.back();
    (void)N;
    return g;
}

}  // namespace

bool quasi_shuffle_check(unsigned N, long n, const HarmonicIndex& a, const HarmonicIndex& b) {
    GenHar ga = to_gen(N, a), gb = to_gen(N, b);
    CycRational lhs = gen_har(N, n, ga) * gen_har(N, n, gb);
    std::vector<std::vector<std::pair<long, int>>> terms;
    std::vector<std::pair<long, int>> acc;
    stuffle(ga.ks, ga.ks.size(), gb.ks, gb.ks.size(), acc, terms);
    CycRational rhs = cyc_zero(N);
    for (const auto& t : terms) {
        GenHar g;
        g.ks = t;
        g.outer = ga.outer + gb.outer;
        rhs += gen_har(N, n, g);
    }
    return lhs == rhs;
}

}  // namespace mzv
