#include "mzv/regfrob.hpp"

namespace mzv {

SymCoeff sym_from_rat(const Rational& r) {
    SymCoeff c;
    if (r != 0) c.t[SymMonomial{}] = r;
    return c;
}

SymCoeff sym_atom(unsigned base, const Word& arg) {
    SymCoeff c;
    c.t[SymMonomial{PhiAtom{base, arg}}] = Rational(1);
    return c;
}

SymCoeff operator+(const SymCoeff& a, const SymCoeff& b) {
    SymCoeff r = a;
    for (const auto& [m, q] : b.t) {
        auto it = r.t.find(m);
        if (it == r.t.end()) {
            r.t[m] = q;
        } else {
            it->second += q;
            if (it->second == 0) r.t.erase(it);
        }
    }
    return r;
}

SymCoeff operator*(const SymCoeff& a, const SymCoeff& b) {
    SymCoeff r;
    for (const auto& [ma, qa] : a.t)
        for (const auto& [mb, qb] : b.t) {
            SymMonomial m = ma;
            m.insert(m.end(), mb.begin(), mb.end());
            std::sort(m.begin(), m.end());
            auto it = r.t.find(m);
            if (it == r.t.end()) {
                Rational q = qa * qb;
                if (q != 0) r.t[m] = q;
            } else {
                it->second += qa * qb;
                if (it->second == 0) r.t.erase(it);
            }
        }
    return r;
}

SymCoeff operator-(const SymCoeff& a) {
    SymCoeff r = a;
    for (auto& [m, q] : r.t) q = -q;
    return r;
}

bool operator==(const SymCoeff& a, const SymCoeff& b) { return a.t == b.t; }

bool coeff_is_zero(const SymCoeff& c) { return c.t.empty(); }

std::string sym_to_string(const SymCoeff& c) {
    if (c.t.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, q] : c.t) {
        if (!first) out += " + ";
        first = false;
        out += q.str();
        for (const auto& a : m)
            out += "*g" + std::to_string(a.base) + "[" + word_to_string(a.arg) + "]";
    }
    return out;
}

namespace {

// Canonical form of the series coefficient g[w] as a combination of g on
// words with no leading e0, using g[e0 shuffled with x] = g[e0] g[x] = 0:
//   g[e0^a u] = -(1/a) * sum over insertions of e0 strictly inside u.
const LinComb<Rational>& reduce_leading_e0(const Word& w) {
    static std::map<Word, LinComb<Rational>> memo;
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    LinComb<Rational> out;
    std::size_t a = 0;
    while (a < w.size() && w[a].kind == LetterKind::E0) ++a;
    if (a == 0) {
        lc_add(out, w, Rational(1));
    } else if (a < w.size()) {
        Word u(w.begin() + a, w.end());
        Rational scale = Rational(-1) / Rational((long)a);
        for (std::size_t j = 1; j <= u.size(); ++j) {
            Word v = e0_run(a - 1);
            v.insert(v.end(), u.begin(), u.begin() + j);
            v.push_back(e0());
            v.insert(v.end(), u.begin() + j, u.end());
            for (const auto& [x, c] : reduce_leading_e0(v)) lc_add(out, x, Rational(scale * c));
        }
    }  // pure e0, nonempty: reduces to 0
    return memo.emplace(w, std::move(out)).first->second;
}

SymCoeff phi_sym(unsigned base, const Word& w) {
    if (w.empty()) return sym_from_rat(Rational(1));
    SymCoeff acc;
    for (const auto& [x, c] : reduce_leading_e0(w))
        acc = acc + sym_from_rat(c) * sym_atom(base, x);
    return acc;
}

SymCoeff phiinv_sym(unsigned base, const Word& w) {
    // alternating sum over factorizations into nonempty factors
    std::size_t n = w.size();
    std::vector<SymCoeff> g(n + 1);
    g[0] = sym_from_rat(Rational(1));
    for (std::size_t end = 1; end <= n; ++end) {
        SymCoeff acc;
        for (std::size_t pos = 0; pos < end; ++pos) {
            if (coeff_is_zero(g[pos])) continue;
            Word factor(w.begin() + pos, w.begin() + end);
            acc = acc + g[pos] * (-phi_sym(base, factor));
        }
        g[end] = acc;
    }
    return g[n];
}

SymCoeff ad_sym(unsigned i, const Word& w) {
    SymCoeff acc;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k].kind != LetterKind::Ez || w[k].idx != i) continue;
        Word u(w.begin(), w.begin() + k);
        Word v(w.begin() + k + 1, w.end());
        acc = acc + phiinv_sym(i, u) * phi_sym(i, v);
    }
    return acc;
}

}  // namespace

SymCoeff sym_phi_inverse_of(unsigned base, const Word& w) { return phiinv_sym(base, w); }

RegDomain<SymCoeff> symbolic_domain(unsigned N) {
    RegDomain<SymCoeff> dom;
    dom.N = N;
    dom.from_rat = [](const Rational& r) { return sym_from_rat(r); };
    dom.ad = [](unsigned i, const Word& w) { return ad_sym(i, w); };
    return dom;
}

namespace {

enum class Deco { Plain, Hat, MinusPlain, HatMinusPlain };

// Word family with e0-run exponents and decorated letters, leftmost first
// (N = 1): expands the +-(hat) choices into a signed combination of words.
LinComb<Rational> expand_bold(const std::vector<long>& exps, const std::vector<Deco>& decos) {
    std::vector<std::pair<Word, Rational>> acc{{Word{}, Rational(1)}};
    for (std::size_t j = 0; j < exps.size(); ++j) {
        std::vector<std::pair<Word, Rational>> next;
        for (auto& [w, c] : acc) {
            Word base = concat(w, e0_run((std::size_t)exps[j]));
            auto push = [&](LetterKind k, const Rational& s) {
                Word nw = base;
                nw.push_back(Letter{k, 1});
                next.emplace_back(std::move(nw), c * s);
            };
            switch (decos[j]) {
                case Deco::Plain: push(LetterKind::Ez, 1); break;
                case Deco::Hat: push(LetterKind::EzHat, 1); break;
                case Deco::MinusPlain: push(LetterKind::Ez, -1); break;
                case Deco::HatMinusPlain:
                    push(LetterKind::EzHat, 1);
                    push(LetterKind::Ez, -1);
                    break;
            }
        }
        acc = std::move(next);
    }
    LinComb<Rational> out;
    for (auto& [w, c] : acc) lc_add(out, w, c);
    return out;
}

// e0^{a_d} e1 e0^{a_{d-1}} e1 ... e1 e0^{a_0}  (plain alphabet, N = 1)
Word plain_word(const std::vector<long>& runs) {
    Word w;
    for (std::size_t j = 0; j < runs.size(); ++j) {
        w = concat(w, e0_run((std::size_t)runs[j]));
        if (j + 1 < runs.size()) w.push_back(ez(1));
    }
    return w;
}

void add_scaled(RegExpansion<SymCoeff>& out, const SymCoeff& coeff,
                const LinComb<Rational>& words) {
    if (coeff_is_zero(coeff)) return;
    for (const auto& [w, c] : words) lc_add(out, w, coeff * sym_from_rat(c));
}

}  // namespace

RegExpansion<SymCoeff> reg_frob_via_permutations_depth3(int s2, int s1) {
    if (s2 < 2 || s1 < 1) throw std::invalid_argument("depth3 family needs s2>=2, s1>=1");
    auto dom = symbolic_domain(1);
    RegExpansion<SymCoeff> out;
    SymCoeff one = sym_from_rat(Rational(1));
    // trivial decorations: the four connected orders
    add_scaled(out, one, expand_bold({s2 - 2, s1 - 1, 0}, {Deco::Hat, Deco::Hat, Deco::HatMinusPlain}));
    for (long l1 = 0; l1 <= s1 - 1; ++l1)
        add_scaled(out, one,
                   expand_bold({s2 - 2, s1 - 1 - l1, l1},
                               {Deco::Hat, Deco::MinusPlain, Deco::HatMinusPlain}));
    for (long l2 = 0; l2 <= s2 - 2; ++l2)
        add_scaled(out, one,
                   expand_bold({s2 - 2 - l2, l2, s1 - 1},
                               {Deco::MinusPlain, Deco::Hat, Deco::HatMinusPlain}));
    for (long l2 = 0; l2 <= s2 - 2; ++l2)
        for (long l2p = 0; l2 + l2p <= s2 - 2; ++l2p) {
            Rational bin = binomial_general(Rational(-(s1 - 1)), l2);
            if (bin == 0) continue;
            add_scaled(out, sym_from_rat(bin),
                       expand_bold({s2 - 2 - l2 - l2p, l2p, s1 - 1 + l2},
                                   {Deco::MinusPlain, Deco::MinusPlain, Deco::HatMinusPlain}));
        }
    // nontrivial decorations: conjugation coefficients on grouped segments
    for (long l2 = 0; l2 <= s2 - 2; ++l2) {
        SymCoeff ad5 = dom.ad(1, plain_word({s2 - 2 - l2, s1 - 1, 0, 0}));
        add_scaled(out, ad5, expand_bold({l2}, {Deco::MinusPlain}));
        SymCoeff ad6 = dom.ad(1, plain_word({l2, s1 - 1, 0}));
        add_scaled(out, ad6, expand_bold({s2 - 2 - l2, l2}, {Deco::MinusPlain, Deco::MinusPlain}));
    }
    for (long l1 = 0; l1 <= s1 - 1; ++l1) {
        for (long l2 = 0; l2 <= s2 - 2; ++l2) {
            Rational bin = binomial_general(Rational(-l2), l1);
            if (bin == 0) continue;
            SymCoeff ad7 = dom.ad(1, plain_word({s1 - 1 - l1, 0, 0}));
            add_scaled(out, sym_from_rat(bin) * ad7,
                       expand_bold({s2 - 2 - l2, l2 + l1}, {Deco::MinusPlain, Deco::HatMinusPlain}));
        }
        SymCoeff ad8 = dom.ad(1, plain_word({l1, 0, 0}));
        add_scaled(out, ad8,
                   expand_bold({s2 - 2, s1 - 1 - l1}, {Deco::Hat, Deco::MinusPlain}));
    }
    return out;
}

RegExpansion<SymCoeff> reg_frob_via_permutations_depth1(int s1, int s0) {
    if (s1 < 1 || s0 < 1) throw std::invalid_argument("depth1 family needs s1,s0>=1");
    auto dom = symbolic_domain(1);
    RegExpansion<SymCoeff> out;
    Word whead = e0_run((std::size_t)(s0 + s1 - 2));
    whead.push_back(ezhat(1));
    lc_add(out, whead, sym_from_rat(binomial_general(Rational(-s0), s1 - 1)));
    for (long lt = 0; lt <= s1 - 1; ++lt)
        for (long l0 = 0; l0 <= s0 - 1; ++l0) {
            Rational bin = binomial_general(Rational(-(lt + 1)), l0);
            if (bin == 0) continue;
            SymCoeff ad = dom.ad(1, plain_word({s1 - 1 - lt, s0 - 1 - l0}));
            if (coeff_is_zero(ad)) continue;
            Word w = e0_run((std::size_t)(lt + l0));
            w.push_back(ez(1));
            lc_add(out, w, -(sym_from_rat(bin) * ad));
        }
    return out;
}

}  // namespace mzv
