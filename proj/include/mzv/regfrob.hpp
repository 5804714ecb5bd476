// Regularization of words by Frobenius: rewrites a word over {e0, ez(i)}
// (direction +1), or the twisted copy of such a word (direction -1), as a
// linear combination of mixed words over {e0, ez(i), ezhat(i)} whose
// regularized iterated integrals assemble the overconvergent hyperlogarithm.
// Coefficients live in a caller-supplied ring C: exact rationals, p-adic
// ring elements, or symbolic polynomials in conjugation coefficients.
#pragma once

#include "mzv/exactnum.hpp"
#include "mzv/words.hpp"

#include <functional>
#include <map>

namespace mzv {

/// Coefficient ring plus the conjugation coefficients Ad_i[w] =
/// (g_i^{-1} e_{z_i} g_i)[w], evaluated on words over the plain alphabet.
template <class C>
struct RegDomain {
    unsigned N = 1;
    std::function<C(const Rational&)> from_rat;
    std::function<C(unsigned i, const Word& w)> ad;
};

template <class C>
using RegExpansion = LinComb<C>;

namespace detail {
template <class C>
void lc_axpy(LinComb<C>& target, const C& scale, const LinComb<C>& src) {
    for (const auto& [w, c] : src) lc_add(target, w, scale * c);
}
}  // namespace detail

/// Depth-inductive regularization.  `eps` is +1 or -1 (direction of the
/// Frobenius comparison); for eps = -1 the input word w over {e0, ez} stands
/// for its twisted copy.  With `filtered` set (+1 only), terms whose
/// rightmost non-e0 letter is twisted are dropped; those terms have
/// vanishing regularized integral, and dropping them keeps the recursion's
/// conjugation queries strictly below the current weight.
template <class C>
RegExpansion<C> reg_frob(const Word& w, const RegDomain<C>& dom, int eps, bool filtered,
                         std::map<Word, RegExpansion<C>>* memo = nullptr) {
    if (eps != 1 && eps != -1) throw std::invalid_argument("reg_frob: eps must be +-1");
    if (filtered && eps != 1) throw std::invalid_argument("reg_frob: filtered requires eps=+1");
    for (const auto& l : w)
        if (l.kind != LetterKind::E0 && l.kind != LetterKind::Ez)
            throw std::invalid_argument("reg_frob: input must be a word over {e0, ez}");
    if (memo) {
        auto it = memo->find(w);
        if (it != memo->end()) return it->second;
    }
    RegExpansion<C> out;
    if (w.empty()) {
        lc_add(out, Word{}, dom.from_rat(1));
        if (memo) (*memo)[w] = out;
        return out;
    }
    if (is_pure_e0(w)) {
        if (memo) (*memo)[w] = out;
        return out;
    }
    std::size_t n = w.size();
    std::size_t a = 0;
    while (w[a].kind == LetterKind::E0) ++a;  // leading e0 run
    std::size_t b = 0;
    while (w[n - 1 - b].kind == LetterKind::E0) ++b;  // trailing e0 run

    auto recurse = [&](const Word& sub) {
        return reg_frob(sub, dom, eps, filtered, memo);
    };

    // Conjugation block (subtracted): w = e0^{ltop} w2 w1 e0^{l0}.
    for (std::size_t ltop = 0; ltop <= a; ++ltop) {
        for (std::size_t l0 = 0; l0 <= b; ++l0) {
            Rational binom = binomial_general(Rational(-(long)(ltop + 1)), (long)l0);
            if (binom == 0) continue;
            Word inner(w.begin() + ltop, w.end() - l0);
            for (std::size_t split = 0; split <= inner.size(); ++split) {
                Word w2(inner.begin(), inner.begin() + split);
                Word w1(inner.begin() + split, inner.end());
                if (w1.empty() || is_pure_e0(w1)) continue;  // Ad_i vanishes
                if (!w2.empty() && is_pure_e0(w2)) continue;  // reg vanishes
                if (filtered && w2.empty()) continue;
                RegExpansion<C> rec = recurse(w2);
                if (rec.empty()) continue;
                for (unsigned i = 1; i <= dom.N; ++i) {
                    C adv = dom.ad(i, w1);
                    if (coeff_is_zero(adv)) continue;
                    Word head = e0_run(ltop + l0);
                    head.push_back(eps == 1 ? ezhat(i) : ez(i));
                    C scale = -(dom.from_rat(binom) * adv);
                    for (const auto& [u, c] : rec) lc_add(out, concat(head, u), scale * c);
                }
            }
        }
    }

    // Stripping block (added): removes the outermost z-letter.
    if (eps == 1) {
        // removes the leftmost run and z-letter; redistributes trailing e0s
        unsigned itop = w[a].idx;
        for (std::size_t l0 = 0; l0 <= b; ++l0) {
            Rational binom = binomial_general(Rational(-(long)(a + 1)), (long)l0);
            if (binom == 0) continue;
            Word rest(w.begin() + (a + 1), w.end() - l0);
            RegExpansion<C> rec = recurse(rest);
            if (rec.empty()) continue;
            Word head = e0_run(a + l0);
            head.push_back(ez(itop));
            C scale = dom.from_rat(binom);
            for (const auto& [u, c] : rec) lc_add(out, concat(head, u), scale * c);
        }
    } else {
        // removes the rightmost run and z-letter; redistributes leading e0s
        unsigned ibot = w[n - 1 - b].idx;
        for (std::size_t ltop = 0; ltop <= a; ++ltop) {
            Rational binom = binomial_general(Rational(-(long)(b + 1)), (long)ltop);
            if (binom == 0) continue;
            Word rest(w.begin() + ltop, w.end() - (b + 1));
            RegExpansion<C> rec = recurse(rest);
            if (rec.empty()) continue;
            Word head = e0_run(ltop + b);
            head.push_back(ezhat(ibot));
            C scale = dom.from_rat(binom);
            for (const auto& [u, c] : rec) lc_add(out, concat(head, u), scale * c);
        }
    }
    if (memo) (*memo)[w] = out;
    return out;
}

/// Coefficient-of-word form of the motivic-style coproduct: expands a word x
/// into block factorizations, each non-e0 block carrying a conjugation
/// coefficient.  Returns sum over y of M_{y,x} * y.
template <class C>
LinComb<C> delta_mot(const Word& x, const RegDomain<C>& dom) {
    std::size_t n = x.size();
    std::vector<LinComb<C>> dp(n + 1);
    lc_add(dp[0], Word{}, dom.from_rat(1));
    for (std::size_t pos = 0; pos < n; ++pos) {
        if (dp[pos].empty()) continue;
        if (x[pos].kind == LetterKind::E0) {
            for (const auto& [y, c] : dp[pos]) {
                Word ny = y;
                ny.push_back(e0());
                lc_add(dp[pos + 1], ny, c);
            }
        }
        for (std::size_t end = pos + 1; end <= n; ++end) {
            Word block(x.begin() + pos, x.begin() + end);
            for (unsigned i = 1; i <= dom.N; ++i) {
                C adv = dom.ad(i, block);
                if (coeff_is_zero(adv)) continue;
                for (const auto& [y, c] : dp[pos]) {
                    Word ny = y;
                    ny.push_back(ez(i));
                    lc_add(dp[end], ny, c * adv);
                }
            }
        }
    }
    return dp[n];
}

/// Dual (non-inductive) form of the +1-direction regularization:
///   reg(w) = sum over w = w' w'' of  w'  shuffled with  hat(delta_mot(S(w''))).
template <class C>
RegExpansion<C> reg_frob_dual(const Word& w, const RegDomain<C>& dom) {
    RegExpansion<C> out;
    for (const auto& [left, right] : deconcat(w)) {
        auto [sign, rev] = antipode(right);
        LinComb<C> dm = delta_mot(rev, dom);
        for (const auto& [y, c] : dm) {
            C coeff = dom.from_rat(Rational(sign)) * c;
            LinComb<Int> sh = shuffle(left, hat_word(y));
            for (const auto& [u, mult] : sh)
                lc_add(out, u, coeff * dom.from_rat(Rational(mult)));
        }
    }
    return out;
}

/// Conjugation coefficient Ad_i[w] from tables of a grouplike series and its
/// inverse: sum over w = u ez(i) v of finv[u] * f[v].  Missing table entries
/// are treated as zero; the empty word must be present in both tables.
template <class C>
C ad_series(unsigned i, const Word& w, const std::map<Word, C>& f,
            const std::map<Word, C>& finv) {
    C acc{};
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k].kind != LetterKind::Ez || w[k].idx != i) continue;
        Word u(w.begin(), w.begin() + k);
        Word v(w.begin() + k + 1, w.end());
        auto iu = finv.find(u);
        auto iv = f.find(v);
        if (iu == finv.end() || iv == f.end()) continue;
        acc = acc + iu->second * iv->second;
    }
    return acc;
}

/// Inverse of a grouplike series by prefix recursion:
///   finv[w] = -sum over proper prefixes u of finv[u] * f[w minus u].
/// `f` must contain every word needed (all suffixes of its keys).
template <class C>
std::map<Word, C> phi_inverse(const std::map<Word, C>& f, const C& one) {
    std::vector<Word> keys;
    for (const auto& [w, c] : f) keys.push_back(w);
    std::sort(keys.begin(), keys.end(),
              [](const Word& x, const Word& y) { return x.size() < y.size(); });
    std::map<Word, C> finv;
    for (const auto& w : keys) {
        if (w.empty()) {
            finv[w] = one;
            continue;
        }
        C acc{};
        for (std::size_t k = 0; k < w.size(); ++k) {
            Word u(w.begin(), w.begin() + k);
            Word v(w.begin() + k, w.end());
            auto iu = finv.find(u);
            auto iv = f.find(v);
            if (iu == finv.end() || iv == f.end())
                throw std::invalid_argument("phi_inverse: table not prefix/suffix closed");
            acc = acc + iu->second * iv->second;
        }
        finv[w] = -acc;
    }
    return finv;
}

// ---------------------------------------------------------------------------
// Symbolic coefficients: rational polynomials in atoms g_i[w] (the value of
// the base-point series at base i on word w).  Used to compare the different
// forms of the regularization without fixing p.

struct PhiAtom {
    unsigned base = 1;
    Word arg;
    auto operator<=>(const PhiAtom&) const = default;
};
using SymMonomial = std::vector<PhiAtom>;  // kept sorted

struct SymCoeff {
    std::map<SymMonomial, Rational> t;
};

SymCoeff sym_from_rat(const Rational& r);
SymCoeff sym_atom(unsigned base, const Word& arg);
SymCoeff operator+(const SymCoeff& a, const SymCoeff& b);
SymCoeff operator*(const SymCoeff& a, const SymCoeff& b);
SymCoeff operator-(const SymCoeff& a);
bool operator==(const SymCoeff& a, const SymCoeff& b);
bool coeff_is_zero(const SymCoeff& c);
std::string sym_to_string(const SymCoeff& c);

/// Symbolic domain: Ad_i[w] fully expanded into atoms g_i[.], with
/// g_i[empty] = 1 and g_i[pure e0 word] = 0.
RegDomain<SymCoeff> symbolic_domain(unsigned N);

/// Symbolic value of g_i^{-1}[w], expanded into atoms of g_i.
SymCoeff sym_phi_inverse_of(unsigned base, const Word& w);

/// Closed (fully expanded) form of the direction -1 regularization of the
/// depth-three family  e0^{s2-2} e1 e0^{s1-1} e1 e1  (N = 1, s2 >= 2),
/// indexed by decorated connected permutations; and of the depth-one family
/// e0^{s1-1} e1 e0^{s0-1}.  Used to cross-check the recursion.
RegExpansion<SymCoeff> reg_frob_via_permutations_depth3(int s2, int s1);
RegExpansion<SymCoeff> reg_frob_via_permutations_depth1(int s1, int s0);

/// JSON debug dump of an expansion with stringified coefficients.
template <class C>
std::string reg_expansion_debug(const RegExpansion<C>& e,
                                const std::function<std::string(const C&)>& show) {
    std::string out = "[";
    bool first = true;
    for (const auto& [w, c] : e) {
        if (!first) out += ",";
        first = false;
        out += "{\"word\":\"" + word_to_string(w) + "\",\"coeff\":\"" + show(c) + "\"}";
    }
    return out + "]";
}

}  // namespace mzv
