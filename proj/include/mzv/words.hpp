// Words over the alphabets used by the engine, and Hopf-algebraic
// operations on them: shuffle product, deconcatenation, antipode.
//
// Letters: e0 (the form dz/z), ez(i) (dz/(z - xi^i)), and ezhat(i)
// (the twisted form p^a z^{P-1} dz/(z^P - xi^{iP}) with P = p^alpha).
// Words are read right to left: the rightmost letter is integrated first,
// so a word is convergent iff it is empty or its rightmost letter is not e0.
#pragma once

#include "mzv/exactnum.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mzv {

enum class LetterKind : std::uint8_t { E0 = 0, Ez = 1, EzHat = 2, EInf = 3 };

struct Letter {
    LetterKind kind = LetterKind::E0;
    std::uint16_t idx = 0;  // 1..N for Ez / EzHat, otherwise 0
    auto operator<=>(const Letter&) const = default;
};

inline Letter e0() { return Letter{LetterKind::E0, 0}; }
inline Letter ez(unsigned i) { return Letter{LetterKind::Ez, (std::uint16_t)i}; }
inline Letter ezhat(unsigned i) { return Letter{LetterKind::EzHat, (std::uint16_t)i}; }

using Word = std::vector<Letter>;

inline std::size_t weight(const Word& w) { return w.size(); }
std::size_t depth(const Word& w);
bool is_convergent(const Word& w);
bool is_pure_e0(const Word& w);

/// Deletes the leftmost letter.  The word must be nonempty.
Word del_left(const Word& w);
/// Deletes the rightmost letter.  The word must be nonempty.
Word del_right(const Word& w);

Word concat(const Word& a, const Word& b);
Word e0_run(std::size_t l);

/// Replaces every plain letter ez(i) by ezhat(i).
Word hat_word(const Word& w);
/// Replaces every ezhat(i) by ez(i).
Word unhat_word(const Word& w);

std::string word_to_string(const Word& w);
Word word_from_string(const std::string& s);

/// Sparse linear combination of words; entries with zero coefficient are
/// removed eagerly by lc_add.
template <class C>
using LinComb = std::map<Word, C>;

inline bool coeff_is_zero(const Rational& c) { return c == 0; }
inline bool coeff_is_zero(const Int& c) { return c == 0; }

template <class C>
void lc_add(LinComb<C>& target, const Word& w, const C& c) {
    if (coeff_is_zero(c)) return;
    auto [it, inserted] = target.emplace(w, c);
    if (!inserted) {
        it->second = it->second + c;
        if (coeff_is_zero(it->second)) target.erase(it);
    }
}

/// Shuffle product of two words, with integer multiplicities.
LinComb<Int> shuffle(const Word& u, const Word& v);

/// All splittings w = (prefix, suffix), including the trivial ones.
std::vector<std::pair<Word, Word>> deconcat(const Word& w);

/// Antipode S(w) = (-1)^{weight} * reversal; returns (sign, reversed word).
std::pair<int, Word> antipode(const Word& w);

/// Composition form of a word over {e0, ez}:
///   word = e0^{s_d - 1} ez(i_d) ... e0^{s_1 - 1} ez(i_1) e0^{s_0 - 1}.
/// Internally s[j] = s_{j+1} and idx[j] = i_{j+1} (subscript-ascending order);
/// s0 > 1 records a trailing e0 run.
struct CompositionIndex {
    std::vector<int> s;         // s_1 .. s_d
    std::vector<unsigned> idx;  // i_1 .. i_d
    int s0 = 1;

    std::size_t total_weight() const;
    std::size_t total_depth() const { return s.size(); }
};

Word comp_to_word(const CompositionIndex& c);
CompositionIndex word_to_comp(const Word& w);

/// Canonical text form "s_d,...,s_1|i_d,...,i_1" (decorations may be omitted
/// when N = 1; a trailing "|s0" records a non-convergent tail).
std::string comp_format(const CompositionIndex& c, unsigned N);
CompositionIndex comp_parse(const std::string& text, unsigned N);

/// JSON round-trip for linear combinations with rational coefficients.
std::string lincomb_to_json(const LinComb<Rational>& lc);
LinComb<Rational> lincomb_from_json(const std::string& text);

}  // namespace mzv
