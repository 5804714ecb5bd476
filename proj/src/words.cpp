#include "mzv/words.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace mzv {

std::size_t depth(const Word& w) {
    std::size_t d = 0;
    for (const auto& l : w)
        if (l.kind != LetterKind::E0) ++d;
    return d;
}

bool is_convergent(const Word& w) { return w.empty() || w.back().kind != LetterKind::E0; }

bool is_pure_e0(const Word& w) {
    return std::all_of(w.begin(), w.end(), [](const Letter& l) { return l.kind == LetterKind::E0; });
}

Word del_left(const Word& w) {
    if (w.empty()) throw std::invalid_argument("del_left: empty word");
    return Word(w.begin() + 1, w.end());
}

Word del_right(const Word& w) {
    if (w.empty()) throw std::invalid_argument("del_right: empty word");
    return Word(w.begin(), w.end() - 1);
}

Word concat(const Word& a, const Word& b) {
    Word r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

Word e0_run(std::size_t l) { return Word(l, e0()); }

Word hat_word(const Word& w) {
    Word r = w;
    for (auto& l : r)
        if (l.kind == LetterKind::Ez) l.kind = LetterKind::EzHat;
    return r;
}

Word unhat_word(const Word& w) {
    Word r = w;
    for (auto& l : r)
        if (l.kind == LetterKind::EzHat) l.kind = LetterKind::Ez;
    return r;
}

std::string word_to_string(const Word& w) {
    if (w.empty()) return "1";
    std::string s;
    for (const auto& l : w) {
        if (!s.empty()) s += ' ';
        switch (l.kind) {
            case LetterKind::E0: s += "e0"; break;
            case LetterKind::Ez: s += "z" + std::to_string(l.idx); break;
            case LetterKind::EzHat: s += "z" + std::to_string(l.idx) + "^"; break;
            case LetterKind::EInf: s += "einf"; break;
        }
    }
    return s;
}

Word word_from_string(const std::string& s) {
    Word w;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        if (tok == "1" && w.empty() && in.peek() == EOF) return w;
        if (tok == "e0") {
            w.push_back(e0());
        } else if (tok == "einf") {
            w.push_back(Letter{LetterKind::EInf, 0});
        } else if (tok.size() >= 2 && tok[0] == 'z') {
            bool hat = tok.back() == '^';
            std::string num = tok.substr(1, tok.size() - 1 - (hat ? 1 : 0));
            unsigned i = (unsigned)std::stoul(num);
            w.push_back(hat ? ezhat(i) : ez(i));
        } else {
            throw std::invalid_argument("word_from_string: bad token '" + tok + "'");
        }
    }
    return w;
}

LinComb<Int> shuffle(const Word& u, const Word& v) {
    // Dynamic programming over (i, j): partial shuffles of u[0..i) and v[0..j).
    std::vector<std::vector<LinComb<Int>>> dp(u.size() + 1,
                                              std::vector<LinComb<Int>>(v.size() + 1));
    dp[0][0][Word{}] = 1;
    for (std::size_t i = 0; i <= u.size(); ++i)
        for (std::size_t j = 0; j <= v.size(); ++j) {
            if (i == 0 && j == 0) continue;
            LinComb<Int>& cell = dp[i][j];
            if (i > 0)
                for (const auto& [w, c] : dp[i - 1][j]) {
                    Word nw = w;
                    nw.push_back(u[i - 1]);
                    lc_add(cell, nw, c);
                }
            if (j > 0)
                for (const auto& [w, c] : dp[i][j - 1]) {
                    Word nw = w;
                    nw.push_back(v[j - 1]);
                    lc_add(cell, nw, c);
                }
        }
    return dp[u.size()][v.size()];
}

std::vector<std::pair<Word, Word>> deconcat(const Word& w) {
    std::vector<std::pair<Word, Word>> r;
    r.reserve(w.size() + 1);
    for (std::size_t k = 0; k <= w.size(); ++k)
        r.emplace_back(Word(w.begin(), w.begin() + k), Word(w.begin() + k, w.end()));
    return r;
}

std::pair<int, Word> antipode(const Word& w) {
    Word rev(w.rbegin(), w.rend());
    return {w.size() % 2 == 0 ? 1 : -1, rev};
}

std::size_t CompositionIndex::total_weight() const {
    std::size_t n = (std::size_t)s0 - 1;
    for (int x : s) n += (std::size_t)x;
    return n;
}

Word comp_to_word(const CompositionIndex& c) {
    if (c.s.size() != c.idx.size())
        throw std::invalid_argument("comp_to_word: mismatched exponents and decorations");
    Word w;
    for (std::size_t j = c.s.size(); j-- > 0;) {
        if (c.s[j] < 1) throw std::invalid_argument("comp_to_word: exponent < 1");
        Word run = e0_run((std::size_t)c.s[j] - 1);
        w.insert(w.end(), run.begin(), run.end());
        w.push_back(ez(c.idx[j]));
    }
    Word tail = e0_run((std::size_t)c.s0 - 1);
    w.insert(w.end(), tail.begin(), tail.end());
    return w;
}

CompositionIndex word_to_comp(const Word& w) {
    CompositionIndex c;
    std::size_t run = 0;
    std::vector<int> s_desc;
    std::vector<unsigned> i_desc;
    for (const auto& l : w) {
        if (l.kind == LetterKind::E0) {
            ++run;
        } else if (l.kind == LetterKind::Ez) {
            s_desc.push_back((int)run + 1);
            i_desc.push_back(l.idx);
            run = 0;
        } else {
            throw std::invalid_argument("word_to_comp: word has non-{e0, ez} letters");
        }
    }
    c.s0 = (int)run + 1;
    c.s.assign(s_desc.rbegin(), s_desc.rend());
    c.idx.assign(i_desc.rbegin(), i_desc.rend());
    return c;
}

std::string comp_format(const CompositionIndex& c, unsigned N) {
    std::string out;
    for (std::size_t j = c.s.size(); j-- > 0;) {
        out += std::to_string(c.s[j]);
        if (j) out += ',';
    }
    if (N > 1) {
        out += '|';
        for (std::size_t j = c.idx.size(); j-- > 0;) {
            out += std::to_string(c.idx[j]);
            if (j) out += ',';
        }
    }
    if (c.s0 > 1) out += "|" + std::to_string(c.s0);
    return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else if (!std::isspace((unsigned char)ch)) {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace

CompositionIndex comp_parse(const std::string& text, unsigned N) {
    auto groups = split(text, '|');
    CompositionIndex c;
    if (groups.empty() || groups[0].empty())
        throw std::invalid_argument("comp_parse: empty exponent list");
    for (const auto& t : split(groups[0], ','))
        c.s.push_back(std::stoi(t));
    std::reverse(c.s.begin(), c.s.end());
    std::size_t next = 1;
    if (groups.size() > next && groups[next].find(',') != std::string::npos) {
        for (const auto& t : split(groups[next], ','))
            c.idx.push_back((unsigned)std::stoul(t));
        std::reverse(c.idx.begin(), c.idx.end());
        ++next;
    } else if (groups.size() > next && N > 1 && groups.size() == 2 && c.s.size() == 1) {
        // Ambiguous single-entry group: treat as decoration when N > 1.
        c.idx.push_back((unsigned)std::stoul(groups[next]));
        ++next;
    }
    if (c.idx.empty()) {
        if (N != 1)
            throw std::invalid_argument("comp_parse: decorations required when N > 1");
        c.idx.assign(c.s.size(), 1u);
    }
    if (c.idx.size() != c.s.size())
        throw std::invalid_argument("comp_parse: decoration count mismatch");
    for (unsigned i : c.idx)
        if (i < 1 || i > N) throw std::invalid_argument("comp_parse: decoration out of range");
    if (groups.size() > next) c.s0 = std::stoi(groups[next++]);
    if (groups.size() > next) throw std::invalid_argument("comp_parse: trailing groups");
    if (c.s0 < 1) throw std::invalid_argument("comp_parse: s0 < 1");
    return c;
}

std::string lincomb_to_json(const LinComb<Rational>& lc) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [w, c] : lc) {
        nlohmann::json term;
        term["word"] = word_to_string(w);
        term["num"] = numerator(c).str();
        term["den"] = denominator(c).str();
        arr.push_back(term);
    }
    return arr.dump();
}

LinComb<Rational> lincomb_from_json(const std::string& text) {
    LinComb<Rational> lc;
    auto arr = nlohmann::json::parse(text);
    for (const auto& term : arr) {
        Word w = word_from_string(term.at("word").get<std::string>());
        Rational c(Int(term.at("num").get<std::string>()), Int(term.at("den").get<std::string>()));
        lc_add(lc, w, c);
    }
    return lc;
}

}  // namespace mzv
