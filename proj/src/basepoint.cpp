#include "mzv/basepoint.hpp"

#include <algorithm>
#include <functional>

namespace mzv {

namespace {

unsigned mod_pos(long a, unsigned N) { return (unsigned)(((a % (long)N) + (long)N) % (long)N); }

void require_plain(const Word& w, const char* where) {
    for (const auto& l : w)
        if (l.kind != LetterKind::E0 && l.kind != LetterKind::Ez)
            throw InvalidWordError(std::string(where) + ": word must be over {e0, ez}");
}

// all ways to write m as an ordered sum of `parts` nonnegative integers
void compositions_of(int m, int parts, std::vector<int>& cur,
                     std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        cur.push_back(m);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int first = 0; first <= m; ++first) {
        cur.push_back(first);
        compositions_of(m - first, parts - 1, cur, out);
        cur.pop_back();
    }
}

// Iwasawa-branch p-adic logarithm of a unit x: log(x) = log(x^{q-1})/(q-1)
// with q the residue field size, so that roots of unity have log 0.
WittElem w_log_unit(const WittElem& x) {
    const MzvContext& ctx = *x.ctx;
    long q = 1;
    for (unsigned d = 0; d < ctx.D; ++d) q *= ctx.p;
    WittElem u = w_from_int(ctx, Int(1));
    {
        WittElem base = x;
        long e = q - 1;
        while (e > 0) {
            if (e & 1) u = u * base;
            e >>= 1;
            if (e) base = base * base;
        }
    }
    WittElem y = u - w_from_int(ctx, Int(1));  // valuation >= 1
    WittElem acc = w_zero(), pw = y;
    for (long k = 1; k <= ctx.wprec + 40; ++k) {
        WittElem t = w_div_int(pw, k);
        acc = (k % 2) ? acc + t : acc - t;
        pw = pw * y;
    }
    return w_div_int(acc, q - 1);
}

}  // namespace

std::vector<Word> all_plain_words(unsigned N, int weight) {
    std::vector<Word> out;
    if (weight <= 0) {
        out.emplace_back();
        return out;
    }
    for (const Word& w : all_plain_words(N, weight - 1))
        for (unsigned c = 0; c <= N; ++c) {
            Word x = w;
            x.push_back(c == 0 ? e0() : ez(c));
            out.push_back(std::move(x));
        }
    return out;
}

WittElem phi_weight_one(const MzvContext& ctx, unsigned i, unsigned j) {
    unsigned N = ctx.N;
    if (i < 1 || i > N || j < 1 || j > N)
        throw InvalidWordError("phi_weight_one: base/decoration out of range");
    if (N == 1 || i == j) return w_zero();
    // The overconvergent weight-one hyperlogarithm is
    //   p^alpha log(1 - z/z_j) - log(1 - (z/z_j)^{p^alpha})
    // on the Iwasawa branch, and the base-point coefficient is its value at
    // z = z_i, i.e. at z/z_j = xi^{j-i}.  Both arguments are units and the
    // branch kills roots of unity, so this is exact to working precision.
    unsigned a = mod_pos((long)j - (long)i, N);
    unsigned aP = (unsigned)(((unsigned long)a * (unsigned long)(ctx.P % (long)N)) % N);
    WittElem one = w_from_int(ctx, Int(1));
    WittElem res = w_shift(w_log_unit(one - ctx.xi_pow[a]), (int)ctx.alpha);
    if (aP != 0) res -= w_log_unit(one - ctx.xi_pow[aP]);
    return res;
}

WittElem phi_weight_one_partial(const MzvContext& ctx, unsigned i, unsigned j, unsigned U) {
    unsigned N = ctx.N;
    if (i < 1 || i > N || j < 1 || j > N)
        throw InvalidWordError("phi_weight_one_partial: base/decoration out of range");
    if (N == 1 || i == j) return w_zero();
    unsigned vexp = mod_pos(((long)j - (long)i) * (long)ctx.xi_inv_palpha, N);
    unsigned wexp = mod_pos(((long)i - (long)j) * (long)ctx.xi_inv_palpha, N);
    long pU = 1;
    unsigned long puN = 1;
    for (unsigned t = 0; t < U; ++t) {
        if (pU > (long)2e17 / ctx.p) throw std::invalid_argument("partial sum bound too large");
        pU *= ctx.p;
        puN = (puN * (unsigned long)(ctx.p % (long)N)) % N;
    }
    WittElem S = w_zero();
    for (long n = 1; n < pU; ++n) {
        if (n % ctx.P == 0) continue;
        unsigned e = (unsigned)(((unsigned long)vexp * (unsigned long)(n % (long)N)) % N);
        S += w_div_int(ctx.xi_pow[e], n);
    }
    unsigned pe = (unsigned)(((unsigned long)wexp * puN) % N);
    WittElem one = w_from_int(ctx, Int(1));
    WittElem res = -(w_shift(w_inverse(one - ctx.xi_pow[pe]), (int)ctx.alpha) * S);
    // the truncation error at level p^U has valuation U + 1; certify U
    if (res.aprec > (int)U) res.aprec = (int)U;
    return res;
}

Engine::Engine(std::shared_ptr<MzvContext> ctx) : ctx_(std::move(ctx)) {
    WittElem one = w_from_int(*ctx_, Int(1));
    phi_.resize(ctx_->N);
    phiinv_.resize(ctx_->N);
    for (unsigned i = 0; i < ctx_->N; ++i) {
        phi_[i][Word{}] = one;
        phiinv_[i][Word{}] = one;
    }
    phiinf_[Word{}] = one;
    phiinfinv_[Word{}] = one;
}

void Engine::ensure_phi_weight(int t) {
    while (phi_weight_ < t) {
        int s = phi_weight_ + 1;
        while (inf_weight_ < s) stage_inf(inf_weight_ + 1);
        solve_weight(s);
    }
}

WittElem Engine::int_reg_inf(const Word& u) {
    auto it = infcache_.find(u);
    if (it != infcache_.end()) return it->second;
    WittElem v = lae_value_at_infinity(int_reg_table(u));
    infcache_[u] = v;
    return v;
}

LAETable Engine::int_reg_table(const Word& u) const {
    int Lmax = lae_choose_lmax(*ctx_, (int)u.size(), (int)depth(u), ctx_->M + 8);
    return int_reg_word(*ctx_, u, Lmax);
}

RegDomain<WittElem> Engine::domain() {
    RegDomain<WittElem> dom;
    dom.N = ctx_->N;
    const MzvContext* c = ctx_.get();
    dom.from_rat = [c](const Rational& r) { return reduce(*c, r); };
    dom.ad = [this](unsigned i, const Word& w) { return ad_coeff(i, w); };
    return dom;
}

WittElem Engine::ad_coeff(unsigned i, const Word& w) {
    if (i < 1 || i > ctx_->N) throw InvalidWordError("ad_coeff: base out of range");
    require_plain(w, "ad_coeff");
    ensure_phi_weight(std::max(0, (int)w.size() - 1));
    WittElem acc = w_zero();
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k].kind != LetterKind::Ez || w[k].idx != i) continue;
        Word u(w.begin(), w.begin() + k);
        Word v(w.begin() + k + 1, w.end());
        acc += phiinv_[i - 1].at(u) * phi_[i - 1].at(v);
    }
    return acc;
}

RegExpansion<WittElem> Engine::reg_filtered(const Word& w) {
    require_plain(w, "reg_filtered");
    ensure_phi_weight(std::max(0, (int)w.size() - 1));
    auto dom = domain();
    return reg_frob(w, dom, 1, true, &regmemo_);
}

void Engine::stage_inf(int s) {
    if (s != inf_weight_ + 1) throw std::logic_error("stage_inf: out-of-order stage");
    auto dom = domain();
    for (const Word& w : all_plain_words(ctx_->N, s)) {
        RegExpansion<WittElem> exp = reg_frob(w, dom, 1, true, &regmemo_);
        WittElem val = w_zero();
        for (const auto& [u, c] : exp) val += c * int_reg_inf(u);
        phiinf_[w] = val;
    }
    for (const Word& w : all_plain_words(ctx_->N, s)) {
        WittElem acc = w_zero();
        for (std::size_t k = 0; k < w.size(); ++k) {
            Word u(w.begin(), w.begin() + k);
            Word v(w.begin() + k, w.end());
            acc += phiinfinv_.at(u) * phiinf_.at(v);
        }
        phiinfinv_[w] = -acc;
    }
    inf_weight_ = s;
}

namespace {

// image of a word under moving the base point z_i to z_N (z -> xi^{-i} z):
// ez(j) -> ez((j - i) mod N, with residue 0 meaning N)
Word rotate_to_base_n(const Word& w, unsigned i, unsigned N) {
    Word r = w;
    for (auto& l : r)
        if (l.kind == LetterKind::Ez) {
            unsigned j = (l.idx + N - i) % N;
            l.idx = (std::uint16_t)(j == 0 ? N : j);
        }
    return r;
}

}  // namespace

// Assembles and solves the linear system on the coefficients Phi^{(z_i)}[x]
// for all x of weight t (and weight t+1 as well when `joint` is set), from:
//   - the residue identity, one equation per word of weight t+1 (and t+2);
//   - the shuffle relations at each solved weight;
//   - the rotation relations moving each base point to z_N.
// (Path conversion and reflection relations are deliberately not used: the
// composed paths pick up Lie-algebra-valued loop-period corrections -- from
// weight 5 on already for N = 1 -- so they are not exact linear constraints
// on the tables.)
// Returns false (leaving the tables untouched) if a pivot is missing and
// `allow_pin` is unset; with `allow_pin`, any column with no remaining
// pivot is fixed to zero (a deterministic choice of the directions that the
// relation set provably leaves free), and every redundant equation is then
// required to vanish, so an inconsistent pin cannot go unnoticed.
bool Engine::try_solve_weights(int t, bool joint, bool allow_pin) {
    const MzvContext& C = *ctx_;
    unsigned N = C.N;
    int tmax = joint ? t + 1 : t;

    std::map<std::pair<unsigned, Word>, std::size_t> var;
    std::vector<std::pair<unsigned, Word>> cols;
    for (int s = t; s <= tmax; ++s)
        for (unsigned i = 1; i <= N; ++i)
            for (const Word& x : all_plain_words(N, s)) {
                var[{i, x}] = cols.size();
                cols.emplace_back(i, x);
            }
    std::size_t U = cols.size();

    // sparse linear form  sum_col a[col] * unknown_col + c
    struct Form {
        std::map<std::size_t, WittElem> a;
        WittElem c;
    };
    auto is_unknown = [&](const Word& x) { return (int)x.size() >= t; };
    auto form_const = [](WittElem v) {
        Form f;
        f.c = std::move(v);
        return f;
    };
    auto form_axpy = [](Form& f, const Form& g, const WittElem& s) {
        for (const auto& [col, cf] : g.a) {
            auto it = f.a.find(col);
            if (it == f.a.end()) f.a[col] = cf * s;
            else it->second += cf * s;
        }
        f.c += g.c * s;
    };
    // product where at least one factor must be constant
    auto form_mul = [](const Form& f, const Form& g) {
        if (!f.a.empty() && !g.a.empty())
            throw std::logic_error("base-point solve: nonlinear term");
        const Form& lin = f.a.empty() ? g : f;
        const WittElem& s = f.a.empty() ? f.c : g.c;
        Form out;
        for (const auto& [col, cf] : lin.a) out.a[col] = cf * s;
        out.c = lin.c * s;
        return out;
    };

    WittElem one = w_from_int(C, Int(1));
    std::function<Form(unsigned, const Word&)> phiF = [&](unsigned i, const Word& x) {
        if (!is_unknown(x)) return form_const(phi_[i - 1].at(x));
        Form f;
        f.c = w_zero();
        f.a[var.at({i, x})] = one;
        return f;
    };
    std::function<Form(unsigned, const Word&)> phiinvF = [&](unsigned i, const Word& x) -> Form {
        if (!is_unknown(x)) return form_const(phiinv_[i - 1].at(x));
        // phiinv[x] = -phi[x] - sum over proper splits of phiinv[pre]*phi[suf]
        Form f;
        f.c = w_zero();
        form_axpy(f, phiF(i, x), -one);
        for (std::size_t kk = 1; kk < x.size(); ++kk) {
            Word pre(x.begin(), x.begin() + kk);
            Word suf(x.begin() + kk, x.end());
            form_axpy(f, form_mul(phiinvF(i, pre), phiF(i, suf)), -one);
        }
        return f;
    };
    struct Row {
        std::vector<WittElem> a;
        WittElem rhs;
    };
    std::vector<Row> rows;
    auto push_row = [&](Form&& L, const WittElem& rhs) {
        Row row;
        row.a.assign(U, w_zero());
        for (auto& [col, cf] : L.a) row.a[col] = std::move(cf);
        row.rhs = rhs - L.c;
        rows.push_back(std::move(row));
    };

    for (int m = t + 1; m <= tmax + 1; ++m) {
        // residue identity at every word of weight m
        for (const Word& w : all_plain_words(N, m)) {
            Form L;
            L.c = w_zero();
            WittElem rhs = w_zero();
            for (std::size_t k = 0; k < w.size(); ++k) {
                Word u(w.begin(), w.begin() + k);
                Word v(w.begin() + k + 1, w.end());
                rhs += phiinfinv_.at(u) * phiinf_.at(v);
                if (w[k].kind == LetterKind::Ez) {
                    unsigned i = w[k].idx;
                    form_axpy(L, form_mul(phiinvF(i, u), phiF(i, v)), one);
                }
            }
            push_row(std::move(L), rhs);
        }
    }
    for (int s = t; s <= tmax; ++s) {
        // shuffle relations per base point
        for (unsigned i = 1; i <= N; ++i)
            for (int a = 1; 2 * a <= s; ++a)
                for (const Word& u : all_plain_words(N, a))
                    for (const Word& v : all_plain_words(N, s - a)) {
                        if (a == s - a && v < u) continue;
                        Form L;
                        L.c = w_zero();
                        for (const auto& [x, mult] : shuffle(u, v))
                            form_axpy(L, phiF(i, x), w_from_int(C, mult));
                        form_axpy(L, form_mul(phiF(i, u), phiF(i, v)), -one);
                        push_row(std::move(L), w_zero());
                    }
        // rotation relations to the base point z_N
        for (unsigned i = 1; i < N; ++i)
            for (const Word& w : all_plain_words(N, s)) {
                Form L;
                L.c = w_zero();
                form_axpy(L, phiF(i, w), one);
                form_axpy(L, phiF(N, rotate_to_base_n(w, i, N)), -one);
                push_row(std::move(L), w_zero());
            }
    }

    // Gauss-Jordan elimination, pivoting on minimal exact valuation
    std::size_t R = rows.size();
    std::vector<std::size_t> pivot_of(U);
    std::vector<bool> used(R, false);
    for (std::size_t col = 0; col < U; ++col) {
        long bestv = std::numeric_limits<long>::max();
        std::size_t best = R;
        for (std::size_t r = 0; r < R; ++r) {
            if (used[r] || coeff_is_zero(rows[r].a[col])) continue;
            ValInfo vi = w_valuation(rows[r].a[col]);
            if (!vi.exact) continue;
            if (vi.v < bestv) {
                bestv = vi.v;
                best = r;
            }
        }
        if (best == R && allow_pin) {
            Row pin;
            pin.a.assign(U, w_zero());
            pin.a[col] = one;
            pin.rhs = w_zero();
            rows.push_back(std::move(pin));
            used.push_back(false);
            R = rows.size();
            best = R - 1;
            ++pinned_;
        }
        if (best == R) return false;
        used[best] = true;
        pivot_of[col] = best;
        Row& pr = rows[best];
        WittElem inv = w_inverse(pr.a[col]);
        for (std::size_t jj = 0; jj < U; ++jj) pr.a[jj] = pr.a[jj] * inv;
        pr.rhs = pr.rhs * inv;
        for (std::size_t r = 0; r < R; ++r) {
            if (r == best) continue;
            WittElem f = rows[r].a[col];
            if (f.is_exact_zero()) continue;
            for (std::size_t jj = 0; jj < U; ++jj)
                rows[r].a[jj] = rows[r].a[jj] - f * pr.a[jj];
            rows[r].rhs = rows[r].rhs - f * pr.rhs;
        }
    }
    for (std::size_t col = 0; col < U; ++col)
        phi_[cols[col].first - 1][cols[col].second] = rows[pivot_of[col]].rhs;
    // every redundant equation must be satisfied
    for (std::size_t r = 0; r < R; ++r) {
        if (used[r]) continue;
        if (!w_is_zero_mod(rows[r].rhs, C.M)) {
            ValInfo vi = w_valuation(rows[r].rhs);
            throw ContextError("base-point solve: inconsistent redundant equation at weight " +
                               std::to_string(t) + " (residual valuation " + std::to_string(vi.v) +
                               (vi.exact ? "" : "+") + ", known to precision " +
                               std::to_string(rows[r].rhs.aprec) + ")");
        }
    }
    // inverses at the newly solved weights
    for (int s = t; s <= tmax; ++s)
        for (unsigned i = 1; i <= N; ++i)
            for (const Word& w : all_plain_words(N, s)) {
                WittElem acc = w_zero();
                for (std::size_t k = 0; k < w.size(); ++k) {
                    Word u(w.begin(), w.begin() + k);
                    Word v(w.begin() + k, w.end());
                    acc += phiinv_[i - 1].at(u) * phi_[i - 1].at(v);
                }
                phiinv_[i - 1][w] = -acc;
            }
    phi_weight_ = tmax;
    return true;
}

void Engine::solve_weight(int t) {
    const MzvContext& C = *ctx_;
    unsigned N = C.N;
    if (t == 1) {
        for (unsigned i = 1; i <= N; ++i) {
            phi_[i - 1][Word{e0()}] = w_zero();
            for (unsigned j = 1; j <= N; ++j)
                phi_[i - 1][Word{ez(j)}] = phi_weight_one(C, i, j);
            for (const Word& w : all_plain_words(N, 1)) {
                WittElem acc = w_zero();
                for (std::size_t k = 0; k < w.size(); ++k) {
                    Word u(w.begin(), w.begin() + k);
                    Word v(w.begin() + k, w.end());
                    acc += phiinv_[i - 1].at(u) * phi_[i - 1].at(v);
                }
                phiinv_[i - 1][w] = -acc;
            }
        }
        phi_weight_ = 1;
        return;
    }
    if (try_solve_weights(t, false, false)) return;
    while (inf_weight_ < t + 1) stage_inf(inf_weight_ + 1);
    if (try_solve_weights(t, true, false)) return;
    // The relation set is known to leave a few directions free for N >= 2
    // from weight 3 on; fix them to zero (see the class comment) and verify
    // every redundant equation on the result.
    if (try_solve_weights(t, true, true)) return;
    throw ContextError("base-point solve: rank-deficient system at weight " +
                       std::to_string(t));
}

WittElem Engine::phi(unsigned i, const Word& w) {
    if (i < 1 || i > ctx_->N) throw InvalidWordError("phi: base out of range");
    require_plain(w, "phi");
    ensure_phi_weight((int)w.size());
    return phi_[i - 1].at(w);
}

WittElem Engine::phi_inv(unsigned i, const Word& w) {
    if (i < 1 || i > ctx_->N) throw InvalidWordError("phi_inv: base out of range");
    require_plain(w, "phi_inv");
    ensure_phi_weight((int)w.size());
    return phiinv_[i - 1].at(w);
}

WittElem Engine::phi_inf(const Word& w) {
    require_plain(w, "phi_inf");
    int s = (int)w.size();
    ensure_phi_weight(std::max(0, s - 2));
    while (inf_weight_ < s) stage_inf(inf_weight_ + 1);
    return phiinf_.at(w);
}

WittElem Engine::phi_inf_inv(const Word& w) {
    require_plain(w, "phi_inf_inv");
    int s = (int)w.size();
    ensure_phi_weight(std::max(0, s - 2));
    while (inf_weight_ < s) stage_inf(inf_weight_ + 1);
    return phiinfinv_.at(w);
}

LAETable Engine::li_dagger(const Word& w) {
    require_plain(w, "li_dagger");
    auto exp = reg_filtered(w);
    int Lmax = lae_choose_lmax(*ctx_, (int)w.size(), (int)depth(w), ctx_->M + 8);
    LAETable acc;
    acc.ctx = ctx_.get();
    acc.Lmax = Lmax;
    acc.c.assign((std::size_t)ctx_->P * ctx_->N * (std::size_t)(Lmax + 1), w_zero());
    acc.polar.assign(ctx_->N, w_zero());
    acc.c_const = w_zero();
    for (const auto& [u, cf] : exp) {
        LAETable tu = int_reg_word(*ctx_, u, Lmax);
        long vc = w_valuation(cf).v;  // valid lower bound in both cases
        acc.fp.V = std::min(acc.fp.V, tu.fp.V + (double)vc);
        acc.fp.Dlog = std::max(acc.fp.Dlog, tu.fp.Dlog);
        acc.fp.C = std::min(acc.fp.C, tu.fp.C);
        acc.fp.E = std::max(acc.fp.E, tu.fp.E);
        for (std::size_t idx = 0; idx < acc.c.size(); ++idx) acc.c[idx] += cf * tu.c[idx];
        acc.c_const += cf * tu.c_const;
    }
    return acc;
}

WittElem Engine::zeta(const CompositionIndex& idx) {
    const MzvContext& C = *ctx_;
    for (unsigned ii : idx.idx)
        if (ii < 1 || ii > C.N) throw InvalidWordError("zeta: decoration out of range");
    for (int sv : idx.s)
        if (sv < 1) throw InvalidWordError("zeta: index entries must be >= 1");
    if (idx.s0 < 1) throw InvalidWordError("zeta: trailing exponent must be >= 1");
    if (!idx.s.empty() && idx.s.back() == 1 && idx.idx.back() == C.N)
        throw InadmissibleError("zeta: inadmissible index, (xi^{i_d}, s_d) = (1, 1)");
    return phi(1, comp_to_word(idx));
}

WittElem Engine::zeta_word(const Word& w) {
    require_plain(w, "zeta");
    return zeta(word_to_comp(w));
}

PhiTable Engine::table(unsigned base, int max_weight) {
    PhiTable out;
    out.base = base;
    if (base == 0) {
        for (int s = 0; s <= max_weight; ++s)
            for (const Word& w : all_plain_words(ctx_->N, s)) out.v[w] = phi_inf(w);
    } else {
        ensure_phi_weight(max_weight);
        for (int s = 0; s <= max_weight; ++s)
            for (const Word& w : all_plain_words(ctx_->N, s)) out.v[w] = phi(base, w);
    }
    return out;
}

WittElem solve_phi_zi(Engine& eng, unsigned i0, const CompositionIndex& idx) {
    const MzvContext& C = eng.ctx();
    unsigned N = C.N;
    if (i0 < 1 || i0 > N) throw InvalidWordError("solve_phi_zi: base out of range");
    int d = (int)idx.s.size();
    if (d < 1 || idx.s.back() < 2 || idx.s0 != 1)
        throw InvalidWordError("solve_phi_zi: needs s_d >= 2 and a convergent word");
    Word x = comp_to_word(idx);
    int n = (int)x.size();
    eng.ensure_phi_weight(n - 1);

    // prefix through the run of segment dp: e0^{s_d-1} z_{i_d} .. z_{i_{dp+1}} e0^{run}
    auto prefix_word = [&](int dp, int run) {
        Word w;
        for (int j = d; j >= dp + 1; --j) {
            w = concat(w, e0_run((std::size_t)(idx.s[(std::size_t)j - 1] - 1)));
            w.push_back(ez(idx.idx[(std::size_t)j - 1]));
        }
        return concat(w, e0_run((std::size_t)run));
    };
    // e0^{run} z_{i_m} e0^{s_{m-1}-1} z_{i_{m-1}} .. z_{i_1} z_{append}; m = 0
    // gives just z_{append}
    auto tail_word = [&](int m, int run, unsigned append) {
        Word w = e0_run((std::size_t)run);
        for (int j = m; j >= 1; --j) {
            if (j != m) w = concat(w, e0_run((std::size_t)(idx.s[(std::size_t)j - 1] - 1)));
            w.push_back(ez(idx.idx[(std::size_t)j - 1]));
        }
        w.push_back(ez(append));
        return w;
    };

    // T1: Phi^inf at x with the leading run shortened and z_{i0} appended
    Word y = del_left(x);
    y.push_back(ez(i0));
    WittElem rhs = eng.phi_inf(y);
    // T2: splittings inside the run of segment d'
    for (int dp = 1; dp <= d - 1; ++dp)
        for (int t = 0; t <= idx.s[(std::size_t)dp - 1] - 2; ++t)
            rhs += eng.phi_inf_inv(prefix_word(dp, idx.s[(std::size_t)dp - 1] - 2 - t)) *
                   eng.phi_inf(tail_word(dp, t, i0));
    // T3: splittings dropping the letter z_{i_{d'}}
    for (int dp = 2; dp <= d - 1; ++dp)
        rhs += eng.phi_inf_inv(prefix_word(dp, idx.s[(std::size_t)dp - 1] - 1)) *
               eng.phi_inf(tail_word(dp - 1, idx.s[(std::size_t)dp - 2] - 1, i0));
    // cross terms: same splittings against the finite base points
    WittElem cross = w_zero();
    for (unsigned i = 1; i <= N; ++i)
        for (int dp = 1; dp <= d - 1; ++dp) {
            Word A = prefix_word(dp, idx.s[(std::size_t)dp - 1] - 1);
            Word B = (dp >= 2) ? tail_word(dp - 1, idx.s[(std::size_t)dp - 2] - 1, i0)
                               : tail_word(0, 0, i0);
            cross += eng.phi_inv(i, A) * eng.phi(i, B);
        }
    WittElem vinv = rhs - cross;  // = Phi^{(z_{i0})-1}[x]
    // unfold the inverse: Phi[x] = -vinv - sum over proper splittings
    WittElem acc = vinv;
    for (std::size_t k = 1; k < x.size(); ++k) {
        Word u(x.begin(), x.begin() + k);
        Word v(x.begin() + k, x.end());
        acc += eng.phi_inv(i0, u) * eng.phi(i0, v);
    }
    return -acc;
}

std::vector<ReducedTerm> shuffle_reduce(const Word& w, unsigned N) {
    std::vector<ReducedTerm> out;
    if (w.empty()) {
        out.push_back({Rational(1), {}, Word{}});
        return out;
    }
    require_plain(w, "shuffle_reduce");
    if (is_pure_e0(w)) return out;  // f[e0^m] = 0
    if (w.back().kind == LetterKind::E0) {
        // redistribute the trailing run into the inner runs
        CompositionIndex c = word_to_comp(w);
        int m = c.s0 - 1;
        int d = (int)c.s.size();
        std::vector<int> cur;
        std::vector<std::vector<int>> parts;
        compositions_of(m, d, cur, parts);
        for (const auto& ls : parts) {
            Rational coeff(1);
            CompositionIndex nc = c;
            nc.s0 = 1;
            for (int j = 0; j < d; ++j) {
                coeff *= binomial_general(Rational(-c.s[(std::size_t)j]), ls[(std::size_t)j]);
                nc.s[(std::size_t)j] += ls[(std::size_t)j];
            }
            if (coeff == 0) continue;
            for (auto t : shuffle_reduce(comp_to_word(nc), N)) {
                t.coeff *= coeff;
                out.push_back(std::move(t));
            }
        }
        return out;
    }
    if (w.front().kind == LetterKind::E0) {
        out.push_back({Rational(1), {}, w});  // admissible
        return out;
    }
    unsigned i = w.front().idx;
    std::size_t k = 0;
    while (k < w.size() && w[k].kind == LetterKind::Ez && w[k].idx == i) ++k;
    if (k == w.size()) {
        // f[z_i^k] = f[z_i]^k / k!
        Rational c(1);
        for (std::size_t jj = 2; jj <= k; ++jj) c /= Rational((long)jj);
        out.push_back({c, {{i, (int)k}}, Word{}});
        return out;
    }
    if (w[k].kind != LetterKind::E0) {
        out.push_back({Rational(1), {}, w});  // mixed leading letters: irreducible
        return out;
    }
    // w = z_i^k e0 u:
    // f[w] = ( f[z_i] f[z_i^{k-1} e0 u] - f[z_i^{k-1} e0 (u sh z_i)] ) / k
    Word u(w.begin() + (long)k + 1, w.end());
    Word a(w.begin() + 1, w.end());
    for (auto t : shuffle_reduce(a, N)) {
        t.coeff /= Rational((long)k);
        t.letter_pow[i] += 1;
        out.push_back(std::move(t));
    }
    Word zi{ez(i)};
    Word stem(w.begin() + 1, w.begin() + (long)k + 1);  // z_i^{k-1} e0
    for (const auto& [xw, mult] : shuffle(u, zi)) {
        for (auto t : shuffle_reduce(concat(stem, xw), N)) {
            t.coeff *= -Rational(mult) / Rational((long)k);
            out.push_back(std::move(t));
        }
    }
    return out;
}

IdentityReport identity_checks(Engine& eng, int Wmax, int prec) {
    IdentityReport rep;
    const MzvContext& C = eng.ctx();
    unsigned N = C.N;
    eng.ensure_phi_weight(Wmax);
    auto check = [&](const WittElem& a, const WittElem& b, std::string what) {
        WittElem diff = a - b;
        int k = diff.is_exact_zero() ? prec : std::min(prec, diff.aprec);
        rep.min_precision = std::min(rep.min_precision, k);
        ++rep.checked;
        if (!w_is_zero_mod(diff, k)) rep.failures.push_back(std::move(what));
    };
    WittElem one = w_from_int(C, Int(1));

    // (a) residue identity
    for (int s = 1; s <= Wmax; ++s)
        for (const Word& w : all_plain_words(N, s)) {
            WittElem lhs = w_zero();
            for (unsigned i = 1; i <= N; ++i) lhs += eng.ad_coeff(i, w);
            if (s == 1 && w[0].kind == LetterKind::E0) lhs += one;
            WittElem rhs = w_zero();
            for (std::size_t k = 0; k < w.size(); ++k) {
                Word u(w.begin(), w.begin() + k);
                Word v(w.begin() + k + 1, w.end());
                rhs += eng.phi_inf_inv(u) * eng.phi_inf(v);
            }
            check(lhs, rhs, "residue identity at " + word_to_string(w));
        }

    // (b) grouplike relations
    for (int a = 1; a <= Wmax - 1; ++a)
        for (int b = a; b <= Wmax - a; ++b)
            for (const Word& u : all_plain_words(N, a))
                for (const Word& v : all_plain_words(N, b)) {
                    if (a == b && v < u) continue;
                    auto sh = shuffle(u, v);
                    for (unsigned base = 0; base <= N; ++base) {
                        auto get = [&](const Word& x) {
                            return base == 0 ? eng.phi_inf(x) : eng.phi(base, x);
                        };
                        WittElem lhs = w_zero();
                        for (const auto& [x, mult] : sh)
                            lhs += w_from_int(C, mult) * get(x);
                        check(lhs, get(u) * get(v),
                              "shuffle relation base " + std::to_string(base) + " at " +
                                  word_to_string(u) + " | " + word_to_string(v));
                    }
                }

    // (c) rotation to the base point z_N
    if (N >= 2)
        for (unsigned i = 1; i < N; ++i)
            for (int s = 1; s <= Wmax; ++s)
                for (const Word& w : all_plain_words(N, s)) {
                    Word rw = w;
                    for (auto& l : rw)
                        if (l.kind == LetterKind::Ez) {
                            unsigned jp = mod_pos((long)l.idx - (long)i, N);
                            l.idx = (std::uint16_t)(jp == 0 ? N : jp);
                        }
                    check(eng.phi(i, w), eng.phi(N, rw),
                          "rotation base " + std::to_string(i) + " at " + word_to_string(w));
                }

    // (d) base-point conversion identity
    for (int s = 2; s <= Wmax; ++s)
        for (const Word& w : all_plain_words(N, s)) {
            if (w.front().kind != LetterKind::E0 || !is_convergent(w)) continue;
            CompositionIndex comp = word_to_comp(w);
            for (unsigned i0 = 1; i0 <= N; ++i0)
                check(solve_phi_zi(eng, i0, comp), eng.phi(i0, w),
                      "conversion identity base " + std::to_string(i0) + " at " +
                          word_to_string(w));
        }

    // (e) depth <= 1 vanishing of Phi^inf
    for (int s = 1; s <= Wmax; ++s)
        for (const Word& w : all_plain_words(N, s))
            if (depth(w) <= 1) check(eng.phi_inf(w), w_zero(), "depth-one vanishing at " +
                                                                   word_to_string(w));
    return rep;
}

}  // namespace mzv
