#include "mzv/laengine.hpp"

#include <cmath>
#include <sstream>

namespace mzv {

namespace {

bool g_verify_floors = false;

long mod_n(long e, unsigned N) {
    long r = e % (long)N;
    return r < 0 ? r + (long)N : r;
}

const WittElem& xi_of(const MzvContext& ctx, long e) { return ctx.xi_pow[mod_n(e, ctx.N)]; }

int clamp_prec(double x) {
    if (x >= 1e9) return std::numeric_limits<int>::max();
    return (int)std::floor(x);
}

// a zero known only modulo p^aprec
WittElem zero_mod(const MzvContext& ctx, int aprec) {
    WittElem z;
    z.ctx = &ctx;
    z.shift = 0;
    z.aprec = aprec;
    z.vfloor = aprec;
    z.m.assign(ctx.D, Int(0));
    return z;
}

void cap_entry(WittElem& e, const MzvContext& ctx, double bound) {
    int cap = clamp_prec(bound);
    if (cap == std::numeric_limits<int>::max()) return;
    if (e.is_exact_zero()) {
        e = zero_mod(ctx, cap);
    } else if (cap < e.aprec) {
        e.aprec = cap;
        e.vfloor = std::min(e.vfloor, cap);
    }
}

double cconst_val(const WittElem& c) {
    if (coeff_is_zero(c)) return 1e18;
    return (double)w_valuation(c).v;
}

LAETable make_table(const MzvContext& ctx, int Lmax) {
    LAETable t;
    t.ctx = &ctx;
    t.Lmax = Lmax;
    t.c.assign((std::size_t)ctx.P * ctx.N * (Lmax + 1), w_zero());
    t.polar.assign(ctx.N, w_zero());
    t.c_const = w_zero();
    return t;
}

void verify_floors(const LAETable& t) {
    if (!g_verify_floors) return;
    const MzvContext& ctx = *t.ctx;
    for (long r = 0; r < ctx.P; ++r)
        for (unsigned i = 1; i <= ctx.N; ++i)
            for (int l = 0; l <= t.Lmax; ++l) {
                const WittElem& e = t.at(r, i, l);
                if (e.is_exact_zero()) continue;
                ValInfo v = w_valuation(e);
                if (v.exact && (double)v.v < t.fp.at(ctx.p, l) - 1e-6) {
                    std::ostringstream os;
                    os << "valuation floor violated: r=" << r << " i=" << i << " l=" << l
                       << " v=" << v.v << " floor=" << t.fp.at(ctx.p, l);
                    throw PrecisionError(os.str());
                }
            }
}

// Lower bound on the tail sum_{m > Lmax} of input entries feeding output
// index t through one multiplication step.
double mul_miss_bound(const FloorParams& fp, long p, unsigned alpha, int Lmax, int t) {
    double best = 1e18;
    double lp = std::log((double)p);
    for (int m = Lmax + 1; m <= Lmax + 3000; ++m) {
        double g = fp.at(p, m) + (double)alpha * (m - t) - 1.0 - std::log(1.0 + m) / lp;
        best = std::min(best, g);
    }
    return best;
}

struct VariantPolys {
    std::vector<WittElem> A;  // exp-channel coefficients (twist q)
    std::vector<WittElem> B;  // plain-channel coefficients
};

VariantPolys reduce_variant(const MzvContext& ctx, int m, long kq, SumRange v) {
    const ExpPoly& ep = twisted_power_sum_closed_form(ctx.N, m, 0, (unsigned)kq, v);
    VariantPolys out;
    auto grab = [&](unsigned ch) {
        std::vector<WittElem> poly;
        auto it = ep.ch.find(ch);
        if (it != ep.ch.end())
            for (const auto& q : it->second) poly.push_back(reduce(ctx, q));
        return poly;
    };
    if (kq != 0) out.A = grab((unsigned)kq);
    out.B = grab(0);
    return out;
}

void axpy(std::vector<WittElem>& acc, const WittElem& s, const std::vector<WittElem>& v) {
    if (coeff_is_zero(s)) return;
    if (acc.size() < v.size()) acc.resize(v.size(), w_zero());
    for (std::size_t t = 0; t < v.size(); ++t)
        if (!v[t].is_exact_zero()) acc[t] += s * v[t];
}

FloorParams fp_base(unsigned alpha) {
    FloorParams fp;
    fp.V = 1;
    fp.Dlog = 0;
    fp.C = 1;
    fp.E = (double)alpha - 1;
    return fp;
}

FloorParams fp_after_mul(const FloorParams& fp, long p, double cconst_floor) {
    FloorParams g = fp;
    double lp = std::log((double)p);
    double tstar = (double)(fp.Dlog + 1) / lp - fp.C;
    double slack = 0;
    if (tstar > 0)
        slack = std::max(0.0, (double)(fp.Dlog + 1) * std::log(1.0 + tstar / fp.C) / lp - tstar);
    g.V = fp.V - 2.0 - slack;
    g.Dlog = fp.Dlog + 1;
    g.V = std::min(g.V, cconst_floor);
    return g;
}

FloorParams fp_after_int(const FloorParams& fp, unsigned alpha) {
    FloorParams g = fp;
    g.V = fp.V + (double)alpha - fp.E;
    g.C = fp.C + 1;
    return g;
}

}  // namespace

double FloorParams::at(long p, double l) const {
    return V - (double)Dlog * std::log(l + C) / std::log((double)p) - E * l;
}

WittElem& LAETable::at(long r, unsigned i, int l) {
    return c[((std::size_t)r * ctx->N + (i - 1)) * (Lmax + 1) + l];
}
const WittElem& LAETable::at(long r, unsigned i, int l) const {
    return c[((std::size_t)r * ctx->N + (i - 1)) * (Lmax + 1) + l];
}
bool LAETable::has_polar() const {
    for (const auto& e : polar)
        if (!coeff_is_zero(e)) return true;
    return false;
}

void lae_set_verify_floors(bool on) { g_verify_floors = on; }

LAETable lae_unit(const MzvContext& ctx, int Lmax) {
    LAETable t = make_table(ctx, Lmax);
    t.c_const = w_from_int(ctx, 1);
    return t;
}

LAETable lae_base_letter(const MzvContext& ctx, unsigned i, int Lmax) {
    if (i < 1 || i > ctx.N) throw std::invalid_argument("lae_base_letter: index out of range");
    LAETable t = make_table(ctx, Lmax);
    t.fp = fp_base(ctx.alpha);
    for (long r = 1; r < ctx.P; ++r) {
        WittElem invr = w_inverse(w_from_int(ctx, Int(r)));
        WittElem cur = w_shift(invr, (int)ctx.alpha);  // p^alpha / r
        for (int l = 0; l <= Lmax; ++l) {
            t.at(r, i, l) = (l % 2 == 0) ? cur : -cur;
            cur = cur * invr;
        }
    }
    verify_floors(t);
    return t;
}

LAETable lae_mul_geometric(const LAETable& f, unsigned i0, bool twisted) {
    const MzvContext& ctx = *f.ctx;
    if (i0 < 1 || i0 > ctx.N) throw std::invalid_argument("lae_mul_geometric: index out of range");
    if (f.has_polar()) throw std::invalid_argument("lae_mul_geometric: input has a polar part");
    const int Lmax = f.Lmax;
    const long P = ctx.P;
    const unsigned N = ctx.N;
    LAETable out = make_table(ctx, Lmax);
    out.fp = fp_after_mul(f.fp, ctx.p, cconst_val(f.c_const));

    for (unsigned j = 1; j <= N; ++j) {
        long kq = mod_n(((long)i0 - (long)j) * P, N);
        for (int m = 0; m <= Lmax; ++m) {
            // F(r) = c^{(m,j)}(r) * xi^{(i0-j) r}
            std::vector<WittElem> F((std::size_t)P, w_zero());
            bool any = false;
            for (long r = 0; r < P; ++r) {
                const WittElem& e = f.at(r, j, m);
                if (e.is_exact_zero()) continue;
                F[(std::size_t)r] = e * xi_of(ctx, ((long)i0 - (long)j) * r);
                any = true;
            }
            if (!any) continue;

            auto emit = [&](long r0, unsigned ch, bool with_rot,
                            const std::vector<WittElem>& coef) {
                for (std::size_t t = 0; t < coef.size(); ++t) {
                    if ((int)t > Lmax || coeff_is_zero(coef[t])) continue;
                    WittElem v = w_shift(coef[t], (int)ctx.alpha * (m - (int)t));
                    if (with_rot) v = v * xi_of(ctx, -((long)i0 - (long)j) * r0);
                    out.at(r0, ch, (int)t) += v;
                }
            };

            if (twisted) {
                VariantPolys poo = reduce_variant(ctx, m, kq, SumRange::open_open);
                VariantPolys psh = reduce_variant(ctx, m, kq, SumRange::shifted);
                for (long r = 0; r < P; ++r) {
                    if (F[(std::size_t)r].is_exact_zero()) continue;
                    const VariantPolys& pv = (r == 0) ? poo : psh;
                    // exp part goes to channel j without the residue factor;
                    // F absorbed xi^{(i0-j)r}, which belongs only to the
                    // plain part, so undo it for the exp part.
                    const WittElem& craw = f.at(r, j, m);
                    std::vector<WittElem> GA, GB;
                    axpy(GA, craw, pv.A);
                    axpy(GB, F[(std::size_t)r], pv.B);
                    emit(r, j, false, GA);
                    emit(r, i0, false, GB);
                }
            } else {
                VariantPolys poo = reduce_variant(ctx, m, kq, SumRange::open_open);
                VariantPolys pcr = reduce_variant(ctx, m, kq, SumRange::closed_right);
                VariantPolys pcb = reduce_variant(ctx, m, kq, SumRange::closed_both);
                VariantPolys psh = reduce_variant(ctx, m, kq, SumRange::shifted);
                WittElem S = w_zero();
                for (long r = 1; r < P; ++r) S += F[(std::size_t)r];
                const WittElem& F0 = F[0];
                {  // r0 = 0
                    std::vector<WittElem> GA, GB;
                    axpy(GA, F0, poo.A);
                    axpy(GA, S, psh.A);
                    axpy(GB, F0, poo.B);
                    axpy(GB, S, psh.B);
                    emit(0, j, true, GA);
                    emit(0, i0, false, GB);
                }
                WittElem T = w_zero();
                for (long r0 = 1; r0 < P; ++r0) {
                    WittElem rest = S - T;
                    std::vector<WittElem> GA, GB;
                    axpy(GA, F0, pcr.A);
                    axpy(GA, T, pcb.A);
                    axpy(GA, rest, psh.A);
                    axpy(GB, F0, pcr.B);
                    axpy(GB, T, pcb.B);
                    axpy(GB, rest, psh.B);
                    emit(r0, j, true, GA);
                    emit(r0, i0, false, GB);
                    T += F[(std::size_t)r0];
                }
            }
        }
    }

    // constant term of the input
    if (!coeff_is_zero(f.c_const)) {
        if (twisted) {
            out.at(0, i0, 0) += f.c_const;
        } else {
            for (long r0 = 0; r0 < P; ++r0) out.at(r0, i0, 0) += f.c_const;
        }
    }
    out.c_const = w_zero();

    // certified bound on contributions from discarded input degrees > Lmax
    for (int t = 0; t <= Lmax; ++t) {
        double miss = mul_miss_bound(f.fp, ctx.p, ctx.alpha, Lmax, t);
        for (long r = 0; r < P; ++r)
            for (unsigned i = 1; i <= N; ++i) cap_entry(out.at(r, i, t), ctx, miss);
    }
    verify_floors(out);
    return out;
}

LAETable lae_int_single(const LAETable& f) {
    const MzvContext& ctx = *f.ctx;
    if (f.has_polar()) throw std::invalid_argument("lae_int_single: input has a polar part");
    if (!coeff_is_zero(f.c_const))
        throw std::invalid_argument("lae_int_single: nonzero constant term is not integrable");
    const int Lmax = f.Lmax;
    LAETable out = make_table(ctx, Lmax);
    out.fp = fp_after_int(f.fp, ctx.alpha);
    for (unsigned i = 1; i <= ctx.N; ++i) {
        // disk r = 0: index shift, creating the polar part
        out.polar[i - 1] = w_shift(f.at(0, i, 0), (int)ctx.alpha);
        for (int l = 0; l < Lmax; ++l) out.at(0, i, l) = w_shift(f.at(0, i, l + 1), (int)ctx.alpha);
        cap_entry(out.at(0, i, Lmax), ctx, (double)ctx.alpha + f.fp.at(ctx.p, Lmax + 1));
        for (long r = 1; r < ctx.P; ++r) {
            WittElem invr = w_inverse(w_from_int(ctx, Int(r)));
            for (int l = 0; l <= Lmax; ++l) {
                WittElem acc = w_zero();
                WittElem pw = invr;  // 1 / r^{l - l1 + 1}
                for (int l1 = l; l1 >= 0; --l1) {
                    const WittElem& e = f.at(r, i, l1);
                    if (!e.is_exact_zero()) {
                        WittElem term = e * pw;
                        acc += ((l - l1) % 2 == 0) ? term : -term;
                    }
                    pw = pw * invr;
                }
                out.at(r, i, l) = w_shift(acc, (int)ctx.alpha);
            }
        }
    }
    out.c_const = w_zero();
    verify_floors(out);
    return out;
}

LAETable lae_regularize(const LAETable& f) {
    LAETable out = f;
    for (auto& e : out.polar) e = w_zero();
    return out;
}

LAETable lae_int_e0_pow(const LAETable& f, int s) {
    const MzvContext& ctx = *f.ctx;
    if (s < 1) throw std::invalid_argument("lae_int_e0_pow: s must be >= 1");
    if (f.has_polar()) throw std::invalid_argument("lae_int_e0_pow: input has a polar part");
    if (!coeff_is_zero(f.c_const))
        throw std::invalid_argument("lae_int_e0_pow: nonzero constant term is not integrable");
    const int Lmax = f.Lmax;
    LAETable out = make_table(ctx, Lmax);
    out.fp = f.fp;
    for (int k = 0; k < s; ++k) out.fp = fp_after_int(out.fp, ctx.alpha);
    for (unsigned i = 1; i <= ctx.N; ++i) {
        for (int l = 0; l <= Lmax; ++l) {
            if (l + s <= Lmax) {
                out.at(0, i, l) = w_shift(f.at(0, i, l + s), (int)ctx.alpha * s);
            } else {
                cap_entry(out.at(0, i, l), ctx,
                          (double)ctx.alpha * s + f.fp.at(ctx.p, l + s));
            }
        }
        for (long r = 1; r < ctx.P; ++r) {
            WittElem invr = w_inverse(w_from_int(ctx, Int(r)));
            WittElem invr_s = w_from_int(ctx, 1);
            for (int k = 0; k < s; ++k) invr_s = invr_s * invr;
            for (int l = 0; l <= Lmax; ++l) {
                WittElem acc = w_zero();
                WittElem pw = invr_s;  // 1 / r^{l - l1 + s}
                for (int l1 = l; l1 >= 0; --l1) {
                    const WittElem& e = f.at(r, i, l1);
                    if (!e.is_exact_zero()) {
                        Rational bin = binomial_general(Rational(-s), l - l1);
                        if (bin != 0) acc += w_scale(e * pw, bin);
                    }
                    pw = pw * invr;
                }
                out.at(r, i, l) = w_shift(acc, (int)ctx.alpha * s);
            }
        }
    }
    out.c_const = w_zero();
    verify_floors(out);
    return out;
}

LAETable int_reg_word(const MzvContext& ctx, const Word& w, int Lmax) {
    if (!is_convergent(w))
        throw std::invalid_argument("int_reg_word: word must be empty or end in a non-e0 letter");
    if (w.empty()) return lae_unit(ctx, Lmax);
    // rightmost letter
    std::size_t pos = w.size();
    LAETable t = make_table(ctx, Lmax);
    const Letter& last = w[pos - 1];
    if (last.kind == LetterKind::Ez) {
        t = lae_base_letter(ctx, last.idx, Lmax);
    } else {
        // a word whose rightmost letter is twisted integrates to a pure polar
        // part, regularized to zero; everything after stays zero
        t.fp = fp_base(ctx.alpha);
        return t;
    }
    --pos;
    while (pos > 0) {
        const Letter& L = w[pos - 1];
        if (L.kind == LetterKind::E0) {
            std::size_t run = 0;
            while (pos > 0 && w[pos - 1].kind == LetterKind::E0) {
                ++run;
                --pos;
            }
            t = lae_int_e0_pow(t, (int)run);
        } else {
            t = lae_mul_geometric(t, L.idx, L.kind == LetterKind::EzHat);
            t = lae_regularize(lae_int_single(t));
            --pos;
        }
    }
    return t;
}

namespace {
double eval_tail_bound(const LAETable& f) {
    const MzvContext& ctx = *f.ctx;
    double best = 1e18;
    for (int l = f.Lmax + 1; l <= f.Lmax + 3000; ++l)
        best = std::min(best, f.fp.at(ctx.p, l) + (double)ctx.alpha * l);
    return best;
}
}  // namespace

int lae_choose_lmax(const MzvContext& ctx, int max_weight, int max_depth, int target) {
    // worst-case floor drift: every non-e0 letter costs one multiplication
    // and one integration, every e0 letter one integration
    FloorParams fp = fp_base(ctx.alpha);
    int depth = std::max(1, max_depth);
    int e0s = std::max(0, max_weight - depth);
    for (int k = 1; k < depth; ++k) {
        fp = fp_after_mul(fp, ctx.p, 1e18);
        fp = fp_after_int(fp, ctx.alpha);
    }
    for (int k = 0; k < e0s; ++k) fp = fp_after_int(fp, ctx.alpha);
    for (int Lmax = 8; Lmax <= 4096; ++Lmax) {
        double best = 1e18;
        for (int l = Lmax + 1; l <= Lmax + 3000; ++l)
            best = std::min(best, fp.at(ctx.p, l) + (double)ctx.alpha * l);
        if (best >= (double)target + 1.0) return Lmax;
    }
    throw PrecisionError("lae_choose_lmax: no admissible truncation degree found");
}

WittElem lae_evaluate_at(const LAETable& f, long n) {
    const MzvContext& ctx = *f.ctx;
    if (n < 0) throw std::invalid_argument("lae_evaluate_at: n must be >= 0");
    long r = n % ctx.P;
    WittElem acc = w_zero();
    if (n == 0) {
        for (unsigned i = 1; i <= ctx.N; ++i) acc += f.at(0, i, 0);
        return acc;
    }
    WittElem step = w_from_int(ctx, Int(n) - Int(r));
    for (unsigned i = 1; i <= ctx.N; ++i) {
        WittElem inner = w_zero();
        WittElem pw = w_from_int(ctx, 1);
        for (int l = 0; l <= f.Lmax; ++l) {
            const WittElem& e = f.at(r, i, l);
            if (!e.is_exact_zero()) inner += e * pw;
            if (n == r) break;  // higher powers vanish exactly
            pw = pw * step;
        }
        if (!coeff_is_zero(f.polar[i - 1]))
            inner += w_div_int(f.polar[i - 1], n);
        if (!inner.is_exact_zero()) acc += inner * xi_of(ctx, -(long)i * n);
    }
    if (n != r) cap_entry(acc, ctx, eval_tail_bound(f));
    return acc;
}

WittElem lae_value_at_infinity(const LAETable& f) {
    WittElem acc = f.c_const;
    for (unsigned i = 1; i <= f.ctx->N; ++i) acc = acc - f.at(0, i, 0);
    return acc;
}

std::vector<CycRational> taylor_oracle(unsigned N, long P, const Word& w, long n_max) {
    std::vector<CycRational> c((std::size_t)n_max + 1, cyc_zero(N));
    c[0] = cyc_one(N);
    for (std::size_t pos = w.size(); pos-- > 0;) {
        const Letter& L = w[pos];
        std::vector<CycRational> h((std::size_t)n_max + 1, cyc_zero(N));
        if (L.kind == LetterKind::E0) {
            for (long n = 1; n <= n_max; ++n) h[(std::size_t)n] = c[(std::size_t)n] * Rational(1, n);
        } else if (L.kind == LetterKind::Ez) {
            CycRational prefix = cyc_zero(N);
            for (long n = 1; n <= n_max; ++n) {
                prefix += c[(std::size_t)(n - 1)] * cyc_root_power(N, (long)L.idx * (n - 1));
                h[(std::size_t)n] = prefix * cyc_root_power(N, -(long)L.idx * n) * Rational(1, n);
            }
        } else {
            std::vector<CycRational> g((std::size_t)n_max + 1, cyc_zero(N));
            CycRational rot = cyc_root_power(N, -(long)L.idx * P);
            for (long n = P; n <= n_max; ++n) {
                g[(std::size_t)n] = rot * (c[(std::size_t)(n - P)] + g[(std::size_t)(n - P)]);
                h[(std::size_t)n] = g[(std::size_t)n] * Rational(1, n);
            }
        }
        c = std::move(h);
    }
    return c;
}

std::string lae_table_to_json(const LAETable& f, int max_l) {
    std::ostringstream os;
    const MzvContext& ctx = *f.ctx;
    os << "{\"Lmax\":" << f.Lmax << ",\"const\":\"" << w_to_string(f.c_const) << "\","
       << "\"floor\":{\"V\":" << f.fp.V << ",\"Dlog\":" << f.fp.Dlog << ",\"C\":" << f.fp.C
       << ",\"E\":" << f.fp.E << "},\"disks\":[";
    bool firstd = true;
    for (long r = 0; r < ctx.P; ++r)
        for (unsigned i = 1; i <= ctx.N; ++i) {
            bool any = false;
            for (int l = 0; l <= std::min(max_l, f.Lmax); ++l)
                if (!coeff_is_zero(f.at(r, i, l))) any = true;
            if (!any) continue;
            if (!firstd) os << ",";
            firstd = false;
            os << "{\"r\":" << r << ",\"channel\":" << i << ",\"coeffs\":[";
            for (int l = 0; l <= std::min(max_l, f.Lmax); ++l) {
                if (l) os << ",";
                os << "\"" << w_to_string(f.at(r, i, l)) << "\"";
            }
            os << "]}";
        }
    os << "]}";
    return os.str();
}

}  // namespace mzv
