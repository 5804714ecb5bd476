// Letter-by-letter computation of regularized iterated integrals of words
// over {e0, ez(i), ezhat(i)} as overconvergent power series.  A series
// f = c_const + sum_{n>=1} c(n) z^n is stored through its coefficient
// function on congruence disks: for n = r + u*P  (P = p^alpha, 0 <= r < P),
//     c(n) = sum_{l=0..Lmax} sum_{i=1..N} c^{(l,i)}(r) * xi^{-i n} * (n-r)^l,
// plus an optional polar part  sum_i polar_i * xi^{-i n} / n  on the disk
// r = 0 which integration creates and regularization removes.
//
// Every stored coefficient obeys the valuation floor
//     v_p(c^{(l,i)}(r)) >= V - Dlog * log_p(l + C) - E * l,
// and the floor parameters are updated alongside each transform; they bound
// both the discarded degree-> Lmax tails and the evaluation tail, so each
// returned element carries a certified absolute precision.
#pragma once

#include "mzv/exactnum.hpp"
#include "mzv/harmonic.hpp"
#include "mzv/wittring.hpp"
#include "mzv/words.hpp"

#include <vector>

namespace mzv {

struct FloorParams {
    double V = 1e18;  // the unit table satisfies any floor
    int Dlog = 0;
    double C = 1;
    double E = 0;

    double at(long p, double l) const;  // V - Dlog*log_p(l+C) - E*l
};

struct LAETable {
    const MzvContext* ctx = nullptr;
    int Lmax = 0;
    std::vector<WittElem> c;      // ((r*N + (i-1))*(Lmax+1) + l)
    std::vector<WittElem> polar;  // size N; the xi^{-i n}/n part on disk r=0
    WittElem c_const;             // constant term of the series
    FloorParams fp;

    WittElem& at(long r, unsigned i, int l);
    const WittElem& at(long r, unsigned i, int l) const;
    bool has_polar() const;
};

/// Table of the constant series 1.
LAETable lae_unit(const MzvContext& ctx, int Lmax);

/// Closed form of the table of the single-letter integral for ez(i):
/// c^{(l,i)}(r) = p^alpha (-1)^l / r^{l+1} on disks r != 0, zero on r = 0.
LAETable lae_base_letter(const MzvContext& ctx, unsigned i, int Lmax);

/// Multiplication step of one letter: the geometric-series transform of the
/// coefficient function.  Plain (twisted = false), letter ez(i0):
///     h(n) = xi^{-i0 n} * sum_{0 <= m < n} c(m) xi^{i0 m}
/// Twisted (twisted = true), letter ezhat(i0):
///     h(n) = sum_{k >= 1} xi^{-i0 k P} c(n - kP)
/// where c(0) is the constant term.  The input must have no polar part.
LAETable lae_mul_geometric(const LAETable& f, unsigned i0, bool twisted);

/// p^alpha * integral of f against dz/z: divides coefficients by n / p^alpha.
/// On the disk r = 0 this creates a polar part (from the l = 0 entries).
LAETable lae_int_single(const LAETable& f);

/// Drops the polar part (the regularization of the iterated integral) and
/// clears the constant term created by integration.
LAETable lae_regularize(const LAETable& f);

/// s-fold regularized integration against p^alpha dz/z in closed form;
/// equals s rounds of lae_int_single + lae_regularize.
LAETable lae_int_e0_pow(const LAETable& f, int s);

/// Regularized iterated integral of a convergent word over the mixed
/// alphabet, letters applied rightmost first.  Normalization: the result is
/// (p^alpha)^{weight(w)} times the bare Taylor series (see taylor_oracle).
LAETable int_reg_word(const MzvContext& ctx, const Word& w, int Lmax);

/// Coefficient c(n) for n >= 1; for n = 0 returns the extension value
/// sum_i c^{(0,i)}(0).  The result's precision is capped by the certified
/// bound on the discarded l > Lmax tail.
WittElem lae_evaluate_at(const LAETable& f, long n);

/// Value at infinity of the series: c_const - sum_i c^{(0,i)}(0).
WittElem lae_value_at_infinity(const LAETable& f);

/// First coefficients (index 0 = constant term) of the bare series of a
/// convergent mixed word: exact cyclotomic rationals, computed directly from
/// the defining recurrences.  Independent oracle for the table pipeline.
std::vector<CycRational> taylor_oracle(unsigned N, long P, const Word& w, long n_max);

/// Smallest truncation degree for which the certified tail bounds stay at or
/// above `target` digits through a pipeline of up to `max_weight` letters of
/// which up to `max_depth` are non-e0.
int lae_choose_lmax(const MzvContext& ctx, int max_weight, int max_depth, int target);

/// When enabled, every transform checks the valuation floors of all stored
/// entries and throws PrecisionError on violation (used by the test suite).
void lae_set_verify_floors(bool on);

std::string lae_table_to_json(const LAETable& f, int max_l);

}  // namespace mzv
