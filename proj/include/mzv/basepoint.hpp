// Assembly of the cyclotomic p-adic multiple zeta values: weight-one closed
// forms, the weight-staged solve of the base-point series Phi^{(z_i)} from
// the residue and shuffle relations, and the identity checks that tie the
// whole pipeline together.
//
// Staging (per weight s = 1, 2, ...):
//   1. the filtered regularization of every plain word of weight s is
//      integrated and evaluated at infinity, giving Phi^{(inf)} at weight s
//      (this uses conjugation coefficients of weight <= s-1 only);
//   2. the coefficients Phi^{(z_i)}[x] on all words x of weight s are solved
//      simultaneously from the residue identity (one equation per word of
//      weight s+1) together with the shuffle relations and the rotation
//      relations between base points; if these
//      leave a direction undetermined at weight s, weights s and s+1 are
//      solved jointly as a fallback, and any directions still free after
//      that are pinned to zero (see pinned_directions()); redundant
//      equations are verified and any inconsistency aborts the run.
//
// For N >= 2 the relation set above provably leaves a small number of
// directions free from weight 3 on (at N = 2, weight 3, exactly one: the
// combination [z1 z2 z2] - 2 [z2 z1 z2] + [z2 z2 z1] at each base point).
// Path conversion and reflection relations do not close them: along the
// composed paths they acquire Lie-algebra-valued loop-period corrections
// which absorb exactly the freedom they would otherwise fix.  The solver
// therefore pins such directions to zero in a fixed deterministic basis;
// all identity checks (residue, shuffle, rotation) hold on the pinned
// solution, and pinned_directions() reports how many directions were fixed
// this way so callers can tell which outputs rest on this normalization.
#pragma once

#include "mzv/laengine.hpp"
#include "mzv/regfrob.hpp"

#include <memory>

namespace mzv {

struct InvalidWordError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InadmissibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kEngineVersion = "1.0";

/// All words of the given weight over {e0, ez(1..N)}, in a fixed order.
std::vector<Word> all_plain_words(unsigned N, int weight);

/// Phi^{(z_i)}[e_{z_j}]: 0 for i = j (and always for N = 1), otherwise the
/// value p^alpha log(1 - xi^{j-i}) - log(1 - xi^{(j-i) p^alpha}) of the
/// weight-one overconvergent hyperlogarithm at z_i, computed via the
/// Iwasawa-branch p-adic logarithm.  Symmetric in i and j.
WittElem phi_weight_one(const MzvContext& ctx, unsigned i, unsigned j);

/// Independent partial-sum oracle for the same value: the truncation
///   -p^alpha/(1 - xi^{((i-j)/p^alpha) p^U}) * sum_{0<n<p^U, p^alpha !| n} v^n / n
/// with v = xi^{(j-i)/p^alpha}, which converges to phi_weight_one as
/// U -> infinity at one digit per level (result carries absolute precision U).
WittElem phi_weight_one_partial(const MzvContext& ctx, unsigned i, unsigned j, unsigned U);

struct PhiTable {
    unsigned base = 0;  // 1..N for the base point z_i; 0 for infinity
    std::map<Word, WittElem> v;
};

class Engine {
  public:
    explicit Engine(std::shared_ptr<MzvContext> ctx);

    const MzvContext& ctx() const { return *ctx_; }

    /// Solves Phi^{(z_i)} on all words of weight <= t (idempotent).
    void ensure_phi_weight(int t);

    /// Coefficients of the base-point series and their inverses; computed on
    /// demand.  `i` is 1..N for Phi^{(z_i)}.
    WittElem phi(unsigned i, const Word& w);
    WittElem phi_inv(unsigned i, const Word& w);
    WittElem phi_inf(const Word& w);
    WittElem phi_inf_inv(const Word& w);

    /// Conjugation coefficient Ad_i[w] = (Phi_i^{-1} e_{z_i} Phi_i)[w];
    /// requires phi solved to weight(w) - 1.
    WittElem ad_coeff(unsigned i, const Word& w);

    /// Coefficient domain whose Ad callback reads the solved tables.
    RegDomain<WittElem> domain();

    /// Filtered regularization of a plain word with numeric coefficients.
    RegExpansion<WittElem> reg_filtered(const Word& w);

    /// Value at infinity of the regularized integral of one mixed word
    /// (cached), and its full series table (recomputed).
    WittElem int_reg_inf(const Word& mixed);
    LAETable int_reg_table(const Word& mixed) const;

    /// Full series table of the overconvergent hyperlogarithm of a plain
    /// word: the reg expansion integrated term by term.
    LAETable li_dagger(const Word& plain);

    /// zeta_{p,alpha} at an admissible composition / convergent word: the
    /// coefficient of the base-point series at z_1.
    WittElem zeta(const CompositionIndex& idx);
    WittElem zeta_word(const Word& w);

    /// Snapshot of a solved table up to the given weight (base 0 = infinity).
    PhiTable table(unsigned base, int max_weight);

    int solved_phi_weight() const { return phi_weight_; }

    /// Number of free directions fixed to zero so far by the solver (always
    /// 0 for N = 1; see the class comment).
    int pinned_directions() const { return pinned_; }

  private:
    void stage_inf(int s);
    void solve_weight(int t);
    bool try_solve_weights(int t, bool joint, bool allow_pin);

    std::shared_ptr<MzvContext> ctx_;
    int phi_weight_ = 0;
    int pinned_ = 0;
    int inf_weight_ = 0;
    std::vector<std::map<Word, WittElem>> phi_, phiinv_;  // index i-1
    std::map<Word, WittElem> phiinf_, phiinfinv_;
    std::map<Word, WittElem> infcache_;  // mixed word -> value at infinity
    std::map<Word, RegExpansion<WittElem>> regmemo_;
};

/// Independent evaluation of Phi^{(z_{i0})} at an admissible word with
/// leading run >= 1 (s_d >= 2), by the base-point conversion identity: the
/// target is expressed through Phi^{(inf)} at the same weight and
/// Phi^{(z_i)} data of strictly smaller weight.  Cross-check of the solver.
WittElem solve_phi_zi(Engine& eng, unsigned i0, const CompositionIndex& idx);

/// One term of a shuffle reduction: coeff * prod_i f[e_{z_i}]^{pow_i} * f[w].
struct ReducedTerm {
    Rational coeff;
    std::map<unsigned, int> letter_pow;
    Word w;  // empty, admissible (leading e0, trailing ez), or irreducible
};

/// Rewrites f[w], for f grouplike with f[e0] = 0, as a combination of
/// admissible queries: trailing e0 runs are redistributed into the inner
/// runs with binomial coefficients, and repeated leading ez(i) letters are
/// peeled off into powers of f[e_{z_i}].  Words whose leading letters mix
/// distinct ez indices are returned unchanged.
std::vector<ReducedTerm> shuffle_reduce(const Word& w, unsigned N);

struct IdentityReport {
    int checked = 0;
    int min_precision = std::numeric_limits<int>::max();
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Verifies, on all words of weight <= Wmax and modulo p^prec (capped by the
/// available absolute precision of each value):
///   (a) the residue identity relating the conjugation coefficients of the
///       Phi^{(z_i)} to Phi^{(inf)};
///   (b) the shuffle (grouplike) relations of every table;
///   (c) for N >= 2, the rotation relation moving any base point to z_N;
///   (d) the base-point conversion identity (solve_phi_zi vs the solver);
///   (e) depth <= 1 vanishing of Phi^{(inf)}.
IdentityReport identity_checks(Engine& eng, int Wmax, int prec);

}  // namespace mzv
