// Arithmetic in the unramified p-adic coefficient ring W(F_q)[1/p] where
// F_q = F_p(image of xi_N).  Elements are represented as
//     value = p^shift * m(x)  mod  (p^aprec, fhat(x))
// where fhat is a monic lift of an irreducible factor of Phi_N mod p, of
// degree f = ord of p in (Z/N)^*, and m has degree < f.  `aprec` is the
// absolute precision: the value is known modulo p^aprec.
#pragma once

#include "mzv/exactnum.hpp"

#include <limits>
#include <memory>
#include <unordered_map>

namespace mzv {

struct ContextError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WittElem;

struct MzvContext {
    long p = 0;
    unsigned N = 1;
    unsigned alpha = 1;
    int M = 10;        // requested output precision (absolute)
    int wprec = 0;     // working absolute precision, > M
    unsigned D = 1;    // degree of fhat
    std::vector<Int> fhat;          // monic, degree D, coefficients mod p^wprec
    long P = 0;                     // p^alpha (fits in long for supported inputs)
    Int Pint;                       // p^alpha
    unsigned xi_inv_palpha = 0;     // (p^alpha)^{-1} mod N
    std::vector<Int> pk;            // pk[j] = p^j, j = 0..wprec
    std::vector<WittElem> xi_pow;   // xi^0 .. xi^{N-1}

    // cache of inverses of small integers (by value), shared by all ops
    mutable std::unordered_map<long long, std::vector<Int>> small_inv_cache;

    const Int& ppow(int j) const;
};

/// Creates a context; verifies p prime, gcd(p, N) = 1, and that the chosen
/// root has exact order N.  wprec defaults to M + 50.
std::shared_ptr<MzvContext> ctx_create(long p, unsigned N, unsigned alpha, int M, int wprec = 0);

std::string ctx_to_json(const MzvContext& ctx);

struct ValInfo {
    long v = 0;
    bool exact = true;  // when false, only "valuation >= v" is known
};

struct WittElem {
    const MzvContext* ctx = nullptr;  // nullptr encodes the exact integer 0
    int shift = 0;
    int aprec = std::numeric_limits<int>::max();
    int vfloor = 0;  // proven lower bound for the valuation
    std::vector<Int> m;

    bool is_exact_zero() const { return ctx == nullptr; }
};

WittElem w_zero();
WittElem w_from_int(const MzvContext& ctx, const Int& x);
WittElem reduce(const MzvContext& ctx, const Rational& q);
WittElem reduce(const MzvContext& ctx, const CycRational& x);

WittElem operator+(const WittElem& a, const WittElem& b);
WittElem operator-(const WittElem& a, const WittElem& b);
WittElem operator-(const WittElem& a);
WittElem operator*(const WittElem& a, const WittElem& b);
WittElem& operator+=(WittElem& a, const WittElem& b);

/// Valuation.  For a residue class that is 0 modulo p^aprec, returns
/// {aprec, false}; for the exact zero, {huge, false}.
ValInfo w_valuation(const WittElem& a);

/// True iff the element is 0 modulo p^{min(aprec, k)}.
bool w_is_zero_mod(const WittElem& a, int k);

/// Inverse of an element of exactly known valuation.
WittElem w_inverse(const WittElem& a);

/// Division by a nonzero integer (uses the context inverse cache).
WittElem w_div_int(const WittElem& a, long long n);

/// Multiplication by p^k (k may be negative).
WittElem w_shift(const WittElem& a, int k);

WittElem w_scale(const WittElem& a, const Rational& q);

/// a == b modulo p^k.  Throws PrecisionError if either side is not known
/// to absolute precision k.
bool w_eq_mod(const WittElem& a, const WittElem& b, int k);

inline bool coeff_is_zero(const WittElem& c) {
    return c.is_exact_zero() || w_is_zero_mod(c, c.aprec);
}

/// Base-p digits (least significant first) of the mantissa coefficients,
/// modulo p^digits; for debugging and CLI display.
std::vector<std::vector<long>> w_digits(const WittElem& a, int digits);

std::string w_to_string(const WittElem& a);

}  // namespace mzv
