// Weighted multiple harmonic sums, their prime truncations, and exact
// closed forms for twisted power sums
//     sum over u1 of u1^m (u - u1)^{m'} xi^{k u1}
// as "exponential polynomials": finite combinations xi^{k u} * poly(u).
// These closed forms are the combinatorial kernel of the letter-by-letter
// integration transforms of the series engine.
#pragma once

#include "mzv/exactnum.hpp"
#include "mzv/wittring.hpp"

#include <map>
#include <vector>

namespace mzv {

/// Index of a multiple harmonic sum: exponents s_1..s_d (innermost first)
/// and decorations i_1..i_{d+1} (all 1 when N = 1).
struct HarmonicIndex {
    std::vector<int> s;
    std::vector<unsigned> dec;
};

/// Weighted multiple harmonic sum
///   har_n = n^{s_1+..+s_d} * sum_{0<n_1<..<n_d<n}
///           prod_j (xi^{i_{j+1}-i_j})^{n_j} / n_j^{s_j} * xi^{-i_{d+1} n}.
CycRational har(unsigned N, long n, const HarmonicIndex& idx);

/// har at n = p^alpha, reduced into the coefficient ring.
WittElem har_prime(const MzvContext& ctx, const HarmonicIndex& idx);

enum class SumRange { open_open, closed_right, closed_both, shifted };

/// Finite exponential polynomial: value(u) = sum_k xi^{k u} * poly_k(u).
/// Channel 0 holds the plain polynomial part.
struct ExpPoly {
    unsigned N = 1;
    std::map<unsigned, std::vector<CycRational>> ch;  // low-degree-first polys
};

CycRational exp_poly_eval(const ExpPoly& f, long u);

/// Exact closed form (cached) of sum over u1 of u1^m (u-u1)^{m'} xi^{k u1}:
///   open_open:    u1 in [1, u-1]
///   closed_right: u1 in [1, u]
///   closed_both:  u1 in [0, u]
///   shifted:      u1 in [0, u-1], with weight (u-1-u1)^{m'} instead
const ExpPoly& twisted_power_sum_closed_form(unsigned N, int m, int mprime, unsigned k,
                                             SumRange variant);

/// Verifies the quasi-shuffle identity har(a) * har(b) = sum of merged terms
/// at level n, exactly.
bool quasi_shuffle_check(unsigned N, long n, const HarmonicIndex& a, const HarmonicIndex& b);

}  // namespace mzv
