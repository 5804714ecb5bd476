// Exact arithmetic primitives: big rationals, binomial coefficients with
// arbitrary (possibly negative) upper argument, Bernoulli numbers, p-adic
// valuations, and exact arithmetic in cyclotomic fields Q(xi_N) represented
// as Q[x]/(Phi_N) with Phi_N the N-th cyclotomic polynomial.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mzv {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// p^e for e >= 0.
Int int_pow(const Int& base, unsigned long e);

/// Ordinary binomial coefficient; 0 when k < 0 or k > n.
Int binomial(long n, long k);

/// Generalized binomial coefficient binom(a, l) = a(a-1)...(a-l+1)/l!
/// for arbitrary rational a and integer l >= 0 (0 for l < 0).
Rational binomial_general(const Rational& a, long l);

/// Bernoulli number B_l with the convention B_1 = -1/2.
const Rational& bernoulli(std::size_t l);

/// p-adic valuation of a nonzero integer.
long padic_valuation(const Int& x, const Int& p);

/// p-adic valuation of a nonzero rational.
long padic_valuation(const Rational& x, const Int& p);

/// Euler totient.
unsigned euler_phi(unsigned n);

/// Coefficients (low degree first) of the N-th cyclotomic polynomial,
/// an integer monic polynomial of degree phi(N).
std::vector<Int> cyclotomic_polynomial(unsigned N);

/// An element of Q(xi_N), stored as a polynomial of degree < phi(N) in a
/// fixed primitive N-th root of unity xi.  All arithmetic is exact.
struct CycRational {
    unsigned N = 1;
    std::vector<Rational> c;  // size phi(N); c[k] multiplies xi^k

    bool is_zero() const;
    /// Returns the value as a plain rational when it lies in Q.
    std::optional<Rational> as_rational() const;
};

CycRational cyc_zero(unsigned N);
CycRational cyc_one(unsigned N);
CycRational cyc_from_rational(unsigned N, const Rational& r);
/// xi^k for any integer k (reduced mod N, then mod Phi_N).
CycRational cyc_root_power(unsigned N, long k);

CycRational operator+(const CycRational& a, const CycRational& b);
CycRational operator-(const CycRational& a, const CycRational& b);
CycRational operator-(const CycRational& a);
CycRational operator*(const CycRational& a, const CycRational& b);
CycRational operator*(const CycRational& a, const Rational& s);
CycRational& operator+=(CycRational& a, const CycRational& b);
bool operator==(const CycRational& a, const CycRational& b);

/// Multiplicative inverse of a nonzero element (extended Euclid in Q[x]).
CycRational cyc_inverse(const CycRational& a);

/// Embedding xi -> exp(2*pi*I/N), used only as a floating-point sanity check.
std::complex<double> cyc_to_complex(const CycRational& a);

}  // namespace mzv
