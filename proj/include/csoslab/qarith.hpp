#pragma once

#include <atomic>
#include <utility>

#include "csoslab/core.hpp"

namespace csos {

/// Scalar arithmetic at (a deformation of) a primitive N-th root of unity.
///
/// omega = exp(2*pi*i/N + eps), q = exp(pi*i/N + eps/2), so q^2 = omega holds
/// exactly as constructed for every eps.  eps = 0 is the undeformed root of
/// unity; the limit machinery in the algebra module evaluates families at
/// small complex eps and extrapolates to eps = 0.
///
/// At eps = 0 powers of omega and q are served from exact period-N (period-2N
/// for q) tables so that quantities like [N] vanish identically.
class RootContext {
public:
    explicit RootContext(int N, Cplx eps = Cplx(0.0, 0.0));

    int N() const { return N_; }
    Cplx eps() const { return eps_; }
    bool deformed() const { return eps_ != Cplx(0.0, 0.0); }

    Cplx omega() const { return omega_; }
    Cplx q() const { return q_; }

    Cplx omega_pow(long k) const;
    Cplx q_pow(long k) const;
    /// exp((pi*i/N + eps/2) * k / 2): used for half-integer q powers.
    Cplx q_half_pow(long k) const;

private:
    int N_;
    Cplx eps_;
    Cplx omega_, q_;
    std::vector<Cplx> omega_table_;  // size N, exact at eps=0
    std::vector<Cplx> q_table_;      // size 2N, exact at eps=0
};

/// [n] = (1 - omega^n) / (1 - omega); periodic in n with period N at eps=0.
Cplx q_integer(const RootContext& ctx, long n);

/// ([n]!, [n]_q!) where [n]! = prod [k] and [n]_q! = prod (q^k-q^-k)/(q-q^-1).
/// They satisfy [n]! = q^{n(n-1)/2} [n]_q!.
std::pair<Cplx, Cplx> q_factorials(const RootContext& ctx, int n);

/// Symmetric Gaussian binomial [n choose k]_q, evaluated with the q-Pascal
/// recurrence so it stays finite at roots of unity for all n, k.
Cplx gauss_binomial(const RootContext& ctx, int n, int k);

/// Bracket binomial [n choose k] = [n]!/([n-k]![k]!), again via recurrence.
Cplx bracket_binomial(const RootContext& ctx, int n, int k);

/// omega-Pochhammer (x;omega)_n; negative n uses (x;w)_{-n} = 1/((w^{-n}x;w)_n).
Cplx pochhammer(const RootContext& ctx, Cplx x, long n);

/// Coefficient Phi(x,y)_n^{alpha,beta} of u^n in (w u x;w)_alpha (w u y;w)_beta.
/// alpha, beta are reduced mod N into [0, N-1] before use (the reduction count
/// is observable through phi_wrap_count for diagnostics).
Cplx phi(const RootContext& ctx, Cplx x, Cplx y, long alpha, long beta, int n);

/// Same coefficient through the generating product: expand both Pochhammer
/// factors as polynomials in u and convolve. Independent evaluation path.
Cplx phi_via_product(const RootContext& ctx, Cplx x, Cplx y, long alpha, long beta, int n);

std::uint64_t phi_wrap_count();

/// Terminating basic hypergeometric sum
///   2Phi1(a,b;c;w,z) = sum_k (a;w)_k (b;w)_k / ((c;w)_k (w;w)_k) z^k.
/// The series must terminate within `terms` (a numerator factor vanishing);
/// otherwise the input is rejected.
Cplx hyp2phi1(const RootContext& ctx, Cplx a, Cplx b, Cplx c, Cplx z, int terms);

}  // namespace csos
