#pragma once

#include "csoslab/qarith.hpp"

namespace csos {

/// Moduli (k, k') with k^2 + k'^2 = 1.
struct CurveModuli {
    Cplx k;
    Cplx kprime;
    double constraint_residual() const {
        return std::abs(k * k + kprime * kprime - Cplx(1, 0));
    }
};

/// A point (x, y, mu) on the rapidity curve
///   k y^N = 1 - k' mu^N,   k x^N = 1 - k'/mu^N,
/// with t = x y, lambda = mu^N.  N-th roots are taken as principal root times
/// omega^branch; the branch indices are explicit and never inferred.
struct RapidityPoint {
    Cplx x, y, mu;
    Cplx lambda;  // mu^N
    Cplx t;       // x*y
    CurveModuli moduli;
    int branch_x = 0, branch_y = 0;

    double residual_y(const RootContext& ctx) const;
    double residual_x(const RootContext& ctx) const;
    double residual_t(const RootContext& ctx) const;
};

/// Solve the curve relations for (x, y) given mu and the requested branches.
RapidityPoint make_point(const RootContext& ctx, const CurveModuli& moduli, Cplx mu,
                         int branch_x = 0, int branch_y = 0);

/// The shifted partner (y_p, omega^ell x_p, 1/mu_p).
RapidityPoint related_point(const RootContext& ctx, const RapidityPoint& p, int ell);

/// Chiral Potts weights, n reduced mod N:
///   W_pq(n)    = (mu_p/mu_q)^n prod_{m=1}^{n} (y_q - x_p w^m)/(y_p - x_q w^m)
///   Wbar_pq(n) = (mu_p mu_q)^n prod_{m=1}^{n} (w x_p - x_q w^m)/(y_q - y_p w^m)
Cplx weight_W(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& q, long n);
Cplx weight_Wbar(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& q, long n);

/// Square (star) weight: sum over the central spin e of
/// W_pq(a-e) Wbar_pq'(e-d) Wbar_p'q(b-e) W_p'q'(e-c).
Cplx star_square(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& pp,
                 const RapidityPoint& q, const RapidityPoint& qp, long a, long b, long c, long d);

/// Scalar factors of the block decomposition (general vertical rapidities).
struct BlockFactors {
    Cplx A;      // upper-block factor
    Cplx Ahat;   // lower-block factor
    Cplx Omega;  // shared prefactor
};
BlockFactors block_factors(const RootContext& ctx, const RapidityPoint& p,
                           const RapidityPoint& pp, const RapidityPoint& q, int ell);

/// Restricted factors when p' = related_point(p, j).
BlockFactors block_factors_restricted(const RootContext& ctx, const RapidityPoint& p,
                                      const RapidityPoint& q, int ell, int j);

/// F_pq(ell, alpha, m) = (mu_p/y_p)^alpha x_p^m Phi(1, w^alpha t_q/t_p)_m^{alpha, ell-alpha-1}.
Cplx curve_F(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& q,
             int ell, long alpha, int m);

/// eta_{q,ell,m} = (w^ell t_q)^m (w^{1+m}; w)_{N-ell}.
Cplx eta_factor(const RootContext& ctx, const RapidityPoint& q, int ell, int m);

/// Upper diagonal block U^{(ell)}_{pp'q}(a,b,c,d), two evaluation paths that
/// must agree: the F-product form and the eta-ratio form.
Cplx u_ell_block(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& pp,
                 const RapidityPoint& q, int ell, long a, long b, long c, long d);
Cplx u_ell_block_eta(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& pp,
                     const RapidityPoint& q, int ell, long a, long b, long c, long d);

/// Lower diagonal block in the form entering the factorization
///   star = Ahat (x_q mu_q)^{beta-alpha} w^{ell(d-c)} * [this],
/// the sum over m of w^{(d-b+ell)m} F_{p'q'} F_{pq'} eta_{alpha-ell}/eta_m at
/// the shifted point q' = related_point(q, ell).  Per face it differs from
/// u_ell_block_eta at q' by an eta ratio that telescopes in cyclic products.
Cplx u_lower_block(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& pp,
                   const RapidityPoint& qp, int ell, long a, long b, long c, long d);

}  // namespace csos
