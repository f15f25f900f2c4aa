#pragma once

#include <array>

#include "csoslab/curve.hpp"
#include "csoslab/faces.hpp"

namespace csos {

/// Edge-variable state space: tuples (n_1..n_L), n_i in [0, j-1], ordered
/// lexicographically (n_1 most significant). charge = sum n_i mod N.
class EdgeBasis {
public:
    EdgeBasis(int L, int j, int N);

    int L() const { return L_; }
    int j() const { return j_; }
    int N() const { return N_; }
    long dim() const { return dim_; }

    int digit(long state, int site) const;       // n_site of a state index
    long with_digit(long state, int site, int v) const;
    int charge(long state) const;                // sum n_i mod N
    int charge_total(long state) const;          // sum n_i (no mod)
    std::vector<long> charge_block(int c) const; // indices with charge == c

    static constexpr long kDimCap = 4096;

private:
    int L_, j_, N_;
    long dim_;
    std::vector<long> stride_;
};

/// Operator-valued polynomial: coeffs[n] multiplies u^n where u = -w*t
/// (in_minus_omega_t = true) or u = t.
struct OperatorPoly {
    std::vector<Matrix> coeffs;
    bool in_minus_omega_t = true;
    Matrix eval(const RootContext& ctx, Cplx t) const;
};

/// 2x2-auxiliary monodromy at fixed t, entries acting on the edge space:
/// [[A,B],[C,D]]. Row/column = left/right vertical spin difference.
struct Monodromy2 {
    Matrix A, B, C, D;
    const Matrix& entry(int r, int c) const {
        return r == 0 ? (c == 0 ? A : B) : (c == 0 ? C : D);
    }
};

/// Coefficient form: the monodromy as operator polynomials in u = -w*t.
struct MonodromyCoeffs {
    OperatorPoly A, B, C, D;
};

/// The j x j single-site face operators of the 2-dim auxiliary channel,
/// F[left][right] with matrix convention F[n_out, n_in].
std::array<std::array<Matrix, 2>, 2> site_faces2(const RootContext& ctx, int j, Cplx t);

/// Ordered product of site faces over sites 1..L.
Monodromy2 build_monodromy2(const RootContext& ctx, const EdgeBasis& basis, Cplx t);

/// Interpolate the monodromy at L+2 nodes (radius 1.37 circle) into
/// coefficient form; entries are degree <= L in u = -w*t, B_0 = C_L = 0.
MonodromyCoeffs extract_coefficients(const RootContext& ctx, const EdgeBasis& basis);

/// Sector transfer operator A(t) + w^{-Q} D(t).
Matrix tau2Q(const RootContext& ctx, const EdgeBasis& basis, Cplx t, int Q);

/// CSOS transfer operator for auxiliary dimension ell:
/// sum_alpha w^{-Q alpha} [l-dim monodromy](alpha,alpha) built from ulj faces.
Matrix tauLJQ(const RootContext& ctx, const EdgeBasis& basis, int ell, Cplx t, int Q);

/// Restriction of an edge-space operator to a charge block.
Matrix restrict_block(const Matrix& m, const std::vector<long>& idx);

/// Monodromy-level Yang-Baxter residual:
/// || [U(t_r) x U(t_q)] R - R [U(t_q) x U(t_r)] || with the 4x4 intertwiner R
/// assembled from the ell=j=2 face weights at t_r/t_q.  The aux-pair product
/// entry is the q-row operator times the r-row operator (q acts after r), and
/// R[(α,γ),(α',γ')] is the face weight with a-d = α, d-c = γ, a-b = α', b-c = γ'.
ScaledResidual monodromy_yang_baxter_check(const RootContext& ctx, const EdgeBasis& basis,
                                           Cplx t_r, Cplx t_q);

/// Spin state space (sigma_1..sigma_L) in Z_N^L for the chiral Potts matrices.
class SpinBasis {
public:
    SpinBasis(int L, int N);
    int L() const { return L_; }
    int N() const { return N_; }
    long dim() const { return dim_; }
    int digit(long state, int site) const;

    static constexpr long kDimCap = 1000;

private:
    int L_, N_;
    long dim_;
};

/// Row-to-row chiral Potts transfer matrices (cyclic boundary):
///   T_q[s,r]     = prod_i W_pq(s_i - r_i) Wbar_p'q(s_{i+1} - r_i)
///   That_q'[r,s] = prod_i Wbar_pq'(r_i - s_i) W_p'q'(r_i - s_{i+1})
Matrix cp_transfer(const RootContext& ctx, const SpinBasis& basis, const RapidityPoint& p,
                   const RapidityPoint& pp, const RapidityPoint& q);
Matrix cp_transfer_hat(const RootContext& ctx, const SpinBasis& basis, const RapidityPoint& p,
                       const RapidityPoint& pp, const RapidityPoint& qp);

/// tau_ell on the spin basis, built from the U^{(ell)} blocks of the square.
Matrix cp_tau_ell(const RootContext& ctx, const SpinBasis& basis, const RapidityPoint& p,
                  const RapidityPoint& pp, const RapidityPoint& q, int ell);

/// Global spin shift: X |s_1..s_L> = |s_1+ell .. s_L+ell>.
Matrix spin_shift(const SpinBasis& basis, int ell);

}  // namespace csos
