#pragma once

#include <map>
#include <tuple>

#include "csoslab/qarith.hpp"

namespace csos {

/// Face weight U^{(2,j)}(a,b,c,d) in the single ratio variable t = t_q/t_p.
/// Nonzero branches (differences as mod-N representatives):
///   (a,b,b,a)      1 - w^{1-j+a-b} t          0 <= a-b <= j-1
///   (a,b,b-1,a)   -w^{1-j} t (1 - w^{1+a-b})  0 <= a-b <= j-2
///   (a,b,b,a-1)    1 - w^{a-b-j}              1 <= a-b <= j-1
///   (a,b,b-1,a-1)  w^{1-j} (w^{a-b} - t)      0 <= a-b <= j-1
Cplx u2j(const RootContext& ctx, long a, long b, long c, long d, Cplx t, int j);

/// The asymmetric six-vertex matrix (ell = j = 2 block), literal 4x4 layout
///   [[a,0,0,0],[0,b,tc,0],[0,c,b/w,0],[0,0,0,a]]
/// with a = 1 - t/w, b = 1 - t, c = 1 - 1/w.  Row index encodes the pair
/// (a-d, d-c) and column index the pair (b-c, a-b) of the face weight; with
/// that dictionary the matrix entries are exactly u2j at j = 2.
Eigen::Matrix4cd u22(const RootContext& ctx, Cplx t);

/// General CSOS face weight U^{(ell,j)}(a,b,c,d) via the Phi-sum,
/// a polynomial in t of degree <= ell-1.
Cplx ulj(const RootContext& ctx, long a, long b, long c, long d, Cplx t, int ell, int j);

/// Face-weight table: polynomial coefficients in t, keyed by
/// (alpha = a-d, beta = b-c, delta = (d-b) mod N).
struct FaceWeightTable {
    int N = 0, ell = 0, j = 0;
    std::map<std::tuple<int, int, int>, Poly> weight;

    /// Entry for spins (a,b,c,d); exactly zero outside admissibility.
    Cplx eval(const RootContext& ctx, long a, long b, long c, long d, Cplx t) const;
    static FaceWeightTable build(const RootContext& ctx, int ell, int j);
};

/// Max absolute difference of the two sides of the face Yang-Baxter equation
///   sum_g U2_pp'r(a,g,e,f) U2_pp'q(b,c,g,a) U22_rq(c,d,e,g)
/// = sum_g U22_rq(b,g,f,a) U2_pp'q(g,d,e,f) U2_pp'r(b,c,d,g)
/// where the U2 faces take t_r resp. t_q and U22 takes t_q/t_r.
struct FaceYbResult {
    double residual = 0.0;
    double scale = 0.0;
};
FaceYbResult face_yang_baxter_check(const RootContext& ctx, int j, Cplx t_r, Cplx t_q);

}  // namespace csos
