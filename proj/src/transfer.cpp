#include "csoslab/transfer.hpp"

namespace csos {

namespace {
long mod(long k, long n) {
    long r = k % n;
    return r < 0 ? r + n : r;
}

/// out = m * (site operator built from f at `site`), exploiting that the site
/// operator only mixes one digit. Fixed summation order per entry.
Matrix right_apply_site(const EdgeBasis& basis, const Matrix& m, const Matrix& f, int site) {
    const long D = basis.dim();
    const int j = basis.j();
    Matrix out = Matrix::Zero(D, D);
    for (long col = 0; col < D; ++col) {
        int dcol = basis.digit(col, site);
        for (int dmid = 0; dmid < j; ++dmid) {
            Cplx fv = f(dcol, dmid);
            if (fv == Cplx(0, 0)) continue;
            long mid = basis.with_digit(col, site, dmid);
            out.col(col) += m.col(mid) * fv;
        }
    }
    return out;
}
}  // namespace

EdgeBasis::EdgeBasis(int L, int j, int N) : L_(L), j_(j), N_(N) {
    dim_ = 1;
    for (int i = 0; i < L; ++i) {
        dim_ *= j;
        if (dim_ > kDimCap) throw DimensionCapError("EdgeBasis: j^L exceeds the dimension cap");
    }
    stride_.resize(L);
    long s = 1;
    for (int i = L - 1; i >= 0; --i) {
        stride_[i] = s;
        s *= j;
    }
}

int EdgeBasis::digit(long state, int site) const {
    return static_cast<int>((state / stride_[site]) % j_);
}

long EdgeBasis::with_digit(long state, int site, int v) const {
    return state + (v - digit(state, site)) * stride_[site];
}

int EdgeBasis::charge(long state) const { return charge_total(state) % N_; }

int EdgeBasis::charge_total(long state) const {
    int c = 0;
    for (int i = 0; i < L_; ++i) c += digit(state, i);
    return c;
}

std::vector<long> EdgeBasis::charge_block(int c) const {
    std::vector<long> idx;
    for (long s = 0; s < dim_; ++s)
        if (charge(s) == mod(c, N_)) idx.push_back(s);
    return idx;
}

Matrix OperatorPoly::eval(const RootContext& ctx, Cplx t) const {
    Cplx u = in_minus_omega_t ? -ctx.omega() * t : t;
    Matrix acc = Matrix::Zero(coeffs.empty() ? 0 : coeffs[0].rows(),
                              coeffs.empty() ? 0 : coeffs[0].cols());
    Cplx pw(1, 0);
    for (const auto& c : coeffs) {
        acc += pw * c;
        pw *= u;
    }
    return acc;
}

std::array<std::array<Matrix, 2>, 2> site_faces2(const RootContext& ctx, int j, Cplx t) {
    const int N = ctx.N();
    std::array<std::array<Matrix, 2>, 2> F;
    for (int al = 0; al < 2; ++al)
        for (int ar = 0; ar < 2; ++ar) {
            Matrix f = Matrix::Zero(j, j);
            for (int nin = 0; nin < j; ++nin) {
                long a = nin, b = 0, d = a - al, c = b - ar;
                long nout = mod(d - c, N);
                if (nout >= j) continue;
                f(nout, nin) = u2j(ctx, a, b, c, d, t, j);
            }
            F[al][ar] = f;
        }
    return F;
}

Monodromy2 build_monodromy2(const RootContext& ctx, const EdgeBasis& basis, Cplx t) {
    const long D = basis.dim();
    auto F = site_faces2(ctx, basis.j(), t);
    std::array<std::array<Matrix, 2>, 2> cur;
    for (int al = 0; al < 2; ++al)
        for (int ar = 0; ar < 2; ++ar)
            cur[al][ar] = right_apply_site(basis, Matrix::Identity(D, D), F[al][ar], 0);
    for (int site = 1; site < basis.L(); ++site) {
        std::array<std::array<Matrix, 2>, 2> nxt;
        for (int al = 0; al < 2; ++al)
            for (int ar = 0; ar < 2; ++ar) {
                Matrix acc = Matrix::Zero(D, D);
                for (int m = 0; m < 2; ++m)
                    acc += right_apply_site(basis, cur[al][m], F[m][ar], site);
                nxt[al][ar] = acc;
            }
        cur = nxt;
    }
    return Monodromy2{cur[0][0], cur[0][1], cur[1][0], cur[1][1]};
}

MonodromyCoeffs extract_coefficients(const RootContext& ctx, const EdgeBasis& basis) {
    const int L = basis.L();
    const int n = L + 2;
    std::vector<Cplx> nodes(n);
    for (int s = 0; s < n; ++s) nodes[s] = std::polar(1.37, 2.0 * kPi * s / n);
    std::vector<Monodromy2> ms;
    ms.reserve(n);
    for (int s = 0; s < n; ++s) ms.push_back(build_monodromy2(ctx, basis, nodes[s]));
    Eigen::MatrixXcd V(n, n);
    for (int r = 0; r < n; ++r) {
        Cplx u = -ctx.omega() * nodes[r];
        Cplx pw(1, 0);
        for (int c = 0; c < n; ++c) {
            V(r, c) = pw;
            pw *= u;
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(V);
    if (std::abs(lu.determinant()) < 1e-12)
        throw std::runtime_error("extract_coefficients: interpolation nodes are degenerate");
    Eigen::MatrixXcd Vi = lu.inverse();
    MonodromyCoeffs out;
    auto fit = [&](auto getter, OperatorPoly& poly) {
        poly.in_minus_omega_t = true;
        poly.coeffs.assign(n, Matrix::Zero(basis.dim(), basis.dim()));
        for (int k = 0; k < n; ++k)
            for (int s = 0; s < n; ++s) poly.coeffs[k] += Vi(k, s) * getter(ms[s]);
    };
    fit([](const Monodromy2& m) -> const Matrix& { return m.A; }, out.A);
    fit([](const Monodromy2& m) -> const Matrix& { return m.B; }, out.B);
    fit([](const Monodromy2& m) -> const Matrix& { return m.C; }, out.C);
    fit([](const Monodromy2& m) -> const Matrix& { return m.D; }, out.D);
    return out;
}

Matrix tau2Q(const RootContext& ctx, const EdgeBasis& basis, Cplx t, int Q) {
    Monodromy2 m = build_monodromy2(ctx, basis, t);
    return m.A + ctx.omega_pow(-Q) * m.D;
}

Matrix tauLJQ(const RootContext& ctx, const EdgeBasis& basis, int ell, Cplx t, int Q) {
    const int N = ctx.N();
    const int j = basis.j();
    const long D = basis.dim();
    // l-dim auxiliary site faces from the general CSOS weights
    std::vector<std::vector<Matrix>> F(ell, std::vector<Matrix>(ell));
    for (int al = 0; al < ell; ++al)
        for (int ar = 0; ar < ell; ++ar) {
            Matrix f = Matrix::Zero(j, j);
            for (int nin = 0; nin < j; ++nin) {
                long a = nin, b = 0, d = a - al, c = b - ar;
                long nout = mod(d - c, N);
                if (nout >= j) continue;
                f(nout, nin) = ulj(ctx, a, b, c, d, t, ell, j);
            }
            F[al][ar] = f;
        }
    std::vector<std::vector<Matrix>> cur(ell, std::vector<Matrix>(ell));
    for (int al = 0; al < ell; ++al)
        for (int ar = 0; ar < ell; ++ar)
            cur[al][ar] = right_apply_site(basis, Matrix::Identity(D, D), F[al][ar], 0);
    for (int site = 1; site < basis.L(); ++site) {
        std::vector<std::vector<Matrix>> nxt(ell, std::vector<Matrix>(ell));
        for (int al = 0; al < ell; ++al)
            for (int ar = 0; ar < ell; ++ar) {
                Matrix acc = Matrix::Zero(D, D);
                for (int m = 0; m < ell; ++m)
                    acc += right_apply_site(basis, cur[al][m], F[m][ar], site);
                nxt[al][ar] = acc;
            }
        cur = nxt;
    }
    Matrix tau = Matrix::Zero(D, D);
    for (int al = 0; al < ell; ++al) tau += ctx.omega_pow(static_cast<long>(-Q) * al) * cur[al][al];
    return tau;
}

Matrix restrict_block(const Matrix& m, const std::vector<long>& idx) {
    Matrix out(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c) out(r, c) = m(idx[r], idx[c]);
    return out;
}

ScaledResidual monodromy_yang_baxter_check(const RootContext& ctx, const EdgeBasis& basis,
                                           Cplx t_r, Cplx t_q) {
    const int N = ctx.N();
    Monodromy2 mr = build_monodromy2(ctx, basis, t_r);
    Monodromy2 mq = build_monodromy2(ctx, basis, t_q);
    Cplx t22 = t_r / t_q;
    auto rhat = [&](int al, int ga, int alp, int gap) -> Cplx {
        // face weight with a-d = al, d-c = ga, a-b = alp, b-c = gap
        long a = alp, b = 0, d = a - al, c = b - gap;
        if (mod(d - c, N) != ga) return Cplx(0, 0);
        return u2j(ctx, a, b, c, d, t22, 2);
    };
    double res = 0.0, scale = 0.0;
    for (int i1 = 0; i1 < 2; ++i1)
        for (int i2 = 0; i2 < 2; ++i2)
            for (int j1 = 0; j1 < 2; ++j1)
                for (int j2 = 0; j2 < 2; ++j2) {
                    Matrix lhs = Matrix::Zero(basis.dim(), basis.dim());
                    Matrix rhs = Matrix::Zero(basis.dim(), basis.dim());
                    for (int k1 = 0; k1 < 2; ++k1)
                        for (int k2 = 0; k2 < 2; ++k2) {
                            Cplx rl = rhat(k1, k2, j1, j2);
                            if (rl != Cplx(0, 0))
                                lhs += (mq.entry(i2, k2) * mr.entry(i1, k1)) * rl;
                            Cplx rr = rhat(i1, i2, k1, k2);
                            if (rr != Cplx(0, 0))
                                rhs += rr * (mr.entry(k2, j2) * mq.entry(k1, j1));
                        }
                    res = std::max(res, max_abs(lhs - rhs));
                    scale = std::max({scale, max_abs(lhs), max_abs(rhs)});
                }
    ScaledResidual out;
    out.residual = res;
    out.scale = scale;
    out.vacuous = scale < 1e-14;
    return out;
}

SpinBasis::SpinBasis(int L, int N) : L_(L), N_(N) {
    dim_ = 1;
    for (int i = 0; i < L; ++i) {
        dim_ *= N;
        if (dim_ > kDimCap) throw DimensionCapError("SpinBasis: N^L exceeds the dimension cap");
    }
}

int SpinBasis::digit(long state, int site) const {
    long s = state;
    for (int i = L_ - 1; i > site; --i) s /= N_;
    return static_cast<int>(s % N_);
}

Matrix cp_transfer(const RootContext& ctx, const SpinBasis& basis, const RapidityPoint& p,
                   const RapidityPoint& pp, const RapidityPoint& q) {
    const long D = basis.dim();
    const int L = basis.L();
    Matrix T(D, D);
    for (long s = 0; s < D; ++s)
        for (long r = 0; r < D; ++r) {
            Cplx v(1, 0);
            for (int i = 0; i < L; ++i) {
                v *= weight_W(ctx, p, q, basis.digit(s, i) - basis.digit(r, i)) *
                     weight_Wbar(ctx, pp, q, basis.digit(s, (i + 1) % L) - basis.digit(r, i));
                if (v == Cplx(0, 0)) break;
            }
            T(s, r) = v;
        }
    return T;
}

Matrix cp_transfer_hat(const RootContext& ctx, const SpinBasis& basis, const RapidityPoint& p,
                       const RapidityPoint& pp, const RapidityPoint& qp) {
    const long D = basis.dim();
    const int L = basis.L();
    Matrix T(D, D);
    for (long r = 0; r < D; ++r)
        for (long s = 0; s < D; ++s) {
            Cplx v(1, 0);
            for (int i = 0; i < L; ++i) {
                v *= weight_Wbar(ctx, p, qp, basis.digit(r, i) - basis.digit(s, i)) *
                     weight_W(ctx, pp, qp, basis.digit(r, i) - basis.digit(s, (i + 1) % L));
                if (v == Cplx(0, 0)) break;
            }
            T(r, s) = v;
        }
    return T;
}

Matrix cp_tau_ell(const RootContext& ctx, const SpinBasis& basis, const RapidityPoint& p,
                  const RapidityPoint& pp, const RapidityPoint& q, int ell) {
    const long D = basis.dim();
    const int L = basis.L();
    Matrix T(D, D);
    for (long s = 0; s < D; ++s)
        for (long r = 0; r < D; ++r) {
            Cplx v(1, 0);
            for (int i = 0; i < L; ++i) {
                v *= u_ell_block_eta(ctx, p, pp, q, ell, basis.digit(s, i),
                                     basis.digit(s, (i + 1) % L), basis.digit(r, (i + 1) % L),
                                     basis.digit(r, i));
                if (v == Cplx(0, 0)) break;
            }
            T(s, r) = v;
        }
    return T;
}

Matrix spin_shift(const SpinBasis& basis, int ell) {
    const long D = basis.dim();
    const int L = basis.L();
    Matrix X = Matrix::Zero(D, D);
    for (long s = 0; s < D; ++s) {
        long t = 0;
        for (int i = 0; i < L; ++i)
            t = t * basis.N() + (basis.digit(s, i) + ell) % basis.N();
        X(t, s) = 1.0;
    }
    return X;
}

}  // namespace csos
