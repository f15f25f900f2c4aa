#include "csoslab/curve.hpp"

#include <cmath>

namespace csos {

namespace {
long mod(long k, long n) {
    long r = k % n;
    return r < 0 ? r + n : r;
}

Cplx principal_root(Cplx v, int N) { return std::pow(v, 1.0 / N); }

Cplx ipow(Cplx base, long n) {
    Cplx acc(1, 0);
    if (n >= 0) {
        for (long i = 0; i < n; ++i) acc *= base;
    } else {
        for (long i = 0; i < -n; ++i) acc /= base;
    }
    return acc;
}
}  // namespace

double RapidityPoint::residual_y(const RootContext& ctx) const {
    return std::abs(moduli.k * ipow(y, ctx.N()) - (Cplx(1, 0) - moduli.kprime * lambda));
}
double RapidityPoint::residual_x(const RootContext& ctx) const {
    return std::abs(moduli.k * ipow(x, ctx.N()) - (Cplx(1, 0) - moduli.kprime / lambda));
}
double RapidityPoint::residual_t(const RootContext& ctx) const {
    Cplx kk = moduli.k * moduli.k;
    Cplx kp = moduli.kprime;
    return std::abs(kk * ipow(t, ctx.N()) -
                    (Cplx(1, 0) + kp * kp - kp * (lambda + Cplx(1, 0) / lambda)));
}

RapidityPoint make_point(const RootContext& ctx, const CurveModuli& moduli, Cplx mu,
                         int branch_x, int branch_y) {
    const int N = ctx.N();
    if (std::abs(moduli.k) == 0.0) throw std::invalid_argument("make_point: k must be nonzero");
    if (std::abs(mu) == 0.0) throw std::invalid_argument("make_point: mu must be nonzero");
    Cplx lambda = ipow(mu, N);
    Cplx yN = (Cplx(1, 0) - moduli.kprime * lambda) / moduli.k;
    Cplx xN = (Cplx(1, 0) - moduli.kprime / lambda) / moduli.k;
    if (std::abs(yN) < 1e-14 || std::abs(xN) < 1e-14)
        throw PoleError("make_point: curve branch point (1 - k' mu^{+-N} = 0)");
    RapidityPoint p;
    p.moduli = moduli;
    p.mu = mu;
    p.lambda = lambda;
    p.branch_x = mod(branch_x, N);
    p.branch_y = mod(branch_y, N);
    p.y = principal_root(yN, N) * ctx.omega_pow(p.branch_y);
    p.x = principal_root(xN, N) * ctx.omega_pow(p.branch_x);
    p.t = p.x * p.y;
    return p;
}

RapidityPoint related_point(const RootContext& ctx, const RapidityPoint& p, int ell) {
    RapidityPoint r;
    r.moduli = p.moduli;
    r.x = p.y;
    r.y = ctx.omega_pow(ell) * p.x;
    r.mu = Cplx(1, 0) / p.mu;
    r.lambda = Cplx(1, 0) / p.lambda;
    r.t = r.x * r.y;
    // branch indices recomputed from the principal roots of the new relations
    Cplx xN = (Cplx(1, 0) - r.moduli.kprime / r.lambda) / r.moduli.k;
    Cplx yN = (Cplx(1, 0) - r.moduli.kprime * r.lambda) / r.moduli.k;
    auto branch_of = [&](Cplx v, Cplx vN) {
        Cplx ratio = v / principal_root(vN, ctx.N());
        double ang = std::arg(ratio) * ctx.N() / (2.0 * kPi);
        return static_cast<int>(mod(std::lround(ang), ctx.N()));
    };
    r.branch_x = branch_of(r.x, xN);
    r.branch_y = branch_of(r.y, yN);
    return r;
}

Cplx weight_W(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& q, long n) {
    n = mod(n, ctx.N());
    Cplx v = ipow(p.mu / q.mu, n);
    for (long m = 1; m <= n; ++m) {
        Cplx den = p.y - q.x * ctx.omega_pow(m);
        if (std::abs(den) < 1e-14) throw PoleError("weight_W: pole y_p - x_q w^m = 0");
        v *= (q.y - p.x * ctx.omega_pow(m)) / den;
    }
    return v;
}

Cplx weight_Wbar(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& q, long n) {
    n = mod(n, ctx.N());
    Cplx v = ipow(p.mu * q.mu, n);
    for (long m = 1; m <= n; ++m) {
        Cplx den = q.y - p.y * ctx.omega_pow(m);
        if (std::abs(den) < 1e-14) throw PoleError("weight_Wbar: pole y_q - y_p w^m = 0");
        v *= (ctx.omega() * p.x - q.x * ctx.omega_pow(m)) / den;
    }
    return v;
}

Cplx star_square(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& pp,
                 const RapidityPoint& q, const RapidityPoint& qp, long a, long b, long c, long d) {
    Cplx acc(0, 0);
    for (long e = 0; e < ctx.N(); ++e)
        acc += weight_W(ctx, p, q, a - e) * weight_Wbar(ctx, p, qp, e - d) *
               weight_Wbar(ctx, pp, q, b - e) * weight_W(ctx, pp, qp, e - c);
    return acc;
}

BlockFactors block_factors(const RootContext& ctx, const RapidityPoint& p,
                           const RapidityPoint& pp, const RapidityPoint& q, int ell) {
    const int N = ctx.N();
    BlockFactors f;
    Cplx d1 = (Cplx(1, 0) - ipow(q.y, N) / ipow(pp.y, N)) * pochhammer(ctx, ctx.omega() * q.x / p.y, ell - 1);
    if (std::abs(d1) < 1e-14) throw PoleError("block_factors: Omega denominator vanishes");
    f.Omega = (Cplx(1, 0) - q.y / pp.y) * pochhammer(ctx, q.x / pp.x, ell) / d1;
    Cplx d2 = Cplx(1, 0) - ipow(q.x, N) / ipow(pp.x, N);
    if (std::abs(d2) < 1e-14) throw PoleError("block_factors: A denominator vanishes");
    f.A = static_cast<double>(N) * f.Omega * pochhammer(ctx, ctx.omega_pow(ell) * q.t / pp.t, N - ell) / d2;
    Cplx d3 = Cplx(1, 0) - ipow(q.x, N) / ipow(p.y, N);
    if (std::abs(d3) < 1e-14) throw PoleError("block_factors: Ahat denominator vanishes");
    f.Ahat = ipow(ctx.omega() * p.mu * pp.mu * p.x * pp.x / (p.y * pp.y), ell) *
             static_cast<double>(N) * f.Omega * pochhammer(ctx, q.t / p.t, ell) / d3;
    return f;
}

BlockFactors block_factors_restricted(const RootContext& ctx, const RapidityPoint& p,
                                      const RapidityPoint& q, int ell, int j) {
    const int N = ctx.N();
    BlockFactors f;
    Cplx dy = Cplx(1, 0) - ipow(q.y, N) / ipow(p.x, N);
    Cplx dx = Cplx(1, 0) - ipow(q.x, N) / ipow(p.y, N);
    if (std::abs(dy) < 1e-14 || std::abs(dx) < 1e-14)
        throw PoleError("block_factors_restricted: denominator vanishes");
    f.Omega = (Cplx(1, 0) - ctx.omega_pow(-j) * q.y / p.x) * (Cplx(1, 0) - q.x / p.y) / dy;
    Cplx bracket = static_cast<double>(N) * (Cplx(1, 0) - ctx.omega_pow(-j) * q.y / p.x) *
                   (Cplx(1, 0) - q.x / p.y) / (dy * dx);
    f.A = pochhammer(ctx, ctx.omega_pow(ell - j) * q.t / p.t, N - ell) * bracket;
    f.Ahat = ctx.omega_pow(static_cast<long>(1 - j) * ell) * pochhammer(ctx, q.t / p.t, ell) * bracket;
    return f;
}

Cplx curve_F(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& q,
             int ell, long alpha, int m) {
    return ipow(p.mu / p.y, alpha) * ipow(p.x, m) *
           phi(ctx, Cplx(1, 0), ctx.omega_pow(alpha) * q.t / p.t, alpha, ell - alpha - 1, m);
}

Cplx eta_factor(const RootContext& ctx, const RapidityPoint& q, int ell, int m) {
    return ipow(ctx.omega_pow(ell) * q.t, m) * pochhammer(ctx, ctx.omega_pow(1 + m), ctx.N() - ell);
}

Cplx u_ell_block(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& pp,
                 const RapidityPoint& q, int ell, long a, long b, long c, long d) {
    const int N = ctx.N();
    long alpha = mod(a - d, N), beta = mod(b - c, N);
    if (alpha > ell - 1 || beta > ell - 1) return Cplx(0, 0);
    Cplx acc(0, 0);
    for (int m = 0; m < ell; ++m)
        acc += ctx.omega_pow(mod(d - b, N) * static_cast<long>(m)) * ipow(pp.mu, beta - m) *
               curve_F(ctx, p, q, ell, alpha, m) * curve_F(ctx, pp, q, ell, m, beta);
    return acc;
}

Cplx u_ell_block_eta(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& pp,
                     const RapidityPoint& q, int ell, long a, long b, long c, long d) {
    const int N = ctx.N();
    long alpha = mod(a - d, N), beta = mod(b - c, N);
    if (alpha > ell - 1 || beta > ell - 1) return Cplx(0, 0);
    Cplx acc(0, 0);
    for (int m = 0; m < ell; ++m)
        acc += ctx.omega_pow(mod(d - b, N) * static_cast<long>(m)) *
               curve_F(ctx, p, q, ell, alpha, m) * curve_F(ctx, pp, q, ell, beta, m) *
               eta_factor(ctx, q, ell, static_cast<int>(beta)) / eta_factor(ctx, q, ell, m);
    return acc;
}

Cplx u_lower_block(const RootContext& ctx, const RapidityPoint& p, const RapidityPoint& pp,
                   const RapidityPoint& qp, int ell, long a, long b, long c, long d) {
    const int N = ctx.N();
    long alpha = mod(a - d, N), beta = mod(b - c, N);
    if (alpha < ell || beta < ell) return Cplx(0, 0);
    Cplx acc(0, 0);
    for (int m = 0; m < N - ell; ++m)
        acc += ctx.omega_pow(mod(d - b + ell, N) * static_cast<long>(m)) *
               curve_F(ctx, pp, qp, N - ell, beta - ell, m) *
               curve_F(ctx, p, qp, N - ell, alpha - ell, m) *
               eta_factor(ctx, qp, N - ell, static_cast<int>(alpha - ell)) /
               eta_factor(ctx, qp, N - ell, m);
    return acc;
}

}  // namespace csos
