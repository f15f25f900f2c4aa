#include "csoslab/faces.hpp"

namespace csos {

namespace {
long mod(long k, long n) {
    long r = k % n;
    return r < 0 ? r + n : r;
}
}  // namespace

Cplx u2j(const RootContext& ctx, long a, long b, long c, long d, Cplx t, int j) {
    const int N = ctx.N();
    long ab = mod(a - b, N), dc = mod(d - c, N), ad = mod(a - d, N), bc = mod(b - c, N);
    if (ad == 0 && bc == 0) {
        if (ab <= j - 1 && dc == ab) return Cplx(1, 0) - ctx.omega_pow(1 - j + ab) * t;
        return Cplx(0, 0);
    }
    if (ad == 0 && bc == 1) {
        if (ab <= j - 2 && dc == mod(ab + 1, N))
            return -ctx.omega_pow(1 - j) * t * (Cplx(1, 0) - ctx.omega_pow(1 + ab));
        return Cplx(0, 0);
    }
    if (ad == 1 && bc == 0) {
        if (ab >= 1 && ab <= j - 1 && dc == mod(ab - 1, N))
            return Cplx(1, 0) - ctx.omega_pow(ab - j);
        return Cplx(0, 0);
    }
    if (ad == 1 && bc == 1) {
        if (ab <= j - 1 && dc == ab)
            return ctx.omega_pow(1 - j) * (ctx.omega_pow(ab) - t);
        return Cplx(0, 0);
    }
    return Cplx(0, 0);
}

Eigen::Matrix4cd u22(const RootContext& ctx, Cplx t) {
    Cplx wi = ctx.omega_pow(-1);
    Cplx a = Cplx(1, 0) - wi * t;
    Cplx b = Cplx(1, 0) - t;
    Cplx c = Cplx(1, 0) - wi;
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = a;
    m(1, 1) = b;
    m(1, 2) = t * c;
    m(2, 1) = c;
    m(2, 2) = b * wi;
    m(3, 3) = a;
    return m;
}

Cplx ulj(const RootContext& ctx, long a, long b, long c, long d, Cplx t, int ell, int j) {
    const int N = ctx.N();
    long alpha = mod(a - d, N), beta = mod(b - c, N);
    long ab = mod(a - b, N), dc = mod(d - c, N);
    if (alpha > ell - 1 || beta > ell - 1) return Cplx(0, 0);
    if (ab > j - 1 || dc > j - 1) return Cplx(0, 0);
    Cplx acc(0, 0);
    for (int m = 0; m < ell; ++m)
        acc += ctx.omega_pow(mod(d - b - j, N) * static_cast<long>(m)) *
               phi(ctx, Cplx(1, 0), ctx.omega_pow(alpha) * t, alpha, ell - alpha - 1, m) *
               phi(ctx, Cplx(1, 0), ctx.omega_pow(m - j) * t, m, ell - 1 - m, beta);
    return acc;
}

Cplx FaceWeightTable::eval(const RootContext& ctx, long a, long b, long c, long d, Cplx t) const {
    long alpha = mod(a - d, N), beta = mod(b - c, N), delta = mod(d - b, N);
    auto it = weight.find({static_cast<int>(alpha), static_cast<int>(beta), static_cast<int>(delta)});
    if (it == weight.end()) return Cplx(0, 0);
    (void)ctx;
    return poly_eval(it->second, t);
}

FaceWeightTable FaceWeightTable::build(const RootContext& ctx, int ell, int j) {
    FaceWeightTable tab;
    tab.N = ctx.N();
    tab.ell = ell;
    tab.j = j;
    const int N = ctx.N();
    // interpolate each admissible entry as a polynomial of degree <= ell-1
    std::vector<Cplx> nodes(ell);
    for (int s = 0; s < ell; ++s) nodes[s] = std::polar(1.19, 2.0 * kPi * s / ell + 0.37);
    Eigen::MatrixXcd V(ell, ell);
    for (int r = 0; r < ell; ++r)
        for (int cpow = 0; cpow < ell; ++cpow) V(r, cpow) = std::pow(nodes[r], cpow);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(V);
    for (int alpha = 0; alpha < ell; ++alpha)
        for (int beta = 0; beta < ell; ++beta)
            for (long ab = 0; ab <= j - 1; ++ab) {
                // spins a = ab, b = 0, d = a-alpha, c = -beta; admissibility of dc checked inside ulj
                long a = ab, b = 0, d = a - alpha, c = b - beta;
                if (mod(d - c, N) > j - 1) continue;
                Eigen::VectorXcd vals(ell);
                bool nonzero = false;
                for (int s = 0; s < ell; ++s) {
                    vals(s) = ulj(ctx, a, b, c, d, nodes[s], ell, j);
                    if (std::abs(vals(s)) > 0) nonzero = true;
                }
                if (!nonzero) continue;
                Eigen::VectorXcd coef = lu.solve(vals);
                Poly p(ell);
                for (int i = 0; i < ell; ++i) p[i] = coef(i);
                int delta = static_cast<int>(mod(d - b, N));
                tab.weight[{alpha, beta, delta}] = std::move(p);
            }
    return tab;
}

FaceYbResult face_yang_baxter_check(const RootContext& ctx, int j, Cplx t_r, Cplx t_q) {
    const int N = ctx.N();
    Cplx t22 = t_q / t_r;
    FaceYbResult out;
    // spin a is fixed to 0: the weights depend on differences only
    const long a = 0;
    for (long b = 0; b < N; ++b)
        for (long c = 0; c < N; ++c)
            for (long d = 0; d < N; ++d)
                for (long e = 0; e < N; ++e)
                    for (long f = 0; f < N; ++f) {
                        Cplx lhs(0, 0), rhs(0, 0);
                        for (long g = 0; g < N; ++g) {
                            lhs += u2j(ctx, a, g, e, f, t_r, j) * u2j(ctx, b, c, g, a, t_q, j) *
                                   u2j(ctx, c, d, e, g, t22, 2);
                            rhs += u2j(ctx, b, g, f, a, t22, 2) * u2j(ctx, g, d, e, f, t_q, j) *
                                   u2j(ctx, b, c, d, g, t_r, j);
                        }
                        out.residual = std::max(out.residual, std::abs(lhs - rhs));
                        out.scale = std::max({out.scale, std::abs(lhs), std::abs(rhs)});
                    }
    return out;
}

}  // namespace csos
