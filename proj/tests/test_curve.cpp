#include "doctest.h"

#include "csoslab/curve.hpp"

using namespace csos;

namespace {
RapidityPoint rand_point(const RootContext& ctx, const CurveModuli& mod, CounterRng& rng) {
    return make_point(ctx, mod, rng.complex_point(1.4), static_cast<int>(rng.uniform(0, ctx.N())),
                      static_cast<int>(rng.uniform(0, ctx.N())));
}
}

TEST_CASE("make_point solves the curve relations") {
    RootContext ctx(3);
    CurveModuli mod{Cplx(0.8, 0), Cplx(0.6, 0)};
    CHECK(mod.constraint_residual() < 1e-12);
    RapidityPoint p = make_point(ctx, mod, Cplx(1, 0));
    // y^3 = (1-0.6)/0.8 = 0.5
    CHECK(std::abs(p.y * p.y * p.y - Cplx(0.5, 0)) < 1e-14);
    CHECK(p.residual_x(ctx) < 1e-11);
    CHECK(p.residual_y(ctx) < 1e-11);
    CHECK(p.residual_t(ctx) < 1e-10);
    RapidityPoint p1 = make_point(ctx, mod, Cplx(1, 0), 0, 1);
    CHECK(std::abs(p1.y - ctx.omega() * p.y) < 1e-14);
    CHECK(p1.residual_y(ctx) < 1e-11);
}

TEST_CASE("related_point") {
    RootContext ctx(3);
    CurveModuli mod{Cplx(0.8, 0), Cplx(0.6, 0)};
    CounterRng rng(3, "curve.related");
    for (int rep = 0; rep < 20; ++rep) {
        RapidityPoint p = rand_point(ctx, mod, rng);
        int l = 1 + static_cast<int>(rng.uniform(0, 2));
        RapidityPoint r = related_point(ctx, p, l);
        CHECK(std::abs(r.mu - Cplx(1, 0) / p.mu) < 1e-14);
        CHECK(r.residual_x(ctx) < 1e-10);
        CHECK(r.residual_y(ctx) < 1e-10);
        CHECK(r.residual_t(ctx) < 1e-10);
        // twice with shifts l then N-l returns t multiplied by w^N = 1
        RapidityPoint rr = related_point(ctx, r, ctx.N() - l);
        CHECK(std::abs(rr.t - p.t) < 1e-12 * (1 + std::abs(p.t)));
    }
}

TEST_CASE("weights") {
    RootContext ctx(3);
    CurveModuli mod{Cplx(0.8, 0), Cplx(0.6, 0)};
    CounterRng rng(7, "curve.weights");
    RapidityPoint p = rand_point(ctx, mod, rng);
    RapidityPoint q = rand_point(ctx, mod, rng);
    CHECK(std::abs(weight_W(ctx, p, q, 0) - Cplx(1, 0)) == 0.0);
    CHECK(std::abs(weight_Wbar(ctx, p, q, 0) - Cplx(1, 0)) == 0.0);
    for (long n = 0; n < 3; ++n) {
        CHECK(std::abs(weight_W(ctx, p, q, n) - weight_W(ctx, p, q, n + 3)) < 1e-10);
        CHECK(std::abs(weight_W(ctx, p, p, n) - Cplx(1, 0)) < 1e-12);
        CHECK(std::abs(weight_Wbar(ctx, p, q, n) - weight_Wbar(ctx, p, q, n + 3)) < 1e-10);
    }
}

TEST_CASE("square triangularity and factorization") {
    for (int N : {3, 4}) {
        RootContext ctx(N);
        CounterRng rng(13, "curve.square.N" + std::to_string(N));
        for (int rep = 0; rep < 8; ++rep) {
            double kp = rng.uniform(0.2, 0.9);
            CurveModuli mod{std::sqrt(Cplx(1 - kp * kp, 0)), Cplx(kp, 0)};
            RapidityPoint p = rand_point(ctx, mod, rng);
            RapidityPoint pp = rand_point(ctx, mod, rng);
            RapidityPoint q = rand_point(ctx, mod, rng);
            for (int l = 1; l <= N - 1; ++l) {
                RapidityPoint qp = related_point(ctx, q, l);
                BlockFactors f = block_factors(ctx, p, pp, q, l);
                for (long a = 0; a < N; ++a)
                    for (long b = 0; b < N; ++b)
                        for (long c = 0; c < N; ++c)
                            for (long d = 0; d < N; ++d) {
                                long al = ((a - d) % N + N) % N;
                                long be = ((b - c) % N + N) % N;
                                Cplx sq = star_square(ctx, p, pp, q, qp, a, b, c, d);
                                if (al <= l - 1 && be >= l) {
                                    CHECK(std::abs(sq) < 1e-9);
                                    continue;
                                }
                                if (al <= l - 1 && be <= l - 1) {
                                    Cplx u4a = u_ell_block(ctx, p, pp, q, l, a, b, c, d);
                                    Cplx u4b = u_ell_block_eta(ctx, p, pp, q, l, a, b, c, d);
                                    CHECK(std::abs(u4a - u4b) < 1e-10 * (1 + std::abs(u4a)));
                                    Cplx pre(1, 0);
                                    long e = al - be;
                                    if (e >= 0)
                                        for (long i = 0; i < e; ++i) pre *= q.y / q.mu;
                                    else
                                        for (long i = 0; i < -e; ++i) pre /= q.y / q.mu;
                                    Cplx rhs = f.A * pre * u4a;
                                    CHECK(std::abs(sq - rhs) < 1e-9 * (1 + std::abs(sq) + std::abs(rhs)));
                                }
                                if (al >= l && be >= l) {
                                    Cplx pre(1, 0);
                                    long e = be - al;
                                    if (e >= 0)
                                        for (long i = 0; i < e; ++i) pre *= q.x * q.mu;
                                    else
                                        for (long i = 0; i < -e; ++i) pre /= q.x * q.mu;
                                    Cplx rhs = f.Ahat * pre *
                                               ctx.omega_pow(l * (((d - c) % N + N) % N)) *
                                               u_lower_block(ctx, p, pp, qp, l, a, b, c, d);
                                    CHECK(std::abs(sq - rhs) < 1e-9 * (1 + std::abs(sq) + std::abs(rhs)));
                                }
                            }
            }
        }
    }
}

TEST_CASE("generic square has all blocks populated") {
    RootContext ctx(3);
    CurveModuli mod{Cplx(0.8, 0), Cplx(0.6, 0)};
    CounterRng rng(17, "curve.generic");
    RapidityPoint p = rand_point(ctx, mod, rng);
    RapidityPoint pp = rand_point(ctx, mod, rng);
    RapidityPoint q = rand_point(ctx, mod, rng);
    RapidityPoint qp = rand_point(ctx, mod, rng);  // unrelated
    double smallest = 1e300;
    for (long a = 0; a < 3; ++a)
        for (long b = 0; b < 3; ++b)
            smallest = std::min(smallest, std::abs(star_square(ctx, p, pp, q, qp, a, b, 0, 0)));
    CHECK(smallest > 1e-8);
}

TEST_CASE("block factor edge cases") {
    RootContext ctx(3);
    CurveModuli mod{Cplx(0.8, 0), Cplx(0.6, 0)};
    CounterRng rng(19, "curve.blockedge");
    RapidityPoint p = rand_point(ctx, mod, rng);
    RapidityPoint q = rand_point(ctx, mod, rng);
    // Omega vanishes when y_q = y_p'
    RapidityPoint pp = rand_point(ctx, mod, rng);
    BlockFactors f = block_factors(ctx, p, pp, q, 2);
    CHECK(std::abs(f.Omega) > 0);
    // restricted A_pq at l = N: empty Pochhammer factor = 1
    BlockFactors r = block_factors_restricted(ctx, p, q, ctx.N(), 2);
    Cplx bracket = 3.0 * (Cplx(1, 0) - ctx.omega_pow(-2) * q.y / p.x) * (Cplx(1, 0) - q.x / p.y) /
                   ((Cplx(1, 0) - std::pow(q.y, 3) / std::pow(p.x, 3)) *
                    (Cplx(1, 0) - std::pow(q.x, 3) / std::pow(p.y, 3)));
    CHECK(std::abs(r.A - bracket) < 1e-12 * (1 + std::abs(bracket)));
}
