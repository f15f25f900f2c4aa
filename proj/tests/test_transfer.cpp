#include "doctest.h"

#include "csoslab/transfer.hpp"

using namespace csos;

TEST_CASE("edge basis") {
    EdgeBasis b(3, 2, 3);
    CHECK(b.dim() == 8);
    CHECK(b.digit(0b101, 0) == 1);
    CHECK(b.charge(7) == 0);  // (1,1,1): 3 mod 3
    CHECK(b.charge_block(0).size() == 2);
    EdgeBasis b6(6, 2, 3);
    CHECK(b6.charge_block(0).size() == 22);
    CHECK_THROWS_AS(EdgeBasis(13, 2, 3), DimensionCapError);
}

TEST_CASE("monodromy structure at L=1") {
    RootContext ctx(3);
    int j = 2;
    EdgeBasis basis(1, j, 3);
    Cplx t(0.4, 0.7);
    Monodromy2 m = build_monodromy2(ctx, basis, t);
    auto F = site_faces2(ctx, j, t);
    CHECK(max_abs(m.A - F[0][0]) == 0.0);
    CHECK(max_abs(m.B - F[0][1]) == 0.0);
    CHECK(max_abs(m.C - F[1][0]) == 0.0);
    CHECK(max_abs(m.D - F[1][1]) == 0.0);
    // blocks read from the face-weight branches
    CHECK(std::abs(m.A(0, 0) - (Cplx(1, 0) - ctx.omega_pow(1 - j) * t)) < 1e-15);
    CHECK(std::abs(m.C(0, 1) - (Cplx(1, 0) - ctx.omega_pow(1 - j))) < 1e-15);
}

TEST_CASE("highest and lowest vectors") {
    for (auto [N, j, L] : std::vector<std::array<int, 3>>{{3, 2, 3}, {4, 3, 2}}) {
        RootContext ctx(N);
        EdgeBasis basis(L, j, N);
        Cplx t(0.83, -0.41);
        Monodromy2 m = build_monodromy2(ctx, basis, t);
        Vector omega = Vector::Zero(basis.dim());
        omega(0) = 1.0;
        Vector omegabar = Vector::Zero(basis.dim());
        omegabar(basis.dim() - 1) = 1.0;
        Cplx a = std::pow(Cplx(1, 0) - ctx.omega_pow(1 - j) * t, L);
        Cplx d = ctx.omega_pow(static_cast<long>(1 - j) * L) * std::pow(Cplx(1, 0) - t, L);
        CHECK((m.A * omega - a * omega).norm() < 1e-13 * std::abs(a));
        CHECK((m.D * omega - d * omega).norm() < 1e-13 * std::abs(d));
        Cplx ahat = std::pow(Cplx(1, 0) - t, L);
        Cplx dhat = std::pow(Cplx(1, 0) - ctx.omega_pow(1 - j) * t, L);
        CHECK((m.A * omegabar - ahat * omegabar).norm() < 1e-13 * std::abs(ahat));
        CHECK((m.D * omegabar - dhat * omegabar).norm() < 1e-13 * std::abs(dhat));
    }
}

TEST_CASE("charge grading") {
    RootContext ctx(3);
    EdgeBasis basis(3, 2, 3);
    Cplx t(0.3, 0.5);
    Monodromy2 m = build_monodromy2(ctx, basis, t);
    for (long r = 0; r < basis.dim(); ++r)
        for (long c = 0; c < basis.dim(); ++c) {
            int dr = basis.charge_total(r), dc = basis.charge_total(c);
            if (std::abs(m.A(r, c)) > 1e-14) CHECK(dr == dc);
            if (std::abs(m.D(r, c)) > 1e-14) CHECK(dr == dc);
            if (std::abs(m.B(r, c)) > 1e-14) CHECK(dr == dc + 1);
            if (std::abs(m.C(r, c)) > 1e-14) CHECK(dr == dc - 1);
        }
}

TEST_CASE("coefficient extraction") {
    for (auto [N, j, L] : std::vector<std::array<int, 3>>{{3, 2, 3}, {3, 2, 4}, {4, 3, 2}}) {
        RootContext ctx(N);
        EdgeBasis basis(L, j, N);
        MonodromyCoeffs co = extract_coefficients(ctx, basis);
        const long D = basis.dim();
        Matrix I = Matrix::Identity(D, D);
        Matrix Zprod = Matrix::Zero(D, D);
        for (long s = 0; s < D; ++s) Zprod(s, s) = ctx.omega_pow(basis.charge_total(s));
        CHECK(max_abs(co.A.coeffs[0] - I) < 1e-11);
        CHECK(max_abs(co.A.coeffs[L] - ctx.omega_pow(static_cast<long>(-j) * L) * Zprod) < 1e-11);
        CHECK(max_abs(co.D.coeffs[0] - ctx.omega_pow(static_cast<long>(1 - j) * L) * Zprod) < 1e-11);
        CHECK(max_abs(co.D.coeffs[L] - ctx.omega_pow(static_cast<long>(-j) * L) * I) < 1e-11);
        CHECK(max_abs(co.B.coeffs[0]) < 1e-11);
        CHECK(max_abs(co.C.coeffs[L]) < 1e-11);
        // round trip at a fresh point
        Cplx t(0.91, 0.13);
        Monodromy2 m = build_monodromy2(ctx, basis, t);
        CHECK(max_abs(co.A.eval(ctx, t) - m.A) < 1e-10 * std::max(1.0, max_abs(m.A)));
        CHECK(max_abs(co.B.eval(ctx, t) - m.B) < 1e-10 * std::max(1.0, max_abs(m.B)));
        CHECK(max_abs(co.C.eval(ctx, t) - m.C) < 1e-10 * std::max(1.0, max_abs(m.C)));
        CHECK(max_abs(co.D.eval(ctx, t) - m.D) < 1e-10 * std::max(1.0, max_abs(m.D)));
    }
}

TEST_CASE("tau2Q commutation and charge blocks") {
    RootContext ctx(3);
    EdgeBasis basis(3, 2, 3);
    CounterRng rng(5, "transfer.tau2Q");
    for (int Q = 0; Q < 3; ++Q) {
        Cplx t = rng.complex_point(), tp = rng.complex_point();
        Matrix a = tau2Q(ctx, basis, t, Q);
        Matrix b = tau2Q(ctx, basis, tp, Q);
        CHECK(max_abs(a * b - b * a) < 1e-10 * max_abs(a * b));
        // exact charge-block structure
        for (long r = 0; r < basis.dim(); ++r)
            for (long c = 0; c < basis.dim(); ++c)
                if (basis.charge(r) != basis.charge(c)) CHECK(std::abs(a(r, c)) == 0.0);
        // Q and Q+N identical
        CHECK(max_abs(a - tau2Q(ctx, basis, t, Q + 3)) == 0.0);
    }
}

TEST_CASE("tauLJQ commutes with tau2Q") {
    CounterRng rng(7, "transfer.tauLJQ");
    for (auto [N, j, L] : std::vector<std::array<int, 3>>{{3, 2, 3}, {4, 3, 2}}) {
        RootContext ctx(N);
        EdgeBasis basis(L, j, N);
        for (int Q = 0; Q < N; ++Q) {
            Cplx t = rng.complex_point(), tp = rng.complex_point();
            Matrix t2 = tau2Q(ctx, basis, t, Q);
            CHECK(max_abs(tauLJQ(ctx, basis, 2, t, Q) - t2) < 1e-11 * max_abs(t2));
            for (int ell = 1; ell <= N; ++ell) {
                Matrix tl = tauLJQ(ctx, basis, ell, tp, Q);
                double sc = std::max(max_abs(t2 * tl), 1e-30);
                CHECK(max_abs(t2 * tl - tl * t2) < 1e-9 * sc);
            }
            CHECK(max_abs(tauLJQ(ctx, basis, 1, t, Q) - Matrix::Identity(basis.dim(), basis.dim())) <
                  1e-13);
        }
    }
}

TEST_CASE("monodromy Yang-Baxter") {
    CounterRng rng(9, "transfer.ybe");
    for (auto [N, j, L] : std::vector<std::array<int, 3>>{{3, 2, 3}, {3, 3, 2}, {4, 2, 4}, {4, 4, 2}}) {
        RootContext ctx(N);
        EdgeBasis basis(L, j, N);
        for (int rep = 0; rep < 5; ++rep) {
            auto r = monodromy_yang_baxter_check(ctx, basis, rng.complex_point(), rng.complex_point());
            CHECK(r.pass(1e-10));
        }
    }
}

TEST_CASE("chiral Potts transfer matrices") {
    RootContext ctx(3);
    SpinBasis basis(3, 3);
    CHECK(basis.dim() == 27);
    CounterRng rng(11, "transfer.cp");
    CurveModuli mod{Cplx(0.8, 0), Cplx(0.6, 0)};
    auto rand_point = [&]() {
        return make_point(ctx, mod, rng.complex_point(1.3), static_cast<int>(rng.uniform(0, 3)),
                          static_cast<int>(rng.uniform(0, 3)));
    };
    for (int rep = 0; rep < 3; ++rep) {
        RapidityPoint p = rand_point(), pp = rand_point(), q = rand_point();
        Matrix T = cp_transfer(ctx, basis, p, pp, q);
        Matrix X = spin_shift(basis, 1);
        CHECK(max_abs(X * T - T * X) < 1e-10 * max_abs(T));
        for (int l : {1, 2}) {
            RapidityPoint qp = related_point(ctx, q, l);
            Matrix Th = cp_transfer_hat(ctx, basis, p, pp, qp);
            BlockFactors f = block_factors(ctx, p, pp, q, l);
            Cplx Al(1, 0), Ahl(1, 0);
            for (int i = 0; i < 3; ++i) {
                Al *= f.A;
                Ahl *= f.Ahat;
            }
            Matrix lhs = T * Th;
            Matrix rhs = Al * cp_tau_ell(ctx, basis, p, pp, q, l) +
                         Ahl * spin_shift(basis, l) * cp_tau_ell(ctx, basis, p, pp, qp, 3 - l);
            CHECK(max_abs(lhs - rhs) < 1e-8 * std::max(max_abs(lhs), max_abs(rhs)));
        }
    }
    // T at q = p degenerates to unit weights: row sums over W(0)=1 faces
    RapidityPoint p = rand_point(), pp = rand_point();
    Matrix Tpp = cp_transfer(ctx, basis, p, pp, p);
    for (long s = 0; s < basis.dim(); ++s) CHECK(std::abs(Tpp(s, s)) > 0.0);
}
