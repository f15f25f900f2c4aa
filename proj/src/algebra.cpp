#include "csoslab/algebra.hpp"

namespace csos {

namespace {

Matrix site_operator(const EdgeBasis& basis, const Matrix& f, int site) {
    const long D = basis.dim();
    const int j = basis.j();
    Matrix out = Matrix::Zero(D, D);
    for (long col = 0; col < D; ++col) {
        int d = basis.digit(col, site);
        for (int dn = 0; dn < j; ++dn)
            if (f(dn, d) != Cplx(0, 0)) out(basis.with_digit(col, site, dn), col) += f(dn, d);
    }
    return out;
}

/// diag over states of prod_{m in [lo,hi)} omega^{n_m} applied after `f` at `site`.
Matrix weighted_site_sum(const RootContext& ctx, const EdgeBasis& basis, const Matrix& f,
                         const std::function<Cplx(long /*state*/, int /*site*/)>& weight) {
    const long D = basis.dim();
    const int j = basis.j();
    const int L = basis.L();
    Matrix out = Matrix::Zero(D, D);
    (void)ctx;
    for (int site = 0; site < L; ++site)
        for (long col = 0; col < D; ++col) {
            int d = basis.digit(col, site);
            for (int dn = 0; dn < j; ++dn) {
                if (f(dn, d) == Cplx(0, 0)) continue;
                long row = basis.with_digit(col, site, dn);
                out(row, col) += weight(col, site) * f(dn, d);
            }
        }
    return out;
}

Cplx bracket_factorial(const RootContext& ctx, int n) { return q_factorials(ctx, n).first; }
Cplx sym_factorial(const RootContext& ctx, int n) { return q_factorials(ctx, n).second; }

Matrix mat_pow(const Matrix& m, int n) {
    Matrix acc = Matrix::Identity(m.rows(), m.cols());
    for (int i = 0; i < n; ++i) acc = acc * m;
    return acc;
}

double term_scale(std::initializer_list<Matrix> terms) {
    double s = 0.0;
    for (const auto& t : terms) s = std::max(s, max_abs(t));
    return s;
}

long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long v = 1;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

}  // namespace

CoeffOps closed_form_coeffs(const RootContext& ctx, const EdgeBasis& basis) {
    const int N = ctx.N();
    const int j = basis.j();
    const int L = basis.L();
    (void)N;
    Matrix Zj = Matrix::Zero(j, j);
    for (int k = 0; k < j; ++k) Zj(k, k) = ctx.omega_pow(k);
    Matrix Xj = Matrix::Zero(j, j);
    for (int k = 0; k + 1 < j; ++k) Xj(k + 1, k) = 1.0;
    Matrix ehat = Xj.transpose() * (Matrix::Identity(j, j) - ctx.omega_pow(-j) * Zj);
    Matrix fhat = (Matrix::Identity(j, j) - Zj) * Xj;

    // prefix[s][n] = prod_{m<n} omega^{n_m}(s);  suffix over m>n
    auto zprefix = [&](long s, int n) {
        long c = 0;
        for (int m = 0; m < n; ++m) c += basis.digit(s, m);
        return ctx.omega_pow(c);
    };
    auto zsuffix = [&](long s, int n) {
        long c = 0;
        for (int m = n + 1; m < L; ++m) c += basis.digit(s, m);
        return ctx.omega_pow(c);
    };

    CoeffOps ops;
    ops.BL = weighted_site_sum(ctx, basis, fhat, [&](long s, int n) {
        return ctx.omega_pow(static_cast<long>(-j) * L) * zprefix(s, n);
    });
    ops.C0 = weighted_site_sum(ctx, basis, ehat, [&](long s, int n) {
        return ctx.omega_pow(static_cast<long>(n) * (1 - j)) * zprefix(s, n);
    });
    ops.B1 = weighted_site_sum(ctx, basis, fhat, [&](long s, int n) {
        return ctx.omega_pow(-j + static_cast<long>(L - 1 - n) * (1 - j)) * zsuffix(s, n);
    });
    ops.CL1 = weighted_site_sum(ctx, basis, ehat, [&](long s, int n) {
        return ctx.omega_pow(static_cast<long>(-j) * (L - 1)) * zsuffix(s, n);
    });
    return ops;
}

GeneratorSet make_generators(const RootContext& ctx, const EdgeBasis& basis) {
    const int j = basis.j();
    const int L = basis.L();
    const long D = basis.dim();
    GeneratorSet g;
    g.Zj = Matrix::Zero(j, j);
    for (int k = 0; k < j; ++k) g.Zj(k, k) = ctx.omega_pow(k);
    g.Xj = Matrix::Zero(j, j);
    for (int k = 0; k + 1 < j; ++k) g.Xj(k + 1, k) = 1.0;
    g.ehat = g.Xj.transpose() * (Matrix::Identity(j, j) - ctx.omega_pow(-j) * g.Zj);
    g.fhat = (Matrix::Identity(j, j) - g.Zj) * g.Xj;

    CoeffOps ops = closed_form_coeffs(ctx, basis);
    g.BL = ops.BL;
    g.C0 = ops.C0;
    g.B1 = ops.B1;
    g.CL1 = ops.CL1;

    // T0^{-1} = q^{(1-j)L} prod Z_i ; half powers use the total digit sum.
    g.T0inv = Matrix::Zero(D, D);
    g.T0 = Matrix::Zero(D, D);
    g.T0halfinv = Matrix::Zero(D, D);
    g.T0half = Matrix::Zero(D, D);
    for (long s = 0; s < D; ++s) {
        long c = basis.charge_total(s);
        g.T0inv(s, s) = ctx.q_pow(static_cast<long>(1 - j) * L + 2 * c);
        g.T0(s, s) = Cplx(1, 0) / g.T0inv(s, s);
        g.T0halfinv(s, s) = ctx.q_half_pow(static_cast<long>(1 - j) * L + 2 * c);
        g.T0half(s, s) = Cplx(1, 0) / g.T0halfinv(s, s);
    }

    // Q = Zj^{1/2} with entries q^k
    Matrix Qm = Matrix::Zero(j, j);
    for (int k = 0; k < j; ++k) Qm(k, k) = ctx.q_pow(k);
    Matrix Qi = Qm.inverse();
    Cplx qd = ctx.q() - Cplx(1, 0) / ctx.q();
    g.eprime = g.Xj.transpose() * (ctx.q_pow(j) * Qi - ctx.q_pow(-j) * Qm) / qd;
    g.fprime = (Qm - Qi) * g.Xj / qd;
    g.tprime = ctx.q_pow(j - 1) * Qi * Qi;

    g.mu0 = -ctx.omega_pow(static_cast<long>(-j) * L) * ctx.q_half_pow(-(j - 1));
    g.nu0 = ctx.q_half_pow(j - 1) * ctx.q_pow(-1);
    g.mu1 = -ctx.omega_pow(-j) * ctx.q_half_pow((j - 1) - 2 * static_cast<long>(L) * (j - 1));
    g.nu1 = ctx.omega_pow(static_cast<long>(-j) * (L - 1)) *
            ctx.q_half_pow(-(j + 1) + 2 * static_cast<long>(L) * (j - 1));

    g.F0 = g.T0half * g.BL / (qd * g.mu0);
    g.E0 = g.C0 * g.T0half / (qd * g.nu0);
    g.E1 = g.T0half * g.B1 / (qd * g.mu1);
    g.F1 = g.CL1 * g.T0half / (qd * g.nu1);
    return g;
}

DividedPower limit_at_zero(const std::function<Matrix(Cplx)>& family, int order,
                           const LimitOptions& opt) {
    DividedPower out;
    out.order = order;
    auto circle_mean = [&](double r) {
        Matrix acc;
        for (int s = 0; s < opt.circle_points; ++s) {
            Cplx eps = std::polar(r, 2.0 * kPi * s / opt.circle_points);
            Matrix v = family(eps);
            acc = (s == 0) ? v : Matrix(acc + v);
        }
        return Matrix(acc / static_cast<double>(opt.circle_points));
    };
    if (opt.use_circle) {
        Matrix a = circle_mean(opt.circle_radius);
        Matrix b = circle_mean(opt.circle_radius / 2.0);
        out.limit = b;
        double nb = std::max(max_abs(b), 1e-300);
        out.extrapolation_error = max_abs(a - b) / nb;
        out.method = "circle";
    } else {
        auto extrap = [&](double e1) {
            Matrix f1 = family(Cplx(e1, 0.0));
            Matrix f2 = family(Cplx(e1 / 2.0, 0.0));
            return Matrix(2.0 * f2 - f1);
        };
        Matrix a = extrap(opt.richardson_e1);
        Matrix b = extrap(opt.richardson_e1 / 2.0);
        out.limit = b;
        double nb = std::max(max_abs(b), 1e-300);
        out.extrapolation_error = max_abs(a - b) / nb;
        out.method = "richardson";
    }
    out.converged = out.extrapolation_error < opt.converge_tol || max_abs(out.limit) < 1e-12;
    return out;
}

PowerCache::PowerCache(int N, const EdgeBasis& basis, LimitOptions opt)
    : ctx0_(N), basis_(basis), opt_(opt), gens_(make_generators(ctx0_, basis)) {}

const DividedPower& PowerCache::get(Op op, int n) {
    auto key = std::make_pair(op, n);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    const bool chevalley = (op == Op::E0 || op == Op::E1 || op == Op::F0 || op == Op::F1);
    auto base_at = [this, op](const RootContext& c) -> Matrix {
        if (op == Op::C0 || op == Op::B1 || op == Op::BL || op == Op::CL1) {
            CoeffOps ops = closed_form_coeffs(c, basis_);
            switch (op) {
                case Op::C0: return ops.C0;
                case Op::B1: return ops.B1;
                case Op::BL: return ops.BL;
                default: return ops.CL1;
            }
        }
        GeneratorSet g = make_generators(c, basis_);
        switch (op) {
            case Op::E0: return g.E0;
            case Op::E1: return g.E1;
            case Op::F0: return g.F0;
            default: return g.F1;
        }
    };

    Cplx fact0 = chevalley ? sym_factorial(ctx0_, n) : bracket_factorial(ctx0_, n);
    DividedPower dp;
    if (std::abs(fact0) > 1e-8) {
        dp.limit = mat_pow(base_at(ctx0_), n) / fact0;
        dp.order = n;
        dp.method = "direct";
        dp.extrapolation_error = 0.0;
        dp.converged = true;
    } else {
        auto family = [&, this](Cplx eps) -> Matrix {
            RootContext c(ctx0_.N(), eps);
            Cplx f = chevalley ? sym_factorial(c, n) : bracket_factorial(c, n);
            return Matrix(mat_pow(base_at(c), n) / f);
        };
        dp = limit_at_zero(family, n, opt_);
    }
    return cache_.emplace(key, std::move(dp)).first->second;
}

ResidualReport appendix_c_suite(const RootContext& ctx, const EdgeBasis& basis, CounterRng& rng,
                                int samples) {
    ResidualReport rep;
    const Cplx w = ctx.omega();
    const Cplx one(1, 0);

    auto add = [&](const std::string& name, const Matrix& lhs, const Matrix& rhs, double scale) {
        ScaledResidual r = scaled_residual(lhs, rhs, scale);
        auto it = std::find_if(rep.begin(), rep.end(),
                               [&](const ResidualEntry& e) { return e.name == name; });
        if (it == rep.end())
            rep.push_back({name, r, ""});
        else {
            it->r.residual = std::max(it->r.residual, r.residual);
            it->r.scale = std::max(it->r.scale, r.scale);
            it->r.vacuous = it->r.vacuous && r.vacuous;
        }
    };

    for (int s = 0; s < samples; ++s) {
        Cplx x = rng.complex_point();
        Cplx y = rng.complex_point();
        Monodromy2 mx = build_monodromy2(ctx, basis, x);
        Monodromy2 my = build_monodromy2(ctx, basis, y);
        const Matrix &Ax = mx.A, &Bx = mx.B, &Cx = mx.C, &Dx = mx.D;
        const Matrix &Ay = my.A, &By = my.B, &Cy = my.C, &Dy = my.D;

        add("commAA", Ax * Ay, Ay * Ax, term_scale({Ax * Ay}));
        add("commBB", Bx * By, By * Bx, term_scale({Bx * By}));
        add("commCC", Cx * Cy, Cy * Cx, term_scale({Cx * Cy}));
        add("commDD", Dx * Dy, Dy * Dx, term_scale({Dx * Dy}));

        add("AB", (w * y - x) * (Ax * By), w * (y - x) * (By * Ax) + y * (w - one) * (Ay * Bx),
            term_scale({(w * y - x) * (Ax * By), w * (y - x) * (By * Ax), y * (w - one) * (Ay * Bx)}));
        add("DB", (w * y - x) * (By * Dx), (y - x) * (Dx * By) + y * (w - one) * (Bx * Dy),
            term_scale({(w * y - x) * (By * Dx), (y - x) * (Dx * By), y * (w - one) * (Bx * Dy)}));
        add("AB2", (w * y - x) * (Bx * Ay), (w - one) * x * (By * Ax) + (y - x) * (Ay * Bx),
            term_scale({(w * y - x) * (Bx * Ay), x * (By * Ax), (y - x) * (Ay * Bx)}));
        add("DB2", (w * y - x) * (Dy * Bx), w * (y - x) * (Bx * Dy) + x * (w - one) * (Dx * By),
            term_scale({(w * y - x) * (Dy * Bx), w * (y - x) * (Bx * Dy), x * (Dx * By)}));
        add("AB3", Ax * By + Bx * Ay, By * Ax + Ay * Bx,
            term_scale({Ax * By, Bx * Ay, By * Ax, Ay * Bx}));
        add("AB4", x * (Ax * By - w * (By * Ax)), y * (Ay * Bx - w * (Bx * Ay)),
            term_scale({x * (Ax * By), y * (Ay * Bx)}));

        add("AC.a", (w * y - x) * (Cy * Ax), (w - one) * x * (Cx * Ay) + w * (y - x) * (Ax * Cy),
            term_scale({(w * y - x) * (Cy * Ax), x * (Cx * Ay), w * (y - x) * (Ax * Cy)}));
        add("AC.b", (w * y - x) * (Ay * Cx), (w - one) * y * (Ax * Cy) + (y - x) * (Cx * Ay),
            term_scale({(w * y - x) * (Ay * Cx), y * (Ax * Cy), (y - x) * (Cx * Ay)}));
        add("DC.a", (w * y - x) * (Cx * Dy), w * (y - x) * (Dy * Cx) + y * (w - one) * (Cy * Dx),
            term_scale({(w * y - x) * (Cx * Dy), w * (y - x) * (Dy * Cx), y * (Cy * Dx)}));
        add("DC.b", (w * y - x) * (Dx * Cy), (y - x) * (Cy * Dx) + x * (w - one) * (Dy * Cx),
            term_scale({(w * y - x) * (Dx * Cy), (y - x) * (Cy * Dx), x * (Dy * Cx)}));

        add("ADBC1", (y - x) * (Dy * Ax - Ax * Dy), (one - w) * (x * (Cx * By) - y * (Cy * Bx)),
            term_scale({(y - x) * (Dy * Ax), x * (Cx * By), y * (Cy * Bx)}));
        add("ADBC2", (y - x) * (Dx * Ay - Ay * Dx), (w - one) * (x * (By * Cx) - y * (Bx * Cy)),
            term_scale({(y - x) * (Dx * Ay), x * (By * Cx), y * (Bx * Cy)}));
        add("ADBC3", (y - x) * (Cy * Bx - w * (Bx * Cy)), (w - one) * x * (Dx * Ay - Dy * Ax),
            term_scale({(y - x) * (Cy * Bx), x * (Dx * Ay), x * (Dy * Ax)}));
        add("ADBC4", (y - x) * (Cx * By - w * (By * Cx)), (w - one) * y * (Ay * Dx - Ax * Dy),
            term_scale({(y - x) * (Cx * By), y * (Ay * Dx), y * (Ax * Dy)}));
    }

    // coefficient corollaries
    MonodromyCoeffs co = extract_coefficients(ctx, basis);
    const int L = basis.L();
    auto A = [&](int n) { return co.A.coeffs[n]; };
    auto B = [&](int n) { return co.B.coeffs[n]; };
    auto C = [&](int n) { return co.C.coeffs[n]; };
    auto Dm = [&](int n) { return co.D.coeffs[n]; };

    for (int l = 0; l <= L; ++l)
        for (int m = 0; m <= L; ++m) {
            add("ABlm.a", B(m) * A(l) - A(l) * B(m), B(l) * A(m) - A(m) * B(l),
                term_scale({B(m) * A(l), A(l) * B(m), B(l) * A(m), A(m) * B(l)}));
            add("BDml.a", w * (B(m) * Dm(l)) - Dm(l) * B(m), w * (B(l) * Dm(m)) - Dm(m) * B(l),
                term_scale({B(m) * Dm(l), Dm(l) * B(m), B(l) * Dm(m), Dm(m) * B(l)}));
            add("CBshift.ADcomm", A(m) * Dm(l) - Dm(l) * A(m), A(l) * Dm(m) - Dm(m) * A(l),
                term_scale({A(m) * Dm(l), Dm(l) * A(m), A(l) * Dm(m), Dm(m) * A(l)}));
            if (m >= 1 && l + 1 <= L) {
                add("ABlm.b", A(l) * B(m) - w * (B(m) * A(l)),
                    A(m - 1) * B(l + 1) - w * (B(l + 1) * A(m - 1)),
                    term_scale({A(l) * B(m), B(m) * A(l), A(m - 1) * B(l + 1), B(l + 1) * A(m - 1)}));
                add("BDml.b", Dm(l) * B(m) - B(m) * Dm(l),
                    Dm(m - 1) * B(l + 1) - B(l + 1) * Dm(m - 1),
                    term_scale({Dm(l) * B(m), B(m) * Dm(l), Dm(m - 1) * B(l + 1), B(l + 1) * Dm(m - 1)}));
                add("CBshift.CB", C(l) * B(m) - w * (B(m) * C(l)),
                    C(m - 1) * B(l + 1) - w * (B(l + 1) * C(m - 1)),
                    term_scale({C(l) * B(m), B(m) * C(l), C(m - 1) * B(l + 1), B(l + 1) * C(m - 1)}));
            }
            if (m + 1 <= L && l >= 1) {
                add("ACml.b", A(l) * C(m) - C(m) * A(l),
                    A(m + 1) * C(l - 1) - C(l - 1) * A(m + 1),
                    term_scale({A(l) * C(m), C(m) * A(l), A(m + 1) * C(l - 1), C(l - 1) * A(m + 1)}));
                add("DCml.b", w * (Dm(l) * C(m)) - C(m) * Dm(l),
                    w * (Dm(m + 1) * C(l - 1)) - C(l - 1) * Dm(m + 1),
                    term_scale({Dm(l) * C(m), C(m) * Dm(l), Dm(m + 1) * C(l - 1), C(l - 1) * Dm(m + 1)}));
            }
            add("ACml.a", C(m) * A(l) - w * (A(l) * C(m)), C(l) * A(m) - w * (A(m) * C(l)),
                term_scale({C(m) * A(l), A(l) * C(m), C(l) * A(m), A(m) * C(l)}));
            add("DCml.a", C(m) * Dm(l) - Dm(l) * C(m), C(l) * Dm(m) - Dm(m) * C(l),
                term_scale({C(m) * Dm(l), Dm(l) * C(m), C(l) * Dm(m), Dm(m) * C(l)}));
        }

    Matrix Z = Matrix::Zero(basis.dim(), basis.dim());
    for (int m = 0; m <= L; ++m) {
        add("A0D0Bm.a", A(0) * B(m), B(m) * A(0), term_scale({A(0) * B(m)}));
        add("A0D0Bm.b", Dm(0) * B(m), w * (B(m) * Dm(0)), term_scale({Dm(0) * B(m)}));
        add("ACD0.a", A(0) * C(m), C(m) * A(0), term_scale({A(0) * C(m)}));
        add("ACD0.b", w * (Dm(0) * C(m)), C(m) * Dm(0), term_scale({Dm(0) * C(m)}));
        add("C0Bm", C(0) * B(m) - w * (B(m) * C(0)), (one - w) * (Dm(m) * A(0) - Dm(0) * A(m)),
            term_scale({C(0) * B(m), B(m) * C(0), Dm(m) * A(0), Dm(0) * A(m)}));
    }
    for (int l = 0; l <= L; ++l) {
        if (l + 1 <= L)
            add("AlB1", A(l) * B(1) - w * (B(1) * A(l)), (one - w) * (B(l + 1) * A(0)),
                term_scale({A(l) * B(1), B(1) * A(l), B(l + 1) * A(0)}));
        if (l + 1 <= L)
            add("DmB1", Dm(l) * B(1) - B(1) * Dm(l), (w - one) * (B(l + 1) * Dm(0)),
                term_scale({Dm(l) * B(1), B(1) * Dm(l), B(l + 1) * Dm(0)}));
        add("ACD0.c", C(0) * A(l) - w * (A(l) * C(0)), (one - w) * (C(l) * A(0)),
            term_scale({C(0) * A(l), A(l) * C(0), C(l) * A(0)}));
        add("ACD0.d", C(0) * Dm(l) - Dm(l) * C(0), (w - one) * (Dm(0) * C(l)),
            term_scale({C(0) * Dm(l), Dm(l) * C(0), Dm(0) * C(l)}));
        add("CBL", C(l) * B(L) - w * (B(L) * C(l)), (one - w) * (Dm(L) * A(l) - Dm(l) * A(L)),
            term_scale({C(l) * B(L), B(L) * C(l), Dm(L) * A(l), Dm(l) * A(L)}));
    }
    add("CB0L.a", C(0) * B(L) - w * (B(L) * C(0)), C(L - 1) * B(1) - w * (B(1) * C(L - 1)),
        term_scale({C(0) * B(L), B(L) * C(0), C(L - 1) * B(1), B(1) * C(L - 1)}));
    add("CB0L.b", C(L - 1) * B(1) - w * (B(1) * C(L - 1)), (one - w) * (Dm(L) * A(0) - Dm(0) * A(L)),
        term_scale({C(L - 1) * B(1), B(1) * C(L - 1), Dm(L) * A(0), Dm(0) * A(L)}));
    add("C0B1", C(0) * B(1) - w * (B(1) * C(0)), (one - w) * (Dm(1) * A(0) - Dm(0) * A(1)),
        term_scale({C(0) * B(1), B(1) * C(0), Dm(1) * A(0), Dm(0) * A(1)}));
    add("CL-1BL", C(L - 1) * B(L) - w * (B(L) * C(L - 1)),
        (one - w) * (Dm(L) * A(L - 1) - Dm(L - 1) * A(L)),
        term_scale({C(L - 1) * B(L), B(L) * C(L - 1), Dm(L) * A(L - 1), Dm(L - 1) * A(L)}));
    add("B0zero", B(0), Z, 1.0);
    add("CLzero", C(L), Z, 1.0);
    return rep;
}

ResidualReport closed_form_generator_check(const RootContext& ctx, const EdgeBasis& basis) {
    ResidualReport rep;
    MonodromyCoeffs co = extract_coefficients(ctx, basis);
    CoeffOps ops = closed_form_coeffs(ctx, basis);
    const int L = basis.L();
    rep.push_back({"BL==interp", scaled_residual(ops.BL, co.B.coeffs[L], std::max(max_abs(ops.BL), 1.0)), ""});
    rep.push_back({"C0==interp", scaled_residual(ops.C0, co.C.coeffs[0], std::max(max_abs(ops.C0), 1.0)), ""});
    rep.push_back({"B1==interp", scaled_residual(ops.B1, co.B.coeffs[1], std::max(max_abs(ops.B1), 1.0)), ""});
    rep.push_back({"CL-1==interp", scaled_residual(ops.CL1, co.C.coeffs[L - 1], std::max(max_abs(ops.CL1), 1.0)), ""});
    return rep;
}

ResidualReport uq_sl2_check(const RootContext& ctx, const EdgeBasis& basis) {
    ResidualReport rep;
    GeneratorSet g = make_generators(ctx, basis);
    const Cplx qd = ctx.q() - Cplx(1, 0) / ctx.q();
    const Matrix T1 = g.T0inv;
    const Matrix T1inv = g.T0;
    auto add = [&](const std::string& n, const Matrix& l, const Matrix& r) {
        rep.push_back({n, scaled_residual(l, r, std::max({max_abs(l), max_abs(r), 1e-30})), ""});
    };
    struct Gen { const Matrix *E, *F; };
    Gen G0{&g.E0, &g.F0}, G1{&g.E1, &g.F1};
    const Matrix* Ts[2] = {&g.T0, &T1};
    const Matrix* Tinvs[2] = {&g.T0inv, &T1inv};
    Gen Gs[2] = {G0, G1};
    for (int i = 0; i < 2; ++i)
        for (int jj = 0; jj < 2; ++jj) {
            Cplx qa = ctx.q_pow(i == jj ? 2 : -2);
            add("T" + std::to_string(i) + "E" + std::to_string(jj),
                (*Ts[i]) * (*Gs[jj].E), qa * ((*Gs[jj].E) * (*Ts[i])));
            add("Tinv" + std::to_string(i) + "F" + std::to_string(jj),
                (*Tinvs[i]) * (*Gs[jj].F), qa * ((*Gs[jj].F) * (*Tinvs[i])));
            Matrix lhs = (*Gs[i].E) * (*Gs[jj].F) - (*Gs[jj].F) * (*Gs[i].E);
            Matrix rhs = (i == jj) ? Matrix(((*Ts[i]) - (*Tinvs[i])) / qd)
                                   : Matrix(Matrix::Zero(basis.dim(), basis.dim()));
            double sc = std::max({max_abs((*Gs[i].E) * (*Gs[jj].F)), max_abs(rhs), 1e-30});
            add("E" + std::to_string(i) + "F" + std::to_string(jj) + "comm", lhs, rhs);
            (void)sc;
        }
    return rep;
}

ResidualReport serre_suite(PowerCache& pc) {
    ResidualReport rep;
    const RootContext& ctx = pc.ctx();
    const Cplx w = ctx.omega();
    const GeneratorSet& g = pc.generators();
    using Op = PowerCache::Op;

    auto add4 = [&](const std::string& name, const Matrix& t1, const Matrix& t2, const Matrix& t3,
                    const Matrix& t4, const std::string& note = "") {
        Matrix lhs = t1 - t2 + t3 - t4;
        double sc = term_scale({t1, t2, t3, t4});
        ScaledResidual r;
        r.residual = max_abs(lhs);
        r.scale = sc;
        r.vacuous = sc < 1e-14;
        rep.push_back({name, r, note});
    };

    // modified Serre on raw coefficients
    {
        const Matrix &C0 = g.C0, &B1 = g.B1, &BL = g.BL, &CL1 = g.CL1;
        const Matrix C0_2 = pc.get(Op::C0, 2).limit, C0_3 = pc.get(Op::C0, 3).limit;
        const Matrix B1_2 = pc.get(Op::B1, 2).limit, B1_3 = pc.get(Op::B1, 3).limit;
        const Matrix BL_2 = pc.get(Op::BL, 2).limit, BL_3 = pc.get(Op::BL, 3).limit;
        const Matrix CL1_2 = pc.get(Op::CL1, 2).limit, CL1_3 = pc.get(Op::CL1, 3).limit;
        Cplx w3 = ctx.omega_pow(3);
        add4("serremd1", C0_3 * B1, C0_2 * (B1 * C0), -w * (C0 * (B1 * C0_2)), w3 * (B1 * C0_3));
        add4("serremd2.a", C0 * B1_3, B1 * (C0 * B1_2), -w * (B1_2 * (C0 * B1)), w3 * (B1_3 * C0));
        add4("serremd2.b", CL1_3 * BL, CL1_2 * (BL * CL1), -w * (CL1 * (BL * CL1_2)), w3 * (BL * CL1_3));
        add4("serremd2.c", CL1 * BL_3, BL * (CL1 * BL_2), -w * (BL_2 * (CL1 * BL)), w3 * (BL_3 * CL1));
    }

    // quantum Serre for the Chevalley generators
    auto serre = [&](const std::string& name, Op oi, Op oj, const Matrix& Ei, const Matrix& Ej) {
        const Matrix Ej2 = pc.get(oj, 2).limit;
        const Matrix Ej3 = pc.get(oj, 3).limit;
        (void)oi;
        add4(name, Ei * Ej3, Ej * (Ei * Ej2), -(Ej2 * (Ei * Ej)), Ej3 * Ei);
    };
    serre("serre2.E01", Op::E0, Op::E1, g.E0, g.E1);
    serre("serre2.E10", Op::E1, Op::E0, g.E1, g.E0);
    serre("serre2.F01", Op::F0, Op::F1, g.F0, g.F1);
    serre("serre2.F10", Op::F1, Op::F0, g.F1, g.F0);
    return rep;
}

ResidualReport cyclic_serre_suite(PowerCache& pc, int Q) {
    ResidualReport rep;
    const RootContext& ctx = pc.ctx();
    const int N = ctx.N();
    using Op = PowerCache::Op;

    auto add_eq = [&](const std::string& name, const Matrix& lhs, const Matrix& rhs,
                      const std::string& note = "") {
        ScaledResidual r = scaled_residual(lhs, rhs, std::max({max_abs(lhs), max_abs(rhs)}));
        rep.push_back({name, r, note});
    };

    // thetaij / thetaiji for theta in {E, F}, (i,j) in {(0,1),(1,0)}
    struct ThetaPair { Op i, j; const char* tag; };
    const std::vector<ThetaPair> theta_pairs = {{Op::E0, Op::E1, "E01"},
                                                {Op::E1, Op::E0, "E10"},
                                                {Op::F0, Op::F1, "F01"},
                                                {Op::F1, Op::F0, "F10"}};
    for (const auto& pr : theta_pairs) {
        {
            const Matrix tNQ = pc.get(pr.i, N + Q).limit;
            const Matrix tQ = pc.get(pr.i, Q).limit;
            const Matrix uQ = pc.get(pr.j, Q).limit;
            add_eq(std::string("thetaij.") + pr.tag, tNQ * uQ * tQ, tQ * uQ * tNQ,
                   Q == 0 ? "Q=0 degenerate" : "");
            const Matrix t2NQ = pc.get(pr.i, 2 * N + Q).limit;
            const Matrix t3NQ = pc.get(pr.i, 3 * N + Q).limit;
            const Matrix uNQ = pc.get(pr.j, N + Q).limit;
            Matrix lhs = t3NQ * uNQ * tQ - t2NQ * uNQ * tNQ + tNQ * uNQ * t2NQ - tQ * uNQ * t3NQ;
            double sc = term_scale({t3NQ * uNQ * tQ, t2NQ * uNQ * tNQ, tNQ * uNQ * t2NQ, tQ * uNQ * t3NQ});
            ScaledResidual r;
            r.residual = max_abs(lhs);
            r.scale = sc;
            r.vacuous = sc < 1e-14;
            rep.push_back({std::string("thetaiji.") + pr.tag, r, ""});
        }
    }

    // raw coefficient versions
    const Matrix CNQ = pc.get(Op::C0, N + Q).limit;
    const Matrix CQ = pc.get(Op::C0, Q).limit;
    const Matrix BQ = pc.get(Op::B1, Q).limit;
    add_eq("CBC1", CNQ * BQ * CQ, CQ * BQ * CNQ);
    for (int jj = 1; jj <= 2; ++jj) {
        const Matrix CjNQ = pc.get(Op::C0, jj * N + Q).limit;
        add_eq("CBCj.j" + std::to_string(jj), CjNQ * BQ * CQ, CQ * BQ * CjNQ);
    }
    {
        const Matrix BNQ = pc.get(Op::B1, N + Q).limit;
        const Matrix C2NQ = pc.get(Op::C0, 2 * N + Q).limit;
        const Matrix C3NQ = pc.get(Op::C0, 3 * N + Q).limit;
        Matrix t1 = C3NQ * BNQ * CQ, t2 = C2NQ * BNQ * CNQ, t3 = CNQ * BNQ * C2NQ,
               t4 = CQ * BNQ * C3NQ;
        Matrix lhs = t1 - t2 + t3 - t4;
        double sc = term_scale({t1, t2, t3, t4});
        ScaledResidual r;
        r.residual = max_abs(lhs);
        r.scale = sc;
        r.vacuous = sc < 1e-14;
        rep.push_back({"C0B1CB", r, ""});
    }
    // multiplication rule with binomial factor: C0^{(jN+Q)} C0^{(kN)} = binom(k+j,j) C0^{((j+k)N+Q)}
    for (int jj = 1; jj <= 2; ++jj)
        for (int kk = 1; kk <= 2; ++kk) {
            const Matrix a = pc.get(Op::C0, jj * N + Q).limit;
            const Matrix b = pc.get(Op::C0, kk * N).limit;
            const Matrix c = pc.get(Op::C0, (jj + kk) * N + Q).limit;
            add_eq("mulo.j" + std::to_string(jj) + "k" + std::to_string(kk), a * b,
                   static_cast<double>(binom(jj + kk, jj)) * c);
        }
    // CBCjk at j=k=1
    {
        const Matrix C2NQ = pc.get(Op::C0, 2 * N + Q).limit;
        add_eq("CBCjk.j1k1", CNQ * BQ * CNQ, 2.0 * (C2NQ * BQ * CQ));
    }
    return rep;
}

ResidualReport loop_serre(PowerCache& pc, int Q) {
    ResidualReport rep;
    const int N = pc.ctx().N();
    using Op = PowerCache::Op;
    const Matrix xp = pc.get(Op::C0, N + Q).limit * pc.get(Op::B1, Q).limit;    // x+_{0,Q}
    const Matrix xm = pc.get(Op::C0, Q).limit * pc.get(Op::B1, N + Q).limit;    // x-_{1,Q}
    const Matrix yp = pc.get(Op::CL1, N + Q).limit * pc.get(Op::BL, Q).limit;   // xbar+_{-1,Q}
    const Matrix ym = pc.get(Op::CL1, Q).limit * pc.get(Op::BL, N + Q).limit;   // xbar-_{0,Q}

    auto triple = [&](const std::string& name, const Matrix& a, const Matrix& b) {
        // [[[a,b],b],b]
        Matrix c1 = a * b - b * a;
        Matrix c2 = c1 * b - b * c1;
        Matrix c3 = c2 * b - b * c2;
        double sc = 0.0;
        for (int k = 0; k <= 3; ++k)
            sc = std::max(sc, max_abs(mat_pow(b, k) * a * mat_pow(b, 3 - k)));
        ScaledResidual r;
        r.residual = max_abs(c3);
        r.scale = sc;
        r.vacuous = sc < 1e-14;
        rep.push_back({name, r, r.vacuous ? "vacuous (all monomials vanish)" : ""});
    };
    triple("loopserre.xm_xp", xm, xp);
    triple("loopserre.xp_xm", xp, xm);
    triple("loopserre.ybarm_ybarp", ym, yp);
    triple("loopserre.ybarp_ybarm", yp, ym);
    return rep;
}

ResidualReport exchange_identities_check(const RootContext& ctx, const EdgeBasis& basis,
                                         int R, const std::vector<Cplx>& points) {
    if (static_cast<int>(points.size()) != R + 1)
        throw std::invalid_argument("exchange_identities_check: need R+1 points");
    const Cplx w = ctx.omega();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t k = 0; k < points.size(); ++k) {
            if (i == k) continue;
            Cplx z = points[i] / points[k];
            if (std::abs(z - Cplx(1, 0)) < 1e-9 || std::abs(z - w) < 1e-9 || std::abs(points[i]) < 1e-12)
                throw std::invalid_argument("exchange_identities_check: singular f/g configuration");
        }
    auto f = [&](Cplx z) { return (z - w) / (w * (z - Cplx(1, 0))); };
    auto gf = [&](Cplx z) { return (Cplx(1, 0) - w) / (w * (z - Cplx(1, 0))); };
    auto fik = [&](int i, int k) { return f(points[i] / points[k]); };
    auto gik = [&](int i, int k) { return gf(points[i] / points[k]); };

    std::vector<Monodromy2> m;
    m.reserve(points.size());
    for (Cplx p : points) m.push_back(build_monodromy2(ctx, basis, p));

    auto prodB_except = [&](int skip) {
        Matrix acc = Matrix::Identity(basis.dim(), basis.dim());
        for (int i = 0; i <= R; ++i) {
            if (i == skip || i == 0) continue;
            acc = acc * m[i].B;
        }
        return acc;
    };
    auto prodB_with0_except = [&](int skip) {
        Matrix acc = Matrix::Identity(basis.dim(), basis.dim());
        for (int i = 0; i <= R; ++i) {
            if (i == skip) continue;
            acc = acc * m[i].B;
        }
        return acc;
    };
    auto prodC_except = [&](int skip) {
        Matrix acc = Matrix::Identity(basis.dim(), basis.dim());
        for (int i = 0; i <= R; ++i) {
            if (i == skip || i == 0) continue;
            acc = acc * m[i].C;
        }
        return acc;
    };
    auto prodC_with0_except = [&](int skip) {
        Matrix acc = Matrix::Identity(basis.dim(), basis.dim());
        for (int i = 0; i <= R; ++i) {
            if (i == skip) continue;
            acc = acc * m[i].C;
        }
        return acc;
    };

    ResidualReport rep;
    Cplx wR = ctx.omega_pow(R);
    {
        // A(x0) prod B(x_i)
        Matrix lhs = m[0].A * prodB_except(-1);
        Cplx cf(1, 0);
        for (int i = 1; i <= R; ++i) cf *= fik(i, 0);
        Matrix rhs = wR * cf * (prodB_except(-1) * m[0].A);
        double sc = std::max(max_abs(lhs), max_abs(rhs));
        for (int i = 1; i <= R; ++i) {
            Cplx c2(1, 0);
            for (int k = 1; k <= R; ++k)
                if (k != i) c2 *= fik(k, i);
            Matrix term = wR * c2 * gik(0, i) * (prodB_with0_except(i) * m[i].A);
            rhs += term;
            sc = std::max(sc, max_abs(term));
        }
        rep.push_back({"ADprodB.A", scaled_residual(lhs, rhs, sc), ""});
    }
    {
        Matrix lhs = m[0].D * prodB_except(-1);
        Cplx cf(1, 0);
        for (int i = 1; i <= R; ++i) cf *= fik(0, i);
        Matrix rhs = wR * cf * (prodB_except(-1) * m[0].D);
        double sc = std::max(max_abs(lhs), max_abs(rhs));
        for (int i = 1; i <= R; ++i) {
            Cplx c2(1, 0);
            for (int k = 1; k <= R; ++k)
                if (k != i) c2 *= fik(i, k);
            Matrix term = -wR * c2 * gik(0, i) * (prodB_with0_except(i) * m[i].D);
            rhs += term;
            sc = std::max(sc, max_abs(term));
        }
        rep.push_back({"ADprodB.D", scaled_residual(lhs, rhs, sc), ""});
    }
    {
        Matrix lhs = m[0].A * prodC_except(-1);
        Cplx cf(1, 0);
        for (int i = 1; i <= R; ++i) cf *= fik(0, i);
        Matrix rhs = cf * (prodC_except(-1) * m[0].A);
        double sc = std::max(max_abs(lhs), max_abs(rhs));
        for (int i = 1; i <= R; ++i) {
            Cplx c2(1, 0);
            for (int k = 1; k <= R; ++k)
                if (k != i) c2 *= fik(i, k);
            Matrix term = c2 * gik(i, 0) * (prodC_with0_except(i) * m[i].A);
            rhs += term;
            sc = std::max(sc, max_abs(term));
        }
        rep.push_back({"ADprodC.A", scaled_residual(lhs, rhs, sc), ""});
    }
    {
        Matrix lhs = m[0].D * prodC_except(-1);
        Cplx cf(1, 0);
        for (int i = 1; i <= R; ++i) cf *= fik(i, 0);
        Matrix rhs = cf * (prodC_except(-1) * m[0].D);
        double sc = std::max(max_abs(lhs), max_abs(rhs));
        for (int i = 1; i <= R; ++i) {
            Cplx c2(1, 0);
            for (int k = 1; k <= R; ++k)
                if (k != i) c2 *= fik(k, i);
            Matrix term = -c2 * gik(i, 0) * (prodC_with0_except(i) * m[i].D);
            rhs += term;
            sc = std::max(sc, max_abs(term));
        }
        rep.push_back({"ADprodC.D", scaled_residual(lhs, rhs, sc), ""});
    }
    return rep;
}

ResidualReport degeneracy_commutator_check(PowerCache& pc, int Q, CounterRng& rng) {
    ResidualReport rep;
    const RootContext& ctx = pc.ctx();
    const EdgeBasis& basis = pc.basis();
    const int N = ctx.N();
    const int L = basis.L();
    const Cplx w = ctx.omega();
    const Cplx one(1, 0);
    using Op = PowerCache::Op;

    Cplx x = rng.complex_point();
    Monodromy2 mx = build_monodromy2(ctx, basis, x);
    MonodromyCoeffs co = extract_coefficients(ctx, basis);
    const Matrix AL = co.A.coeffs[L];
    const Matrix DL = co.D.coeffs[L];
    const Matrix& BLc = pc.generators().BL;

    // commABn for n = 1..N-1 (undivided powers, no limits required)
    for (int n = 1; n < N; ++n) {
        Matrix BLn = mat_pow(BLc, n);
        Matrix BLn1 = mat_pow(BLc, n - 1);
        Cplx br = q_integer(ctx, n);
        Matrix lhs1 = mx.A * BLn - BLn * mx.A;
        Matrix rhs1 = -(one - w) * br * (mx.B * BLn1 * AL);
        rep.push_back({"commABn.A.n" + std::to_string(n),
                       scaled_residual(lhs1, rhs1,
                                       term_scale({mx.A * BLn, BLn * mx.A, mx.B * BLn1 * AL})),
                       ""});
        Matrix lhs2 = mx.D * BLn - ctx.omega_pow(n) * (BLn * mx.D);
        Matrix rhs2 = (one - w) * br * (mx.B * BLn1 * DL);
        rep.push_back({"commABn.D.n" + std::to_string(n),
                       scaled_residual(lhs2, rhs2,
                                       term_scale({mx.D * BLn, BLn * mx.D, mx.B * BLn1 * DL})),
                       ""});
    }
    // commABnn in divided form at n = N (uses the limiting procedure)
    {
        const Matrix BN = pc.get(Op::BL, N).limit;
        const Matrix BN1 = pc.get(Op::BL, N - 1).limit;
        Matrix lhs = (mx.A + mx.D) * BN - BN * (mx.A + ctx.omega_pow(N) * mx.D);
        Matrix rhs = (w - one) * (mx.B * BN1 * (AL - DL));
        rep.push_back({"commABnn.N",
                       scaled_residual(lhs, rhs,
                                       term_scale({(mx.A + mx.D) * BN, BN * (mx.A + mx.D),
                                                   mx.B * BN1 * (AL - DL)})),
                       ""});
    }
    // (A_L - D_L) annihilates the zero-charge block
    {
        auto idx = basis.charge_block(0);
        Matrix blk = restrict_block(AL - DL, idx);
        ScaledResidual r;
        r.residual = max_abs(blk);
        r.scale = std::max(max_abs(restrict_block(AL, idx)), 1e-30);
        rep.push_back({"ALminusDL.charge0", r, ""});
    }
    // sector commutation relations on zero-charge basis states (L = pN hypothesis)
    if (L % N == 0) {
        auto idx = basis.charge_block(0);
        Matrix tauQm = mx.A + ctx.omega_pow(-Q) * mx.D;
        Matrix tauQp = mx.A + ctx.omega_pow(Q) * mx.D;
        struct Case {
            std::string name;
            Matrix op;
            const Matrix* tau;
        };
        // smallest n = m = 1
        const Matrix CnNQ = pc.get(Op::C0, N + Q).limit;
        const Matrix BmNQ = pc.get(Op::B1, N + Q).limit;
        const Matrix BLm = pc.get(Op::BL, N + Q).limit;
        const Matrix CL1n = pc.get(Op::CL1, N + Q).limit;
        std::vector<Case> cases;
        cases.push_back({"comm.C0B1", CnNQ * BmNQ, &tauQm});
        cases.push_back({"comm.B1C0", BmNQ * CnNQ, &tauQp});
        cases.push_back({"comm.BLCL1", BLm * CL1n, &tauQm});
        cases.push_back({"comm.CL1BL", CL1n * BLm, &tauQp});
        for (auto& c : cases) {
            Matrix commu = (*c.tau) * c.op - c.op * (*c.tau);
            double res = 0.0, sc = 0.0;
            for (long s : idx) {
                res = std::max(res, commu.col(s).cwiseAbs().maxCoeff());
                sc = std::max(sc, ((*c.tau) * c.op).col(s).cwiseAbs().maxCoeff());
                sc = std::max(sc, (c.op * (*c.tau)).col(s).cwiseAbs().maxCoeff());
            }
            ScaledResidual r;
            r.residual = res;
            r.scale = sc;
            r.vacuous = sc < 1e-14;
            rep.push_back({c.name, r, r.vacuous ? "vacuous (operator vanishes on block)" : ""});
        }
    }
    return rep;
}

}  // namespace csos
