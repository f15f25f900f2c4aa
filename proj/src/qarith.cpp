#include "csoslab/qarith.hpp"

#include <cmath>

namespace csos {

namespace {
std::atomic<std::uint64_t> g_phi_wraps{0};

long mod(long k, long n) {
    long r = k % n;
    return r < 0 ? r + n : r;
}
}  // namespace

RootContext::RootContext(int N, Cplx eps) : N_(N), eps_(eps) {
    if (N < 2) throw std::invalid_argument("RootContext: N must be >= 2");
    omega_ = std::exp(Cplx(0.0, 2.0 * kPi / N) + eps);
    q_ = std::exp(Cplx(0.0, kPi / N) + eps / 2.0);
    omega_table_.resize(N_);
    q_table_.resize(2 * N_);
    for (int k = 0; k < N_; ++k)
        omega_table_[k] = std::exp(Cplx(0.0, 2.0 * kPi * k / N_));
    for (int k = 0; k < 2 * N_; ++k)
        q_table_[k] = std::exp(Cplx(0.0, kPi * k / N_));
    omega_table_[0] = Cplx(1, 0);
    q_table_[0] = Cplx(1, 0);
    if (N_ % 2 == 0) omega_table_[N_ / 2] = Cplx(-1, 0);
    q_table_[N_] = Cplx(-1, 0);
}

Cplx RootContext::omega_pow(long k) const {
    if (!deformed()) return omega_table_[mod(k, N_)];
    return std::exp((Cplx(0.0, 2.0 * kPi / N_) + eps_) * static_cast<double>(k));
}

Cplx RootContext::q_pow(long k) const {
    if (!deformed()) return q_table_[mod(k, 2 * N_)];
    return std::exp((Cplx(0.0, kPi / N_) + eps_ / 2.0) * static_cast<double>(k));
}

Cplx RootContext::q_half_pow(long k) const {
    return std::exp((Cplx(0.0, kPi / N_) + eps_ / 2.0) * (static_cast<double>(k) / 2.0));
}

Cplx q_integer(const RootContext& ctx, long n) {
    return (Cplx(1, 0) - ctx.omega_pow(n)) / (Cplx(1, 0) - ctx.omega());
}

std::pair<Cplx, Cplx> q_factorials(const RootContext& ctx, int n) {
    Cplx bracket(1, 0), sym(1, 0);
    Cplx qd = ctx.q() - Cplx(1, 0) / ctx.q();
    for (int k = 1; k <= n; ++k) {
        bracket *= q_integer(ctx, k);
        sym *= (ctx.q_pow(k) - ctx.q_pow(-k)) / qd;
    }
    return {bracket, sym};
}

Cplx gauss_binomial(const RootContext& ctx, int n, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("gauss_binomial: need 0 <= k <= n");
    // symmetric q-Pascal: [n,k] = q^{-k} [n-1,k] + q^{n-k} [n-1,k-1]
    std::vector<Cplx> row{Cplx(1, 0)};
    for (int m = 1; m <= n; ++m) {
        std::vector<Cplx> next(std::min(m, k) + 1, Cplx(0, 0));
        for (int i = 0; i <= std::min(m, k); ++i) {
            Cplx v(0, 0);
            if (i < static_cast<int>(row.size())) v += ctx.q_pow(-i) * row[i];
            if (i >= 1 && i - 1 < static_cast<int>(row.size()))
                v += ctx.q_pow(m - i) * row[i - 1];
            next[i] = v;
        }
        row = std::move(next);
    }
    return k < static_cast<int>(row.size()) ? row[k] : Cplx(0, 0);
}

Cplx bracket_binomial(const RootContext& ctx, int n, int k) {
    if (k < 0 || k > n) return Cplx(0, 0);
    // [n,k] = [n-1,k-1] + omega^k [n-1,k]
    std::vector<Cplx> row{Cplx(1, 0)};
    for (int m = 1; m <= n; ++m) {
        std::vector<Cplx> next(std::min(m, k) + 1, Cplx(0, 0));
        for (int i = 0; i <= std::min(m, k); ++i) {
            Cplx v(0, 0);
            if (i >= 1 && i - 1 < static_cast<int>(row.size())) v += row[i - 1];
            if (i < static_cast<int>(row.size())) v += ctx.omega_pow(i) * row[i];
            next[i] = v;
        }
        row = std::move(next);
    }
    return k < static_cast<int>(row.size()) ? row[k] : Cplx(0, 0);
}

Cplx pochhammer(const RootContext& ctx, Cplx x, long n) {
    if (n >= 0) {
        Cplx v(1, 0);
        for (long m = 0; m < n; ++m) v *= Cplx(1, 0) - x * ctx.omega_pow(m);
        return v;
    }
    Cplx denom = pochhammer(ctx, ctx.omega_pow(n) * x, -n);
    if (std::abs(denom) == 0.0)
        throw PoleError("pochhammer: singular negative-index evaluation");
    return Cplx(1, 0) / denom;
}

Cplx phi(const RootContext& ctx, Cplx x, Cplx y, long alpha, long beta, int n) {
    const int N = ctx.N();
    if (alpha < 0 || alpha >= N || beta < 0 || beta >= N) {
        g_phi_wraps.fetch_add(1, std::memory_order_relaxed);
        alpha = mod(alpha, N);
        beta = mod(beta, N);
    }
    if (n < 0 || n > alpha + beta) return Cplx(0, 0);
    // Phi(x,y)_n = sum_{k+k'=n} [alpha,k][beta,k'] (-1)^n w^{k(k+1)/2 + k'(k'+1)/2} x^k y^k'
    Cplx acc(0, 0);
    for (int k = 0; k <= n; ++k) {
        int k2 = n - k;
        if (k > alpha || k2 > beta) continue;
        Cplx term = bracket_binomial(ctx, static_cast<int>(alpha), k) *
                    bracket_binomial(ctx, static_cast<int>(beta), k2) *
                    ctx.omega_pow(static_cast<long>(k) * (k + 1) / 2 +
                                  static_cast<long>(k2) * (k2 + 1) / 2);
        Cplx xp(1, 0), yp(1, 0);
        for (int i = 0; i < k; ++i) xp *= x;
        for (int i = 0; i < k2; ++i) yp *= y;
        acc += term * xp * yp;
    }
    return (n % 2 ? -acc : acc);
}

Cplx phi_via_product(const RootContext& ctx, Cplx x, Cplx y, long alpha, long beta, int n) {
    const int N = ctx.N();
    alpha = mod(alpha, N);
    beta = mod(beta, N);
    if (n < 0 || n > alpha + beta) return Cplx(0, 0);
    Poly prod{Cplx(1, 0)};
    for (long m = 0; m < alpha; ++m)
        prod = poly_mul(prod, Poly{Cplx(1, 0), -ctx.omega_pow(m + 1) * x});
    for (long m = 0; m < beta; ++m)
        prod = poly_mul(prod, Poly{Cplx(1, 0), -ctx.omega_pow(m + 1) * y});
    return n < static_cast<int>(prod.size()) ? prod[n] : Cplx(0, 0);
}

std::uint64_t phi_wrap_count() { return g_phi_wraps.load(std::memory_order_relaxed); }

Cplx hyp2phi1(const RootContext& ctx, Cplx a, Cplx b, Cplx c, Cplx z, int terms) {
    Cplx sum(1, 0);
    Cplx term(1, 0);
    for (int k = 0; k < terms; ++k) {
        Cplx wk = ctx.omega_pow(k);
        Cplx na = Cplx(1, 0) - a * wk;
        Cplx nb = Cplx(1, 0) - b * wk;
        // termination: a numerator Pochhammer factor hits zero
        if (std::abs(na) <= 1e-12 * (1.0 + std::abs(a * wk)) ||
            std::abs(nb) <= 1e-12 * (1.0 + std::abs(b * wk)))
            return sum;
        Cplx dc = Cplx(1, 0) - c * wk;
        Cplx dw = Cplx(1, 0) - ctx.omega_pow(k + 1);
        if (std::abs(dc) <= 1e-12 * (1.0 + std::abs(c * wk)) || std::abs(dw) == 0.0)
            throw PoleError("hyp2phi1: denominator vanishes before termination");
        term *= na * nb / (dc * dw) * z;
        sum += term;
    }
    throw std::invalid_argument("hyp2phi1: series did not terminate within `terms`");
}

}  // namespace csos
