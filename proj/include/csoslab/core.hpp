#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace csos {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

constexpr double kPi = 3.14159265358979323846;

/// Thrown when a weight or block-factor denominator vanishes.
struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a configured dimension cap is exceeded.
struct DimensionCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Residual of `lhs - rhs` scaled by the largest participating term.
/// `scale` should be the max norm of the individual terms of the identity,
/// so that globally tiny operators cannot pass by accident.
struct ScaledResidual {
    double residual = 0.0;   // absolute
    double scale = 0.0;      // max term magnitude
    bool vacuous = false;    // both sides numerically zero
    double ratio() const { return vacuous ? 0.0 : residual / scale; }
    bool pass(double tol) const { return vacuous || residual <= tol * scale; }
};

inline ScaledResidual scaled_residual(const Matrix& lhs, const Matrix& rhs,
                                      double term_scale, double vacuous_floor = 1e-14) {
    ScaledResidual r;
    r.residual = max_abs(lhs - rhs);
    r.scale = term_scale;
    r.vacuous = term_scale < vacuous_floor;
    return r;
}

/// Deterministic counter-based stream: splitmix64 steps hashed from a seed
/// and a stream label. Identical (seed, label, counter) always gives the
/// same double on every platform, so reports are byte-reproducible and
/// suites never share stream positions.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, const std::string& stream_label) {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : stream_label) {
            h ^= c;
            h *= 1099511628211ull;
        }
        state_ = splitmix(seed ^ h);
    }

    /// Uniform in [0,1).
    double uniform() {
        state_ = splitmix(state_);
        return static_cast<double>(state_ >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo,hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Complex point in the annulus 0.3 <= |z| <= rmax, arbitrary phase.
    Cplx complex_point(double rmax = 1.5) {
        double r = 0.3 + (rmax - 0.3) * uniform();
        double th = 2.0 * kPi * uniform();
        return std::polar(r, th);
    }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
};

/// Dense complex polynomial in one variable, coefficients low-to-high.
using Poly = std::vector<Cplx>;

Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale_arg(const Poly& p, Cplx s);      // p(s*t)
Poly poly_pow_linear(Cplx s, int L);             // (1 - s*t)^L
Cplx poly_eval(const Poly& p, Cplx t);
std::vector<Cplx> poly_roots(const Poly& p);     // companion-matrix roots

}  // namespace csos
