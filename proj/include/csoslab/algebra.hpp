#pragma once

#include <functional>
#include <map>
#include <optional>

#include "csoslab/transfer.hpp"

namespace csos {

/// One verified identity: name, scaled residual, optional note.
struct ResidualEntry {
    std::string name;
    ScaledResidual r;
    std::string note;
};
using ResidualReport = std::vector<ResidualEntry>;

/// Quantum-group generator data for the edge space at (N, j, L).
/// Zj/Xj are the truncated j x j site matrices (Xj has the wrap entry removed,
/// also for j = N), ehat/fhat the site raising/lowering operators, and
/// E/F/T the Chevalley generators recovered from the leading monodromy
/// coefficients B_L, C_0, B_1, C_{L-1}.
struct GeneratorSet {
    Matrix Zj, Xj;             // single-site j x j
    Matrix ehat, fhat;         // single-site j x j
    Matrix eprime, fprime, tprime;  // primed single-site generators
    Matrix BL, C0, B1, CL1;    // leading monodromy coefficients (closed form)
    Matrix T0, T0inv, T0half, T0halfinv;
    Matrix E0, F0, E1, F1;
    Cplx mu0, nu0, mu1, nu1;
};

GeneratorSet make_generators(const RootContext& ctx, const EdgeBasis& basis);

/// Closed-form coefficient operators only (cheap building block for
/// deformation families).
struct CoeffOps {
    Matrix BL, C0, B1, CL1;
};
CoeffOps closed_form_coeffs(const RootContext& ctx, const EdgeBasis& basis);

/// A divided power M^{(n)} = M^n / [n]! obtained either directly (when [n]!
/// is regular) or as the eps -> 0 limit of the deformed family.
struct DividedPower {
    Matrix limit;
    int order = 0;
    double extrapolation_error = 0.0;  // change of the limit under refinement, scaled
    bool converged = true;
    std::string method;  // "direct" | "richardson" | "circle"
};

struct LimitOptions {
    // spec-style two-point Richardson schedule
    double richardson_e1 = 1e-3;
    // circle-averaged limit: samples on |eps| = radius, then radius/2
    double circle_radius = 0.06;
    int circle_points = 12;
    bool use_circle = true;  // circle is the default; richardson kept for comparison
    double converge_tol = 1e-6;
};

/// family(eps) must return the full expression M(eps)^n/[n]!(eps) (or any
/// eps-analytic matrix family); the routine extrapolates it to eps = 0.
DividedPower limit_at_zero(const std::function<Matrix(Cplx)>& family, int order,
                           const LimitOptions& opt);

/// Cache of divided powers of the coefficient operators and Chevalley
/// generators over one edge basis.  Ops are rebuilt at deformed contexts so
/// the whole family stays exact in eps.
class PowerCache {
public:
    PowerCache(int N, const EdgeBasis& basis, LimitOptions opt = {});

    enum class Op { C0, B1, BL, CL1, E0, E1, F0, F1 };

    const DividedPower& get(Op op, int n);
    const GeneratorSet& generators() const { return gens_; }
    const RootContext& ctx() const { return ctx0_; }
    const EdgeBasis& basis() const { return basis_; }
    const LimitOptions& options() const { return opt_; }

private:
    RootContext ctx0_;
    const EdgeBasis& basis_;
    LimitOptions opt_;
    GeneratorSet gens_;
    std::map<std::pair<Op, int>, DividedPower> cache_;
};

/// Appendix relations between monodromy elements: the sixteen quadratic
/// function-level relations at random spectral points plus the coefficient
/// corollaries.
ResidualReport appendix_c_suite(const RootContext& ctx, const EdgeBasis& basis, CounterRng& rng,
                                int samples = 20);

/// Closed forms of B_L, C_0, B_1, C_{L-1} against interpolated coefficients.
ResidualReport closed_form_generator_check(const RootContext& ctx, const EdgeBasis& basis);

/// Chevalley relations: T_i E_j = q^{a_ij} E_j T_i, T_i^{-1} F_j = q^{a_ij} F_j T_i^{-1},
/// E_i F_j - F_j E_i = delta_ij (T_i - T_i^{-1}) / (q - q^{-1}).
ResidualReport uq_sl2_check(const RootContext& ctx, const EdgeBasis& basis);

/// Quantum Serre relations (divided-power form) and the modified Serre
/// relations on the raw coefficients.
ResidualReport serre_suite(PowerCache& pc);

/// Cyclic Serre identities for sector Q: the exchange identities for
/// theta^{(N+Q)}, the four-term identity, the C/B versions, and the
/// divided-power multiplication rule with its binomial factor.
ResidualReport cyclic_serre_suite(PowerCache& pc, int Q);

/// Loop-algebra generators x(+/-) from divided powers and their four
/// triple-commutator Serre relations.
ResidualReport loop_serre(PowerCache& pc, int Q);

/// A(x0) prod B(x_i) and D(x0) prod B(x_i) expansions, plus the C versions.
ResidualReport exchange_identities_check(const RootContext& ctx, const EdgeBasis& basis,
                                         int R, const std::vector<Cplx>& points);

/// Degeneracy mechanism: the induction commutators for B_L powers, the
/// sector commutation relations on zero-charge states, and the vanishing of
/// A_L - D_L on the zero-charge block.
ResidualReport degeneracy_commutator_check(PowerCache& pc, int Q, CounterRng& rng);

}  // namespace csos
