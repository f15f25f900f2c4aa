#pragma once

#include "csoslab/algebra.hpp"

namespace csos {

/// Joint eigenspace of the commuting family tau2Q(t) in one (Q, charge) block.
struct EigenCluster {
    int Q = 0;
    int charge = 0;
    std::array<Cplx, 3> samples{};   // eigenvalue at the three reference t
    int multiplicity = 0;
    Matrix basis;                    // block-local orthonormal columns
    bool ambiguous = false;          // two clusters within 10x the tolerance
};

/// TQ data for one cluster: tau(t) F(w t) = w^{-Pa}(1-t)^L F(t) + w^{Pb}(1-w^{1-j}t)^L F(w^2 t).
struct BetheSolution {
    int R = 0;
    int Pa = 0, Pb = 0;
    Poly F;                       // monic, degree R, coefficients low-to-high
    std::vector<Cplx> roots;      // x_i with F(t) = prod (t - w x_i)
    double tq_residual = 0.0;     // scaled residual of the linear TQ solve
    double bae_residual = 0.0;    // scaled residual of the Bethe equations
    bool found = false;
    bool branch_tie = false;      // both (Pa,Pb) conventions admit the same R
};

/// Drinfeld data: P as a polynomial in s = t^N.
struct DrinfeldData {
    Poly P;                        // coefficients in s
    int m_E = 0;
    double contamination = 0.0;    // max |coeff| of non-N-multiple powers, scaled
    std::vector<std::pair<Cplx, Cplx>> lambda_pairs;
    int Pc = 0;
    bool anomalous = false;        // m_E < 0: P must vanish identically
    double anomaly_residual = 0.0; // scaled |Bamp sum| when anomalous
};

struct SpectrumParams {
    int L, j, N;
    std::array<Cplx, 3> reference_ts{Cplx(0.531, 0.377), Cplx(-0.42, 0.61), Cplx(0.25, -0.73)};
    double cluster_tol_factor = 1e-8;  // times spectral radius
};

/// Full eigen-decomposition of tau2Q in one charge block, clustered across
/// the three reference points by simultaneous block diagonalization.
std::vector<EigenCluster> diagonalize_sector(const RootContext& ctx, const EdgeBasis& basis,
                                             const SpectrumParams& par, int Q, int charge);

/// Eigenvalue of the commuting family on a cluster vector at arbitrary t
/// (the vector must be a joint eigenvector; a residual check guards this).
Cplx cluster_eigenvalue(const Matrix& tau_block, const Vector& v, double* residual = nullptr);

/// Degree-L polynomial interpolation of the cluster eigenvalue t -> tau(t).
Poly cluster_tau_poly(const RootContext& ctx, const EdgeBasis& basis, const SpectrumParams& par,
                      int Q, const std::vector<long>& block, const Vector& v);

/// TQ scan: ascending R, both (Pa, Pb) branches, first residual pass wins.
BetheSolution extract_F(const RootContext& ctx, const Poly& tau, const SpectrumParams& par, int Q,
                        double accept_tol = 1e-8);

/// Scaled residual of the Bethe equations for a root set.
double bethe_equation_residual(const RootContext& ctx, const BetheSolution& sol, int L, int j);

/// Explicit eigenvalue formula tau_{ell,j}(t) as the zeta-sum.
Cplx tau_lj_formula(const RootContext& ctx, Cplx t, int ell, const BetheSolution& sol, int L,
                    int j);

/// Bamp sum S(t) (equals t^{Pa+Pb} P(t^N)); the building block of the
/// Drinfeld fit and of the anomaly test.
Cplx drinfeld_sum(const RootContext& ctx, const BetheSolution& sol, int L, int j, Cplx t);

/// Fit P(t^N), check coefficient purity, compute m_E and the lambda pairs.
DrinfeldData drinfeld(const RootContext& ctx, const BetheSolution& sol, int L, int j,
                      const CurveModuli& moduli, Cplx t_p);

/// Bethe eigenvector constructions from divided-power strings.
enum class BetheVectorKind { BStringHighest = 1, CString = 2, B1String = 3, Mixed = 4 };
struct BetheVectorResult {
    Vector v;            // full edge-space vector
    bool zero = false;   // construction collapsed to (numerically) zero
    std::string note;
};
BetheVectorResult bethe_vector(PowerCache& pc, BetheVectorKind kind, int R,
                               const std::vector<Cplx>& roots, int extra_n, int ell_power, int Q);

/// Eigenvalue formulas for the constructed vectors.
Cplx ffcsos_eigenvalue(const RootContext& ctx, const std::vector<Cplx>& roots, int L, int j, int Q,
                       Cplx t);
Cplx hfcsos_eigenvalue(const RootContext& ctx, const std::vector<Cplx>& roots, int L, int j, int Q,
                       Cplx t);

/// Operator-level functional relations on a charge block of one sector:
/// the fusion step, the bilinear step, and the T-system.
ResidualReport functional_relation_suite(const RootContext& ctx, const EdgeBasis& basis, int Q,
                                         int charge, CounterRng& rng);

/// Closed transfer-matrix forms on the curve for one cluster.
struct CurveTransferResult {
    double fun3_residual = 0.0;        // scaled, best lambda assignment
    int best_assignment = -1;          // bitmask of lambda choices
    double shift_residual = 0.0;       // max over the four shift relations
    double hatT_prop_residual = 0.0;   // proportionality identity
    bool assignment_found = false;
};
CurveTransferResult curve_transfer_formulas(const RootContext& ctx, const BetheSolution& sol,
                                            const DrinfeldData& dd, int L, int j,
                                            const CurveModuli& moduli, const RapidityPoint& p,
                                            int Q, CounterRng& rng, int n_points = 10);

/// One row of the degeneracy ledger.
struct DegeneracyRow {
    int Q, charge, cluster_index;
    int R, Pa, Pb, m_E;
    int multiplicity;
    bool verdict;          // multiplicity == 2^max(m_E,0)
    bool anomalous;        // m_E < 0, Bamp sum vanished
    double anomaly_residual;
    double tq_residual, bae_residual, contamination;
};

/// Scan all Q sectors of one charge block and assemble the ledger.
std::vector<DegeneracyRow> degeneracy_report(const RootContext& ctx, const EdgeBasis& basis,
                                             const SpectrumParams& par, int charge = 0);

}  // namespace csos
