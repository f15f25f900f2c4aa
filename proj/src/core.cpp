#include "csoslab/core.hpp"

#include <Eigen/Eigenvalues>

namespace csos {

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, Cplx(0, 0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k) out[i + k] += a[i] * b[k];
    return out;
}

Poly poly_scale_arg(const Poly& p, Cplx s) {
    Poly out(p.size());
    Cplx pw(1, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = p[i] * pw;
        pw *= s;
    }
    return out;
}

Poly poly_pow_linear(Cplx s, int L) {
    Poly out{Cplx(1, 0)};
    Poly lin{Cplx(1, 0), -s};
    for (int i = 0; i < L; ++i) out = poly_mul(out, lin);
    return out;
}

Cplx poly_eval(const Poly& p, Cplx t) {
    Cplx acc(0, 0);
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * t + p[i];
    return acc;
}

std::vector<Cplx> poly_roots(const Poly& p) {
    int deg = static_cast<int>(p.size()) - 1;
    while (deg > 0 && std::abs(p[deg]) == 0.0) --deg;
    if (deg <= 0) return {};
    Matrix comp = Matrix::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -p[i] / p[deg];
    Eigen::ComplexEigenSolver<Matrix> es(comp, false);
    std::vector<Cplx> roots(deg);
    for (int i = 0; i < deg; ++i) roots[i] = es.eigenvalues()(i);
    return roots;
}

}  // namespace csos
