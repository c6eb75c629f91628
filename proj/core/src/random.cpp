#include "qprog/random.hpp"

#include "qprog/error.hpp"

#include <cmath>

namespace qprog {

CMatrix ginibre(Index rows, Index cols, Rng& rng) {
    CMatrix g(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) g(r, c) = rng.complex_normal();
    return g;
}

CMatrix random_hermitian(Index d, Rng& rng) { return hermitian_part(ginibre(d, d, rng)); }

CMatrix random_unitary(Index d, Rng& rng) {
    const CMatrix g = ginibre(d, d, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // phase correction gives the Haar measure
    for (Index k = 0; k < d; ++k) {
        const cplx rk = r(k, k);
        if (std::abs(rk) > 0.0) q.col(k) *= rk / std::abs(rk);
    }
    return q;
}

CVector random_pure(Index d, Rng& rng) {
    CVector v = ginibre(d, 1, rng).col(0);
    return v / v.norm();
}

DensityOperator random_state(Index d, Rng& rng, Index rank) {
    if (rank <= 0 || rank > d) rank = d;
    const CMatrix g = ginibre(d, rank, rng);
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityOperator(hermitian_part(rho));
}

KrausChannel random_channel(Index d_in, Index d_out, Index n_kraus, Rng& rng) {
    if (n_kraus <= 0) n_kraus = d_in * d_out;
    // isometry d_in -> d_out * n_kraus from a Haar unitary
    const Index big = d_out * n_kraus;
    if (big < d_in) throw argument_error("random_channel: too few Kraus operators");
    const CMatrix v = random_unitary(big, rng).leftCols(d_in);
    std::vector<CMatrix> ops;
    for (Index k = 0; k < n_kraus; ++k) ops.push_back(v.middleRows(k * d_out, d_out));
    return KrausChannel(d_in, d_out, std::move(ops));
}

ChoiMatrix random_choi(Index d_in, Index d_out, Rng& rng, Index n_kraus) {
    return choi_from_kraus(random_channel(d_in, d_out, n_kraus, rng));
}

std::vector<double> random_probabilities(Index n, Rng& rng) {
    std::vector<double> p(n);
    double total = 0.0;
    for (auto& x : p) {
        x = -std::log(1.0 - rng.uniform());
        total += x;
    }
    for (auto& x : p) x /= total;
    return p;
}

}  // namespace qprog
