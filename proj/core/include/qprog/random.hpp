#pragma once

#include "qprog/linalg.hpp"
#include "qprog/quantum.hpp"

#include <cstdint>
#include <random>

namespace qprog {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    cplx complex_normal() { return {normal(), normal()}; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

CMatrix ginibre(Index rows, Index cols, Rng& rng);
// GUE sample (rotation-invariant Hermitian ensemble).
CMatrix random_hermitian(Index d, Rng& rng);
CMatrix random_unitary(Index d, Rng& rng);
CVector random_pure(Index d, Rng& rng);
// Hilbert–Schmidt-type random state of the given rank (rank = d gives full rank).
DensityOperator random_state(Index d, Rng& rng, Index rank = 0);
KrausChannel random_channel(Index d_in, Index d_out, Index n_kraus, Rng& rng);
ChoiMatrix random_choi(Index d_in, Index d_out, Rng& rng, Index n_kraus = 0);
std::vector<double> random_probabilities(Index n, Rng& rng);

}  // namespace qprog
