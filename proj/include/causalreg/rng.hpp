#pragma once

#include "causalreg/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace causalreg {

/// Mixes a base seed with a stream index (SplitMix64 finaliser). Every
/// replicate, fold, or subsample draws from its own derived stream so results
/// do not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded generator. Distributions are implemented here rather than with the
/// <random> distribution classes, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();           // [0, 1)
    double normal();            // N(0, 1), polar method
    std::uint64_t below(std::uint64_t bound);  // uniform on [0, bound)

    Vector normal_vector(Index size);
    Matrix normal_matrix(Index rows, Index cols);

    /// Random permutation of 0..n-1 (Fisher-Yates).
    std::vector<Index> permutation(Index n);
    /// k distinct indices from 0..n-1, in draw order.
    std::vector<Index> sample_without_replacement(Index n, Index k);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace causalreg
