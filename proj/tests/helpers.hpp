#pragma once

#include <phslab/models.hpp>
#include <phslab/numerics.hpp>

#include <random>
#include <vector>

namespace phslab::testing {

/// Deterministic by default; PHS_LAB_SEED overrides for property sampling.
inline std::mt19937_64 make_rng(std::uint64_t salt = 0) {
    return std::mt19937_64(sampling_seed() + salt);
}

inline std::vector<Vec> sample_states(const StateBox& box, int count, std::mt19937_64& rng) {
    std::vector<Vec> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(sample_box(rng, box.lo, box.hi));
    return out;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace phslab::testing
