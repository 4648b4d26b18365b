#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nprr/core.hpp"
#include "nprr/random.hpp"

namespace nprr {

enum class ShuffleMode { independent, shuffle_once, fixed_incremental };

std::string to_string(ShuffleMode mode);
ShuffleMode parse_shuffle_mode(const std::string& text);

/// 0-based permutation of [n].
using Permutation = std::vector<std::size_t>;

void fisher_yates(Permutation& perm, Rng& rng);

/// Per-run source of epoch permutations.
///
/// independent:        epoch k uses a generator seeded from (seed, k), so
///                     permutation k does not depend on earlier epochs.
/// shuffle_once:       one uniform permutation drawn at construction.
/// fixed_incremental:  identity every epoch.
///
/// Single owner; not thread-safe.
class PermutationStream {
  public:
    PermutationStream(std::size_t n, ShuffleMode mode, std::uint64_t seed);

    /// Permutation for the next epoch (epochs are numbered from 1).
    const Permutation& next();
    /// Permutation epoch k would receive, without touching the stream.
    Permutation at_epoch(std::uint64_t k) const;

    std::size_t n() const noexcept { return n_; }
    ShuffleMode mode() const noexcept { return mode_; }
    std::uint64_t epochs_drawn() const noexcept { return epoch_; }

  private:
    std::size_t n_;
    ShuffleMode mode_;
    std::uint64_t seed_;
    std::uint64_t epoch_ = 0;
    Permutation current_;
};

/// Population variance (1/n) sum ||X_i - mean||^2.
double population_variance(const std::vector<Vector>& xs);

/// E ||mean of t samples drawn without replacement - mean||^2
///   = (n - t) / (t (n - 1)) * sigma^2.
double expected_partial_variance(const std::vector<Vector>& xs, std::size_t t);

struct PartialMeanEstimate {
    double mean_bias = 0.0;  // || average of sampled partial means - mean ||
    double var_est = 0.0;    // average of || partial mean - mean ||^2
    double std_error = 0.0;  // standard error of var_est
};

PartialMeanEstimate partial_mean_variance_mc(const std::vector<Vector>& xs, std::size_t t,
                                             std::size_t trials, Rng& rng);

}  // namespace nprr
