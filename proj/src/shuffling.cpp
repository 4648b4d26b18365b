#include "nprr/shuffling.hpp"

#include <cmath>
#include <numeric>

#include "nprr/kernels.hpp"

namespace nprr {

std::string to_string(ShuffleMode mode) {
    switch (mode) {
        case ShuffleMode::independent: return "independent";
        case ShuffleMode::shuffle_once: return "shuffle-once";
        case ShuffleMode::fixed_incremental: return "incremental";
    }
    return "unknown";
}

ShuffleMode parse_shuffle_mode(const std::string& text) {
    if (text == "independent" || text == "rr") return ShuffleMode::independent;
    if (text == "shuffle-once" || text == "so") return ShuffleMode::shuffle_once;
    if (text == "incremental" || text == "fixed-incremental") return ShuffleMode::fixed_incremental;
    throw ParameterError("unknown shuffle mode '" + text + "'");
}

void fisher_yates(Permutation& perm, Rng& rng) {
    for (std::size_t i = perm.size(); i > 1; --i) {
        const std::size_t j = rng.below(i);
        std::swap(perm[i - 1], perm[j]);
    }
}

PermutationStream::PermutationStream(std::size_t n, ShuffleMode mode, std::uint64_t seed)
    : n_(n), mode_(mode), seed_(seed), current_(n) {
    if (n == 0) throw ParameterError("permutation stream needs n >= 1");
    std::iota(current_.begin(), current_.end(), std::size_t{0});
    if (mode_ == ShuffleMode::shuffle_once) current_ = at_epoch(1);
}

Permutation PermutationStream::at_epoch(std::uint64_t k) const {
    Permutation p(n_);
    std::iota(p.begin(), p.end(), std::size_t{0});
    if (mode_ == ShuffleMode::fixed_incremental) return p;
    const std::uint64_t counter = mode_ == ShuffleMode::shuffle_once ? 1 : k;
    Rng rng(derive_seed(seed_, Stream::permutation, counter));
    fisher_yates(p, rng);
    return p;
}

const Permutation& PermutationStream::next() {
    ++epoch_;
    if (mode_ == ShuffleMode::independent) current_ = at_epoch(epoch_);
    return current_;
}

namespace {

Vector mean_of(const std::vector<Vector>& xs) {
    Vector mean(xs.front().size(), 0.0);
    for (const auto& x : xs) kernels::axpy(1.0, x, mean);
    kernels::scale(1.0 / static_cast<double>(xs.size()), mean, mean);
    return mean;
}

void require_set(const std::vector<Vector>& xs) {
    if (xs.empty()) throw ParameterError("vector set must be non-empty");
    for (const auto& x : xs)
        if (x.size() != xs.front().size()) throw ParameterError("vectors must share one dimension");
}

}  // namespace

double population_variance(const std::vector<Vector>& xs) {
    require_set(xs);
    const Vector mean = mean_of(xs);
    double s = 0.0;
    for (const auto& x : xs) s += kernels::sq_dist(x, mean);
    return s / static_cast<double>(xs.size());
}

double expected_partial_variance(const std::vector<Vector>& xs, std::size_t t) {
    require_set(xs);
    const std::size_t n = xs.size();
    if (t < 1 || t > n) throw ParameterError("sample size t must lie in [1, n]");
    if (n == 1 || t == n) return 0.0;
    const double nd = static_cast<double>(n);
    const double td = static_cast<double>(t);
    return (nd - td) / (td * (nd - 1.0)) * population_variance(xs);
}

PartialMeanEstimate partial_mean_variance_mc(const std::vector<Vector>& xs, std::size_t t,
                                             std::size_t trials, Rng& rng) {
    require_set(xs);
    const std::size_t n = xs.size();
    if (t < 1 || t > n) throw ParameterError("sample size t must lie in [1, n]");
    if (trials == 0) throw ParameterError("need at least one trial");
    const std::size_t d = xs.front().size();
    const Vector mean = mean_of(xs);
    // every full sample has the population mean; skip the rounding noise of
    // re-summing in shuffled order
    if (t == n) return {};

    Permutation perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Vector partial(d);
    Vector bias(d, 0.0);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        // partial Fisher-Yates: only the first t slots are needed
        for (std::size_t i = 0; i < t; ++i) {
            const std::size_t j = i + rng.below(n - i);
            std::swap(perm[i], perm[j]);
        }
        std::fill(partial.begin(), partial.end(), 0.0);
        for (std::size_t i = 0; i < t; ++i) kernels::axpy(1.0, xs[perm[i]], partial);
        kernels::scale(1.0 / static_cast<double>(t), partial, partial);
        const double e = kernels::sq_dist(partial, mean);
        sum += e;
        sum_sq += e * e;
        kernels::axpy(1.0, partial, bias);
    }
    const double tr = static_cast<double>(trials);
    PartialMeanEstimate est;
    kernels::scale(1.0 / tr, bias, bias);
    est.mean_bias = std::sqrt(kernels::sq_dist(bias, mean));
    est.var_est = sum / tr;
    const double var_of_e = std::max(sum_sq / tr - est.var_est * est.var_est, 0.0);
    est.std_error = std::sqrt(var_of_e / tr);
    return est;
}

}  // namespace nprr
