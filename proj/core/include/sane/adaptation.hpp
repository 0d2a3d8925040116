#pragma once

#include <optional>

#include "sane/search_space.hpp"

namespace sane {

/// Initial values, steps and the NpI threshold of the self-adaptive controls.
struct AdaptationConfig {
    int lambda_T = 1;
    int xi_T = 1;
    int lambda_N = 1;
    int xi_N = 1;
    int tau_N = 10;

    Violations validate() const;
    friend bool operator==(const AdaptationConfig&, const AdaptationConfig&) = default;
};

/// T: variation rounds per generation (exploitation depth).
/// N: offspring per individual (exploration width).
struct AdaptationState {
    int T = 1;
    int N = 1;
    int generation = 0;
    std::optional<double> best_fitness_prev;

    static AdaptationState initial(const AdaptationConfig& config);
    friend bool operator==(const AdaptationState&, const AdaptationState&) = default;
};

/// Next (T, N) from the generation's best fitness. Both updates read the
/// pre-update T and N. On the first step both reset to their initial values.
/// T resets when fitness strictly improves or T exceeded N, otherwise grows
/// by xi_T. N grows by xi_N when T exceeded N and N had not passed tau_N.
AdaptationState step(const AdaptationState& state, double best_fitness_now, const AdaptationConfig& config);

}  // namespace sane
