#include "sane/adaptation.hpp"

namespace sane {

Violations AdaptationConfig::validate() const {
    Violations out;
    auto check = [&](int value, const char* name) {
        if (value < 1) {
            out.push_back({std::string("adaptation.") + name, "must be >= 1"});
        }
    };
    check(lambda_T, "lambda_T");
    check(xi_T, "xi_T");
    check(lambda_N, "lambda_N");
    check(xi_N, "xi_N");
    check(tau_N, "tau_N");
    return out;
}

AdaptationState AdaptationState::initial(const AdaptationConfig& config) {
    return AdaptationState{config.lambda_T, config.lambda_N, 0, std::nullopt};
}

AdaptationState step(const AdaptationState& state, double best_fitness_now, const AdaptationConfig& config) {
    AdaptationState next = state;
    next.generation = state.generation + 1;
    next.best_fitness_prev = best_fitness_now;

    if (state.generation == 0 || !state.best_fitness_prev) {
        next.T = config.lambda_T;
        next.N = config.lambda_N;
        return next;
    }

    const bool improved = best_fitness_now > *state.best_fitness_prev;
    const bool t_exceeds_n = state.T > state.N;

    if (t_exceeds_n && state.N <= config.tau_N) {
        next.N = state.N + config.xi_N;
    } else {
        next.N = state.N;
    }

    if (improved || t_exceeds_n) {
        next.T = config.lambda_T;
    } else {
        next.T = state.T + config.xi_T;
    }
    return next;
}

}  // namespace sane
