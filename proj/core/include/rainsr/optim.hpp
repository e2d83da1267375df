#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rainsr/errors.hpp"

namespace rainsr::nn {

/// Adam optimizer state over a list of parameter groups (one group per
/// weight/bias vector). Defaults follow Kingma & Ba.
template <typename T>
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long long step = 0;
    std::vector<std::vector<T>> m; // first moments, one vector per group
    std::vector<std::vector<T>> v; // second moments
};

/// Bias-corrected Adam update:
///   m <- b1*m + (1-b1)*g;  v <- b2*v + (1-b2)*g^2
///   m^ = m/(1-b1^t);       v^ = v/(1-b2^t)
///   p <- p - lr * m^ / (sqrt(v^) + eps)
/// Moment buffers are allocated on the first call.
template <typename T>
void adam_step(std::vector<std::span<T>> params, std::vector<std::span<const T>> grads,
               AdamState<T>& state) {
    if (params.size() != grads.size())
        throw ShapeError("adam_step: params/grads group count mismatch");
    if (state.m.empty()) {
        state.m.resize(params.size());
        state.v.resize(params.size());
        for (size_t g = 0; g < params.size(); ++g) {
            state.m[g].assign(params[g].size(), T(0));
            state.v[g].assign(params[g].size(), T(0));
        }
    }
    state.step += 1;
    const T b1 = T(state.beta1), b2 = T(state.beta2);
    const T corr1 = T(1.0 / (1.0 - std::pow(state.beta1, double(state.step))));
    const T corr2 = T(1.0 / (1.0 - std::pow(state.beta2, double(state.step))));
    const T lr = T(state.lr), eps = T(state.eps);
    for (size_t g = 0; g < params.size(); ++g) {
        if (params[g].size() != grads[g].size() || params[g].size() != state.m[g].size())
            throw ShapeError("adam_step: group size mismatch");
        T* m = state.m[g].data();
        T* v = state.v[g].data();
        T* p = params[g].data();
        const T* gr = grads[g].data();
        for (size_t i = 0; i < params[g].size(); ++i) {
            m[i] = b1 * m[i] + (T(1) - b1) * gr[i];
            v[i] = b2 * v[i] + (T(1) - b2) * gr[i] * gr[i];
            const T mhat = m[i] * corr1;
            const T vhat = v[i] * corr2;
            p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

/// Reduce-on-plateau scheduler over a scalar epoch loss.
struct PlateauState {
    double best = std::numeric_limits<double>::infinity();
    int bad_epochs = 0;
    int patience = 3;
    double factor = 0.5;
    double min_lr = 1e-6;
    double lr = 1e-3;
    double improvement_eps = 1e-8;
};

/// If the loss improved on the best seen by more than improvement_eps the
/// counter resets; otherwise it increments, and once it exceeds patience the
/// learning rate decays by `factor` (floored at min_lr) and the counter
/// resets. Returns the (possibly updated) learning rate.
double plateau_update(PlateauState& state, double epoch_loss);

} // namespace rainsr::nn
