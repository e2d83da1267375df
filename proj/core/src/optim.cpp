#include "rainsr/optim.hpp"

#include <algorithm>
#include <cmath>

namespace rainsr::nn {

double plateau_update(PlateauState& state, double epoch_loss) {
    if (!std::isfinite(epoch_loss))
        throw NumericError("plateau_update: non-finite epoch loss");
    if (epoch_loss < state.best - state.improvement_eps) {
        state.best = epoch_loss;
        state.bad_epochs = 0;
        return state.lr;
    }
    state.bad_epochs += 1;
    if (state.bad_epochs > state.patience) {
        state.lr = std::max(state.lr * state.factor, state.min_lr);
        state.bad_epochs = 0;
    }
    return state.lr;
}

} // namespace rainsr::nn
