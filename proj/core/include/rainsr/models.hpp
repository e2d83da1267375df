#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "rainsr/dataset.hpp"
#include "rainsr/optim.hpp"
#include "rainsr/rng.hpp"
#include "rainsr/tensor.hpp"

namespace rainsr::nn {

namespace detail {

/// Weights and biases uniform in +-sqrt(1/(in_channels*9)), drawn in
/// declaration order (weights first, then bias) from the shared stream.
template <typename T>
void init_layer(ConvLayer<T>& layer, Rng& rng) {
    const double bound = std::sqrt(1.0 / (double(layer.in_ch) * 9.0));
    for (T& w : layer.weight)
        w = T(rng.uniform(-bound, bound));
    for (T& b : layer.bias)
        b = T(rng.uniform(-bound, bound));
}

} // namespace detail

/// 4-layer CNN over the 2-channel (before, after) stack; ReLU after every
/// layer. Channel chain 2 -> 3 -> 5 -> 3 -> 1.
template <typename T>
class CnnBaseline {
public:
    ConvLayer<T> conv1{2, 3}, conv2{3, 5}, conv3{5, 3}, conv4{3, 1};

    struct Tape {
        Tensor4<T> x;                // (N,2,H,W) input stack
        Tensor4<T> a1, a2, a3, y;    // post-ReLU activations
    };

    void init(uint64_t seed) {
        Rng rng(seed);
        detail::init_layer(conv1, rng);
        detail::init_layer(conv2, rng);
        detail::init_layer(conv3, rng);
        detail::init_layer(conv4, rng);
    }

    Tensor4<T> forward(const Tensor4<T>& x, Tape* tape = nullptr) const {
        Tensor4<T> a1 = relu(conv2d_forward(x, conv1));
        Tensor4<T> a2 = relu(conv2d_forward(a1, conv2));
        Tensor4<T> a3 = relu(conv2d_forward(a2, conv3));
        Tensor4<T> y = relu(conv2d_forward(a3, conv4));
        if (tape) {
            tape->x = x;
            tape->a1 = std::move(a1);
            tape->a2 = std::move(a2);
            tape->a3 = std::move(a3);
            tape->y = y;
        }
        return y;
    }

    /// Fills every layer's weight/bias gradients; returns d loss / d input.
    Tensor4<T> backward(const Tape& tape, const Tensor4<T>& gy) {
        Tensor4<T> g = relu_backward(tape.y, gy);
        g = conv2d_backward(tape.a3, conv4, g);
        g = relu_backward(tape.a3, g);
        g = conv2d_backward(tape.a2, conv3, g);
        g = relu_backward(tape.a2, g);
        g = conv2d_backward(tape.a1, conv2, g);
        g = relu_backward(tape.a1, g);
        return conv2d_backward(tape.x, conv1, g);
    }

    std::vector<ConvLayer<T>*> layers() {
        return {&conv1, &conv2, &conv3, &conv4};
    }
    std::vector<const ConvLayer<T>*> layers() const {
        return {&conv1, &conv2, &conv3, &conv4};
    }
    std::vector<std::string> layer_names() const {
        return {"conv_1", "conv_2", "conv_3", "conv_4"};
    }

    size_t param_count() const {
        return conv1.param_count() + conv2.param_count() + conv3.param_count() +
               conv4.param_count();
    }
};

/// Residual interpolator: two independent single-channel conv stacks encode
/// the predecessor and successor frames, their difference is added onto the
/// predecessor (skip connection), and a fuse stack maps that sum to the
/// intermediate frame. Branches end linear so the residual is signed; the
/// fuse stack ends in ReLU so rain stays non-negative.
template <typename T>
class TempNet {
public:
    // branch on t0: 1 -> 4 -> 4 -> 1, ReLU between layers, linear last
    ConvLayer<T> pred1{1, 4}, pred2{4, 4}, pred3{4, 1};
    // identically shaped, independent branch on t10
    ConvLayer<T> succ1{1, 4}, succ2{4, 4}, succ3{4, 1};
    // fuse: 1 -> 4 -> 4 -> 1, ReLU between layers and after the last
    ConvLayer<T> fuse1{1, 4}, fuse2{4, 4}, fuse3{4, 1};

    struct Tape {
        Tensor4<T> before, after;
        Tensor4<T> pa1, pa2, p3; // predecessor branch
        Tensor4<T> sa1, sa2, s3; // successor branch
        Tensor4<T> mid;          // before + (s3 - p3)
        Tensor4<T> fa1, fa2, y;  // fuse
    };

    void init(uint64_t seed) {
        Rng rng(seed);
        for (ConvLayer<T>* l : layers())
            detail::init_layer(*l, rng);
    }

    Tensor4<T> forward(const Tensor4<T>& before, const Tensor4<T>& after,
                       Tape* tape = nullptr) const {
        Tensor4<T> pa1 = relu(conv2d_forward(before, pred1));
        Tensor4<T> pa2 = relu(conv2d_forward(pa1, pred2));
        Tensor4<T> p3 = conv2d_forward(pa2, pred3);
        Tensor4<T> sa1 = relu(conv2d_forward(after, succ1));
        Tensor4<T> sa2 = relu(conv2d_forward(sa1, succ2));
        Tensor4<T> s3 = conv2d_forward(sa2, succ3);
        Tensor4<T> mid = tensor_add(before, tensor_sub(s3, p3));
        Tensor4<T> fa1 = relu(conv2d_forward(mid, fuse1));
        Tensor4<T> fa2 = relu(conv2d_forward(fa1, fuse2));
        Tensor4<T> y = relu(conv2d_forward(fa2, fuse3));
        if (tape) {
            tape->before = before;
            tape->after = after;
            tape->pa1 = std::move(pa1);
            tape->pa2 = std::move(pa2);
            tape->p3 = std::move(p3);
            tape->sa1 = std::move(sa1);
            tape->sa2 = std::move(sa2);
            tape->s3 = std::move(s3);
            tape->mid = std::move(mid);
            tape->fa1 = std::move(fa1);
            tape->fa2 = std::move(fa2);
            tape->y = y;
        }
        return y;
    }

    /// Returns (d loss / d before, d loss / d after).
    std::pair<Tensor4<T>, Tensor4<T>> backward(const Tape& tape, const Tensor4<T>& gy) {
        Tensor4<T> g = relu_backward(tape.y, gy);
        g = conv2d_backward(tape.fa2, fuse3, g);
        g = relu_backward(tape.fa2, g);
        g = conv2d_backward(tape.fa1, fuse2, g);
        g = relu_backward(tape.fa1, g);
        Tensor4<T> gmid = conv2d_backward(tape.mid, fuse1, g);

        // mid = before + s3 - p3
        Tensor4<T> gs = gmid;
        Tensor4<T> gp(gmid.n, gmid.c, gmid.h, gmid.w);
        for (size_t i = 0; i < gmid.size(); ++i)
            gp.v[i] = -gmid.v[i];

        Tensor4<T> gb = conv2d_backward(tape.sa2, succ3, gs);
        gb = relu_backward(tape.sa2, gb);
        gb = conv2d_backward(tape.sa1, succ2, gb);
        gb = relu_backward(tape.sa1, gb);
        Tensor4<T> g_after = conv2d_backward(tape.after, succ1, gb);

        gb = conv2d_backward(tape.pa2, pred3, gp);
        gb = relu_backward(tape.pa2, gb);
        gb = conv2d_backward(tape.pa1, pred2, gb);
        gb = relu_backward(tape.pa1, gb);
        Tensor4<T> g_before = conv2d_backward(tape.before, pred1, gb);

        // skip connection: mid depends on before directly
        for (size_t i = 0; i < g_before.size(); ++i)
            g_before.v[i] += gmid.v[i];
        return {std::move(g_before), std::move(g_after)};
    }

    std::vector<ConvLayer<T>*> layers() {
        return {&pred1, &pred2, &pred3, &succ1, &succ2, &succ3, &fuse1, &fuse2, &fuse3};
    }
    std::vector<const ConvLayer<T>*> layers() const {
        return {&pred1, &pred2, &pred3, &succ1, &succ2, &succ3, &fuse1, &fuse2, &fuse3};
    }
    std::vector<std::string> layer_names() const {
        return {"pred_1", "pred_2", "pred_3", "succ_1", "succ_2",
                "succ_3", "fuse_1", "fuse_2", "fuse_3"};
    }

    size_t param_count() const {
        size_t n = 0;
        for (const ConvLayer<T>* l : layers())
            n += l->param_count();
        return n;
    }
};

enum class ModelKind { cnn_baseline, tempnet };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

/// Trained parameters of either architecture (float, the training precision).
using ModelParams = std::variant<CnnBaseline<float>, TempNet<float>>;

struct TrainConfig {
    int batch_size = 32;
    double lr = 1e-3;
    int epochs = 50;
    uint64_t seed = 0;
    double plateau_factor = 0.5;
    int plateau_patience = 3;
    double plateau_min_lr = 1e-6;
    /// Reference mode: bitwise-reproducible runs for a fixed seed; the
    /// epoch_seconds history column is recorded as 0 since wall time is not
    /// reproducible.
    bool reference_mode = false;
    /// When non-empty, the final checkpoint is written here and the best
    /// test-loss checkpoint beside it with a ".best" stem suffix.
    std::filesystem::path checkpoint_out;

    void validate() const;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double test_loss = 0.0;
    double epoch_seconds = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    ModelParams params;      // final-epoch parameters
    ModelParams best_params; // parameters at the best test loss
    std::vector<EpochStats> history;
    int best_epoch = 0;
};

/// Full training loop: seeded init, per-epoch seeded shuffle, Adam on L1
/// loss, reduce-on-plateau on the mean epoch training loss, per-epoch test
/// loss. Deterministic per seed in reference mode.
TrainResult train(ModelKind kind, const DatasetSplit& split, const TrainConfig& config);

/// Writes history rows as CSV: epoch,train_loss,test_loss,epoch_seconds,lr.
void write_history_csv(const std::vector<EpochStats>& history,
                       const std::filesystem::path& path);

/// Single-sample inference on rain maps (N=1 tensors).
RainMap predict_cnn(const CnnBaseline<float>& model, const RainMap& before,
                    const RainMap& after);
RainMap predict_tempnet(const TempNet<float>& model, const RainMap& before,
                        const RainMap& after);

} // namespace rainsr::nn
