#include "rainsr/models.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "rainsr/checkpoint.hpp"

namespace rainsr::nn {

void TrainConfig::validate() const {
    if (batch_size < 1)
        throw ConfigError("TrainConfig: batch_size must be >= 1");
    if (lr <= 0.0)
        throw ConfigError("TrainConfig: lr must be > 0");
    if (epochs < 0)
        throw ConfigError("TrainConfig: epochs must be >= 0");
}

namespace {

void fill_plane(Tensor4<float>& t, int sample, int channel, const RainMap& map) {
    std::copy(map.values.begin(), map.values.end(), t.plane(sample, channel));
}

struct Batch {
    Tensor4<float> before, after, target;
};

Batch make_batch(const std::vector<TripleSample>& samples, const std::vector<size_t>& idx) {
    const RainMap& first = samples[idx.front()].before;
    const int h = int(first.rows), w = int(first.cols);
    Batch b{Tensor4<float>(int(idx.size()), 1, h, w), Tensor4<float>(int(idx.size()), 1, h, w),
            Tensor4<float>(int(idx.size()), 1, h, w)};
    for (size_t k = 0; k < idx.size(); ++k) {
        const TripleSample& s = samples[idx[k]];
        fill_plane(b.before, int(k), 0, s.before);
        fill_plane(b.after, int(k), 0, s.after);
        fill_plane(b.target, int(k), 0, s.target);
    }
    return b;
}

template <typename Model>
Tensor4<float> model_forward(const Model& model, const Batch& batch,
                             typename Model::Tape* tape) {
    if constexpr (std::is_same_v<Model, CnnBaseline<float>>) {
        return model.forward(concat_channels(batch.before, batch.after), tape);
    } else {
        return model.forward(batch.before, batch.after, tape);
    }
}

template <typename Model>
void model_backward(Model& model, const typename Model::Tape& tape, const Tensor4<float>& gy) {
    model.backward(tape, gy);
}

template <typename Model>
std::vector<std::span<float>> param_views(Model& model) {
    std::vector<std::span<float>> out;
    for (ConvLayer<float>* layer : model.layers()) {
        out.emplace_back(layer->weight);
        out.emplace_back(layer->bias);
    }
    return out;
}

template <typename Model>
std::vector<std::span<const float>> grad_views(Model& model) {
    std::vector<std::span<const float>> out;
    for (ConvLayer<float>* layer : model.layers()) {
        out.emplace_back(layer->weight_grad);
        out.emplace_back(layer->bias_grad);
    }
    return out;
}

/// Mean L1 over a sample list, evaluated in fixed chunks (no shuffle).
template <typename Model>
double evaluate_loss(const Model& model, const std::vector<TripleSample>& samples,
                     size_t batch_size) {
    double abs_sum = 0.0;
    size_t n_elems = 0;
    for (size_t start = 0; start < samples.size(); start += batch_size) {
        std::vector<size_t> idx;
        for (size_t i = start; i < std::min(samples.size(), start + batch_size); ++i)
            idx.push_back(i);
        Batch batch = make_batch(samples, idx);
        Tensor4<float> pred = model_forward(model, batch, nullptr);
        abs_sum += l1_loss(pred, batch.target) * double(pred.size());
        n_elems += pred.size();
    }
    return n_elems == 0 ? 0.0 : abs_sum / double(n_elems);
}

template <typename Model>
TrainResult train_impl(const DatasetSplit& split, const TrainConfig& config) {
    Model model;
    model.init(config.seed);

    AdamState<float> adam;
    adam.lr = config.lr;
    PlateauState plateau;
    plateau.patience = config.plateau_patience;
    plateau.factor = config.plateau_factor;
    plateau.min_lr = config.plateau_min_lr;
    plateau.lr = config.lr;

    TrainResult result;
    result.best_epoch = 0;
    Model best = model;
    double best_test = std::numeric_limits<double>::infinity();

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const double lr_used = adam.lr;

        double abs_sum = 0.0;
        size_t n_elems = 0;
        const auto batches =
            epoch_batches(split.train.size(), size_t(config.batch_size), config.seed,
                          uint64_t(epoch));
        for (const auto& idx : batches) {
            Batch batch = make_batch(split.train, idx);
            typename Model::Tape tape;
            Tensor4<float> pred = model_forward(model, batch, &tape);
            const double loss = l1_loss(pred, batch.target);
            if (!std::isfinite(loss))
                throw NumericError("train: non-finite batch loss at epoch " +
                                   std::to_string(epoch));
            abs_sum += loss * double(pred.size());
            n_elems += pred.size();
            Tensor4<float> gy = l1_loss_backward(pred, batch.target);
            model_backward(model, tape, gy);
            adam_step(param_views(model), grad_views(model), adam);
        }
        const double train_loss = abs_sum / double(n_elems);
        const double test_loss = evaluate_loss(model, split.test, size_t(config.batch_size));
        if (!std::isfinite(train_loss) || !std::isfinite(test_loss))
            throw NumericError("train: non-finite epoch loss at epoch " + std::to_string(epoch));

        adam.lr = plateau_update(plateau, train_loss);

        const auto t1 = std::chrono::steady_clock::now();
        const double seconds =
            config.reference_mode
                ? 0.0
                : std::chrono::duration<double>(t1 - t0).count();
        result.history.push_back({epoch, train_loss, test_loss, seconds, lr_used});

        if (test_loss < best_test) {
            best_test = test_loss;
            best = model;
            result.best_epoch = epoch;
        }
    }

    result.params = std::move(model);
    result.best_params = std::move(best);
    return result;
}

std::filesystem::path best_checkpoint_path(const std::filesystem::path& final_path) {
    std::filesystem::path p = final_path;
    p.replace_extension();
    p += ".best";
    p += final_path.extension();
    return p;
}

} // namespace

TrainResult train(ModelKind kind, const DatasetSplit& split, const TrainConfig& config) {
    config.validate();
    if (split.train.empty())
        throw ConfigError("train: empty train set");

    TrainResult result = kind == ModelKind::cnn_baseline
                             ? train_impl<CnnBaseline<float>>(split, config)
                             : train_impl<TempNet<float>>(split, config);

    if (!config.checkpoint_out.empty()) {
        CheckpointMeta meta;
        meta.architecture = model_kind_name(kind);
        meta.epoch = config.epochs;
        meta.seed = config.seed;
        meta.lr = config.lr;
        meta.plateau_factor = config.plateau_factor;
        meta.plateau_patience = config.plateau_patience;
        meta.plateau_min_lr = config.plateau_min_lr;
        save_checkpoint(result.params, meta, config.checkpoint_out);
        CheckpointMeta best_meta = meta;
        best_meta.epoch = result.best_epoch;
        save_checkpoint(result.best_params, best_meta, best_checkpoint_path(config.checkpoint_out));
    }
    return result;
}

void write_history_csv(const std::vector<EpochStats>& history,
                       const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("write_history_csv: cannot open " + path.string());
    out << "epoch,train_loss,test_loss,epoch_seconds,lr\n";
    char buf[160];
    for (const EpochStats& row : history) {
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.3f,%.9g\n", row.epoch, row.train_loss,
                      row.test_loss, row.epoch_seconds, row.lr);
        out << buf;
    }
    if (!out)
        throw IoError("write_history_csv: write failure on " + path.string());
}

namespace {

Tensor4<float> map_to_tensor(const RainMap& map) {
    Tensor4<float> t(1, 1, int(map.rows), int(map.cols));
    std::copy(map.values.begin(), map.values.end(), t.v.begin());
    return t;
}

RainMap tensor_to_map(const Tensor4<float>& t, bool normalized) {
    RainMap map(uint32_t(t.h), uint32_t(t.w), normalized);
    // Final ReLU already enforces non-negativity; normalized maps are
    // additionally capped at 1 so outputs stay valid RainMaps.
    for (size_t i = 0; i < map.size(); ++i) {
        float v = t.v[i];
        if (normalized && v > 1.0f)
            v = 1.0f;
        map.values[i] = v;
    }
    return map;
}

} // namespace

RainMap predict_cnn(const CnnBaseline<float>& model, const RainMap& before,
                    const RainMap& after) {
    if (!before.same_shape(after))
        throw ShapeError("predict_cnn: shape mismatch");
    Tensor4<float> x = concat_channels(map_to_tensor(before), map_to_tensor(after));
    return tensor_to_map(model.forward(x), before.normalized);
}

RainMap predict_tempnet(const TempNet<float>& model, const RainMap& before,
                        const RainMap& after) {
    if (!before.same_shape(after))
        throw ShapeError("predict_tempnet: shape mismatch");
    return tensor_to_map(model.forward(map_to_tensor(before), map_to_tensor(after)),
                         before.normalized);
}

} // namespace rainsr::nn
