#include "rainsr/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "wire.hpp"

namespace rainsr::nn {

namespace {

constexpr char kMagic[4] = {'R', 'N', 'C', 'K'};

template <typename Model>
nlohmann::json layer_table(const Model& model) {
    nlohmann::json layers = nlohmann::json::array();
    auto names = model.layer_names();
    auto ptrs = model.layers();
    for (size_t i = 0; i < ptrs.size(); ++i) {
        layers.push_back({{"name", names[i]},
                          {"in_channels", ptrs[i]->in_ch},
                          {"out_channels", ptrs[i]->out_ch},
                          {"kernel", 3}});
    }
    return layers;
}

template <typename Model>
void write_payload(const Model& model, std::ostream& out) {
    for (const ConvLayer<float>* layer : model.layers()) {
        for (float v : layer->weight)
            wire::put_f32le(out, v);
        for (float v : layer->bias)
            wire::put_f32le(out, v);
    }
}

template <typename Model>
void read_payload(Model& model, std::istream& in) {
    for (ConvLayer<float>* layer : model.layers()) {
        std::vector<unsigned char> buf((layer->weight.size() + layer->bias.size()) * 4);
        in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
        if (size_t(in.gcount()) != buf.size())
            throw TruncationError("load_checkpoint: payload shorter than declared layers");
        const unsigned char* p = buf.data();
        for (float& v : layer->weight) {
            v = wire::f32_from_le(p);
            p += 4;
        }
        for (float& v : layer->bias) {
            v = wire::f32_from_le(p);
            p += 4;
        }
    }
}

template <typename Model>
void check_layer_table(const Model& model, const nlohmann::json& layers) {
    auto ptrs = model.layers();
    if (layers.size() != ptrs.size())
        throw FormatError("load_checkpoint: layer count mismatch");
    for (size_t i = 0; i < ptrs.size(); ++i) {
        if (layers[i].at("in_channels").get<int>() != ptrs[i]->in_ch ||
            layers[i].at("out_channels").get<int>() != ptrs[i]->out_ch)
            throw FormatError("load_checkpoint: layer shape mismatch");
    }
}

} // namespace

std::string model_kind_name(ModelKind kind) {
    return kind == ModelKind::cnn_baseline ? "cnn_baseline" : "tempnet";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "cnn_baseline" || name == "cnn")
        return ModelKind::cnn_baseline;
    if (name == "tempnet")
        return ModelKind::tempnet;
    throw ConfigError("unknown model kind: " + name);
}

void save_checkpoint(const ModelParams& params, const CheckpointMeta& meta,
                     const std::filesystem::path& path) {
    nlohmann::json header;
    header["format"] = "rainsr-checkpoint-v1";
    header["architecture"] = meta.architecture;
    header["epoch"] = meta.epoch;
    header["seed"] = meta.seed;
    header["optimizer"] = {{"name", "adam"},
                           {"lr", meta.lr},
                           {"beta1", meta.beta1},
                           {"beta2", meta.beta2},
                           {"eps", meta.eps}};
    header["scheduler"] = {{"name", "reduce_on_plateau"},
                           {"factor", meta.plateau_factor},
                           {"patience", meta.plateau_patience},
                           {"min_lr", meta.plateau_min_lr}};
    header["init"] = meta.init;
    header["rng"] = meta.rng;
    header["scalar"] = "f32";
    std::visit([&](const auto& model) { header["layers"] = layer_table(model); }, params);

    const std::string header_text = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("save_checkpoint: cannot open " + path.string());
    out.write(kMagic, 4);
    wire::put_u32le(out, uint32_t(header_text.size()));
    out.write(header_text.data(), std::streamsize(header_text.size()));
    std::visit([&](const auto& model) { write_payload(model, out); }, params);
    if (!out)
        throw IoError("save_checkpoint: write failure on " + path.string());
}

std::pair<ModelParams, CheckpointMeta> load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("load_checkpoint: cannot open " + path.string());
    unsigned char head[8];
    in.read(reinterpret_cast<char*>(head), 8);
    if (in.gcount() != 8)
        throw TruncationError("load_checkpoint: file shorter than header");
    if (std::memcmp(head, kMagic, 4) != 0)
        throw FormatError("load_checkpoint: bad magic");
    const uint32_t header_len = wire::get_u32le(head + 4);
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), header_len);
    if (size_t(in.gcount()) != header_len)
        throw TruncationError("load_checkpoint: truncated header");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("load_checkpoint: bad header JSON: " + std::string(e.what()));
    }

    CheckpointMeta meta;
    meta.architecture = header.at("architecture").get<std::string>();
    meta.epoch = header.at("epoch").get<int>();
    meta.seed = header.at("seed").get<uint64_t>();
    meta.lr = header.at("optimizer").at("lr").get<double>();
    meta.beta1 = header.at("optimizer").at("beta1").get<double>();
    meta.beta2 = header.at("optimizer").at("beta2").get<double>();
    meta.eps = header.at("optimizer").at("eps").get<double>();
    meta.plateau_factor = header.at("scheduler").at("factor").get<double>();
    meta.plateau_patience = header.at("scheduler").at("patience").get<int>();
    meta.plateau_min_lr = header.at("scheduler").at("min_lr").get<double>();
    meta.init = header.value("init", "uniform_fanin");
    meta.rng = header.value("rng", "mt19937_64");

    ModelParams params;
    if (meta.architecture == "cnn_baseline")
        params = CnnBaseline<float>{};
    else if (meta.architecture == "tempnet")
        params = TempNet<float>{};
    else
        throw FormatError("load_checkpoint: unknown architecture " + meta.architecture);

    std::visit(
        [&](auto& model) {
            check_layer_table(model, header.at("layers"));
            read_payload(model, in);
        },
        params);
    return {std::move(params), meta};
}

} // namespace rainsr::nn
