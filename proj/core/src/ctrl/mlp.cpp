#include <cmath>
#include <fstream>

#include "ri/ctrl/mlp.hpp"

#include "json.hpp"

namespace ri::ctrl {

namespace {

double apply_act(Activation act, double x) {
    switch (act) {
        case Activation::Tanh: return std::tanh(x);
        case Activation::Relu: return x > 0.0 ? x : 0.0;
        case Activation::Linear: return x;
    }
    return x;
}

Activation act_from_name(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "relu") return Activation::Relu;
    if (name == "linear") return Activation::Linear;
    throw std::runtime_error("unknown activation '" + name + "'");
}

const char* act_name(Activation a) {
    switch (a) {
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::Linear: return "linear";
    }
    return "linear";
}

}  // namespace

std::vector<double> mlp_infer(const MlpModel& model, const std::vector<double>& x) {
    std::vector<double> cur = x;
    std::vector<double> next;
    for (const auto& layer : model.layers) {
        if (!layer.weights.empty() && layer.weights[0].size() != cur.size())
            throw DimensionMismatch("layer expects " + std::to_string(layer.weights[0].size()) +
                                    " inputs, got " + std::to_string(cur.size()));
        next.assign(layer.weights.size(), 0.0);
        for (size_t o = 0; o < layer.weights.size(); ++o) {
            double acc = layer.bias.size() > o ? layer.bias[o] : 0.0;
            const auto& row = layer.weights[o];
            for (size_t i = 0; i < row.size(); ++i) acc += row[i] * cur[i];
            next[o] = apply_act(layer.act, acc);
        }
        cur.swap(next);
    }
    return cur;
}

MlpModel load_mlp_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open weights file '" + path + "'");
    nlohmann::json j;
    in >> j;
    MlpModel model;
    for (const auto& jl : j.at("layers")) {
        MlpLayer layer;
        layer.act = act_from_name(jl.at("activation").get<std::string>());
        layer.weights = jl.at("weights").get<std::vector<std::vector<double>>>();
        layer.bias = jl.at("bias").get<std::vector<double>>();
        if (layer.weights.empty() || layer.weights.size() != layer.bias.size())
            throw std::runtime_error("weights file: bias/weight row mismatch");
        for (const auto& row : layer.weights) {
            if (row.size() != layer.weights[0].size())
                throw std::runtime_error("weights file: ragged weight matrix");
            for (double w : row)
                if (!std::isfinite(w)) throw std::runtime_error("weights file: non-finite weight");
        }
        model.layers.push_back(std::move(layer));
    }
    // Consecutive layer dimensions must chain.
    for (size_t i = 1; i < model.layers.size(); ++i) {
        if (model.layers[i].weights[0].size() != model.layers[i - 1].weights.size())
            throw DimensionMismatch("layer " + std::to_string(i) + " input width mismatch");
    }
    return model;
}

void save_mlp_json(const MlpModel& model, const std::string& path) {
    nlohmann::json j;
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : model.layers) {
        nlohmann::json jl;
        jl["activation"] = act_name(layer.act);
        jl["weights"] = layer.weights;
        jl["bias"] = layer.bias;
        j["layers"].push_back(std::move(jl));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write weights file '" + path + "'");
    out << j.dump(2) << "\n";
}

MlpModel make_reference_steer_mlp(size_t ray_count, size_t hidden_width, double gain) {
    const size_t n = ray_count;
    const size_t h = std::max<size_t>(hidden_width, 4);
    const size_t center = (n - 1) / 2;
    // Keep the first hidden layer in the near-linear tanh regime.
    const double alpha = 0.004;

    MlpModel model;
    MlpLayer l1;
    l1.act = Activation::Tanh;
    l1.weights.assign(h, std::vector<double>(n, 0.0));
    l1.bias.assign(h, 0.0);
    for (size_t i = 0; i < n; ++i) {
        if (i < center) l1.weights[0][i] = alpha;   // left half sum
        if (i > center) l1.weights[1][i] = alpha;   // right half sum
    }
    // Inert units with small structured weights: they contribute real
    // arithmetic but cancel in the readout.
    for (size_t o = 2; o < h; ++o)
        for (size_t i = 0; i < n; ++i)
            l1.weights[o][i] = 1e-4 * std::sin(0.7 * static_cast<double>(o * n + i));

    MlpLayer l2;
    l2.act = Activation::Tanh;
    l2.weights.assign(h, std::vector<double>(h, 0.0));
    l2.bias.assign(h, 0.0);
    l2.weights[0][0] = -2.0;  // left open -> negative pre-activation
    l2.weights[0][1] = 2.0;   // right open -> positive
    for (size_t o = 1; o < h; ++o)
        for (size_t i = 0; i < h; ++i)
            l2.weights[o][i] = 1e-4 * std::cos(0.3 * static_cast<double>(o * h + i));

    MlpLayer l3;
    l3.act = Activation::Linear;
    l3.weights.assign(1, std::vector<double>(h, 0.0));
    l3.bias.assign(1, 0.0);
    l3.weights[0][0] = gain;

    model.layers = {std::move(l1), std::move(l2), std::move(l3)};
    return model;
}

}  // namespace ri::ctrl
