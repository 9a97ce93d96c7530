#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ri::ctrl {

enum class Activation { Tanh, Relu, Linear };

struct MlpLayer {
    std::vector<std::vector<double>> weights;  // row-major, [out][in]
    std::vector<double> bias;
    Activation act = Activation::Linear;
};

struct MlpModel {
    std::vector<MlpLayer> layers;

    size_t input_dim() const { return layers.empty() ? 0 : layers.front().weights[0].size(); }
    size_t output_dim() const { return layers.empty() ? 0 : layers.back().weights.size(); }
};

class DimensionMismatch : public std::runtime_error {
public:
    explicit DimensionMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

std::vector<double> mlp_infer(const MlpModel& model, const std::vector<double>& x);

// JSON weights file (schema in docs/formats.md).
MlpModel load_mlp_json(const std::string& path);
void save_mlp_json(const MlpModel& model, const std::string& path);

// Steering network computing a smoothed left/right clearance comparison
// over the scan; stands in for a trained model so the full network-based
// control path can run (and be timed) without external weights. Hidden
// width is padded with inert units to reach realistic layer sizes.
MlpModel make_reference_steer_mlp(size_t ray_count, size_t hidden_width, double gain);

}  // namespace ri::ctrl
