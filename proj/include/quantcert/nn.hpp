#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quantcert::nn {

enum class LayerKind { dense, relu, sigmoid, tanh };

std::string_view to_string(LayerKind kind);

struct Layer {
    LayerKind kind = LayerKind::relu;
    // Dense only: weights are row-major rows x cols, output = W x + b.
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    static Layer dense(std::size_t rows, std::size_t cols, std::vector<double> weights, std::vector<double> bias);
    static Layer activation(LayerKind kind);

    bool operator==(const Layer&) const = default;
};

/// Feed-forward classifier. Immutable once created; forward() is safe to call
/// from any number of threads.
class Model {
public:
    /// Throws Error{shape_error} or Error{non_finite_weight}.
    static Model create(std::size_t input_dim, std::vector<Layer> layers);

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept { return output_dim_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }

    bool operator==(const Model&) const = default;

private:
    Model() = default;

    std::size_t input_dim_ = 0;
    std::size_t output_dim_ = 0;
    std::vector<Layer> layers_;
};

/// Parses the JSON model document:
///   {"input_dim": D, "layers": [{"kind": "dense", "rows": R, "cols": C,
///    "weights": [...], "bias": [...]} | {"kind": "relu"|"sigmoid"|"tanh"}]}
Model load_model(std::string_view document);
Model load_model_file(const std::string& path);
std::string serialize_model(const Model& model);

std::vector<double> forward(const Model& model, std::span<const double> x);

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> values);

std::size_t predict(const Model& model, std::span<const double> x);

}  // namespace quantcert::nn
