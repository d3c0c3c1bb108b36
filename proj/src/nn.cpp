#include "quantcert/nn.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "quantcert/error.hpp"

namespace quantcert::nn {

using nlohmann::json;

std::string_view to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::dense: return "dense";
        case LayerKind::relu: return "relu";
        case LayerKind::sigmoid: return "sigmoid";
        case LayerKind::tanh: return "tanh";
    }
    return "unknown";
}

Layer Layer::dense(std::size_t rows, std::size_t cols, std::vector<double> weights, std::vector<double> bias) {
    Layer l;
    l.kind = LayerKind::dense;
    l.rows = rows;
    l.cols = cols;
    l.weights = std::move(weights);
    l.bias = std::move(bias);
    return l;
}

Layer Layer::activation(LayerKind kind) {
    Layer l;
    l.kind = kind;
    return l;
}

Model Model::create(std::size_t input_dim, std::vector<Layer> layers) {
    if (input_dim == 0) {
        throw Error(ErrorCode::shape_error, "model input_dim must be positive");
    }
    std::size_t dim = input_dim;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& l = layers[i];
        if (l.kind != LayerKind::dense) {
            continue;
        }
        std::ostringstream where;
        where << "layer " << i << ": ";
        if (l.rows == 0 || l.cols == 0) {
            throw Error(ErrorCode::shape_error, where.str() + "dense layer needs rows, cols >= 1");
        }
        if (l.cols != dim) {
            where << "expects " << l.cols << " inputs but receives " << dim;
            throw Error(ErrorCode::shape_error, where.str());
        }
        if (l.weights.size() != l.rows * l.cols) {
            where << "weights length " << l.weights.size() << " != rows*cols = " << l.rows * l.cols;
            throw Error(ErrorCode::shape_error, where.str());
        }
        if (l.bias.size() != l.rows) {
            where << "bias length " << l.bias.size() << " != rows = " << l.rows;
            throw Error(ErrorCode::shape_error, where.str());
        }
        for (double w : l.weights) {
            if (!std::isfinite(w)) throw Error(ErrorCode::non_finite_weight, where.str() + "non-finite weight");
        }
        for (double b : l.bias) {
            if (!std::isfinite(b)) throw Error(ErrorCode::non_finite_weight, where.str() + "non-finite bias");
        }
        dim = l.rows;
    }
    if (dim < 2) {
        throw Error(ErrorCode::shape_error, "final output dimension must be at least 2");
    }
    Model m;
    m.input_dim_ = input_dim;
    m.output_dim_ = dim;
    m.layers_ = std::move(layers);
    return m;
}

namespace {

LayerKind parse_kind(const std::string& s) {
    if (s == "dense") return LayerKind::dense;
    if (s == "relu") return LayerKind::relu;
    if (s == "sigmoid") return LayerKind::sigmoid;
    if (s == "tanh") return LayerKind::tanh;
    throw Error(ErrorCode::parse_error, "unknown layer kind '" + s + "'");
}

std::vector<double> number_array(const json& j, const char* key) {
    const json& arr = j.at(key);
    if (!arr.is_array()) {
        throw Error(ErrorCode::parse_error, std::string("'") + key + "' must be an array");
    }
    std::vector<double> out;
    out.reserve(arr.size());
    for (const json& v : arr) {
        if (!v.is_number()) {
            throw Error(ErrorCode::parse_error, std::string("'") + key + "' must contain numbers only");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

std::size_t count_field(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_number_unsigned()) {
        throw Error(ErrorCode::parse_error, std::string("'") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

}  // namespace

Model load_model(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse_error, e.what());
    }
    try {
        if (!doc.is_object()) throw Error(ErrorCode::parse_error, "model document must be an object");
        const std::size_t input_dim = count_field(doc, "input_dim");
        const json& layers_json = doc.at("layers");
        if (!layers_json.is_array()) throw Error(ErrorCode::parse_error, "'layers' must be an array");
        std::vector<Layer> layers;
        for (const json& lj : layers_json) {
            const LayerKind kind = parse_kind(lj.at("kind").get<std::string>());
            if (kind == LayerKind::dense) {
                layers.push_back(Layer::dense(count_field(lj, "rows"), count_field(lj, "cols"),
                                              number_array(lj, "weights"), number_array(lj, "bias")));
            } else {
                layers.push_back(Layer::activation(kind));
            }
        }
        return Model::create(input_dim, std::move(layers));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse_error, e.what());
    }
}

Model load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::parse_error, "cannot open model file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_model(buf.str());
}

std::string serialize_model(const Model& model) {
    json layers = json::array();
    for (const Layer& l : model.layers()) {
        json lj{{"kind", std::string(to_string(l.kind))}};
        if (l.kind == LayerKind::dense) {
            lj["rows"] = l.rows;
            lj["cols"] = l.cols;
            lj["weights"] = l.weights;
            lj["bias"] = l.bias;
        }
        layers.push_back(std::move(lj));
    }
    return json{{"input_dim", model.input_dim()}, {"layers", std::move(layers)}}.dump();
}

std::vector<double> forward(const Model& model, std::span<const double> x) {
    if (x.size() != model.input_dim()) {
        std::ostringstream msg;
        msg << "input has dimension " << x.size() << ", model expects " << model.input_dim();
        throw Error(ErrorCode::dimension_mismatch, msg.str());
    }
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (const Layer& l : model.layers()) {
        switch (l.kind) {
            case LayerKind::dense:
                next.assign(l.bias.begin(), l.bias.end());
                for (std::size_t r = 0; r < l.rows; ++r) {
                    const double* row = l.weights.data() + r * l.cols;
                    double acc = 0.0;
                    for (std::size_t c = 0; c < l.cols; ++c) acc += row[c] * cur[c];
                    next[r] += acc;
                }
                cur.swap(next);
                break;
            case LayerKind::relu:
                for (double& v : cur) v = v > 0.0 ? v : 0.0;
                break;
            case LayerKind::sigmoid:
                for (double& v : cur) v = 1.0 / (1.0 + std::exp(-v));
                break;
            case LayerKind::tanh:
                for (double& v : cur) v = std::tanh(v);
                break;
        }
    }
    return cur;
}

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

std::size_t predict(const Model& model, std::span<const double> x) {
    return argmax(forward(model, x));
}

}  // namespace quantcert::nn
