#pragma once

#include <vector>

#include "commforge/rng.hpp"
#include "commforge/tensor.hpp"

namespace commforge {

struct Linear {
    Tensor2 w;  // in x out
    Tensor2 b;  // 1 x out
};

/// Fully connected net: ReLU on hidden layers, linear output, inverted
/// dropout on hidden activations when training.
struct MlpParams {
    std::vector<Linear> layers;
    double dropout = 0.0;

    int input_width() const { return layers.empty() ? 0 : layers.front().w.rows; }
    int output_width() const { return layers.empty() ? 0 : layers.back().w.cols; }
    void validate() const;
};

Linear make_linear(int in, int out, Rng& rng);
MlpParams make_mlp(const std::vector<int>& widths, double dropout, Rng& rng);

struct MlpCache {
    std::vector<Tensor2> inputs;      // inputs[l] = input to layer l
    std::vector<Tensor2> pre;         // pre-activation per layer
    std::vector<Tensor2> drop_mask;   // per hidden layer, empty unless train_mode
    bool train_mode = false;
};

Tensor2 mlp_forward(const MlpParams& params, const Tensor2& input, bool train_mode, Rng& rng,
                    MlpCache* cache = nullptr);

struct MlpGrads {
    std::vector<Linear> layers;
    Tensor2 input;
};

MlpGrads mlp_backward(const MlpParams& params, const MlpCache& cache, const Tensor2& upstream);

/// Accumulate `g` into `acc`, resizing grads to match params on first use.
void accumulate_mlp_grads(MlpGrads& acc, const MlpGrads& g);
MlpGrads zero_mlp_grads(const MlpParams& params);

using ParamRefs = std::vector<Tensor2*>;
using GradRefs = std::vector<const Tensor2*>;

void append_params(ParamRefs& out, MlpParams& p);
void append_grads(GradRefs& out, const MlpGrads& g);

struct AdamConfig {
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig cfg;
    std::vector<Tensor2> m;
    std::vector<Tensor2> v;
    long step = 0;
};

/// Standard bias-corrected Adam update, in place. Rejects non-finite grads.
void adam_step(AdamState& state, const ParamRefs& params, const GradRefs& grads);

// --- scaled dot-product attention ---

struct AttentionCache {
    Tensor2 query, keys, values;
    Tensor2 weights;  // softmax rows, query rows x key rows
};

/// Single-head scaled dot-product attention. Rows of `weights` sum to 1.
Tensor2 attention_pool(const Tensor2& query, const Tensor2& keys, const Tensor2& values,
                       AttentionCache* cache = nullptr);

struct AttentionGrads {
    Tensor2 query, keys, values;
};

AttentionGrads attention_backward(const AttentionCache& cache, const Tensor2& upstream);

}  // namespace commforge
