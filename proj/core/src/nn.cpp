#include "commforge/nn.hpp"

#include <cmath>
#include <string>

namespace commforge {

void MlpParams::validate() const {
    if (layers.empty()) throw ShapeError("MlpParams: no layers");
    if (!(dropout >= 0.0 && dropout < 1.0))
        throw ShapeError("MlpParams: dropout must be in [0,1)");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Linear& lin = layers[l];
        if (lin.b.rows != 1 || lin.b.cols != lin.w.cols)
            throw ShapeError("MlpParams: bias shape mismatch at layer " + std::to_string(l));
        if (l > 0 && layers[l - 1].w.cols != lin.w.rows)
            throw ShapeError("MlpParams: layer widths do not chain at layer " + std::to_string(l));
    }
}

Linear make_linear(int in, int out, Rng& rng) {
    Linear lin{Tensor2(in, out), Tensor2(1, out)};
    const double limit = std::sqrt(6.0 / (in + out));
    for (double& v : lin.w.data) v = rng.uniform(-limit, limit);
    return lin;
}

MlpParams make_mlp(const std::vector<int>& widths, double dropout, Rng& rng) {
    if (widths.size() < 2) throw ShapeError("make_mlp: need at least input and output widths");
    MlpParams p;
    p.dropout = dropout;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i)
        p.layers.push_back(make_linear(widths[i], widths[i + 1], rng));
    p.validate();
    return p;
}

namespace {

void add_bias_rows(Tensor2& x, const Tensor2& b) {
    for (int r = 0; r < x.rows; ++r) {
        double* row = x.row(r);
        const double* bias = b.row(0);
        for (int c = 0; c < x.cols; ++c) row[c] += bias[c];
    }
}

}  // namespace

Tensor2 mlp_forward(const MlpParams& params, const Tensor2& input, bool train_mode, Rng& rng,
                    MlpCache* cache) {
    params.validate();
    if (input.cols != params.input_width())
        throw ShapeError("mlp_forward: input width " + std::to_string(input.cols) +
                         " != " + std::to_string(params.input_width()));
    require_finite(input, "mlp_forward input");

    const std::size_t n_layers = params.layers.size();
    if (cache) {
        cache->inputs.assign(n_layers, {});
        cache->pre.assign(n_layers, {});
        cache->drop_mask.assign(n_layers > 0 ? n_layers - 1 : 0, {});
        cache->train_mode = train_mode;
    }

    Tensor2 x = input;
    const double keep = 1.0 - params.dropout;
    for (std::size_t l = 0; l < n_layers; ++l) {
        if (cache) cache->inputs[l] = x;
        Tensor2 z;
        matmul(x, params.layers[l].w, z);
        add_bias_rows(z, params.layers[l].b);
        if (cache) cache->pre[l] = z;
        if (l + 1 < n_layers) {
            for (double& v : z.data) v = v > 0.0 ? v : 0.0;
            if (train_mode && params.dropout > 0.0) {
                Tensor2 mask(z.rows, z.cols);
                for (std::size_t i = 0; i < mask.data.size(); ++i)
                    mask.data[i] = rng.uniform() < keep ? 1.0 / keep : 0.0;
                for (std::size_t i = 0; i < z.data.size(); ++i) z.data[i] *= mask.data[i];
                if (cache) cache->drop_mask[l] = std::move(mask);
            }
        }
        x = std::move(z);
    }
    require_finite(x, "mlp_forward output");
    return x;
}

MlpGrads mlp_backward(const MlpParams& params, const MlpCache& cache, const Tensor2& upstream) {
    const std::size_t n_layers = params.layers.size();
    if (cache.inputs.size() != n_layers || cache.pre.size() != n_layers)
        throw ContractError("mlp_backward: cache does not match params");
    if (upstream.rows != cache.pre.back().rows || upstream.cols != params.output_width())
        throw ContractError("mlp_backward: upstream shape does not match cached forward");
    for (std::size_t l = 0; l < n_layers; ++l)
        if (cache.inputs[l].cols != params.layers[l].w.rows)
            throw ContractError("mlp_backward: stale cache (layer width changed)");

    MlpGrads grads = zero_mlp_grads(params);
    Tensor2 delta = upstream;  // d loss / d pre-activation of current layer
    for (std::size_t li = n_layers; li-- > 0;) {
        if (li + 1 < n_layers) {
            // through dropout then ReLU
            if (cache.train_mode && params.dropout > 0.0 && cache.drop_mask[li].size() > 0)
                for (std::size_t i = 0; i < delta.data.size(); ++i)
                    delta.data[i] *= cache.drop_mask[li].data[i];
            const Tensor2& pre = cache.pre[li];
            for (std::size_t i = 0; i < delta.data.size(); ++i)
                if (pre.data[i] <= 0.0) delta.data[i] = 0.0;
        }
        matmul_tn(cache.inputs[li], delta, grads.layers[li].w);
        for (int r = 0; r < delta.rows; ++r) {
            const double* row = delta.row(r);
            double* acc = grads.layers[li].b.row(0);
            for (int c = 0; c < delta.cols; ++c) acc[c] += row[c];
        }
        if (li > 0) {
            Tensor2 prev;
            matmul_nt(delta, params.layers[li].w, prev);
            delta = std::move(prev);
        } else {
            matmul_nt(delta, params.layers[0].w, grads.input);
        }
    }
    return grads;
}

MlpGrads zero_mlp_grads(const MlpParams& params) {
    MlpGrads g;
    for (const Linear& lin : params.layers)
        g.layers.push_back({Tensor2(lin.w.rows, lin.w.cols), Tensor2(1, lin.b.cols)});
    g.input = Tensor2();
    return g;
}

void accumulate_mlp_grads(MlpGrads& acc, const MlpGrads& g) {
    if (acc.layers.empty()) {
        acc = g;
        return;
    }
    if (acc.layers.size() != g.layers.size())
        throw ShapeError("accumulate_mlp_grads: layer count mismatch");
    for (std::size_t l = 0; l < g.layers.size(); ++l) {
        acc.layers[l].w += g.layers[l].w;
        acc.layers[l].b += g.layers[l].b;
    }
}

void append_params(ParamRefs& out, MlpParams& p) {
    for (Linear& lin : p.layers) {
        out.push_back(&lin.w);
        out.push_back(&lin.b);
    }
}

void append_grads(GradRefs& out, const MlpGrads& g) {
    for (const Linear& lin : g.layers) {
        out.push_back(&lin.w);
        out.push_back(&lin.b);
    }
}

void adam_step(AdamState& state, const ParamRefs& params, const GradRefs& grads) {
    if (params.size() != grads.size())
        throw ShapeError("adam_step: params/grads count mismatch");
    if (state.m.empty()) {
        for (const Tensor2* p : params) {
            state.m.emplace_back(p->rows, p->cols);
            state.v.emplace_back(p->rows, p->cols);
        }
    }
    if (state.m.size() != params.size())
        throw ShapeError("adam_step: state does not match params");

    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]->same_shape(*grads[i]))
            throw ShapeError("adam_step: grad shape mismatch at param " + std::to_string(i));
        if (!grads[i]->all_finite()) throw NumericError("adam_step: non-finite gradient");
    }

    state.step += 1;
    const double b1 = state.cfg.beta1, b2 = state.cfg.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor2& p = *params[i];
        const Tensor2& g = *grads[i];
        Tensor2& m = state.m[i];
        Tensor2& v = state.v[i];
        for (std::size_t j = 0; j < p.data.size(); ++j) {
            m.data[j] = b1 * m.data[j] + (1.0 - b1) * g.data[j];
            v.data[j] = b2 * v.data[j] + (1.0 - b2) * g.data[j] * g.data[j];
            const double mhat = m.data[j] / bc1;
            const double vhat = v.data[j] / bc2;
            p.data[j] -= state.cfg.lr * mhat / (std::sqrt(vhat) + state.cfg.eps);
        }
    }
}

Tensor2 attention_pool(const Tensor2& query, const Tensor2& keys, const Tensor2& values,
                       AttentionCache* cache) {
    if (keys.rows == 0) throw ContractError("attention_pool: empty key set");
    if (keys.rows != values.rows)
        throw ShapeError("attention_pool: key/value row counts differ");
    if (query.cols != keys.cols)
        throw ShapeError("attention_pool: query/key widths differ");

    const double scale = 1.0 / std::sqrt(static_cast<double>(keys.cols));
    Tensor2 scores;
    matmul_nt(query, keys, scores);
    scores *= scale;

    // row softmax, max-shifted
    for (int r = 0; r < scores.rows; ++r) {
        double* row = scores.row(r);
        double mx = row[0];
        for (int c = 1; c < scores.cols; ++c) mx = std::max(mx, row[c]);
        double sum = 0.0;
        for (int c = 0; c < scores.cols; ++c) {
            row[c] = std::exp(row[c] - mx);
            sum += row[c];
        }
        for (int c = 0; c < scores.cols; ++c) row[c] /= sum;
    }

    Tensor2 out;
    matmul(scores, values, out);
    if (cache) {
        cache->query = query;
        cache->keys = keys;
        cache->values = values;
        cache->weights = std::move(scores);
    }
    return out;
}

AttentionGrads attention_backward(const AttentionCache& cache, const Tensor2& upstream) {
    const Tensor2& w = cache.weights;
    if (upstream.rows != w.rows || upstream.cols != cache.values.cols)
        throw ContractError("attention_backward: upstream shape mismatch");

    AttentionGrads g;
    matmul_tn(w, upstream, g.values);

    Tensor2 dw;
    matmul_nt(upstream, cache.values, dw);

    // softmax jacobian per row: ds = w * (dw - sum(dw*w))
    Tensor2 ds(w.rows, w.cols);
    for (int r = 0; r < w.rows; ++r) {
        const double* wr = w.row(r);
        const double* dr = dw.row(r);
        double dot = 0.0;
        for (int c = 0; c < w.cols; ++c) dot += wr[c] * dr[c];
        double* out = ds.row(r);
        for (int c = 0; c < w.cols; ++c) out[c] = wr[c] * (dr[c] - dot);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(cache.keys.cols));
    ds *= scale;

    matmul(ds, cache.keys, g.query);
    matmul_tn(ds, cache.query, g.keys);
    return g;
}

}  // namespace commforge
