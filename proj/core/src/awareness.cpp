#include "commforge/awareness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace commforge {

using nlohmann::json;

std::vector<std::vector<std::vector<double>>> episode_messages(const ProtocolStack& stack,
                                                               const Trajectory& episode,
                                                               int n_agents) {
    const int T = static_cast<int>(episode.steps.size());
    std::vector<std::vector<std::vector<double>>> out(T);
    ObservationHistories histories(n_agents);
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n_agents; ++i) histories[i].push_back(episode.steps[t].obs[i]);
        out[t] = apply_protocol(stack, histories);
    }
    return out;
}

namespace {

struct SampleIndex {
    int episode;
    int t;
    int agent;
};

/// Fill one decoder input row: window obs (oldest first, zero-padded),
/// message (zeroed when with_message is false), agent one-hot.
void fill_input_row(double* row, const AuxDecoder& d, const Trajectory& episode, int t,
                    int agent, const std::vector<double>* message, bool with_message) {
    const int W = d.window;
    for (int back = W - 1; back >= 0; --back) {
        const int src = t - back;
        double* dst = row + (W - 1 - back) * d.obs_width;
        if (src < 0) {
            std::fill(dst, dst + d.obs_width, 0.0);
        } else {
            const std::vector<double>& o = episode.steps[src].obs[agent];
            std::copy(o.begin(), o.end(), dst);
        }
    }
    double* msg_dst = row + W * d.obs_width;
    if (with_message && message)
        std::copy(message->begin(), message->end(), msg_dst);
    else
        std::fill(msg_dst, msg_dst + d.msg_width, 0.0);
    double* id_dst = msg_dst + d.msg_width;
    std::fill(id_dst, id_dst + d.n_agents, 0.0);
    id_dst[agent] = 1.0;
}

}  // namespace

AuxDecoder train_aux_decoder(const Dataset& data, const ProtocolStack& stack,
                             const DecoderHyper& hyper, std::uint64_t seed) {
    if (data.episodes.empty()) throw ContractError("train_aux_decoder: empty dataset");

    AuxDecoder d;
    d.window = hyper.window;
    d.obs_width = data.header.obs_width;
    d.msg_width = stack.total_width(data.header.n_agents);
    d.n_agents = data.header.n_agents;
    d.state_width = data.header.state_width;

    Rng rng(seed, 0xDECULL);
    d.net = make_mlp({d.input_width(), hyper.hidden, hyper.latent, hyper.hidden, d.state_width},
                     hyper.dropout, rng);
    if (hyper.epochs <= 0 || hyper.iters_per_epoch <= 0) return d;  // untrained by request
    d.trained = true;

    // per-episode message tables, computed once
    std::vector<std::vector<std::vector<std::vector<double>>>> messages;
    messages.reserve(data.episodes.size());
    for (const Trajectory& ep : data.episodes)
        messages.push_back(episode_messages(stack, ep, d.n_agents));

    std::vector<SampleIndex> samples;
    for (int e = 0; e < static_cast<int>(data.episodes.size()); ++e)
        for (int t = 0; t < static_cast<int>(data.episodes[e].steps.size()); ++t)
            for (int i = 0; i < d.n_agents; ++i) samples.push_back({e, t, i});

    AdamState adam;
    adam.cfg.lr = hyper.lr;
    ParamRefs params;
    append_params(params, d.net);

    Rng batch_rng = rng.split("batches");
    Rng dropout_rng = rng.split("dropout");

    const int batch = std::min<int>(hyper.batch, static_cast<int>(samples.size()));
    Tensor2 input(batch, d.input_width());
    Tensor2 target(batch, d.state_width);

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (int iter = 0; iter < hyper.iters_per_epoch; ++iter) {
            for (int b = 0; b < batch; ++b) {
                const SampleIndex s = samples[batch_rng.uniform_int(static_cast<int>(samples.size()))];
                const Trajectory& ep = data.episodes[s.episode];
                fill_input_row(input.row(b), d, ep, s.t, s.agent,
                               &messages[s.episode][s.t][s.agent], true);
                const std::vector<double>& st = ep.steps[s.t].state;
                std::copy(st.begin(), st.end(), target.row(b));
            }
            MlpCache cache;
            Tensor2 pred = mlp_forward(d.net, input, true, dropout_rng, &cache);

            double loss = 0.0;
            Tensor2 upstream(batch, d.state_width);
            for (std::size_t j = 0; j < pred.data.size(); ++j) {
                const double err = pred.data[j] - target.data[j];
                loss += err * err;
                upstream.data[j] = 2.0 * err / batch;
            }
            loss /= batch;
            epoch_loss += loss;

            if (!std::isfinite(loss)) {
                std::ostringstream trace;
                for (const double v : d.loss_trace) trace << v << " ";
                throw NumericError("train_aux_decoder: loss diverged to " +
                                   std::to_string(loss) + "; trace: " + trace.str());
            }

            MlpGrads grads = mlp_backward(d.net, cache, upstream);
            GradRefs grad_refs;
            append_grads(grad_refs, grads);
            adam_step(adam, params, grad_refs);
        }
        d.loss_trace.push_back(epoch_loss / hyper.iters_per_epoch);
    }
    return d;
}

void save_decoder(const std::string& path, const AuxDecoder& d) {
    std::vector<NamedTensor> entries;
    Tensor2 meta(1, 7);
    meta.data = {static_cast<double>(d.window),    static_cast<double>(d.obs_width),
                 static_cast<double>(d.msg_width), static_cast<double>(d.n_agents),
                 static_cast<double>(d.state_width), d.trained ? 1.0 : 0.0,
                 static_cast<double>(d.net.dropout)};
    entries.push_back({"decoder.meta", std::move(meta)});
    for (std::size_t l = 0; l < d.net.layers.size(); ++l) {
        entries.push_back({"decoder.layer" + std::to_string(l) + ".w", d.net.layers[l].w});
        entries.push_back({"decoder.layer" + std::to_string(l) + ".b", d.net.layers[l].b});
    }
    save_checkpoint(path, entries);
}

AuxDecoder load_decoder(const std::string& path) {
    const std::vector<NamedTensor> entries = load_checkpoint(path);
    AuxDecoder d;
    bool have_meta = false;
    for (const NamedTensor& e : entries) {
        if (e.name == "decoder.meta") {
            const std::vector<double>& m = e.value.data;
            if (m.size() != 7) throw IoError("decoder checkpoint: bad meta entry");
            d.window = static_cast<int>(m[0]);
            d.obs_width = static_cast<int>(m[1]);
            d.msg_width = static_cast<int>(m[2]);
            d.n_agents = static_cast<int>(m[3]);
            d.state_width = static_cast<int>(m[4]);
            d.trained = m[5] > 0.5;
            d.net.dropout = m[6];
            have_meta = true;
        }
    }
    if (!have_meta) throw IoError("decoder checkpoint: missing meta entry");
    for (std::size_t l = 0;; ++l) {
        const std::string wname = "decoder.layer" + std::to_string(l) + ".w";
        const std::string bname = "decoder.layer" + std::to_string(l) + ".b";
        const NamedTensor* w = nullptr;
        const NamedTensor* b = nullptr;
        for (const NamedTensor& e : entries) {
            if (e.name == wname) w = &e;
            if (e.name == bname) b = &e;
        }
        if (!w && !b) break;
        if (!w || !b) throw IoError("decoder checkpoint: incomplete layer " + std::to_string(l));
        d.net.layers.push_back({w->value, b->value});
    }
    d.net.validate();
    return d;
}

SaiTensor sai_from_squared_errors(const std::vector<double>& errors, int n_agents, int n_dims,
                                  int n_steps, double alpha) {
    if (!(alpha > 0.0)) throw ContractError("sai: alpha must be positive");
    const std::size_t expected =
        2 * static_cast<std::size_t>(n_agents) * n_dims * n_steps;
    if (errors.size() != expected) throw ContractError("sai: error tensor size mismatch");
    SaiTensor sai;
    sai.n_agents = n_agents;
    sai.n_dims = n_dims;
    sai.n_steps = n_steps;
    sai.alpha = alpha;
    sai.chi.resize(expected);
    for (std::size_t j = 0; j < expected; ++j)
        sai.chi[j] = errors[j] <= alpha ? 1 : 0;  // inclusive threshold
    return sai;
}

SaiTensor compute_sai(const AuxDecoder& decoder, const Dataset& data,
                      const ProtocolStack& stack, double alpha) {
    if (!(alpha > 0.0)) throw ContractError("compute_sai: alpha must be positive");
    if (data.header.obs_width != decoder.obs_width ||
        data.header.state_width != decoder.state_width ||
        data.header.n_agents != decoder.n_agents)
        throw ContractError("compute_sai: dataset schema does not match the decoder");
    if (stack.total_width(data.header.n_agents) != decoder.msg_width)
        throw ContractError("compute_sai: protocol width does not match the decoder");

    int n_steps = 0;
    for (const Trajectory& ep : data.episodes) n_steps += static_cast<int>(ep.steps.size());

    const int A = decoder.n_agents;
    const int D = decoder.state_width;
    std::vector<double> errors(2 * static_cast<std::size_t>(A) * D * n_steps, 0.0);

    Rng unused_rng;  // eval mode: no dropout draws
    const int rows_per_step = 2 * A;  // (l=0, l=1) x agents
    Tensor2 input(rows_per_step, decoder.input_width());

    int t_flat = 0;
    for (const Trajectory& ep : data.episodes) {
        const auto messages = episode_messages(stack, ep, A);
        for (int t = 0; t < static_cast<int>(ep.steps.size()); ++t) {
            for (int i = 0; i < A; ++i) {
                fill_input_row(input.row(2 * i), decoder, ep, t, i, nullptr, false);
                fill_input_row(input.row(2 * i + 1), decoder, ep, t, i, &messages[t][i], true);
            }
            const Tensor2 pred = mlp_forward(decoder.net, input, false, unused_rng);
            const std::vector<double>& st = ep.steps[t].state;
            for (int i = 0; i < A; ++i) {
                for (int l = 0; l < 2; ++l) {
                    const double* row = pred.row(2 * i + l);
                    for (int dd = 0; dd < D; ++dd) {
                        const double err = row[dd] - st[dd];
                        errors[((static_cast<std::size_t>(l) * A + i) * D + dd) * n_steps +
                               t_flat] = err * err;
                    }
                }
            }
            ++t_flat;
        }
    }
    return sai_from_squared_errors(errors, A, D, n_steps, alpha);
}

CriterionReport aggregate_criterion(const SaiTensor& sai, int step_k) {
    if (sai.n_steps == 0 || sai.chi.empty())
        throw ContractError("aggregate_criterion: empty SAI tensor");
    CriterionReport report;
    report.step_k = step_k;
    report.alpha = sai.alpha;
    for (int d = 0; d < sai.n_dims; ++d)
        report.dim_names.push_back("dim" + std::to_string(d));

    report.recovery.assign(sai.n_agents, std::vector<double>(sai.n_dims, 0.0));
    for (int i = 0; i < sai.n_agents; ++i)
        for (int d = 0; d < sai.n_dims; ++d) {
            double sum = 0.0;
            for (int t = 0; t < sai.n_steps; ++t) sum += sai.at(1, i, d, t);
            report.recovery[i][d] = sum / sai.n_steps;
        }

    report.imbalance.assign(sai.n_dims, 0.0);
    for (int d = 0; d < sai.n_dims; ++d) {
        double mean = 0.0;
        for (int i = 0; i < sai.n_agents; ++i) mean += report.recovery[i][d];
        mean /= sai.n_agents;
        double var = 0.0;
        for (int i = 0; i < sai.n_agents; ++i) {
            const double diff = report.recovery[i][d] - mean;
            var += diff * diff;
        }
        report.imbalance[d] = var / sai.n_agents;  // population variance
    }
    return report;
}

void attach_dim_names(CriterionReport& report, const DimSchema& state_schema) {
    if (state_schema.width() != static_cast<int>(report.dim_names.size()))
        throw ContractError("attach_dim_names: schema width mismatch");
    for (int d = 0; d < state_schema.width(); ++d)
        report.dim_names[d] = state_schema.dims[d].name;
}

double mean_recovery(const CriterionReport& report) {
    double sum = 0.0;
    int count = 0;
    for (const auto& per_agent : report.recovery)
        for (const double r : per_agent) {
            sum += r;
            ++count;
        }
    return count ? sum / count : 0.0;
}

double mean_imbalance(const CriterionReport& report) {
    double sum = 0.0;
    for (const double v : report.imbalance) sum += v;
    return report.imbalance.empty() ? 0.0 : sum / report.imbalance.size();
}

namespace {

double round4(double v) { return std::round(v * 1e4) / 1e4; }

}  // namespace

std::string emit_criterion_json(const CriterionReport& report) {
    json doc;
    doc["step"] = report.step_k;
    doc["alpha"] = report.alpha;
    doc["metric"] = report.step_k <= 1 ? "recovery_success_rate" : "knowledge_imbalance";
    json dims = json::array();
    const int n_dims = static_cast<int>(report.dim_names.size());
    for (int d = 0; d < n_dims; ++d) {
        json entry;
        entry["index"] = d;
        entry["name"] = report.dim_names[d];
        if (report.step_k <= 1) {
            json rates;
            for (std::size_t i = 0; i < report.recovery.size(); ++i)
                rates["agent" + std::to_string(i)] = round4(report.recovery[i][d]);
            entry["rates"] = std::move(rates);
        } else {
            entry["imbalance"] = round4(report.imbalance[d]);
        }
        dims.push_back(std::move(entry));
    }
    doc["dims"] = std::move(dims);
    return doc.dump(2);
}

CriterionReport parse_criterion_json(const std::string& text) {
    const json doc = json::parse(text);
    CriterionReport report;
    report.step_k = doc.at("step").get<int>();
    report.alpha = doc.at("alpha").get<double>();
    const json& dims = doc.at("dims");
    const int n_dims = static_cast<int>(dims.size());
    int n_agents = 0;
    if (report.step_k <= 1 && n_dims > 0) n_agents = static_cast<int>(dims[0].at("rates").size());
    report.recovery.assign(n_agents, std::vector<double>(n_dims, 0.0));
    report.imbalance.assign(n_dims, 0.0);
    for (int d = 0; d < n_dims; ++d) {
        const json& entry = dims[d];
        report.dim_names.push_back(entry.at("name").get<std::string>());
        if (report.step_k <= 1) {
            for (int i = 0; i < n_agents; ++i)
                report.recovery[i][d] = entry.at("rates").at("agent" + std::to_string(i)).get<double>();
        } else {
            report.imbalance[d] = entry.at("imbalance").get<double>();
        }
    }
    return report;
}

}  // namespace commforge
