#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "commforge/dataset.hpp"
#include "commforge/nn.hpp"
#include "commforge/protocol.hpp"

namespace commforge {

struct DecoderHyper {
    int batch = 32;
    double lr = 5e-4;
    int hidden = 64;
    int latent = 20;
    double dropout = 0.1;
    int epochs = 200;  // desk-scale default; the reference setup runs 1000
    int iters_per_epoch = 10;
    int window = 8;  // trajectory conditioning: last W observations, flattened
};

/// Auxiliary decoder D_phi: (flattened observation window, message, agent
/// one-hot) -> predicted global state. Input layout is fixed: window dims
/// oldest-first, then the message, then the agent one-hot.
struct AuxDecoder {
    MlpParams net;
    int window = 8;
    int obs_width = 0;
    int msg_width = 0;
    int n_agents = 0;
    int state_width = 0;
    bool trained = false;  // false when the epoch budget was zero
    std::vector<double> loss_trace;  // mean training loss per epoch

    int input_width() const { return window * obs_width + msg_width + n_agents; }
};

/// Messages for every step of an episode under a protocol stack:
/// result[t][agent] has the stack's total width.
std::vector<std::vector<std::vector<double>>> episode_messages(const ProtocolStack& stack,
                                                               const Trajectory& episode,
                                                               int n_agents);

/// Minimize the mean squared state-reconstruction error over the dataset.
/// Throws NumericError (with the loss trace in the message) on divergence.
AuxDecoder train_aux_decoder(const Dataset& data, const ProtocolStack& stack,
                             const DecoderHyper& hyper, std::uint64_t seed);

void save_decoder(const std::string& path, const AuxDecoder& decoder);
AuxDecoder load_decoder(const std::string& path);

/// Binary state-awareness indicators chi over (message flag l, agent i,
/// state dim d, flattened step t). l=1: decoded with the message; l=0:
/// decoded with a zero message.
struct SaiTensor {
    int n_agents = 0;
    int n_dims = 0;
    int n_steps = 0;
    double alpha = 0.0;
    std::vector<std::uint8_t> chi;  // [((l * n_agents + i) * n_dims + d) * n_steps + t]

    std::size_t index(int l, int i, int d, int t) const {
        return ((static_cast<std::size_t>(l) * n_agents + i) * n_dims + d) * n_steps + t;
    }
    std::uint8_t at(int l, int i, int d, int t) const { return chi[index(l, i, d, t)]; }
};

/// Threshold per-dim squared errors: chi = 1 iff err <= alpha (inclusive).
/// `errors` uses the same layout as SaiTensor::chi.
SaiTensor sai_from_squared_errors(const std::vector<double>& errors, int n_agents, int n_dims,
                                  int n_steps, double alpha);

SaiTensor compute_sai(const AuxDecoder& decoder, const Dataset& data,
                      const ProtocolStack& stack, double alpha);

/// Step-wise aggregates driving the feedback loop. `step_k` is the
/// refinement step the report feeds: 1 reports recovery success rates,
/// 2 and beyond report inter-agent knowledge imbalance.
struct CriterionReport {
    int step_k = 1;
    double alpha = 0.0;
    std::vector<std::string> dim_names;
    std::vector<std::vector<double>> recovery;  // [agent][dim], time-mean of chi at l=1
    std::vector<double> imbalance;              // [dim], population variance over agents
};

CriterionReport aggregate_criterion(const SaiTensor& sai, int step_k);
/// Attach names from the state DimSchema (optional; names default to dim indices).
void attach_dim_names(CriterionReport& report, const DimSchema& state_schema);

double mean_recovery(const CriterionReport& report);
double mean_imbalance(const CriterionReport& report);

/// Stable key order, floats at 4 decimal places. Step 1 emits per-agent
/// rates; later steps emit per-dim imbalance instead.
std::string emit_criterion_json(const CriterionReport& report);
CriterionReport parse_criterion_json(const std::string& text);

}  // namespace commforge
