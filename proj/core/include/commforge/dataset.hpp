#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "commforge/checkpoint.hpp"
#include "commforge/env.hpp"
#include "commforge/rng.hpp"

namespace commforge {

/// One transition: the state/observations in which `actions` was taken.
/// done marks the final record; the batch pairs (t, t+1) positionally.
struct StepRecord {
    std::vector<double> state;
    std::vector<std::vector<double>> obs;
    std::vector<int> actions;
    double reward = 0.0;
    bool done = false;
};

struct Trajectory {
    int episode_id = 0;
    std::uint64_t seed = 0;
    std::string policy_tag = "random";
    bool win = false;
    std::vector<StepRecord> steps;
};

bool operator==(const StepRecord& a, const StepRecord& b);
bool operator==(const Trajectory& a, const Trajectory& b);

struct DatasetHeader {
    std::string env_id;
    std::uint64_t state_hash = 0;
    std::uint64_t obs_hash = 0;
    int n_agents = 0;
    int n_actions = 0;
    int state_width = 0;
    int obs_width = 0;
};

DatasetHeader dataset_header_for(const Env& env);
/// Hard error unless the file header matches the env's schemas.
void require_header_matches(const DatasetHeader& header, const Env& env);

struct Dataset {
    DatasetHeader header;
    std::vector<Trajectory> episodes;
};

/// JSON-Lines container (.cfjsonl, .cfjsonl.gz): header line, then one
/// episode per line. Vectors are width-checked against the header at both
/// ends; violations are rejected.
void save_dataset(const std::string& path, const DatasetHeader& header,
                  const std::vector<Trajectory>& episodes);
Dataset load_dataset(const std::string& path);
/// Concatenate several files collected against the same schemas.
Dataset load_datasets(const std::vector<std::string>& paths);

using PolicyFn =
    std::function<JointAction(const EnvState& state, const ObservationSet& obs, Rng& rng)>;

PolicyFn random_policy(const Env& env);

/// Roll `episodes` full episodes; deterministic given (env, policy, seed).
std::vector<Trajectory> collect_trajectories(const Env& env, const PolicyFn& policy,
                                             int episodes, std::uint64_t seed,
                                             const std::string& policy_tag);

using TransitionBatch = std::vector<const Trajectory*>;

/// FIFO ring of episodes.
class ReplayBuffer {
public:
    explicit ReplayBuffer(int capacity) : capacity_(capacity) {
        if (capacity < 1) throw ConfigError("ReplayBuffer: capacity must be positive");
    }

    void push(Trajectory episode) {
        episodes_.push_back(std::move(episode));
        if (static_cast<int>(episodes_.size()) > capacity_) episodes_.pop_front();
    }

    int size() const { return static_cast<int>(episodes_.size()); }
    int capacity() const { return capacity_; }
    const Trajectory& at(int i) const { return episodes_[i]; }  // oldest first

    /// Uniform with replacement; nullopt (not ready) while underfull.
    std::optional<TransitionBatch> sample(int batch, Rng& rng) const {
        if (size() < batch) return std::nullopt;
        TransitionBatch out;
        out.reserve(batch);
        for (int i = 0; i < batch; ++i) out.push_back(&episodes_[rng.uniform_int(size())]);
        return out;
    }

private:
    int capacity_;
    std::deque<Trajectory> episodes_;
};

}  // namespace commforge
