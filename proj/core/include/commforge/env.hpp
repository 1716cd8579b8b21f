#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "commforge/schema.hpp"

namespace commforge {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Global state: flat vector matching the state DimSchema, all values in [0,1].
struct EnvState {
    std::vector<double> s;
    int step = 0;
    bool terminal = false;
    bool win = false;
};

struct ObservationSet {
    std::vector<std::vector<double>> per_agent;
};

using JointAction = std::vector<int>;

struct StepResult {
    EnvState state;
    ObservationSet obs;
    double reward = 0.0;
    bool done = false;
    bool win = false;
};

/// Links a group of state dims to the observation dims that carry them,
/// per observing role. Tiers are shared in order by the scripted generator:
/// tier 0 first (direct readings), tier 1 next (localization cues).
struct LinkTier {
    std::string role;
    std::vector<int> obs_dims;
    std::string transform = "identity";
    int window = 1;
};

struct DimGroup {
    std::string name;
    std::vector<int> state_dims;
    std::vector<LinkTier> tiers;
    bool share_at_init = false;
};

/// Chunk-level observation layout for the simplified prompt variant.
struct ObsChunk {
    int lo = 0;
    int hi = 0;  // inclusive
    std::string label;
};

struct EnvMeta {
    std::string env_id;
    std::string task_summary;
    std::vector<std::pair<std::string, std::vector<int>>> roles;  // role name -> agent indices
    std::vector<DimGroup> groups;
    std::vector<ObsChunk> obs_chunks;

    const std::vector<int>* find_role(const std::string& name) const {
        for (const auto& [role, agents] : roles)
            if (role == name) return &agents;
        return nullptr;
    }
};

class Env {
public:
    virtual ~Env() = default;

    virtual int n_agents() const = 0;
    virtual int n_actions() const = 0;
    virtual int horizon() const = 0;
    virtual const DimSchema& state_schema() const = 0;
    virtual const DimSchema& obs_schema() const = 0;
    virtual const EnvMeta& meta() const = 0;
    /// Reconstruction threshold for this env family.
    virtual double default_alpha() const = 0;

    virtual std::pair<EnvState, ObservationSet> reset(std::uint64_t seed) const = 0;
    /// Pure transition; throws ContractError on terminal states or bad actions.
    virtual StepResult step(const EnvState& state, const JointAction& actions) const = 0;
    /// Pure function of (state, agent).
    virtual std::vector<double> observe(const EnvState& state, int agent) const = 0;

    ObservationSet observe_all(const EnvState& state) const {
        ObservationSet set;
        set.per_agent.reserve(n_agents());
        for (int i = 0; i < n_agents(); ++i) set.per_agent.push_back(observe(state, i));
        return set;
    }
};

struct EnvConfig {
    std::string id = "hidden-target";  // hidden-target | coop-forage
    int grid = 8;
    int bombers = 3;   // hidden-target
    int foragers = 2;  // coop-forage
    int fruits = 2;    // coop-forage
    int horizon = 60;
    int sight = 1;
    bool spawn_switch = false;
    bool visibility_reduction = false;
};

std::unique_ptr<Env> make_env(const EnvConfig& config);

// shared grid helpers
inline double pos_norm(int v, int grid) { return static_cast<double>(v) / (grid - 1); }
inline double off_norm(int d, int grid) {
    return static_cast<double>(d + (grid - 1)) / (2.0 * (grid - 1));
}
inline int pos_denorm(double v, int grid) {
    return static_cast<int>(v * (grid - 1) + (v >= 0 ? 0.5 : -0.5));
}

/// Deterministic spawn layout: walk the grid border clockwise from (0,0) and
/// place agent k at border cell round(k * perimeter / n). spawn_switch
/// reverses the assignment.
std::vector<std::pair<int, int>> border_spawns(int grid, int n, bool spawn_switch);

}  // namespace commforge
