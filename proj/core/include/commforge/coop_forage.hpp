#pragma once

#include "commforge/env.hpp"

namespace commforge {

/// N x N grid, P foragers with sight radius `sight`, F fruits. A fruit loads
/// only when at least two adjacent agents issue `load` on the same step;
/// reward per loaded fruit = fruit value / total value. Win when all fruits
/// are collected.
class CoopForage final : public Env {
public:
    explicit CoopForage(const EnvConfig& config);

    int n_agents() const override { return foragers_; }
    int n_actions() const override { return 6; }  // stay, north, east, south, west, load
    int horizon() const override { return horizon_; }
    const DimSchema& state_schema() const override { return state_schema_; }
    const DimSchema& obs_schema() const override { return obs_schema_; }
    const EnvMeta& meta() const override { return meta_; }
    double default_alpha() const override { return 0.1; }

    std::pair<EnvState, ObservationSet> reset(std::uint64_t seed) const override;
    StepResult step(const EnvState& state, const JointAction& actions) const override;
    std::vector<double> observe(const EnvState& state, int agent) const override;

    const std::vector<std::pair<int, int>>& spawns() const { return spawns_; }

    // state vector layout
    int state_agent_x(int agent) const { return 2 * agent; }
    int state_agent_y(int agent) const { return 2 * agent + 1; }
    int state_fruit_x(int fruit) const { return 2 * foragers_ + 3 * fruit; }
    int state_fruit_y(int fruit) const { return 2 * foragers_ + 3 * fruit + 1; }
    int state_fruit_present(int fruit) const { return 2 * foragers_ + 3 * fruit + 2; }
    int state_last_action(int agent) const { return 2 * foragers_ + 3 * fruits_ + agent; }
    int state_step_fraction() const { return 3 * foragers_ + 3 * fruits_; }

    // observation vector layout
    static constexpr int kObsMoveBase = 0;
    static constexpr int kObsOdoBase = 4;
    int obs_fruit_base(int fruit) const { return 6 + 3 * fruit; }
    int obs_other_base(int slot) const { return 6 + 3 * fruits_ + 3 * slot; }
    int obs_last_action_base() const { return 6 + 3 * fruits_ + 3 * (foragers_ - 1); }
    int obs_agent_id_base() const { return obs_last_action_base() + n_actions(); }
    int obs_width() const { return obs_agent_id_base() + foragers_; }

private:
    struct Decoded;
    Decoded decode(const EnvState& state) const;
    EnvState encode(const Decoded& d, int step, bool terminal, bool win) const;

    int grid_;
    int foragers_;
    int fruits_;
    int horizon_;
    int sight_;
    bool visibility_reduction_;
    std::vector<std::pair<int, int>> spawns_;
    DimSchema state_schema_;
    DimSchema obs_schema_;
    EnvMeta meta_;
};

}  // namespace commforge
