#pragma once

#include "commforge/env.hpp"

namespace commforge {

/// N x N grid. One scout (agent 0) sees the target anywhere and allies within
/// half the grid; B bombers have sight radius `sight` and never sense the
/// target. Win when every bomber is within Chebyshev distance 1 of the target
/// on the same step. Rewards: -0.01 per step, +0.5 the first time each bomber
/// reaches adjacency, +10 on a win.
class HiddenTargetGrid final : public Env {
public:
    explicit HiddenTargetGrid(const EnvConfig& config);

    int n_agents() const override { return 1 + bombers_; }
    int n_actions() const override { return 5; }  // stay, north, east, south, west
    int horizon() const override { return horizon_; }
    const DimSchema& state_schema() const override { return state_schema_; }
    const DimSchema& obs_schema() const override { return obs_schema_; }
    const EnvMeta& meta() const override { return meta_; }
    double default_alpha() const override { return 0.05; }

    std::pair<EnvState, ObservationSet> reset(std::uint64_t seed) const override;
    StepResult step(const EnvState& state, const JointAction& actions) const override;
    std::vector<double> observe(const EnvState& state, int agent) const override;

    /// Cells the target may spawn on: Chebyshev distance >= 3 from the scout spawn.
    const std::vector<std::pair<int, int>>& eligible_target_cells() const { return target_cells_; }
    const std::vector<std::pair<int, int>>& spawns() const { return spawns_; }

    // state vector layout
    int state_agent_x(int agent) const { return 2 * agent; }
    int state_agent_y(int agent) const { return 2 * agent + 1; }
    int state_target_x() const { return 2 * n_agents(); }
    int state_target_y() const { return 2 * n_agents() + 1; }
    int state_reached_flag(int bomber) const { return 2 * n_agents() + 2 + bomber; }
    int state_last_action(int agent) const { return 2 * n_agents() + 2 + bombers_ + agent; }
    int state_step_fraction() const { return 3 * n_agents() + 2 + bombers_; }

    // observation vector layout
    static constexpr int kObsMoveBase = 0;   // 4 dims
    static constexpr int kObsOdoBase = 4;    // 2 dims
    static constexpr int kObsTargetBase = 6; // visible, dx, dy
    int obs_other_base(int slot) const { return 9 + 3 * slot; }
    int obs_last_action_base() const { return 9 + 3 * (n_agents() - 1); }
    int obs_agent_id_base() const { return obs_last_action_base() + n_actions(); }
    int obs_width() const { return obs_agent_id_base() + n_agents(); }

private:
    struct Decoded;
    Decoded decode(const EnvState& state) const;
    EnvState encode(const Decoded& d, int step, bool terminal, bool win) const;

    int grid_;
    int bombers_;
    int horizon_;
    int sight_;
    bool visibility_reduction_;
    int scout_ally_range_;
    int scout_target_range_;  // < 0 means unlimited
    std::vector<std::pair<int, int>> spawns_;
    std::vector<std::pair<int, int>> target_cells_;
    DimSchema state_schema_;
    DimSchema obs_schema_;
    EnvMeta meta_;
};

}  // namespace commforge
