#include "commforge/hidden_target.hpp"

#include <algorithm>
#include <cmath>

#include "commforge/rng.hpp"
#include "commforge/tensor.hpp"

namespace commforge {

namespace {

constexpr int kDx[5] = {0, 0, 1, 0, -1};  // stay, north, east, south, west
constexpr int kDy[5] = {0, -1, 0, 1, 0};
constexpr const char* kActionNames[5] = {"stay", "north", "east", "south", "west"};

int cheb(std::pair<int, int> a, std::pair<int, int> b) {
    return std::max(std::abs(a.first - b.first), std::abs(a.second - b.second));
}

}  // namespace

struct HiddenTargetGrid::Decoded {
    std::vector<std::pair<int, int>> agents;
    std::pair<int, int> target;
    std::vector<bool> reached;
    std::vector<int> last_actions;
};

HiddenTargetGrid::HiddenTargetGrid(const EnvConfig& config)
    : grid_(config.grid),
      bombers_(config.bombers),
      horizon_(config.horizon),
      sight_(config.sight),
      visibility_reduction_(config.visibility_reduction) {
    if (bombers_ < 1) throw ConfigError("hidden-target: need at least one bomber");
    if (sight_ < 0) throw ConfigError("hidden-target: sight must be >= 0");

    scout_ally_range_ = visibility_reduction_ ? grid_ / 4 : grid_ / 2;
    scout_target_range_ = visibility_reduction_ ? grid_ / 2 : -1;

    spawns_ = border_spawns(grid_, n_agents(), config.spawn_switch);

    const auto scout_spawn = spawns_[0];
    for (int x = 0; x < grid_; ++x)
        for (int y = 0; y < grid_; ++y)
            if (cheb({x, y}, scout_spawn) >= 3) target_cells_.emplace_back(x, y);
    if (target_cells_.empty()) throw ConfigError("hidden-target: no eligible target cells");

    const int n = n_agents();
    auto agent_name = [&](int a) {
        return a == 0 ? std::string("scout") : "bomber" + std::to_string(a);
    };

    int idx = 0;
    auto add_state = [&](const std::string& name, const std::string& desc) {
        state_schema_.dims.push_back({idx++, name, desc, 0.0, 1.0});
    };
    for (int a = 0; a < n; ++a) {
        add_state(agent_name(a) + "_x",
                  "absolute x of the " + agent_name(a) + ", normalized by grid width");
        add_state(agent_name(a) + "_y",
                  "absolute y of the " + agent_name(a) + ", normalized by grid height");
    }
    add_state("target_x", "absolute x of the hidden target, normalized by grid width");
    add_state("target_y", "absolute y of the hidden target, normalized by grid height");
    for (int b = 1; b <= bombers_; ++b)
        add_state("bomber" + std::to_string(b) + "_reached",
                  "1 once bomber" + std::to_string(b) + " has been adjacent to the target");
    for (int a = 0; a < n; ++a)
        add_state(agent_name(a) + "_last_action",
                  "most recent action of the " + agent_name(a) + ", index normalized to [0,1]");
    add_state("step_fraction", "elapsed steps divided by the horizon");
    state_schema_.validate();

    idx = 0;
    auto add_obs = [&](const std::string& name, const std::string& desc) {
        obs_schema_.dims.push_back({idx++, name, desc, 0.0, 1.0});
    };
    for (const char* dir : {"north", "east", "south", "west"})
        add_obs(std::string("can_move_") + dir,
                std::string("1 if moving ") + dir + " stays on the grid");
    add_obs("self_odo_dx", "own x displacement from own spawn cell, offset-normalized");
    add_obs("self_odo_dy", "own y displacement from own spawn cell, offset-normalized");
    add_obs("target_visible", "1 if the target is in this agent's sensor range (scout only)");
    add_obs("target_dx", "target x minus own x, offset-normalized; 0 when not visible");
    add_obs("target_dy", "target y minus own y, offset-normalized; 0 when not visible");
    for (int slot = 0; slot < n - 1; ++slot) {
        const std::string who = "the other agent at index slot " + std::to_string(slot) +
                                " (agents ordered by index, self excluded)";
        add_obs("other" + std::to_string(slot) + "_visible", "1 if " + who + " is visible");
        add_obs("other" + std::to_string(slot) + "_dx",
                "x offset to " + who + ", offset-normalized; 0 when not visible");
        add_obs("other" + std::to_string(slot) + "_dy",
                "y offset to " + who + ", offset-normalized; 0 when not visible");
    }
    for (int a = 0; a < n_actions(); ++a)
        add_obs(std::string("last_action_") + kActionNames[a],
                std::string("1 if the previous own action was ") + kActionNames[a]);
    for (int a = 0; a < n; ++a)
        add_obs("agent_id_" + std::to_string(a), "1 if this agent is " + agent_name(a));
    obs_schema_.validate();

    meta_.env_id = "hidden-target";
    meta_.task_summary =
        "A scout that can sense a hidden target anywhere on the grid must guide " +
        std::to_string(bombers_) +
        " short-sighted bombers; the team wins when every bomber is adjacent to the target "
        "on the same step.";
    meta_.roles.push_back({"scout", {0}});
    std::vector<int> bomber_ids;
    for (int b = 0; b < bombers_; ++b) bomber_ids.push_back(b + 1);
    meta_.roles.push_back({"bombers", bomber_ids});

    const int la_base = obs_last_action_base();
    std::vector<int> la_dims;
    for (int a = 0; a < n_actions(); ++a) la_dims.push_back(la_base + a);

    DimGroup target_group;
    target_group.name = "target";
    target_group.state_dims = {state_target_x(), state_target_y()};
    target_group.share_at_init = true;
    target_group.tiers.push_back(
        {"scout", {kObsTargetBase, kObsTargetBase + 1, kObsTargetBase + 2}, "identity", 1});
    target_group.tiers.push_back({"scout", {kObsOdoBase, kObsOdoBase + 1}, "identity", 1});
    meta_.groups.push_back(std::move(target_group));

    DimGroup scout_group;
    scout_group.name = "scout_pos";
    scout_group.state_dims = {state_agent_x(0), state_agent_y(0)};
    scout_group.tiers.push_back({"scout", {kObsOdoBase, kObsOdoBase + 1}, "identity", 1});
    meta_.groups.push_back(std::move(scout_group));

    for (int b = 0; b < bombers_; ++b) {
        const int a = b + 1;
        DimGroup g;
        g.name = "bomber" + std::to_string(b + 1) + "_pos";
        g.state_dims = {state_agent_x(a), state_agent_y(a)};
        // the scout's other-agent slot for bomber a is a-1 (index order, self excluded)
        const int base = obs_other_base(a - 1);
        g.tiers.push_back({"scout", {base, base + 1, base + 2}, "identity", 1});
        g.tiers.push_back({"bombers", {kObsOdoBase, kObsOdoBase + 1}, "identity", 1});
        meta_.groups.push_back(std::move(g));
    }

    DimGroup scout_action;
    scout_action.name = "scout_last_action";
    scout_action.state_dims = {state_last_action(0)};
    scout_action.tiers.push_back({"scout", la_dims, "identity", 1});
    meta_.groups.push_back(std::move(scout_action));

    DimGroup bomber_actions;
    bomber_actions.name = "bomber_last_actions";
    for (int b = 0; b < bombers_; ++b)
        bomber_actions.state_dims.push_back(state_last_action(b + 1));
    bomber_actions.tiers.push_back({"bombers", la_dims, "identity", 1});
    meta_.groups.push_back(std::move(bomber_actions));

    meta_.obs_chunks = {
        {0, 3, "movement availability (north/east/south/west)"},
        {4, 5, "own displacement from spawn"},
        {6, 8, "target block: visibility flag and relative offset (scout sensor only)"},
        {9, 9 + 3 * (n - 1) - 1, "per other agent: visibility flag and relative offset"},
        {obs_last_action_base(), obs_last_action_base() + n_actions() - 1, "last action one-hot"},
        {obs_agent_id_base(), obs_agent_id_base() + n - 1, "agent ID one-hot"},
    };
}

HiddenTargetGrid::Decoded HiddenTargetGrid::decode(const EnvState& state) const {
    if (static_cast<int>(state.s.size()) != state_schema_.width())
        throw ContractError("hidden-target: state width mismatch");
    Decoded d;
    for (int a = 0; a < n_agents(); ++a)
        d.agents.emplace_back(pos_denorm(state.s[state_agent_x(a)], grid_),
                              pos_denorm(state.s[state_agent_y(a)], grid_));
    d.target = {pos_denorm(state.s[state_target_x()], grid_),
                pos_denorm(state.s[state_target_y()], grid_)};
    for (int b = 0; b < bombers_; ++b)
        d.reached.push_back(state.s[state_reached_flag(b)] > 0.5);
    for (int a = 0; a < n_agents(); ++a)
        d.last_actions.push_back(pos_denorm(state.s[state_last_action(a)], n_actions()));
    return d;
}

EnvState HiddenTargetGrid::encode(const Decoded& d, int step, bool terminal, bool win) const {
    EnvState st;
    st.s.resize(state_schema_.width(), 0.0);
    for (int a = 0; a < n_agents(); ++a) {
        st.s[state_agent_x(a)] = pos_norm(d.agents[a].first, grid_);
        st.s[state_agent_y(a)] = pos_norm(d.agents[a].second, grid_);
    }
    st.s[state_target_x()] = pos_norm(d.target.first, grid_);
    st.s[state_target_y()] = pos_norm(d.target.second, grid_);
    for (int b = 0; b < bombers_; ++b) st.s[state_reached_flag(b)] = d.reached[b] ? 1.0 : 0.0;
    for (int a = 0; a < n_agents(); ++a)
        st.s[state_last_action(a)] = pos_norm(d.last_actions[a], n_actions());
    st.s[state_step_fraction()] = std::min(1.0, static_cast<double>(step) / horizon_);
    st.step = step;
    st.terminal = terminal;
    st.win = win;
    return st;
}

std::pair<EnvState, ObservationSet> HiddenTargetGrid::reset(std::uint64_t seed) const {
    Rng rng(seed, 0x485447ULL);  // env-family stream tag
    Decoded d;
    d.agents = spawns_;
    d.target = target_cells_[rng.uniform_int(static_cast<int>(target_cells_.size()))];
    d.reached.assign(bombers_, false);
    d.last_actions.assign(n_agents(), 0);
    EnvState st = encode(d, 0, false, false);
    return {st, observe_all(st)};
}

StepResult HiddenTargetGrid::step(const EnvState& state, const JointAction& actions) const {
    if (state.terminal) throw ContractError("hidden-target: step on terminal state");
    if (static_cast<int>(actions.size()) != n_agents())
        throw ContractError("hidden-target: joint action size mismatch");
    for (const int a : actions)
        if (a < 0 || a >= n_actions()) throw ContractError("hidden-target: action out of range");

    Decoded d = decode(state);
    for (int i = 0; i < n_agents(); ++i) {
        const int nx = d.agents[i].first + kDx[actions[i]];
        const int ny = d.agents[i].second + kDy[actions[i]];
        if (nx >= 0 && nx < grid_ && ny >= 0 && ny < grid_) d.agents[i] = {nx, ny};
        d.last_actions[i] = actions[i];
    }

    double reward = -0.01;
    int adjacent_count = 0;
    for (int b = 0; b < bombers_; ++b) {
        const bool adjacent = cheb(d.agents[b + 1], d.target) <= 1;
        if (adjacent) ++adjacent_count;
        if (adjacent && !d.reached[b]) {
            d.reached[b] = true;
            reward += 0.5;
        }
    }
    const bool win = adjacent_count == bombers_;
    if (win) reward += 10.0;

    const int next_step = state.step + 1;
    const bool done = win || next_step >= horizon_;

    StepResult result;
    result.state = encode(d, next_step, done, win);
    result.reward = reward;
    result.done = done;
    result.win = win;
    result.obs = observe_all(result.state);
    return result;
}

std::vector<double> HiddenTargetGrid::observe(const EnvState& state, int agent) const {
    if (agent < 0 || agent >= n_agents())
        throw ContractError("hidden-target: agent index out of range");
    const Decoded d = decode(state);
    std::vector<double> o(obs_width(), 0.0);

    const auto [x, y] = d.agents[agent];
    o[kObsMoveBase + 0] = y > 0 ? 1.0 : 0.0;
    o[kObsMoveBase + 1] = x < grid_ - 1 ? 1.0 : 0.0;
    o[kObsMoveBase + 2] = y < grid_ - 1 ? 1.0 : 0.0;
    o[kObsMoveBase + 3] = x > 0 ? 1.0 : 0.0;

    o[kObsOdoBase + 0] = off_norm(x - spawns_[agent].first, grid_);
    o[kObsOdoBase + 1] = off_norm(y - spawns_[agent].second, grid_);

    if (agent == 0) {
        const bool visible =
            scout_target_range_ < 0 || cheb(d.agents[0], d.target) <= scout_target_range_;
        if (visible) {
            o[kObsTargetBase + 0] = 1.0;
            o[kObsTargetBase + 1] = off_norm(d.target.first - x, grid_);
            o[kObsTargetBase + 2] = off_norm(d.target.second - y, grid_);
        }
    }

    int slot = 0;
    for (int j = 0; j < n_agents(); ++j) {
        if (j == agent) continue;
        const int dist = cheb(d.agents[agent], d.agents[j]);
        const int range = agent == 0 ? scout_ally_range_ : sight_;
        if (dist <= range) {
            const int base = obs_other_base(slot);
            o[base + 0] = 1.0;
            o[base + 1] = off_norm(d.agents[j].first - x, grid_);
            o[base + 2] = off_norm(d.agents[j].second - y, grid_);
        }
        ++slot;
    }

    o[obs_last_action_base() + d.last_actions[agent]] = 1.0;
    o[obs_agent_id_base() + agent] = 1.0;
    return o;
}

}  // namespace commforge
