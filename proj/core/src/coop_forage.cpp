#include "commforge/coop_forage.hpp"

#include <algorithm>
#include <cmath>

#include "commforge/rng.hpp"
#include "commforge/tensor.hpp"

namespace commforge {

namespace {

constexpr int kDx[6] = {0, 0, 1, 0, -1, 0};
constexpr int kDy[6] = {0, -1, 0, 1, 0, 0};
constexpr int kLoadAction = 5;
constexpr const char* kActionNames[6] = {"stay", "north", "east", "south", "west", "load"};

int cheb(std::pair<int, int> a, std::pair<int, int> b) {
    return std::max(std::abs(a.first - b.first), std::abs(a.second - b.second));
}
int manhattan(std::pair<int, int> a, std::pair<int, int> b) {
    return std::abs(a.first - b.first) + std::abs(a.second - b.second);
}

}  // namespace

struct CoopForage::Decoded {
    std::vector<std::pair<int, int>> agents;
    std::vector<std::pair<int, int>> fruit_pos;
    std::vector<bool> fruit_present;
    std::vector<int> last_actions;
};

CoopForage::CoopForage(const EnvConfig& config)
    : grid_(config.grid),
      foragers_(config.foragers),
      fruits_(config.fruits),
      horizon_(config.horizon),
      sight_(config.sight),
      visibility_reduction_(config.visibility_reduction) {
    if (foragers_ < 2) throw ConfigError("coop-forage: need at least two foragers");
    if (fruits_ < 1) throw ConfigError("coop-forage: need at least one fruit");
    if (sight_ < 1) throw ConfigError("coop-forage: sight must be >= 1");

    spawns_ = border_spawns(grid_, foragers_, config.spawn_switch);

    int idx = 0;
    auto add_state = [&](const std::string& name, const std::string& desc) {
        state_schema_.dims.push_back({idx++, name, desc, 0.0, 1.0});
    };
    for (int a = 0; a < foragers_; ++a) {
        const std::string who = "agent" + std::to_string(a + 1);
        add_state(who + "_x", "absolute x of " + who + ", normalized by grid width");
        add_state(who + "_y", "absolute y of " + who + ", normalized by grid height");
    }
    for (int f = 0; f < fruits_; ++f) {
        const std::string who = "fruit" + std::to_string(f + 1);
        add_state(who + "_x", "absolute x of " + who + ", normalized by grid width");
        add_state(who + "_y", "absolute y of " + who + ", normalized by grid height");
        add_state(who + "_present", "1 while " + who + " has not been collected");
    }
    for (int a = 0; a < foragers_; ++a)
        add_state("agent" + std::to_string(a + 1) + "_last_action",
                  "most recent action of agent" + std::to_string(a + 1) +
                      ", index normalized to [0,1]");
    add_state("step_fraction", "elapsed steps divided by the horizon");
    state_schema_.validate();

    idx = 0;
    auto add_obs = [&](const std::string& name, const std::string& desc) {
        obs_schema_.dims.push_back({idx++, name, desc, 0.0, 1.0});
    };
    for (const char* dir : {"north", "east", "south", "west"})
        add_obs(std::string("can_move_") + dir,
                std::string("1 if moving ") + dir + " is possible (in bounds, no fruit)");
    add_obs("self_odo_dx", "own x displacement from own spawn cell, offset-normalized");
    add_obs("self_odo_dy", "own y displacement from own spawn cell, offset-normalized");
    for (int f = 0; f < fruits_; ++f) {
        const std::string who = "fruit" + std::to_string(f + 1);
        add_obs(who + "_visible", "1 if " + who + " is present and within sight");
        add_obs(who + "_dx", who + " x minus own x, offset-normalized; 0 when not visible");
        add_obs(who + "_dy", who + " y minus own y, offset-normalized; 0 when not visible");
    }
    for (int slot = 0; slot < foragers_ - 1; ++slot) {
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
    for (int a = 0; a < foragers_; ++a)
        add_obs("agent_id_" + std::to_string(a),
                "1 if this agent is agent" + std::to_string(a + 1));
    obs_schema_.validate();

    meta_.env_id = "coop-forage";
    meta_.task_summary =
        "Foragers with a one-cell sight range must pair up: a fruit loads only when two "
        "adjacent agents issue load on the same step, and the team wins once every fruit "
        "is collected.";
    std::vector<int> all_ids;
    for (int a = 0; a < foragers_; ++a) all_ids.push_back(a);
    meta_.roles.push_back({"foragers", all_ids});

    const int la_base = obs_last_action_base();
    std::vector<int> la_dims;
    for (int a = 0; a < n_actions(); ++a) la_dims.push_back(la_base + a);

    for (int f = 0; f < fruits_; ++f) {
        DimGroup g;
        g.name = "fruit" + std::to_string(f + 1);
        g.state_dims = {state_fruit_x(f), state_fruit_y(f), state_fruit_present(f)};
        g.share_at_init = true;
        const int base = obs_fruit_base(f);
        g.tiers.push_back({"foragers", {base, base + 1, base + 2}, "identity", 1});
        g.tiers.push_back({"foragers", {kObsOdoBase, kObsOdoBase + 1}, "identity", 1});
        meta_.groups.push_back(std::move(g));
    }
    for (int a = 0; a < foragers_; ++a) {
        DimGroup g;
        g.name = "agent" + std::to_string(a + 1) + "_pos";
        g.state_dims = {state_agent_x(a), state_agent_y(a)};
        g.tiers.push_back({"foragers", {kObsOdoBase, kObsOdoBase + 1}, "identity", 1});
        meta_.groups.push_back(std::move(g));
    }
    DimGroup actions_group;
    actions_group.name = "last_actions";
    for (int a = 0; a < foragers_; ++a) actions_group.state_dims.push_back(state_last_action(a));
    actions_group.tiers.push_back({"foragers", la_dims, "identity", 1});
    meta_.groups.push_back(std::move(actions_group));

    meta_.obs_chunks = {
        {0, 3, "movement availability (north/east/south/west)"},
        {4, 5, "own displacement from spawn"},
        {6, 6 + 3 * fruits_ - 1, "per fruit: visibility flag and relative offset"},
        {6 + 3 * fruits_, 6 + 3 * fruits_ + 3 * (foragers_ - 1) - 1,
         "per other agent: visibility flag and relative offset"},
        {obs_last_action_base(), obs_last_action_base() + n_actions() - 1,
         "last action one-hot"},
        {obs_agent_id_base(), obs_agent_id_base() + foragers_ - 1, "agent ID one-hot"},
    };
}

CoopForage::Decoded CoopForage::decode(const EnvState& state) const {
    if (static_cast<int>(state.s.size()) != state_schema_.width())
        throw ContractError("coop-forage: state width mismatch");
    Decoded d;
    for (int a = 0; a < foragers_; ++a)
        d.agents.emplace_back(pos_denorm(state.s[state_agent_x(a)], grid_),
                              pos_denorm(state.s[state_agent_y(a)], grid_));
    for (int f = 0; f < fruits_; ++f) {
        d.fruit_pos.emplace_back(pos_denorm(state.s[state_fruit_x(f)], grid_),
                                 pos_denorm(state.s[state_fruit_y(f)], grid_));
        d.fruit_present.push_back(state.s[state_fruit_present(f)] > 0.5);
    }
    for (int a = 0; a < foragers_; ++a)
        d.last_actions.push_back(pos_denorm(state.s[state_last_action(a)], n_actions()));
    return d;
}

EnvState CoopForage::encode(const Decoded& d, int step, bool terminal, bool win) const {
    EnvState st;
    st.s.resize(state_schema_.width(), 0.0);
    for (int a = 0; a < foragers_; ++a) {
        st.s[state_agent_x(a)] = pos_norm(d.agents[a].first, grid_);
        st.s[state_agent_y(a)] = pos_norm(d.agents[a].second, grid_);
    }
    for (int f = 0; f < fruits_; ++f) {
        st.s[state_fruit_x(f)] = pos_norm(d.fruit_pos[f].first, grid_);
        st.s[state_fruit_y(f)] = pos_norm(d.fruit_pos[f].second, grid_);
        st.s[state_fruit_present(f)] = d.fruit_present[f] ? 1.0 : 0.0;
    }
    for (int a = 0; a < foragers_; ++a)
        st.s[state_last_action(a)] = pos_norm(d.last_actions[a], n_actions());
    st.s[state_step_fraction()] = std::min(1.0, static_cast<double>(step) / horizon_);
    st.step = step;
    st.terminal = terminal;
    st.win = win;
    return st;
}

std::pair<EnvState, ObservationSet> CoopForage::reset(std::uint64_t seed) const {
    Rng rng(seed, 0x434647ULL);
    Decoded d;
    d.agents = spawns_;
    std::vector<std::pair<int, int>> free;
    for (int x = 0; x < grid_; ++x)
        for (int y = 0; y < grid_; ++y) {
            const std::pair<int, int> cell{x, y};
            if (std::find(spawns_.begin(), spawns_.end(), cell) == spawns_.end())
                free.push_back(cell);
        }
    for (int f = 0; f < fruits_; ++f) {
        const int pick = rng.uniform_int(static_cast<int>(free.size()));
        d.fruit_pos.push_back(free[pick]);
        free.erase(free.begin() + pick);
        d.fruit_present.push_back(true);
    }
    d.last_actions.assign(foragers_, 0);
    EnvState st = encode(d, 0, false, false);
    return {st, observe_all(st)};
}

StepResult CoopForage::step(const EnvState& state, const JointAction& actions) const {
    if (state.terminal) throw ContractError("coop-forage: step on terminal state");
    if (static_cast<int>(actions.size()) != foragers_)
        throw ContractError("coop-forage: joint action size mismatch");
    for (const int a : actions)
        if (a < 0 || a >= n_actions()) throw ContractError("coop-forage: action out of range");

    Decoded d = decode(state);
    auto blocked = [&](int x, int y) {
        if (x < 0 || x >= grid_ || y < 0 || y >= grid_) return true;
        for (int f = 0; f < fruits_; ++f)
            if (d.fruit_present[f] && d.fruit_pos[f] == std::pair<int, int>{x, y}) return true;
        return false;
    };
    for (int i = 0; i < foragers_; ++i) {
        const int nx = d.agents[i].first + kDx[actions[i]];
        const int ny = d.agents[i].second + kDy[actions[i]];
        if (actions[i] != kLoadAction && !blocked(nx, ny)) d.agents[i] = {nx, ny};
        d.last_actions[i] = actions[i];
    }

    double reward = 0.0;
    for (int f = 0; f < fruits_; ++f) {
        if (!d.fruit_present[f]) continue;
        int loaders = 0;
        for (int i = 0; i < foragers_; ++i)
            if (actions[i] == kLoadAction && cheb(d.agents[i], d.fruit_pos[f]) <= 1) ++loaders;
        if (loaders >= 2) {
            d.fruit_present[f] = false;
            reward += 1.0 / fruits_;  // equal fruit values, normalized by total
        }
    }
    const bool win = std::none_of(d.fruit_present.begin(), d.fruit_present.end(),
                                  [](bool present) { return present; });

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

std::vector<double> CoopForage::observe(const EnvState& state, int agent) const {
    if (agent < 0 || agent >= foragers_)
        throw ContractError("coop-forage: agent index out of range");
    const Decoded d = decode(state);
    std::vector<double> o(obs_width(), 0.0);

    const auto [x, y] = d.agents[agent];
    auto blocked = [&](int nx, int ny) {
        if (nx < 0 || nx >= grid_ || ny < 0 || ny >= grid_) return true;
        for (int f = 0; f < fruits_; ++f)
            if (d.fruit_present[f] && d.fruit_pos[f] == std::pair<int, int>{nx, ny}) return true;
        return false;
    };
    o[kObsMoveBase + 0] = blocked(x, y - 1) ? 0.0 : 1.0;
    o[kObsMoveBase + 1] = blocked(x + 1, y) ? 0.0 : 1.0;
    o[kObsMoveBase + 2] = blocked(x, y + 1) ? 0.0 : 1.0;
    o[kObsMoveBase + 3] = blocked(x - 1, y) ? 0.0 : 1.0;

    o[kObsOdoBase + 0] = off_norm(x - spawns_[agent].first, grid_);
    o[kObsOdoBase + 1] = off_norm(y - spawns_[agent].second, grid_);

    for (int f = 0; f < fruits_; ++f) {
        if (!d.fruit_present[f]) continue;
        const int dist = visibility_reduction_ ? manhattan(d.agents[agent], d.fruit_pos[f])
                                               : cheb(d.agents[agent], d.fruit_pos[f]);
        if (dist <= sight_) {
            const int base = obs_fruit_base(f);
            o[base + 0] = 1.0;
            o[base + 1] = off_norm(d.fruit_pos[f].first - x, grid_);
            o[base + 2] = off_norm(d.fruit_pos[f].second - y, grid_);
        }
    }

    int slot = 0;
    for (int j = 0; j < foragers_; ++j) {
        if (j == agent) continue;
        if (cheb(d.agents[agent], d.agents[j]) <= sight_) {
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
