#include "commforge/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <zlib.h>

#include "commforge/tensor.hpp"

namespace commforge {

using nlohmann::json;

bool operator==(const StepRecord& a, const StepRecord& b) {
    return a.state == b.state && a.obs == b.obs && a.actions == b.actions &&
           a.reward == b.reward && a.done == b.done;
}

bool operator==(const Trajectory& a, const Trajectory& b) {
    return a.episode_id == b.episode_id && a.seed == b.seed && a.policy_tag == b.policy_tag &&
           a.win == b.win && a.steps == b.steps;
}

DatasetHeader dataset_header_for(const Env& env) {
    DatasetHeader h;
    h.env_id = env.meta().env_id;
    h.state_hash = env.state_schema().hash();
    h.obs_hash = env.obs_schema().hash();
    h.n_agents = env.n_agents();
    h.n_actions = env.n_actions();
    h.state_width = env.state_schema().width();
    h.obs_width = env.obs_schema().width();
    return h;
}

void require_header_matches(const DatasetHeader& header, const Env& env) {
    if (header.state_hash != env.state_schema().hash() ||
        header.obs_hash != env.obs_schema().hash())
        throw IoError("dataset: schema hash mismatch between file (env '" + header.env_id +
                      "') and the configured environment '" + env.meta().env_id + "'");
}

namespace {

bool is_gzip_path(const std::string& path) {
    return path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

/// Line-oriented writer over either a plain stream or a gz stream.
class LineWriter {
public:
    explicit LineWriter(const std::string& path) : gzip_(is_gzip_path(path)) {
        if (gzip_) {
            gz_ = gzopen(path.c_str(), "wb");
            if (!gz_) throw IoError("dataset: cannot open for write: " + path);
        } else {
            os_.open(path, std::ios::trunc);
            if (!os_) throw IoError("dataset: cannot open for write: " + path);
        }
        path_ = path;
    }
    ~LineWriter() {
        if (gz_) gzclose(gz_);
    }
    void line(const std::string& text) {
        if (gzip_) {
            if (gzwrite(gz_, text.data(), static_cast<unsigned>(text.size())) !=
                    static_cast<int>(text.size()) ||
                gzwrite(gz_, "\n", 1) != 1)
                throw IoError("dataset: gzip write failed: " + path_);
        } else {
            os_ << text << '\n';
            if (!os_) throw IoError("dataset: write failed: " + path_);
        }
    }

private:
    bool gzip_;
    std::ofstream os_;
    gzFile gz_ = nullptr;
    std::string path_;
};

std::vector<std::string> read_lines(const std::string& path) {
    std::vector<std::string> lines;
    if (is_gzip_path(path)) {
        gzFile gz = gzopen(path.c_str(), "rb");
        if (!gz) throw IoError("dataset: cannot open: " + path);
        std::string current;
        char buf[1 << 16];
        int n = 0;
        while ((n = gzread(gz, buf, sizeof buf)) > 0) {
            for (int i = 0; i < n; ++i) {
                if (buf[i] == '\n') {
                    lines.push_back(std::move(current));
                    current.clear();
                } else {
                    current.push_back(buf[i]);
                }
            }
        }
        gzclose(gz);
        if (!current.empty()) lines.push_back(std::move(current));
    } else {
        std::ifstream is(path);
        if (!is) throw IoError("dataset: cannot open: " + path);
        std::string line;
        while (std::getline(is, line)) lines.push_back(line);
    }
    return lines;
}

void validate_episode(const DatasetHeader& h, const Trajectory& t) {
    if (t.steps.empty()) throw ShapeError("dataset: episode " + std::to_string(t.episode_id) +
                                          " has no steps");
    if (!t.steps.back().done)
        throw ShapeError("dataset: episode " + std::to_string(t.episode_id) +
                         " does not end with the done flag");
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const StepRecord& s = t.steps[i];
        if (static_cast<int>(s.state.size()) != h.state_width)
            throw ShapeError("dataset: state width violates the schema at step " +
                             std::to_string(i));
        if (static_cast<int>(s.obs.size()) != h.n_agents ||
            static_cast<int>(s.actions.size()) != h.n_agents)
            throw ShapeError("dataset: per-agent record count mismatch at step " +
                             std::to_string(i));
        for (const auto& o : s.obs)
            if (static_cast<int>(o.size()) != h.obs_width)
                throw ShapeError("dataset: observation width violates the schema at step " +
                                 std::to_string(i));
        for (const int a : s.actions)
            if (a < 0 || a >= h.n_actions)
                throw ShapeError("dataset: action out of range at step " + std::to_string(i));
        if (s.done != (i + 1 == t.steps.size()))
            throw ShapeError("dataset: done flag must be set exactly on the final step");
    }
}

json header_to_json(const DatasetHeader& h) {
    return json{{"format", "cfjsonl"},
                {"version", 1},
                {"env_id", h.env_id},
                {"state_hash", h.state_hash},
                {"obs_hash", h.obs_hash},
                {"n_agents", h.n_agents},
                {"n_actions", h.n_actions},
                {"state_width", h.state_width},
                {"obs_width", h.obs_width}};
}

DatasetHeader header_from_json(const json& j) {
    if (!j.is_object() || j.value("format", "") != "cfjsonl")
        throw IoError("dataset: missing cfjsonl header line");
    DatasetHeader h;
    h.env_id = j.at("env_id").get<std::string>();
    h.state_hash = j.at("state_hash").get<std::uint64_t>();
    h.obs_hash = j.at("obs_hash").get<std::uint64_t>();
    h.n_agents = j.at("n_agents").get<int>();
    h.n_actions = j.at("n_actions").get<int>();
    h.state_width = j.at("state_width").get<int>();
    h.obs_width = j.at("obs_width").get<int>();
    return h;
}

}  // namespace

void save_dataset(const std::string& path, const DatasetHeader& header,
                  const std::vector<Trajectory>& episodes) {
    for (const Trajectory& t : episodes) validate_episode(header, t);

    LineWriter writer(path);
    writer.line(header_to_json(header).dump());
    for (const Trajectory& t : episodes) {
        json steps = json::array();
        for (const StepRecord& s : t.steps)
            steps.push_back(json{{"s", s.state},
                                 {"o", s.obs},
                                 {"a", s.actions},
                                 {"r", s.reward},
                                 {"d", s.done}});
        writer.line(json{{"episode", t.episode_id},
                         {"seed", t.seed},
                         {"policy", t.policy_tag},
                         {"win", t.win},
                         {"steps", std::move(steps)}}
                        .dump());
    }
}

Dataset load_dataset(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw IoError("dataset: empty file: " + path);

    Dataset ds;
    ds.header = header_from_json(json::parse(lines[0]));
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const json j = json::parse(lines[i]);
        Trajectory t;
        t.episode_id = j.at("episode").get<int>();
        t.seed = j.at("seed").get<std::uint64_t>();
        t.policy_tag = j.at("policy").get<std::string>();
        t.win = j.at("win").get<bool>();
        for (const json& js : j.at("steps")) {
            StepRecord s;
            s.state = js.at("s").get<std::vector<double>>();
            s.obs = js.at("o").get<std::vector<std::vector<double>>>();
            s.actions = js.at("a").get<std::vector<int>>();
            s.reward = js.at("r").get<double>();
            s.done = js.at("d").get<bool>();
            t.steps.push_back(std::move(s));
        }
        validate_episode(ds.header, t);
        ds.episodes.push_back(std::move(t));
    }
    return ds;
}

Dataset load_datasets(const std::vector<std::string>& paths) {
    if (paths.empty()) throw IoError("dataset: no input files");
    Dataset all = load_dataset(paths[0]);
    for (std::size_t i = 1; i < paths.size(); ++i) {
        Dataset next = load_dataset(paths[i]);
        if (next.header.state_hash != all.header.state_hash ||
            next.header.obs_hash != all.header.obs_hash)
            throw IoError("dataset: schema hash mismatch across input files");
        for (Trajectory& t : next.episodes) all.episodes.push_back(std::move(t));
    }
    return all;
}

PolicyFn random_policy(const Env& env) {
    const int n = env.n_agents();
    const int actions = env.n_actions();
    return [n, actions](const EnvState&, const ObservationSet&, Rng& rng) {
        JointAction act(n);
        for (int i = 0; i < n; ++i) act[i] = rng.uniform_int(actions);
        return act;
    };
}

std::vector<Trajectory> collect_trajectories(const Env& env, const PolicyFn& policy,
                                             int episodes, std::uint64_t seed,
                                             const std::string& policy_tag) {
    std::vector<Trajectory> out;
    out.reserve(episodes);
    for (int e = 0; e < episodes; ++e) {
        const std::uint64_t episode_seed = Rng(seed, static_cast<std::uint64_t>(e)).next_u64();
        Rng action_rng(episode_seed, 0xAC7ULL);
        Trajectory traj;
        traj.episode_id = e;
        traj.seed = episode_seed;
        traj.policy_tag = policy_tag;

        auto [state, obs] = env.reset(episode_seed);
        while (!state.terminal) {
            StepRecord rec;
            rec.state = state.s;
            rec.obs = obs.per_agent;
            rec.actions = policy(state, obs, action_rng);
            StepResult r = env.step(state, rec.actions);
            rec.reward = r.reward;
            rec.done = r.done;
            traj.steps.push_back(std::move(rec));
            traj.win = r.win;
            state = std::move(r.state);
            obs = std::move(r.obs);
        }
        out.push_back(std::move(traj));
    }
    return out;
}

}  // namespace commforge
