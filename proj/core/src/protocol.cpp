#include "commforge/protocol.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "commforge/tensor.hpp"

namespace commforge {

using nlohmann::json;

const char* to_string(DiagnosticClass c) {
    switch (c) {
        case DiagnosticClass::Syntax: return "syntax";
        case DiagnosticClass::Schema: return "schema";
        case DiagnosticClass::Semantic: return "semantic";
    }
    return "unknown";
}

const char* to_string(Transform t) {
    switch (t) {
        case Transform::Identity: return "identity";
        case Transform::DeltaHistory: return "delta-history";
        case Transform::OneHotId: return "one-hot-id";
        case Transform::MeanOverWindow: return "mean-over-window";
    }
    return "unknown";
}

std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    std::string out;
    for (const Diagnostic& d : diagnostics) {
        out += "[";
        out += to_string(d.cls);
        out += ":";
        out += d.code;
        out += "] ";
        out += d.message;
        out += "\n";
    }
    return out;
}

bool operator==(const MessageRule& a, const MessageRule& b) {
    return a.senders == b.senders && a.receivers_all_others == b.receivers_all_others &&
           a.receivers == b.receivers && a.features == b.features &&
           a.transform == b.transform && a.window == b.window;
}

bool operator==(const ProtocolSpec& a, const ProtocolSpec& b) {
    return a.rules == b.rules && a.message_width == b.message_width &&
           a.rationale == b.rationale;
}

int computed_width(const ProtocolSpec& spec, int n_agents) {
    int w = 0;
    for (const MessageRule& r : spec.rules)
        w += r.width_per_sender(n_agents) * static_cast<int>(r.senders.size());
    return w;
}

namespace {

constexpr const char* kKnownRuleFields[] = {"sender", "receivers", "features", "transform",
                                            "window"};
constexpr const char* kKnownTopFields[] = {"message_width", "rationale", "rules"};

struct Collector {
    std::vector<Diagnostic> diags;
    void add(DiagnosticClass cls, std::string code, std::string message) {
        diags.push_back({cls, std::move(code), std::move(message)});
    }
    bool ok() const { return diags.empty(); }
};

std::optional<Transform> parse_transform(const std::string& name) {
    if (name == "identity") return Transform::Identity;
    if (name == "delta-history") return Transform::DeltaHistory;
    if (name == "one-hot-id") return Transform::OneHotId;
    if (name == "mean-over-window") return Transform::MeanOverWindow;
    return std::nullopt;
}

/// Resolve an agent selector (index, index list, or role name) to indices.
std::optional<std::vector<int>> resolve_agents(const json& sel, const ProtocolContext& ctx,
                                               const char* what, int rule_index,
                                               Collector& out) {
    std::vector<int> agents;
    if (sel.is_number_integer()) {
        agents.push_back(sel.get<int>());
    } else if (sel.is_string()) {
        const std::string role = sel.get<std::string>();
        const std::vector<int>* members = ctx.find_role(role);
        if (!members) {
            out.add(DiagnosticClass::Semantic, "unknown-role",
                    std::string("rule ") + std::to_string(rule_index) + ": " + what +
                        " names unknown role '" + role + "'");
            return std::nullopt;
        }
        agents = *members;
    } else if (sel.is_array()) {
        for (const json& e : sel) {
            if (!e.is_number_integer()) {
                out.add(DiagnosticClass::Schema, "bad-type",
                        std::string("rule ") + std::to_string(rule_index) + ": " + what +
                            " list entries must be integers");
                return std::nullopt;
            }
            agents.push_back(e.get<int>());
        }
    } else {
        out.add(DiagnosticClass::Schema, "bad-type",
                std::string("rule ") + std::to_string(rule_index) + ": " + what +
                    " must be an index, an index list, or a role name");
        return std::nullopt;
    }
    std::sort(agents.begin(), agents.end());
    agents.erase(std::unique(agents.begin(), agents.end()), agents.end());
    if (agents.empty()) {
        out.add(DiagnosticClass::Semantic, "empty-selector",
                std::string("rule ") + std::to_string(rule_index) + ": " + what +
                    " selects no agents");
        return std::nullopt;
    }
    for (const int a : agents) {
        if (a < 0 || a >= ctx.n_agents) {
            out.add(DiagnosticClass::Semantic, "agent-out-of-range",
                    std::string("rule ") + std::to_string(rule_index) + ": " + what +
                        " index " + std::to_string(a) + " is outside the " +
                        std::to_string(ctx.n_agents) + "-agent team");
            return std::nullopt;
        }
    }
    return agents;
}

void parse_rule(const json& jr, int rule_index, const ProtocolContext& ctx,
                std::vector<MessageRule>& rules, Collector& out) {
    if (!jr.is_object()) {
        out.add(DiagnosticClass::Schema, "bad-type",
                "rule " + std::to_string(rule_index) + " must be an object");
        return;
    }
    for (const auto& [key, value] : jr.items()) {
        (void)value;
        if (std::find_if(std::begin(kKnownRuleFields), std::end(kKnownRuleFields),
                         [&](const char* f) { return key == f; }) ==
            std::end(kKnownRuleFields)) {
            out.add(DiagnosticClass::Schema, "unknown-field",
                    "rule " + std::to_string(rule_index) + ": unknown field '" + key + "'");
            return;
        }
    }
    if (!jr.contains("sender") || !jr.contains("receivers")) {
        out.add(DiagnosticClass::Schema, "missing-field",
                "rule " + std::to_string(rule_index) + ": 'sender' and 'receivers' are required");
        return;
    }

    MessageRule rule;

    const auto senders = resolve_agents(jr.at("sender"), ctx, "sender", rule_index, out);
    if (!senders) return;
    rule.senders = *senders;

    const json& jrecv = jr.at("receivers");
    if (jrecv.is_string() && jrecv.get<std::string>() == "all-others") {
        rule.receivers_all_others = true;
    } else {
        const auto receivers = resolve_agents(jrecv, ctx, "receivers", rule_index, out);
        if (!receivers) return;
        rule.receivers = *receivers;
    }

    std::string transform_name = "identity";
    if (jr.contains("transform")) {
        if (!jr.at("transform").is_string()) {
            out.add(DiagnosticClass::Schema, "bad-type",
                    "rule " + std::to_string(rule_index) + ": 'transform' must be a string");
            return;
        }
        transform_name = jr.at("transform").get<std::string>();
    }
    const auto transform = parse_transform(transform_name);
    if (!transform) {
        out.add(DiagnosticClass::Schema, "unknown-transform",
                "rule " + std::to_string(rule_index) + ": unknown transform '" + transform_name +
                    "' (expected identity, delta-history, mean-over-window, or one-hot-id)");
        return;
    }
    rule.transform = *transform;

    if (jr.contains("window")) {
        if (!jr.at("window").is_number_integer()) {
            out.add(DiagnosticClass::Schema, "bad-type",
                    "rule " + std::to_string(rule_index) + ": 'window' must be an integer");
            return;
        }
        rule.window = jr.at("window").get<int>();
    }
    const bool needs_window =
        rule.transform == Transform::DeltaHistory || rule.transform == Transform::MeanOverWindow;
    if (needs_window && rule.window < 1) {
        out.add(DiagnosticClass::Semantic, "bad-window",
                "rule " + std::to_string(rule_index) + ": history transforms need window >= 1, got " +
                    std::to_string(rule.window));
        return;
    }

    if (rule.transform == Transform::OneHotId) {
        if (jr.contains("features") && !jr.at("features").empty()) {
            out.add(DiagnosticClass::Schema, "one-hot-features",
                    "rule " + std::to_string(rule_index) +
                        ": one-hot-id derives the sender identity and takes no features");
            return;
        }
    } else {
        if (!jr.contains("features") || !jr.at("features").is_array() ||
            jr.at("features").empty()) {
            out.add(DiagnosticClass::Schema, "missing-field",
                    "rule " + std::to_string(rule_index) +
                        ": 'features' must be a non-empty list of observation dims");
            return;
        }
        for (const json& f : jr.at("features")) {
            int dim = -1;
            if (f.is_number_integer()) {
                dim = f.get<int>();
            } else if (f.is_string()) {
                const std::string name = f.get<std::string>();
                dim = ctx.obs_schema ? ctx.obs_schema->index_of(name) : -1;
                if (dim < 0) {
                    out.add(DiagnosticClass::Semantic, "unknown-feature",
                            "rule " + std::to_string(rule_index) + ": unknown feature name '" +
                                name + "'");
                    return;
                }
            } else {
                out.add(DiagnosticClass::Schema, "bad-type",
                        "rule " + std::to_string(rule_index) +
                            ": features must be dim indices or dim names");
                return;
            }
            if (dim < 0 || dim >= ctx.obs_width) {
                out.add(DiagnosticClass::Semantic, "feature-out-of-range",
                        "rule " + std::to_string(rule_index) + ": feature index " +
                            std::to_string(dim) + " is outside the " +
                            std::to_string(ctx.obs_width) + "-dim observation");
                return;
            }
            rule.features.push_back(dim);
        }
    }

    // sender must not receive its own message, in any expansion
    if (!rule.receivers_all_others) {
        for (const int s : rule.senders) {
            if (std::find(rule.receivers.begin(), rule.receivers.end(), s) !=
                rule.receivers.end()) {
                out.add(DiagnosticClass::Semantic, "self-message",
                        "rule " + std::to_string(rule_index) + ": sender " + std::to_string(s) +
                            " appears in its own receiver set; a message must not be included "
                            "in the sender's own observation");
                return;
            }
        }
    }

    rules.push_back(std::move(rule));
}

}  // namespace

ParseResult parse_protocol(const std::string& text, const ProtocolContext& ctx) {
    ParseResult result;
    Collector out;

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        out.add(DiagnosticClass::Syntax, "json-parse",
                std::string("protocol is not valid JSON: ") + e.what());
        result.diagnostics = std::move(out.diags);
        return result;
    }

    if (!doc.is_object()) {
        out.add(DiagnosticClass::Schema, "bad-type", "protocol document must be a JSON object");
        result.diagnostics = std::move(out.diags);
        return result;
    }
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (std::find_if(std::begin(kKnownTopFields), std::end(kKnownTopFields),
                         [&](const char* f) { return key == f; }) == std::end(kKnownTopFields))
            out.add(DiagnosticClass::Schema, "unknown-field",
                    "unknown top-level field '" + key + "'");
    }
    if (!doc.contains("rules") || !doc.at("rules").is_array()) {
        out.add(DiagnosticClass::Schema, "missing-field", "'rules' must be a JSON array");
        result.diagnostics = std::move(out.diags);
        return result;
    }
    if (!doc.contains("message_width") || !doc.at("message_width").is_number_integer()) {
        out.add(DiagnosticClass::Schema, "missing-field",
                "'message_width' (declared per-receiver width) is required");
        result.diagnostics = std::move(out.diags);
        return result;
    }

    ProtocolSpec spec;
    spec.message_width = doc.at("message_width").get<int>();
    if (doc.contains("rationale")) {
        if (!doc.at("rationale").is_string()) {
            out.add(DiagnosticClass::Schema, "bad-type", "'rationale' must be a string");
        } else {
            spec.rationale = doc.at("rationale").get<std::string>();
        }
    }

    int rule_index = 0;
    for (const json& jr : doc.at("rules")) {
        parse_rule(jr, rule_index, ctx, spec.rules, out);
        ++rule_index;
    }

    if (out.ok()) {
        const int computed = computed_width(spec, ctx.n_agents);
        if (computed != spec.message_width)
            out.add(DiagnosticClass::Semantic, "width-mismatch",
                    "declared message_width " + std::to_string(spec.message_width) +
                        " but the rules produce " + std::to_string(computed) + " dims");
    }

    if (!out.ok()) {
        result.diagnostics = std::move(out.diags);
        return result;
    }
    result.spec = std::move(spec);
    return result;
}

std::string serialize_protocol(const ProtocolSpec& spec) {
    json doc;
    doc["message_width"] = spec.message_width;
    doc["rationale"] = spec.rationale;
    json rules = json::array();
    for (const MessageRule& r : spec.rules) {
        json jr;
        jr["sender"] = r.senders;
        if (r.receivers_all_others)
            jr["receivers"] = "all-others";
        else
            jr["receivers"] = r.receivers;
        if (r.transform != Transform::OneHotId) jr["features"] = r.features;
        jr["transform"] = to_string(r.transform);
        jr["window"] = r.window;
        rules.push_back(std::move(jr));
    }
    doc["rules"] = std::move(rules);
    return doc.dump(2);
}

std::optional<Diagnostic> constrain_width(const ProtocolSpec& spec, int cap, int n_agents) {
    if (cap < 0) throw ContractError("constrain_width: cap must be >= 0");
    const int width = computed_width(spec, n_agents);
    if (width <= cap) return std::nullopt;
    return Diagnostic{DiagnosticClass::Semantic, "width-cap",
                      "protocol width " + std::to_string(width) + " exceeds the cap of " +
                          std::to_string(cap) + " by " + std::to_string(width - cap) +
                          " dims; remove or compress features and resubmit"};
}

namespace {

double history_value(const std::vector<std::vector<double>>& history, int back, int dim) {
    const int len = static_cast<int>(history.size());
    const int idx = len - 1 - back;
    if (idx < 0) return 0.0;  // episode-start zero padding
    return history[idx][dim];
}

}  // namespace

std::vector<std::vector<double>> apply_protocol(const ProtocolStack& stack,
                                                const ObservationHistories& histories) {
    const int n_agents = static_cast<int>(histories.size());
    if (n_agents == 0) throw ContractError("apply_protocol: no agents");
    std::size_t obs_width = 0;
    for (const auto& h : histories) {
        if (h.empty()) throw ContractError("apply_protocol: empty history");
        for (const auto& o : h) {
            if (obs_width == 0) obs_width = o.size();
            if (o.size() != obs_width)
                throw ContractError("apply_protocol: history width mismatch");
        }
    }

    for (const ProtocolSpec& spec : stack.steps)
        for (const MessageRule& rule : spec.rules)
            for (const int f : rule.features)
                if (f < 0 || static_cast<std::size_t>(f) >= obs_width)
                    throw ContractError("apply_protocol: rule feature " + std::to_string(f) +
                                        " outside the " + std::to_string(obs_width) +
                                        "-dim histories");

    const int total = stack.total_width(n_agents);
    std::vector<std::vector<double>> messages(n_agents, std::vector<double>(total, 0.0));

    int offset = 0;
    for (const ProtocolSpec& spec : stack.steps) {
        for (const MessageRule& rule : spec.rules) {
            const int seg = rule.width_per_sender(n_agents);
            for (const int sender : rule.senders) {
                // compute the segment once per sender
                std::vector<double> values(seg, 0.0);
                switch (rule.transform) {
                    case Transform::Identity:
                        for (int f = 0; f < seg; ++f)
                            values[f] = history_value(histories[sender], 0, rule.features[f]);
                        break;
                    case Transform::DeltaHistory:
                        for (int f = 0; f < seg; ++f)
                            values[f] =
                                history_value(histories[sender], 0, rule.features[f]) -
                                history_value(histories[sender], rule.window, rule.features[f]);
                        break;
                    case Transform::MeanOverWindow:
                        for (int f = 0; f < seg; ++f) {
                            double sum = 0.0;
                            for (int back = 0; back < rule.window; ++back)
                                sum += history_value(histories[sender], back, rule.features[f]);
                            values[f] = sum / rule.window;
                        }
                        break;
                    case Transform::OneHotId:
                        values[sender] = 1.0;
                        break;
                }
                for (int r = 0; r < n_agents; ++r) {
                    if (!rule.addresses(sender, r)) continue;
                    std::copy(values.begin(), values.end(), messages[r].begin() + offset);
                }
                offset += seg;
            }
        }
    }
    return messages;
}

}  // namespace commforge
