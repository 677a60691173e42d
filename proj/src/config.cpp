#include <cmath>
#include <set>

#include "qvel/errors.hpp"
#include "qvel/harness.hpp"

namespace qvel {

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

int integer(const json& obj, const char* key, int fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(where + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

const std::set<std::string> kAxisNames{"lambda", "mu", "theta", "n_queues", "delta", "delay", "delay_offset"};

SweepAxis parse_axis(const json& a, std::size_t index) {
    const std::string where = "sweep.axes[" + std::to_string(index) + "]";
    reject_unknown(a, {"name", "values", "from", "to", "count"}, where);
    if (!a.contains("name") || !a.at("name").is_string()) throw ConfigError(where + ".name: expected a string");
    SweepAxis axis;
    axis.name = a.at("name").get<std::string>();
    if (!kAxisNames.count(axis.name)) throw ConfigError(where + ".name: unknown parameter '" + axis.name + "'");
    const bool listed = a.contains("values");
    const bool ranged = a.contains("from") || a.contains("to") || a.contains("count");
    if (listed == ranged) throw ConfigError(where + ": give either 'values' or 'from'/'to'/'count'");
    if (listed) {
        axis.values = number_list(a.at("values"), where + ".values");
    } else {
        if (!a.contains("from") || !a.contains("to") || !a.contains("count"))
            throw ConfigError(where + ": 'from', 'to' and 'count' are all required");
        const double from = number(a, "from", 0, where), to = number(a, "to", 0, where);
        const int count = integer(a, "count", 0, where);
        if (count < 0) throw ConfigError(where + ".count: must be nonnegative");
        for (int i = 0; i < count; ++i) axis.values.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
    }
    for (double v : axis.values)
        if (!std::isfinite(v)) throw ConfigError(where + ": non-finite value");
    return axis;
}

}  // namespace

RunConfig parse_config(const json& doc) {
    reject_unknown(doc, {"params", "simulate", "analyze", "sweep"}, "config");
    RunConfig cfg;

    if (doc.contains("params")) {
        const auto& p = doc.at("params");
        reject_unknown(p, {"lambda", "mu", "theta", "n_queues", "delta", "delay"}, "params");
        cfg.params.lambda = number(p, "lambda", cfg.params.lambda, "params");
        cfg.params.mu = number(p, "mu", cfg.params.mu, "params");
        cfg.params.theta = number(p, "theta", cfg.params.theta, "params");
        cfg.params.n_queues = integer(p, "n_queues", cfg.params.n_queues, "params");
        cfg.params.delta = number(p, "delta", cfg.params.delta, "params");
        cfg.params.delay = number(p, "delay", cfg.params.delay, "params");
    }
    try {
        cfg.params.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }

    if (doc.contains("simulate")) {
        const auto& s = doc.at("simulate");
        reject_unknown(s, {"horizon", "steps_per_delay", "window_fraction", "history"}, "simulate");
        auto& sim = cfg.simulate;
        sim.horizon = number(s, "horizon", sim.horizon, "simulate");
        sim.steps_per_delay = integer(s, "steps_per_delay", sim.steps_per_delay, "simulate");
        sim.window_fraction = number(s, "window_fraction", sim.window_fraction, "simulate");
        if (s.contains("history")) {
            const auto& h = s.at("history");
            reject_unknown(h, {"kind", "epsilon", "values"}, "simulate.history");
            if (h.contains("kind")) {
                if (!h.at("kind").is_string()) throw ConfigError("simulate.history.kind: expected a string");
                sim.history.kind = h.at("kind").get<std::string>();
            }
            sim.history.epsilon = number(h, "epsilon", sim.history.epsilon, "simulate.history");
            if (h.contains("values")) sim.history.values = number_list(h.at("values"), "simulate.history.values");
        }
        if (!(sim.horizon >= 0.0) || !std::isfinite(sim.horizon)) throw ConfigError("simulate.horizon: must be >= 0");
        if (sim.steps_per_delay < 8) throw ConfigError("simulate.steps_per_delay: must be at least 8");
        if (!(sim.window_fraction > 0.0 && sim.window_fraction <= 1.0))
            throw ConfigError("simulate.window_fraction: must lie in (0, 1]");
        const auto& kind = sim.history.kind;
        if (kind != "antisymmetric" && kind != "uniform" && kind != "constant")
            throw ConfigError("simulate.history.kind: expected antisymmetric, uniform or constant");
        if (kind == "constant" && int(sim.history.values.size()) != cfg.params.n_queues)
            throw ConfigError("simulate.history.values: need one value per queue");
        try {
            (void)history_from(sim, cfg.params);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("simulate.history: ") + e.what());
        }
    }

    if (doc.contains("analyze")) {
        const auto& a = doc.at("analyze");
        reject_unknown(a, {"branches"}, "analyze");
        cfg.analyze.branches = integer(a, "branches", cfg.analyze.branches, "analyze");
        if (cfg.analyze.branches < 1 || cfg.analyze.branches > 1000)
            throw ConfigError("analyze.branches: must lie in [1, 1000]");
    }

    if (doc.contains("sweep")) {
        const auto& s = doc.at("sweep");
        reject_unknown(s, {"axes", "simulate"}, "sweep");
        if (s.contains("axes")) {
            if (!s.at("axes").is_array()) throw ConfigError("sweep.axes: expected an array");
            std::size_t i = 0;
            for (const auto& a : s.at("axes")) cfg.sweep.axes.push_back(parse_axis(a, i++));
        }
        if (s.contains("simulate")) {
            if (!s.at("simulate").is_boolean()) throw ConfigError("sweep.simulate: expected a boolean");
            cfg.sweep.simulate = s.at("simulate").get<bool>();
        }
    }
    return cfg;
}

RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json to_json(const SystemParams& p) {
    return {{"lambda", p.lambda}, {"mu", p.mu},       {"theta", p.theta},
            {"n_queues", p.n_queues}, {"delta", p.delta}, {"delay", p.delay}};
}

json to_json(const RunConfig& cfg) {
    json history = {{"kind", cfg.simulate.history.kind}, {"epsilon", cfg.simulate.history.epsilon}};
    if (!cfg.simulate.history.values.empty()) history["values"] = cfg.simulate.history.values;
    json axes = json::array();
    for (const auto& a : cfg.sweep.axes) axes.push_back({{"name", a.name}, {"values", a.values}});
    return {{"params", to_json(cfg.params)},
            {"simulate",
             {{"horizon", cfg.simulate.horizon},
              {"steps_per_delay", cfg.simulate.steps_per_delay},
              {"window_fraction", cfg.simulate.window_fraction},
              {"history", history}}},
            {"analyze", {{"branches", cfg.analyze.branches}}},
            {"sweep", {{"axes", axes}, {"simulate", cfg.sweep.simulate}}}};
}

HistorySegment history_from(const SimulateConfig& sim, const SystemParams& params) {
    const auto& h = sim.history;
    if (h.kind == "constant") return make_history(ConstantHistory{h.values}, params);
    const auto mode = h.kind == "uniform" ? PerturbationMode::Uniform : PerturbationMode::Antisymmetric;
    return make_history(EquilibriumPerturbed{h.epsilon, mode}, params);
}

}  // namespace qvel
