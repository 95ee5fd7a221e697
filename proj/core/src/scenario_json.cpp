#include "lugre/scenario_json.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lugre {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw ConfigError("config field '" + path + "': " + why);
}

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing");
    return *it;
}

double num(const json& j, const char* key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double num_or(const json& j, const char* key, double def, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return def;
    if (!it->is_number()) fail(path + "." + key, "expected a number");
    return it->get<double>();
}

bool bool_or(const json& j, const char* key, bool def, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return def;
    if (!it->is_boolean()) fail(path + "." + key, "expected a boolean");
    return it->get<bool>();
}

std::string str(const json& j, const char* key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

ReferenceSignal parse_reference(const json& j, const std::string& path) {
    const std::string type = str(j, "type", path);
    if (type == "step") return StepSignal{num(j, "amplitude", path), num_or(j, "start_time", 0.0, path)};
    if (type == "sinusoid")
        return SinusoidSignal{num(j, "amplitude", path), num(j, "frequency_hz", path),
                              num_or(j, "phase", 0.0, path)};
    if (type == "ramp") return RampSignal{num(j, "slope", path)};
    if (type == "constant") return ConstantSignal{num(j, "value", path)};
    if (type == "decaying_exp") return DecayingExpSignal{num(j, "amplitude", path), num(j, "rate", path)};
    fail(path + ".type", "unknown signal type '" + type + "'");
}

FrictionParams parse_friction(const json& j, const std::string& path) {
    FrictionParams p;
    p.sigma0 = num(j, "sigma0", path);
    p.sigma1 = num(j, "sigma1", path);
    p.Fc = num(j, "Fc", path);
    p.Fs = num(j, "Fs", path);
    p.Fv = num(j, "Fv", path);
    p.ws = num(j, "ws", path);
    return p;
}

GainSchedule parse_observer(const json& j, const std::string& path) {
    const std::string type = str(j, "type", path);
    if (type == "natural") return NaturalGains{};
    if (type == "corrected") return CorrectedGains{num(j, "k", path)};
    if (type == "time_varying")
        return TimeVaryingGains{num(j, "A", path), num(j, "C", path), num(j, "alpha", path)};
    if (type == "bounded")
        return BoundedGains{num(j, "A", path), num(j, "C", path), num(j, "alpha", path),
                            num(j, "M", path)};
    if (type == "exponential")
        return ExponentialGains{num(j, "C", path), num(j, "alpha", path), num(j, "beta", path)};
    if (type == "manual") return ManualGains{num(j, "K1", path), num(j, "K2", path)};
    fail(path + ".type", "unknown observer type '" + type + "'");
}

json reference_to_json(const ReferenceSignal& s) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StepSignal>)
                return {{"type", "step"}, {"amplitude", v.amplitude}, {"start_time", v.start_time}};
            else if constexpr (std::is_same_v<T, SinusoidSignal>)
                return {{"type", "sinusoid"},
                        {"amplitude", v.amplitude},
                        {"frequency_hz", v.frequency_hz},
                        {"phase", v.phase}};
            else if constexpr (std::is_same_v<T, RampSignal>)
                return {{"type", "ramp"}, {"slope", v.slope}};
            else if constexpr (std::is_same_v<T, ConstantSignal>)
                return {{"type", "constant"}, {"value", v.value}};
            else
                return {{"type", "decaying_exp"}, {"amplitude", v.amplitude}, {"rate", v.rate}};
        },
        s);
}

json observer_to_json(const GainSchedule& g) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, NaturalGains>)
                return {{"type", "natural"}};
            else if constexpr (std::is_same_v<T, CorrectedGains>)
                return {{"type", "corrected"}, {"k", v.k}};
            else if constexpr (std::is_same_v<T, TimeVaryingGains>)
                return {{"type", "time_varying"}, {"A", v.A}, {"C", v.C}, {"alpha", v.alpha}};
            else if constexpr (std::is_same_v<T, BoundedGains>)
                return {{"type", "bounded"}, {"A", v.A}, {"C", v.C}, {"alpha", v.alpha}, {"M", v.M}};
            else if constexpr (std::is_same_v<T, ExponentialGains>)
                return {{"type", "exponential"}, {"C", v.C}, {"alpha", v.alpha}, {"beta", v.beta}};
            else
                return {{"type", "manual"}, {"K1", v.K1}, {"K2", v.K2}};
        },
        g);
}

json friction_to_json(const FrictionParams& p) {
    return {{"sigma0", p.sigma0}, {"sigma1", p.sigma1}, {"Fc", p.Fc},
            {"Fs", p.Fs},         {"Fv", p.Fv},         {"ws", p.ws}};
}

ScenarioConfig parse(const json& j) {
    ScenarioConfig cfg;
    if (j.contains("name") && j["name"].is_string()) cfg.name = j["name"].get<std::string>();

    const std::string kind = str(j, "loop_kind", "");
    if (kind == "velocity") cfg.loop_kind = LoopKind::velocity;
    else if (kind == "position") cfg.loop_kind = LoopKind::position;
    else if (kind == "open_loop_observer") cfg.loop_kind = LoopKind::open_loop_observer;
    else fail("loop_kind", "must be velocity, position or open_loop_observer");

    cfg.reference = parse_reference(require(j, "reference", ""), "reference");
    cfg.plant.J = num(require(j, "plant", ""), "J", "plant");
    cfg.friction = parse_friction(require(j, "friction", ""), "friction");

    if (j.contains("observer") && !j["observer"].is_null())
        cfg.observer = parse_observer(j["observer"], "observer");
    if (j.contains("observer_friction") && !j["observer_friction"].is_null())
        cfg.observer_friction = parse_friction(j["observer_friction"], "observer_friction");

    if (j.contains("controller") && !j["controller"].is_null()) {
        const json& c = j["controller"];
        cfg.controller.Kp = num_or(c, "Kp", 0.0, "controller");
        cfg.controller.Ki = num_or(c, "Ki", 0.0, "controller");
        cfg.controller.Kd = num_or(c, "Kd", 0.0, "controller");
        cfg.controller.tau = num_or(c, "tau", 0.0, "controller");
    }
    if (j.contains("prefilter") && !j["prefilter"].is_null()) {
        const json& f = j["prefilter"];
        cfg.prefilter.enabled = bool_or(f, "enabled", false, "prefilter");
        cfg.prefilter.pole = num_or(f, "pole", 0.0, "prefilter");
    }
    cfg.feedforward = bool_or(j, "feedforward", false, "");
    if (j.contains("compensation") && !j["compensation"].is_null()) {
        const json& c = j["compensation"];
        if (!c.is_string()) fail("compensation", "expected \"off\", \"observer\" or \"true_friction\"");
        const std::string s = c.get<std::string>();
        if (s == "off") cfg.compensation = Compensation::off;
        else if (s == "observer") cfg.compensation = Compensation::observer;
        else if (s == "true_friction") cfg.compensation = Compensation::true_friction;
        else fail("compensation", "expected \"off\", \"observer\" or \"true_friction\"");
    }
    cfg.friction_enabled = bool_or(j, "friction_enabled", true, "");
    cfg.dt = num(j, "dt", "");
    cfg.duration = num(j, "duration", "");

    if (j.contains("initial") && !j["initial"].is_null()) {
        const json& i = j["initial"];
        cfg.initial.theta = num_or(i, "theta", 0.0, "initial");
        cfg.initial.w = num_or(i, "w", 0.0, "initial");
        cfg.initial.z = num_or(i, "z", 0.0, "initial");
        cfg.initial.z_hat = num_or(i, "z_hat", 0.0, "initial");
        cfg.initial.w_hat = num_or(i, "w_hat", 0.0, "initial");
        cfg.initial.integrator = num_or(i, "integrator", 0.0, "initial");
        cfg.initial.filter_state = num_or(i, "filter_state", 0.0, "initial");
        cfg.initial.prefilter_state = num_or(i, "prefilter_state", 0.0, "initial");
    }
    return cfg;
}

}  // namespace

ScenarioConfig parse_scenario_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ScenarioConfig cfg = parse(j);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_scenario_json(buf.str());
}

std::string scenario_to_json_string(const ScenarioConfig& cfg, int indent) {
    json j;
    if (!cfg.name.empty()) j["name"] = cfg.name;
    switch (cfg.loop_kind) {
        case LoopKind::velocity: j["loop_kind"] = "velocity"; break;
        case LoopKind::position: j["loop_kind"] = "position"; break;
        case LoopKind::open_loop_observer: j["loop_kind"] = "open_loop_observer"; break;
    }
    j["reference"] = reference_to_json(cfg.reference);
    j["plant"] = {{"J", cfg.plant.J}};
    j["friction"] = friction_to_json(cfg.friction);
    j["observer"] = cfg.observer ? observer_to_json(*cfg.observer) : json(nullptr);
    if (cfg.observer_friction) j["observer_friction"] = friction_to_json(*cfg.observer_friction);
    j["controller"] = {{"Kp", cfg.controller.Kp},
                       {"Ki", cfg.controller.Ki},
                       {"Kd", cfg.controller.Kd},
                       {"tau", cfg.controller.tau}};
    j["prefilter"] = {{"enabled", cfg.prefilter.enabled}, {"pole", cfg.prefilter.pole}};
    j["feedforward"] = cfg.feedforward;
    switch (cfg.compensation) {
        case Compensation::off: j["compensation"] = "off"; break;
        case Compensation::observer: j["compensation"] = "observer"; break;
        case Compensation::true_friction: j["compensation"] = "true_friction"; break;
    }
    j["friction_enabled"] = cfg.friction_enabled;
    j["dt"] = cfg.dt;
    j["duration"] = cfg.duration;
    j["initial"] = {{"theta", cfg.initial.theta},
                    {"w", cfg.initial.w},
                    {"z", cfg.initial.z},
                    {"z_hat", cfg.initial.z_hat},
                    {"w_hat", cfg.initial.w_hat},
                    {"integrator", cfg.initial.integrator},
                    {"filter_state", cfg.initial.filter_state},
                    {"prefilter_state", cfg.initial.prefilter_state}};
    return j.dump(indent);
}

std::string set_json_number_field(std::string_view text, std::string_view dotted_path,
                                  double value) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    json* node = &j;
    std::string path(dotted_path);
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ConfigError("empty segment in parameter path '" + path + "'");
        if (!node->is_object() || !node->contains(key))
            throw ConfigError("parameter path '" + path + "' not found in config");
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (!node->is_number())
        throw ConfigError("parameter path '" + path + "' does not address a numeric field");
    *node = value;
    return j.dump(2);
}

}  // namespace lugre
