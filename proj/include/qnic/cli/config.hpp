#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnic/core/errors.hpp"
#include "qnic/core/format.hpp"
#include "qnic/core/types.hpp"

namespace qnic::cli {

inline const std::vector<std::string>& protocol_ids() {
    static const std::vector<std::string> ids{"qds-b", "qds-f", "qss-b", "qkd-f"};
    return ids;
}

/// Channel point of one experimental run: fibre loss, mean amplitude, excess noise.
struct Preset {
    std::string name;
    double loss_db;
    double alpha;
    double xi;
};

inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> p{
        {"run1", 0.65, 0.64, 0.027},
        {"run2", 4.75, 0.67, 0.019},
        {"run3", 4.75, 0.55, 0.021},
        {"run4", 4.75, 0.64, 0.017},
    };
    return p;
}

inline const Preset& find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    throw ConfigError("unknown preset '" + name + "' (expected run1..run4)");
}

/// Fully resolved run configuration.
struct RunConfig {
    std::string protocol = "qds-b";
    std::string preset;
    std::uint64_t seed = 1;

    double loss_db = 0.0;
    double alpha = 0.64;
    double xi = 0.0;
    double epsilon = 1e-4;

    // signatures
    double eta_qds = 0.5;
    double v_el_qds = 0.0;
    std::string attack = "cloner";
    bool optimize_region = true;
    double delta_r = 0.0;
    double delta_theta = 0.0;
    double region_dr_max = 6.0;
    double region_dr_step = 0.25;
    std::string adversary = "none";
    std::uint64_t states_per_leg = 0;
    std::uint64_t max_states_per_leg = 2'000'000;
    std::uint64_t min_accepted_per_half = 100;

    // key protocols
    double eta_key = 1.0;
    double v_el_key = 0.0;
    bool optimize_gh = true;
    double g = 0.7071067811865476;
    double h = 0.7071067811865476;
    double efficiency = 1.0;
    std::uint64_t secret_bits = 256;
    std::string withheld = "none";
    std::uint64_t key_states = 0;
    std::uint64_t bits_per_quadrature = 2;
    double rate_tol = 1e-4;

    // link model
    std::string link = "hwsim";
    std::uint64_t frame_len = 64;
    std::uint64_t n_ref = 4;
    double ref_amplitude_scale = 8.0;
    double jitter = 0.0;
    double phase_drift = 0.002;
    double phase_offset = 0.0;
    double fade_mean = 0.08;
    double snr_threshold = 3.6;
    double deadband_sigmas = 5.0;

    // sweep
    double sweep_loss_min = 0.0;
    double sweep_loss_max = 6.0;
    double sweep_loss_step = 0.25;
    std::vector<std::string> sweep_protocols = protocol_ids();
    std::vector<std::string> sweep_presets{"run1", "run2", "run3", "run4"};

    double T() const { return loss_db_to_T(loss_db); }

    void apply_preset(const Preset& p) {
        preset = p.name;
        loss_db = p.loss_db;
        alpha = p.alpha;
        xi = p.xi;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("expected a boolean, got '" + v + "'");
}

inline std::vector<std::string> parse_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::string one_of(const std::string& v, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (v == a) return v;
    std::string msg = "expected one of {";
    bool first = true;
    for (const char* a : allowed) {
        msg += (first ? "" : ",") + std::string(a);
        first = false;
    }
    throw ConfigError(msg + "}, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

#define QNIC_KEY_DOUBLE(name, field) {name, [](RunConfig& c, const std::string& v) { c.field = parse_double(v); }}
#define QNIC_KEY_U64(name, field) {name, [](RunConfig& c, const std::string& v) { c.field = parse_u64(v); }}
#define QNIC_KEY_BOOL(name, field) {name, [](RunConfig& c, const std::string& v) { c.field = parse_bool(v); }}

inline const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> m{
        {"protocol", [](RunConfig& c, const std::string& v) { c.protocol = one_of(v, {"qds-b", "qds-f", "qss-b", "qkd-f"}); }},
        {"preset", [](RunConfig& c, const std::string& v) { c.apply_preset(find_preset(v)); }},
        QNIC_KEY_U64("seed", seed),
        QNIC_KEY_DOUBLE("loss_db", loss_db),
        QNIC_KEY_DOUBLE("alpha", alpha),
        QNIC_KEY_DOUBLE("xi", xi),
        QNIC_KEY_DOUBLE("epsilon", epsilon),
        QNIC_KEY_DOUBLE("qds.eta", eta_qds),
        QNIC_KEY_DOUBLE("qds.v_el", v_el_qds),
        {"qds.attack", [](RunConfig& c, const std::string& v) { c.attack = one_of(v, {"cloner", "beamsplitter"}); }},
        QNIC_KEY_BOOL("qds.optimize_region", optimize_region),
        QNIC_KEY_DOUBLE("qds.delta_r", delta_r),
        QNIC_KEY_DOUBLE("qds.delta_theta", delta_theta),
        QNIC_KEY_DOUBLE("qds.delta_r_max", region_dr_max),
        QNIC_KEY_DOUBLE("qds.delta_r_step", region_dr_step),
        {"qds.adversary", [](RunConfig& c, const std::string& v) {
             c.adversary = one_of(v, {"none", "random-guess", "beamsplitter-forger"});
         }},
        QNIC_KEY_U64("qds.states_per_leg", states_per_leg),
        QNIC_KEY_U64("qds.max_states_per_leg", max_states_per_leg),
        QNIC_KEY_U64("qds.min_accepted_per_half", min_accepted_per_half),
        QNIC_KEY_DOUBLE("key.eta", eta_key),
        QNIC_KEY_DOUBLE("key.v_el", v_el_key),
        QNIC_KEY_BOOL("key.optimize_gh", optimize_gh),
        QNIC_KEY_DOUBLE("key.g", g),
        QNIC_KEY_DOUBLE("key.h", h),
        QNIC_KEY_DOUBLE("key.efficiency", efficiency),
        QNIC_KEY_U64("key.secret_bits", secret_bits),
        {"key.withheld", [](RunConfig& c, const std::string& v) { c.withheld = one_of(v, {"none", "bob", "charlie"}); }},
        QNIC_KEY_U64("key.states", key_states),
        QNIC_KEY_U64("key.bits_per_quadrature", bits_per_quadrature),
        QNIC_KEY_DOUBLE("key.rate_tol", rate_tol),
        {"link", [](RunConfig& c, const std::string& v) { c.link = one_of(v, {"hwsim", "ideal"}); }},
        QNIC_KEY_U64("hw.frame_len", frame_len),
        QNIC_KEY_U64("hw.n_ref", n_ref),
        QNIC_KEY_DOUBLE("hw.ref_amplitude_scale", ref_amplitude_scale),
        QNIC_KEY_DOUBLE("hw.jitter", jitter),
        QNIC_KEY_DOUBLE("hw.phase_drift", phase_drift),
        QNIC_KEY_DOUBLE("hw.phase_offset", phase_offset),
        QNIC_KEY_DOUBLE("hw.fade_mean", fade_mean),
        QNIC_KEY_DOUBLE("hw.snr_threshold", snr_threshold),
        QNIC_KEY_DOUBLE("hw.deadband_sigmas", deadband_sigmas),
        QNIC_KEY_DOUBLE("sweep.loss_min", sweep_loss_min),
        QNIC_KEY_DOUBLE("sweep.loss_max", sweep_loss_max),
        QNIC_KEY_DOUBLE("sweep.loss_step", sweep_loss_step),
        {"sweep.protocols", [](RunConfig& c, const std::string& v) {
             c.sweep_protocols = parse_list(v);
             for (const auto& p : c.sweep_protocols) one_of(p, {"qds-b", "qds-f", "qss-b", "qkd-f"});
         }},
        {"sweep.presets", [](RunConfig& c, const std::string& v) {
             c.sweep_presets = parse_list(v);
             for (const auto& p : c.sweep_presets) find_preset(p);
         }},
    };
    return m;
}

#undef QNIC_KEY_DOUBLE
#undef QNIC_KEY_U64
#undef QNIC_KEY_BOOL

} // namespace detail

inline std::vector<std::string> known_keys() {
    std::vector<std::string> k;
    for (const auto& [name, s] : detail::setters()) k.push_back(name);
    return k;
}

/// Sets one key; errors carry the key name.
inline void set_key(RunConfig& c, const std::string& key, const std::string& value) {
    const auto& m = detail::setters();
    const auto it = m.find(key);
    if (it == m.end()) throw ConfigError("unknown key '" + key + "'");
    try {
        it->second(c, value);
    } catch (const ConfigError& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

struct KeyValue {
    std::string key, value;
    int line = 0;
};

/// Reads `key = value` lines; '#' starts a comment. Errors name the source and line.
inline std::vector<KeyValue> read_key_values(std::istream& is, const std::string& source) {
    std::vector<KeyValue> out;
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value'");
        KeyValue kv{detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)), line};
        if (kv.key.empty()) throw ConfigError(source + ":" + std::to_string(line) + ": empty key");
        if (!detail::setters().count(kv.key))
            throw ConfigError(source + ":" + std::to_string(line) + ": unknown key '" + kv.key + "'");
        out.push_back(std::move(kv));
    }
    return out;
}

/// Applies key/values in order, except that a preset line is applied first so explicit keys override it.
inline void apply_key_values(RunConfig& c, const std::vector<KeyValue>& kvs, const std::string& source) {
    auto apply = [&](const KeyValue& kv) {
        try {
            set_key(c, kv.key, kv.value);
        } catch (const ConfigError& e) {
            throw ConfigError(source + ":" + std::to_string(kv.line) + ": " + e.what());
        }
    };
    for (const auto& kv : kvs)
        if (kv.key == "preset") apply(kv);
    for (const auto& kv : kvs)
        if (kv.key != "preset") apply(kv);
}

inline RunConfig parse_config(std::istream& is, const std::string& source = "<config>") {
    RunConfig c;
    apply_key_values(c, read_key_values(is, source), source);
    return c;
}

inline void validate(const RunConfig& c) {
    auto fail = [](const std::string& key, const std::string& why) { throw ConfigError("key '" + key + "': " + why); };
    if (!(c.loss_db >= 0.0) || !std::isfinite(c.loss_db)) fail("loss_db", "must be finite and >= 0");
    if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) fail("alpha", "must be > 0");
    if (!(c.xi >= 0.0) || !std::isfinite(c.xi)) fail("xi", "must be finite and >= 0");
    if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) fail("epsilon", "must lie in (0,1)");
    if (!(c.eta_qds > 0.0 && c.eta_qds <= 1.0)) fail("qds.eta", "must lie in (0,1]");
    if (!(c.eta_key > 0.0 && c.eta_key <= 1.0)) fail("key.eta", "must lie in (0,1]");
    if (!(c.v_el_qds >= 0.0)) fail("qds.v_el", "must be >= 0");
    if (!(c.v_el_key >= 0.0)) fail("key.v_el", "must be >= 0");
    if (!(c.delta_r >= 0.0)) fail("qds.delta_r", "must be >= 0");
    if (!(c.delta_theta >= 0.0 && c.delta_theta < 0.7853981633974483)) fail("qds.delta_theta", "must lie in [0, pi/4)");
    if (!(c.region_dr_max >= 0.0)) fail("qds.delta_r_max", "must be >= 0");
    if (!(c.region_dr_step > 0.0)) fail("qds.delta_r_step", "must be > 0");
    if (c.states_per_leg % 2 != 0) fail("qds.states_per_leg", "must be even");
    if (c.max_states_per_leg < 2) fail("qds.max_states_per_leg", "must be >= 2");
    if (!(c.efficiency > 0.0 && c.efficiency <= 1.0)) fail("key.efficiency", "must lie in (0,1]");
    if (!(std::isfinite(c.g) && std::isfinite(c.h) && (c.g != 0.0 || c.h != 0.0))) fail("key.g", "g and h must be finite and not both zero");
    if (c.secret_bits == 0) fail("key.secret_bits", "must be > 0");
    if (c.bits_per_quadrature == 0 || c.bits_per_quadrature > 8) fail("key.bits_per_quadrature", "must lie in [1,8]");
    if (!(c.rate_tol > 0.0)) fail("key.rate_tol", "must be > 0");
    if (c.frame_len > 65536) fail("hw.frame_len", "must be <= 65536");
    if (c.frame_len == 0 || c.n_ref == 0 || c.n_ref >= c.frame_len) fail("hw.n_ref", "need 0 < n_ref < frame_len");
    if (!(c.ref_amplitude_scale > 0.0)) fail("hw.ref_amplitude_scale", "must be > 0");
    if (!(c.jitter >= 0.0)) fail("hw.jitter", "must be >= 0");
    if (!(c.phase_drift >= 0.0)) fail("hw.phase_drift", "must be >= 0");
    if (!(c.fade_mean >= 0.0)) fail("hw.fade_mean", "must be >= 0");
    if (!(c.snr_threshold >= 0.0)) fail("hw.snr_threshold", "must be >= 0");
    if (!(c.deadband_sigmas >= 0.0)) fail("hw.deadband_sigmas", "must be >= 0");
}

/// Loss grid of a sweep; empty or malformed grids are validation errors.
inline std::vector<double> sweep_grid(const RunConfig& c) {
    if (!(c.sweep_loss_step > 0.0) || !std::isfinite(c.sweep_loss_step))
        throw ConfigError("key 'sweep.loss_step': must be > 0");
    if (!(c.sweep_loss_min >= 0.0) || !(c.sweep_loss_max >= c.sweep_loss_min) || !std::isfinite(c.sweep_loss_max))
        throw ConfigError("key 'sweep.loss_max': empty sweep grid (need 0 <= loss_min <= loss_max)");
    if (c.sweep_protocols.empty()) throw ConfigError("key 'sweep.protocols': empty sweep grid");
    if (c.sweep_presets.empty()) throw ConfigError("key 'sweep.presets': empty sweep grid");
    std::vector<double> g;
    const double span = c.sweep_loss_max - c.sweep_loss_min;
    const auto n = static_cast<std::size_t>(std::floor(span / c.sweep_loss_step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) g.push_back(c.sweep_loss_min + static_cast<double>(i) * c.sweep_loss_step);
    return g;
}

inline nlohmann::json to_json(const RunConfig& c) {
    using nlohmann::json;
    return json{
        {"protocol", c.protocol},
        {"preset", c.preset},
        {"seed", c.seed},
        {"loss_db", c.loss_db},
        {"alpha", c.alpha},
        {"xi", c.xi},
        {"epsilon", c.epsilon},
        {"qds", {{"eta", c.eta_qds}, {"v_el", c.v_el_qds}, {"attack", c.attack}, {"optimize_region", c.optimize_region},
                 {"delta_r", c.delta_r}, {"delta_theta", c.delta_theta}, {"delta_r_max", c.region_dr_max},
                 {"delta_r_step", c.region_dr_step}, {"adversary", c.adversary}, {"states_per_leg", c.states_per_leg},
                 {"max_states_per_leg", c.max_states_per_leg}, {"min_accepted_per_half", c.min_accepted_per_half}}},
        {"key", {{"eta", c.eta_key}, {"v_el", c.v_el_key}, {"optimize_gh", c.optimize_gh}, {"g", c.g}, {"h", c.h},
                 {"efficiency", c.efficiency}, {"secret_bits", c.secret_bits}, {"withheld", c.withheld},
                 {"states", c.key_states}, {"bits_per_quadrature", c.bits_per_quadrature}, {"rate_tol", c.rate_tol}}},
        {"link", c.link},
        {"hw", {{"frame_len", c.frame_len}, {"n_ref", c.n_ref}, {"ref_amplitude_scale", c.ref_amplitude_scale},
                {"jitter", c.jitter}, {"phase_drift", c.phase_drift}, {"phase_offset", c.phase_offset},
                {"fade_mean", c.fade_mean}, {"snr_threshold", c.snr_threshold}, {"deadband_sigmas", c.deadband_sigmas}}},
        {"sweep", {{"loss_min", c.sweep_loss_min}, {"loss_max", c.sweep_loss_max}, {"loss_step", c.sweep_loss_step},
                   {"protocols", c.sweep_protocols}, {"presets", c.sweep_presets}}},
    };
}

/// Hash of everything that can change results (output directory and job count are not part of it).
inline std::string config_hash(const RunConfig& c) { return hex64(fnv1a64(to_json(c).dump())); }

} // namespace qnic::cli
