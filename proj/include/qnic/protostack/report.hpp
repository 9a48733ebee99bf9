#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qnic {

struct HalfCount {
    std::size_t mismatches = 0;
    std::size_t accepted = 0;

    double rate() const { return accepted ? static_cast<double>(mismatches) / static_cast<double>(accepted) : 0.0; }
};

struct PartyVerdict {
    std::string party;
    HalfCount own;
    HalfCount received;
    double threshold = 0.0;
    bool accept = false;
};

struct KeyOutcome {
    double kappa = 0.0;              // bits per channel use
    double two_kappa = 0.0;          // QSS: per pair of distributed states
    double mutual_information = 0.0;
    double holevo = 0.0;
    std::size_t raw_bits = 0;
    std::size_t key_bits = 0;
    std::size_t secret_bits = 0;
    bool reconstructed = false;      // honest reconstruction matched bit-for-bit
    std::optional<double> single_player_agreement;
    std::optional<std::string> withheld_party;
    double g = 0.0, h = 0.0;
};

struct ProtocolReport {
    static constexpr int kSchema = 1;

    std::string protocol;
    std::uint64_t seed = 0;
    nlohmann::json params = nlohmann::json::object();

    // signature protocols
    std::optional<double> p_err_empirical;
    std::optional<double> p_err_analytic;
    std::optional<double> p_e;
    std::optional<double> s_B, s_C;
    std::optional<double> N_empirical, N_analytic;
    std::optional<std::uint64_t> L, L_tilde;
    std::vector<PartyVerdict> verdicts;
    std::optional<PartyVerdict> forgery;

    std::optional<KeyOutcome> key;

    bool aborted = false;
    std::vector<std::string> warnings;

    bool all_accept() const {
        for (const auto& v : verdicts)
            if (!v.accept) return false;
        return true;
    }
};

inline nlohmann::json to_json(const HalfCount& h) {
    return {{"mismatches", h.mismatches}, {"accepted", h.accepted}, {"rate", h.rate()}};
}

inline nlohmann::json to_json(const PartyVerdict& v) {
    return {{"party", v.party}, {"own_half", to_json(v.own)}, {"received_half", to_json(v.received)},
            {"threshold", v.threshold}, {"accept", v.accept}};
}

inline nlohmann::json to_json(const ProtocolReport& r) {
    nlohmann::json j;
    j["schema"] = ProtocolReport::kSchema;
    j["protocol"] = r.protocol;
    j["seed"] = r.seed;
    j["params"] = r.params;
    j["aborted"] = r.aborted;
    j["warnings"] = r.warnings;
    auto opt = [&j](const char* k, const auto& v) {
        if (v) j["figures"][k] = *v;
    };
    opt("p_err_empirical", r.p_err_empirical);
    opt("p_err", r.p_err_analytic);
    opt("p_e", r.p_e);
    opt("s_B", r.s_B);
    opt("s_C", r.s_C);
    opt("N_empirical", r.N_empirical);
    opt("N", r.N_analytic);
    opt("L", r.L);
    opt("L_tilde", r.L_tilde);
    if (!r.verdicts.empty()) {
        j["verdicts"] = nlohmann::json::array();
        for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json(v));
    }
    if (r.forgery) j["forgery"] = to_json(*r.forgery);
    if (r.key) {
        const KeyOutcome& k = *r.key;
        j["figures"]["kappa"] = k.kappa;
        j["figures"]["two_kappa"] = k.two_kappa;
        j["figures"]["mutual_information"] = k.mutual_information;
        j["figures"]["holevo"] = k.holevo;
        j["key"] = {{"raw_bits", k.raw_bits},         {"key_bits", k.key_bits}, {"secret_bits", k.secret_bits},
                    {"reconstructed", k.reconstructed}, {"g", k.g},             {"h", k.h}};
        if (k.single_player_agreement) j["key"]["single_player_agreement"] = *k.single_player_agreement;
        if (k.withheld_party) j["key"]["withheld_party"] = *k.withheld_party;
    }
    return j;
}

} // namespace qnic
