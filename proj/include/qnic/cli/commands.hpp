#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qnic/cli/config.hpp"
#include "qnic/hwsim/records_io.hpp"
#include "qnic/protostack/apps.hpp"

namespace qnic::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitInsecure = 2;
inline constexpr int kExitFailure = 3;

inline constexpr const char* kCsvVersion = "qnic-csv v1";
inline constexpr const char* kAnalysisColumns = "loss_dB,alpha,xi,L,L_tilde,kappa,p_e,p_err,N,delta_r_opt";

inline SessionConfig make_session(const RunConfig& c) {
    SessionConfig s;
    s.a = c.alpha;
    s.T = c.T();
    s.xi = c.xi;
    s.epsilon = c.epsilon;
    s.qds_det = {c.eta_qds, c.v_el_qds};
    s.qds_b_attack = c.attack == "cloner" ? AttackModel::EntanglingCloner : AttackModel::Beamsplitter;
    s.optimize_region = c.optimize_region;
    s.region = {c.delta_r, c.delta_theta};
    s.region_grid.dr_max = c.region_dr_max;
    s.region_grid.dr_step = c.region_dr_step;
    s.adversary = c.adversary == "random-guess"          ? QdsAdversary::RandomGuessForger
                  : c.adversary == "beamsplitter-forger" ? QdsAdversary::BeamsplitterForger
                                                         : QdsAdversary::None;
    s.states_per_leg = c.states_per_leg;
    s.max_states_per_leg = c.max_states_per_leg;
    s.min_accepted_per_half = c.min_accepted_per_half;
    s.key_det = {c.eta_key, c.v_el_key};
    s.optimize_gh = c.optimize_gh;
    s.g = c.g;
    s.h = c.h;
    s.efficiency = c.efficiency;
    s.secret_bits = c.secret_bits;
    s.withheld = c.withheld == "bob" ? WithheldParty::Bob : c.withheld == "charlie" ? WithheldParty::Charlie : WithheldParty::None;
    s.key_states = c.key_states;
    s.bits_per_quadrature = static_cast<int>(c.bits_per_quadrature);
    s.rate_grid.tol = c.rate_tol;
    return s;
}

inline FrameConfig frame_config(const RunConfig& c) {
    FrameConfig f;
    f.frame_len = static_cast<int>(c.frame_len);
    f.n_ref = static_cast<int>(c.n_ref);
    f.ref_amplitude_scale = c.ref_amplitude_scale;
    return f;
}

inline RxImpairments impairments(const RunConfig& c) { return {c.phase_drift, c.phase_offset, c.fade_mean}; }

inline RecoveryConfig recovery_config(const RunConfig& c) {
    RecoveryConfig r;
    r.snr_threshold = c.snr_threshold;
    r.deadband_sigmas = c.deadband_sigmas;
    return r;
}

/// One row of the analysis CSV. Unset figures print as empty cells.
struct AnalysisRow {
    double loss_db = 0.0, alpha = 0.0, xi = 0.0;
    std::optional<std::uint64_t> L, L_tilde;
    std::optional<double> kappa, p_e, p_err, N, delta_r_opt;
    bool clamped = false;
    nlohmann::json detail;
};

inline std::string csv_row(const AnalysisRow& r) {
    auto d = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    auto u = [](const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); };
    return format_double(r.loss_db) + "," + format_double(r.alpha) + "," + format_double(r.xi) + "," + u(r.L) + "," +
           u(r.L_tilde) + "," + d(r.kappa) + "," + d(r.p_e) + "," + d(r.p_err) + "," + d(r.N) + "," + d(r.delta_r_opt);
}

inline std::string csv_preamble(const std::string& hash, std::uint64_t seed) {
    return std::string("# ") + kCsvVersion + " config_hash=" + hash + " seed=" + std::to_string(seed) + "\n" +
           kAnalysisColumns + "\n";
}

inline nlohmann::json rate_json(const RateBreakdown& b) {
    return {{"mutual_information", b.mutual_information}, {"holevo", b.holevo}, {"kappa", b.kappa},
            {"clamped", b.clamped}, {"grid_error", b.grid_error}, {"grid_points", b.grid_points}};
}

/// Figures of merit for one protocol at one channel point. For qss-b the kappa column is 2*kappa_final.
inline AnalysisRow analyze_point(const RunConfig& c) {
    const SessionConfig s = make_session(c);
    AnalysisRow row;
    row.loss_db = c.loss_db;
    row.alpha = c.alpha;
    row.xi = c.xi;
    if (c.protocol == "qds-b" || c.protocol == "qds-f") {
        const QdsDirection dir = c.protocol == "qds-b" ? QdsDirection::Backward : QdsDirection::Forward;
        const RegionPoint pt = qds_budget(s, dir);
        const SecurityBudget& b = *pt.budget;
        row.L = b.L;
        row.L_tilde = b.L_tilde;
        row.p_e = pt.pe.p_e;
        row.p_err = pt.perr.p_err;
        row.N = pt.perr.N;
        row.delta_r_opt = pt.region.delta_r;
        const AbortBounds ab = abort_bounds(b.s_B, b.s_C, b.p_err, b.p_e, static_cast<double>(b.L));
        row.detail = {{"chi", pt.pe.chi},
                      {"p_e", b.p_e},
                      {"p_err", b.p_err},
                      {"N", pt.perr.N},
                      {"s_B", b.s_B},
                      {"s_C", b.s_C},
                      {"gap", b.g_sec},
                      {"L", b.L},
                      {"L_tilde", b.L_tilde},
                      {"L_tilde_real", b.L_tilde_real},
                      {"region", {{"delta_r", pt.region.delta_r}, {"delta_theta", pt.region.delta_theta}}},
                      {"attack", to_string(qds_params(s, dir).attack)},
                      {"abort_bounds", {{"eps_rep", ab.eps_rep}, {"eps_reject", ab.eps_reject}, {"eps_forg", ab.eps_forg}}}};
    } else if (c.protocol == "qss-b") {
        const QssParams P = QssParams::symmetric(c.alpha, c.T(), c.xi, s.key_det);
        QssRate r;
        if (c.optimize_gh) {
            GhGrid gg;
            gg.rate = s.rate_grid;
            r = optimize_gh(P, gg);
        } else {
            r = qss_rate(P, c.g, c.h, AttackModel::Beamsplitter, s.rate_grid);
        }
        row.kappa = r.two_kappa;
        row.clamped = !(r.kappa_final > 0.0);
        row.detail = {{"two_kappa", r.two_kappa}, {"kappa_final", r.kappa_final}, {"g", r.g}, {"h", r.h},
                      {"eve", rate_json(r.eve)}, {"dishonest_b", rate_json(r.dishonest_b)},
                      {"dishonest_c", rate_json(r.dishonest_c)}};
    } else if (c.protocol == "qkd-f") {
        const LinkParams P{c.alpha, c.T(), c.xi, s.key_det, HeterodyneConvention::Husimi};
        const RateBreakdown r = qkd_f_rate(P, AttackModel::Beamsplitter, s.rate_grid);
        row.kappa = r.kappa;
        row.clamped = r.clamped;
        row.detail = rate_json(r);
    } else {
        throw ConfigError("unknown protocol '" + c.protocol + "'");
    }
    return row;
}

inline std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const InsecureChannel*>(&e)) return "InsecureChannel";
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const TruncationError*>(&e)) return "TruncationError";
    if (dynamic_cast<const QuadratureFailure*>(&e)) return "QuadratureFailure";
    if (dynamic_cast<const InsufficientData*>(&e)) return "InsufficientData";
    if (dynamic_cast<const DegenerateFrame*>(&e)) return "DegenerateFrame";
    if (dynamic_cast<const UnsupportedTask*>(&e)) return "UnsupportedTask";
    if (dynamic_cast<const UnsupportedAttack*>(&e)) return "UnsupportedAttack";
    if (dynamic_cast<const RateNonPositive*>(&e)) return "RateNonPositive";
    if (dynamic_cast<const InsufficientAccepted*>(&e)) return "InsufficientAccepted";
    return "Error";
}

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InsecureChannel*>(&e) || dynamic_cast<const RateNonPositive*>(&e)) return kExitInsecure;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const UnsupportedTask*>(&e) || dynamic_cast<const UnsupportedAttack*>(&e))
        return kExitInvalid;
    return kExitFailure;
}

inline nlohmann::json output_header(const RunConfig& c, const std::string& command) {
    return {{"schema", 1}, {"command", command}, {"config_hash", config_hash(c)}, {"seed", c.seed}, {"config", to_json(c)}};
}

inline void write_text(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error("cannot write " + p.string());
    os << text;
}

inline std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

/// Writes analyze_<protocol>.json and .csv. Returns the exit code.
inline int cmd_analyze(const RunConfig& c, const fs::path& out, std::ostream& log) {
    validate(c);
    fs::create_directories(out);
    nlohmann::json j = output_header(c, "analyze");
    const std::string stem = "analyze_" + c.protocol;
    try {
        const AnalysisRow row = analyze_point(c);
        j["status"] = row.clamped ? "insecure" : "ok";
        j["result"] = row.detail;
        write_text(out / (stem + ".json"), json_text(j));
        write_text(out / (stem + ".csv"), csv_preamble(config_hash(c), c.seed) + csv_row(row) + "\n");
        if (row.clamped) {
            log << c.protocol << ": key rate clamped to zero\n";
            return kExitInsecure;
        }
        return kExitOk;
    } catch (const InsecureChannel& e) {
        j["status"] = "insecure";
        j["error"] = {{"kind", error_kind(e)}, {"message", e.what()}};
        write_text(out / (stem + ".json"), json_text(j));
        log << c.protocol << ": " << e.what() << "\n";
        return kExitInsecure;
    }
}

/// Runs the protocol end to end through the selected link model and persists the report and the
/// per-leg Tx/Rx records. Artifacts depend only on the configuration and seed.
inline int cmd_simulate(const RunConfig& c, const fs::path& out, std::ostream& log) {
    validate(c);
    fs::create_directories(out);
    SessionConfig s = make_session(c);
    std::map<std::string, std::shared_ptr<HwsimLink>> legs;
    if (c.link == "hwsim") {
        const FrameConfig fc = frame_config(c);
        const RxImpairments imp = impairments(c);
        const RecoveryConfig rc = recovery_config(c);
        const double jitter = c.jitter;
        s.link_factory = [&legs, fc, imp, rc, jitter](const std::string& leg, const Alphabet& a, const NoiseModel& nm,
                                                      const DetectorParams& det) -> std::unique_ptr<QuantumLink> {
            auto link = std::make_shared<HwsimLink>(a, nm, det, fc, imp, rc, jitter);
            legs[leg] = link;
            return std::make_unique<SharedLink>(link);
        };
    }
    const ProtocolRegistry reg = default_registry();
    const auto app = reg.dispatch(request_for(c.protocol, c.epsilon), HardwareCapabilities{});
    SeededRandomSource rng(c.seed);
    nlohmann::json j = output_header(c, "simulate");
    try {
        const ProtocolReport rep = app->run(s, rng);
        j["status"] = "ok";
        j["report"] = to_json(rep);
        log << c.protocol << ": " << (rep.aborted ? "aborted" : rep.all_accept() ? "accepted" : "rejected") << "\n";
    } catch (const InsecureChannel& e) {
        j["status"] = "insecure";
        j["error"] = {{"kind", error_kind(e)}, {"message", e.what()}};
        write_text(out / ("simulate_" + c.protocol + ".json"), json_text(j));
        log << c.protocol << ": " << e.what() << "\n";
        return kExitInsecure;
    }
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [leg, link] : legs) {
        const std::string name = "records_" + c.protocol + "_" + leg + ".csv";
        std::ostringstream os;
        write_records(os, link->last_tx(), link->last_rx(),
                      {{"config_hash", config_hash(c)}, {"seed", c.seed}, {"protocol", c.protocol}, {"leg", leg}});
        write_text(out / name, os.str());
        files.push_back(name);
    }
    j["records"] = files;
    write_text(out / ("simulate_" + c.protocol + ".json"), json_text(j));
    return kExitOk;
}

struct SweepFailure {
    std::string protocol, preset;
    double loss_db;
    std::string kind, message;
};

/// Loss sweep over every requested protocol and preset. Points run on a worker pool; results are
/// written in grid order so the files do not depend on scheduling. Failed points are recorded and skipped.
inline int cmd_sweep(const RunConfig& c, const fs::path& out, unsigned jobs, std::ostream& log) {
    validate(c);
    const std::vector<double> grid = sweep_grid(c);
    fs::create_directories(out);

    struct Task {
        RunConfig cfg;
        std::optional<AnalysisRow> row;
        std::optional<SweepFailure> failure;
    };
    std::vector<Task> tasks;
    for (const auto& proto : c.sweep_protocols)
        for (const auto& pre : c.sweep_presets)
            for (double loss : grid) {
                RunConfig t = c;
                t.apply_preset(find_preset(pre));
                t.loss_db = loss;
                t.protocol = proto;
                tasks.push_back({t, std::nullopt, std::nullopt});
            }

    std::atomic<std::size_t> next{0};
    std::mutex log_mu;
    std::size_t done = 0;
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            Task& t = tasks[i];
            try {
                t.row = analyze_point(t.cfg);
            } catch (const std::exception& e) {
                t.failure = SweepFailure{t.cfg.protocol, t.cfg.preset, t.cfg.loss_db, error_kind(e), e.what()};
            }
            std::lock_guard<std::mutex> lk(log_mu);
            ++done;
            log << "[" << done << "/" << tasks.size() << "] " << t.cfg.protocol << " " << t.cfg.preset << " "
                << format_double(t.cfg.loss_db) << " dB " << (t.row ? "ok" : "failed: " + t.failure->kind) << "\n";
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n_threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    const std::string hash = config_hash(c);
    nlohmann::json manifest = output_header(c, "sweep");
    manifest["grid"] = grid;
    manifest["files"] = nlohmann::json::array();
    manifest["failures"] = nlohmann::json::array();
    for (const auto& proto : c.sweep_protocols) {
        std::string csv = csv_preamble(hash, c.seed);
        for (const auto& t : tasks)
            if (t.cfg.protocol == proto && t.row) csv += csv_row(*t.row) + "\n";
        const std::string name = "sweep_" + proto + ".csv";
        write_text(out / name, csv);
        manifest["files"].push_back(name);
    }
    std::size_t failures = 0;
    for (const auto& t : tasks) {
        if (!t.failure) continue;
        ++failures;
        const auto& f = *t.failure;
        manifest["failures"].push_back(
            {{"protocol", f.protocol}, {"preset", f.preset}, {"loss_dB", f.loss_db}, {"kind", f.kind}, {"message", f.message}});
    }
    manifest["points"] = tasks.size();
    write_text(out / "sweep.json", json_text(manifest));
    log << "sweep: " << tasks.size() - failures << "/" << tasks.size() << " points ok\n";
    return kExitOk;
}

} // namespace qnic::cli
