#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "qnic/protostack/keyproto.hpp"
#include "qnic/protostack/middleware.hpp"
#include "qnic/protostack/qds.hpp"

namespace qnic {

using LinkFactory = std::function<std::unique_ptr<QuantumLink>(const std::string& leg, const Alphabet&,
                                                               const NoiseModel&, const DetectorParams&)>;

/// Everything a protocol application needs for one session on a given channel.
struct SessionConfig {
    double a = 0.64;
    double T = 1.0;
    double xi = 0.0;
    double epsilon = 1e-4;

    // signatures
    DetectorParams qds_det{0.5, 0.0};
    AttackModel qds_b_attack = AttackModel::EntanglingCloner;
    bool optimize_region = true;
    PostselectionRegion region{};
    RegionGrid region_grid{};
    QdsAdversary adversary = QdsAdversary::None;
    std::size_t states_per_leg = 0;  // 0: use L-tilde from the security budget
    std::size_t max_states_per_leg = 2'000'000;
    std::size_t min_accepted_per_half = 100;

    // key protocols
    DetectorParams key_det{1.0, 0.0};
    bool optimize_gh = true;
    double g = std::sqrt(0.5), h = std::sqrt(0.5);
    double efficiency = 1.0;
    std::size_t secret_bits = 256;
    WithheldParty withheld = WithheldParty::None;
    int bits_per_quadrature = 2;
    std::size_t key_states = 0;  // 0: sized from the rate
    RateGrid rate_grid{};

    LinkFactory link_factory;  // empty: symbol-level links

    std::unique_ptr<QuantumLink> make_link(const std::string& leg, const Alphabet& alph, const NoiseModel& nm,
                                           const DetectorParams& det) const {
        if (link_factory) return link_factory(leg, alph, nm, det);
        return std::make_unique<IdealLink>(alph, nm, det);
    }
};

inline QdsParams qds_params(const SessionConfig& s, QdsDirection dir) {
    QdsParams p;
    p.alphabet = Alphabet::qpsk(s.a);
    p.noise = NoiseModel{s.T, s.xi, std::nullopt, HeterodyneConvention::SplitQuadrature};
    p.det = s.qds_det;
    p.attack = dir == QdsDirection::Backward ? s.qds_b_attack : AttackModel::Beamsplitter;
    p.epsilon = s.epsilon;
    return p;
}

inline RegionPoint qds_budget(const SessionConfig& s, QdsDirection dir) {
    const QdsParams p = qds_params(s, dir);
    if (s.optimize_region) return optimize_region(dir, p, s.region_grid).best;
    RegionPoint pt = evaluate_region(dir, p, s.region);
    if (!pt.budget) throw InsecureChannel("configured region gives p_e <= p_err");
    return pt;
}

class QdsApp : public ProtocolApp {
public:
    explicit QdsApp(QdsDirection d) : dir_(d) {}
    std::string id() const override { return to_string(dir_); }
    TaskKind task() const override { return TaskKind::Sign; }
    Direction direction() const override {
        return dir_ == QdsDirection::Backward ? Direction::Backward : Direction::Forward;
    }

    ProtocolReport run(const SessionConfig& s, SeededRandomSource& rng) const override {
        const RegionPoint pt = qds_budget(s, dir_);
        const QdsParams p = qds_params(s, dir_);
        QdsRunConfig rc;
        rc.direction = dir_;
        rc.alphabet = p.alphabet;
        rc.noise = p.noise;
        rc.det = p.det;
        rc.region = pt.region;
        rc.thresholds = Thresholds::from(*pt.budget);
        rc.adversary = s.adversary;
        rc.min_accepted_per_half = s.min_accepted_per_half;
        std::vector<std::string> warnings;
        std::size_t L = s.states_per_leg ? s.states_per_leg : static_cast<std::size_t>(pt.budget->L_tilde);
        if (L > s.max_states_per_leg) {
            warnings.push_back("states per leg capped at " + std::to_string(s.max_states_per_leg) +
                               " (security budget asks for " + std::to_string(L) + ")");
            L = s.max_states_per_leg;
        }
        rc.L = L + (L % 2);
        auto lb = s.make_link("bob", p.alphabet, p.noise, p.det);
        auto lc = s.make_link("charlie", p.alphabet, p.noise, p.det);
        ProtocolReport rep = run_qds(rc, rng, *lb, *lc);
        rep.p_err_analytic = pt.perr.p_err;
        rep.p_e = pt.pe.p_e;
        rep.N_analytic = pt.perr.N;
        rep.L = pt.budget->L;
        rep.L_tilde = pt.budget->L_tilde;
        rep.params["attack"] = to_string(p.attack);
        rep.params["epsilon"] = s.epsilon;
        rep.params["chi"] = pt.pe.chi;
        rep.warnings.insert(rep.warnings.end(), warnings.begin(), warnings.end());
        return rep;
    }

private:
    QdsDirection dir_;
};

class QssApp : public ProtocolApp {
public:
    std::string id() const override { return "qss-b"; }
    TaskKind task() const override { return TaskKind::ShareSecret; }
    Direction direction() const override { return Direction::Backward; }

    ProtocolReport run(const SessionConfig& s, SeededRandomSource& rng) const override {
        QssRunConfig rc;
        rc.params = QssParams::symmetric(s.a, s.T, s.xi, s.key_det);
        rc.efficiency = s.efficiency;
        rc.withheld = s.withheld;
        rc.bits_per_quadrature = s.bits_per_quadrature;
        rc.grid = s.rate_grid;
        double kappa;
        if (s.optimize_gh) {
            GhGrid gg;
            gg.rate = s.rate_grid;
            const QssRate r = optimize_gh(rc.params, gg);
            rc.g = r.g;
            rc.h = r.h;
            kappa = r.kappa_final;
        } else {
            rc.g = s.g;
            rc.h = s.h;
            kappa = qss_rate(rc.params, rc.g, rc.h, AttackModel::Beamsplitter, s.rate_grid).kappa_final;
        }
        if (!(kappa > 0.0)) throw RateNonPositive("qss-b: estimated key rate is not positive");
        rc.L = s.key_states ? s.key_states
                            : std::max<std::size_t>(20000, static_cast<std::size_t>(std::ceil(
                                                               1.5 * static_cast<double>(s.secret_bits) / (s.efficiency * kappa))));
        SeededRandomSource srng(derive_seed(rng.seed(), 0x5ec7));
        rc.secret = BitString::random(s.secret_bits, srng);
        const Alphabet alph = Alphabet::qpsk(s.a);
        auto lb = s.make_link("bob", alph, rc.params.noise_b(), rc.params.det);
        auto lc = s.make_link("charlie", alph, rc.params.noise_c(), rc.params.det);
        return run_qss_b(rc, rng, *lb, *lc);
    }
};

class QkdApp : public ProtocolApp {
public:
    std::string id() const override { return "qkd-f"; }
    TaskKind task() const override { return TaskKind::Key; }
    Direction direction() const override { return Direction::Forward; }

    ProtocolReport run(const SessionConfig& s, SeededRandomSource& rng) const override {
        QkdRunConfig rc;
        rc.params = LinkParams{s.a, s.T, s.xi, s.key_det, HeterodyneConvention::Husimi};
        rc.efficiency = s.efficiency;
        rc.bits_per_quadrature = s.bits_per_quadrature;
        rc.grid = s.rate_grid;
        rc.L = s.key_states ? s.key_states : 100000;
        auto link = s.make_link("bob", Alphabet::qpsk(s.a), rc.params.noise(), rc.params.det);
        return run_qkd_f(rc, rng, *link);
    }
};

inline ProtocolRegistry default_registry() {
    ProtocolRegistry r;
    r.add(TaskKind::Sign, Direction::Backward, [] { return std::make_unique<QdsApp>(QdsDirection::Backward); });
    r.add(TaskKind::Sign, Direction::Forward, [] { return std::make_unique<QdsApp>(QdsDirection::Forward); });
    r.add(TaskKind::ShareSecret, Direction::Backward, [] { return std::make_unique<QssApp>(); });
    r.add(TaskKind::Key, Direction::Forward, [] { return std::make_unique<QkdApp>(); });
    return r;
}

/// Protocol id to the task request that selects it.
inline TaskRequest request_for(const std::string& protocol, double epsilon = 1e-4) {
    TaskRequest r;
    r.epsilon_fail = epsilon;
    if (protocol == "qds-b") r.task = TaskKind::Sign, r.direction = Direction::Backward;
    else if (protocol == "qds-f") r.task = TaskKind::Sign, r.direction = Direction::Forward;
    else if (protocol == "qss-b") r.task = TaskKind::ShareSecret, r.direction = Direction::Backward;
    else if (protocol == "qkd-f") r.task = TaskKind::Key, r.direction = Direction::Forward;
    else throw UnsupportedTask("unknown protocol '" + protocol + "'");
    return r;
}

} // namespace qnic
