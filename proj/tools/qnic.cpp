#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "qnic/cli/commands.hpp"

namespace {

struct Flags {
    std::string config_path;
    std::string preset;
    std::string protocol;
    std::optional<std::uint64_t> seed;
    std::string out = "qnic_out";
    std::optional<double> loss_db;
    std::optional<double> epsilon;
    std::optional<unsigned> jobs;
    std::string dishonest;
    std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_path, "key = value configuration file");
    sub->add_option("--preset", f.preset, "channel preset run1..run4");
    sub->add_option("--protocol", f.protocol, "qds-b | qds-f | qss-b | qkd-f");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--loss-db", f.loss_db, "channel loss in dB");
    sub->add_option("--epsilon", f.epsilon, "target failure probability");
    sub->add_option("--jobs", f.jobs, "worker threads (default: QNIC_JOBS or hardware concurrency)");
    sub->add_option("--dishonest", f.dishonest, "dishonest party: bob | charlie");
    sub->add_option("--set", f.sets, "extra key=value override (repeatable)");
}

qnic::cli::RunConfig resolve(const Flags& f) {
    using namespace qnic::cli;
    RunConfig c;
    if (!f.preset.empty()) c.apply_preset(find_preset(f.preset));
    if (!f.config_path.empty()) {
        std::ifstream is(f.config_path);
        if (!is) throw qnic::ConfigError("cannot open config file " + f.config_path);
        const auto kvs = read_key_values(is, f.config_path);
        apply_key_values(c, kvs, f.config_path);
    }
    for (const auto& kv : f.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw qnic::ConfigError("--set expects key=value, got '" + kv + "'");
        set_key(c, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
    }
    if (!f.protocol.empty()) set_key(c, "protocol", f.protocol);
    if (f.seed) c.seed = *f.seed;
    if (f.loss_db) c.loss_db = *f.loss_db;
    if (f.epsilon) c.epsilon = *f.epsilon;
    if (!f.dishonest.empty()) {
        const std::string who = detail::one_of(f.dishonest, {"bob", "charlie"});
        if (c.protocol == "qss-b") {
            c.withheld = who == "bob" ? "charlie" : "bob";
        } else if (c.protocol == "qds-b" || c.protocol == "qds-f") {
            if (who != "bob") throw qnic::ConfigError("--dishonest: signature forgery is modelled for bob only");
            c.adversary = c.protocol == "qds-b" ? "random-guess" : "beamsplitter-forger";
        } else {
            throw qnic::ConfigError("--dishonest is not meaningful for " + c.protocol);
        }
    }
    return c;
}

unsigned resolve_jobs(const Flags& f) {
    if (f.jobs) return std::max(1u, *f.jobs);
    if (const char* env = std::getenv("QNIC_JOBS")) {
        const std::uint64_t n = qnic::parse_u64(env);
        return static_cast<unsigned>(std::max<std::uint64_t>(1, n));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qnic: analysis and simulation of coherent-state quantum network protocols"};
    app.require_subcommand(1);
    Flags flags;
    auto* analyze = app.add_subcommand("analyze", "figures of merit at one channel point");
    auto* simulate = app.add_subcommand("simulate", "end-to-end protocol run through the hardware emulation");
    auto* sweep = app.add_subcommand("sweep", "loss sweep over protocols and presets");
    auto* list = app.add_subcommand("presets", "list channel presets and configuration keys");
    for (auto* s : {analyze, simulate, sweep}) add_common(s, flags);

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& p : qnic::cli::presets())
            std::cout << p.name << ": loss_db=" << p.loss_db << " alpha=" << p.alpha << " xi=" << p.xi << "\n";
        std::cout << "keys:";
        for (const auto& k : qnic::cli::known_keys()) std::cout << " " << k;
        std::cout << "\n";
        return qnic::cli::kExitOk;
    }

    try {
        const qnic::cli::RunConfig cfg = resolve(flags);
        if (analyze->parsed()) return qnic::cli::cmd_analyze(cfg, flags.out, std::cerr);
        if (simulate->parsed()) return qnic::cli::cmd_simulate(cfg, flags.out, std::cerr);
        return qnic::cli::cmd_sweep(cfg, flags.out, resolve_jobs(flags), std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return qnic::cli::exit_code_for(e);
    }
}
