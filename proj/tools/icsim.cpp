#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "icsim/attacks/campaign.hpp"
#include "icsim/config/parse.hpp"
#include "icsim/config/validate.hpp"
#include "icsim/dataset/dataset.hpp"
#include "icsim/net/pcap.hpp"
#include "icsim/scenarios/registry.hpp"
#include "icsim/sim/simulation.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_domain_failure = 1;
constexpr int exit_usage = 2;

std::atomic<bool> interrupted{false};

void handle_interrupt(int) { interrupted.store(true); }

std::string default_out_dir() {
    if (const char* env = std::getenv("ICS_SIMLAB_OUT")) return env;
    return "out";
}

struct RunSettings {
    std::string config_path;
    std::string mode = "lockstep";
    std::uint64_t seed = 0;
    bool seed_set = false;
    double duration_s = 120.0;
    bool duration_set = false;
    std::string out_dir;
    std::string hmi_script;
    double snapshot_every_s = 10.0;
    bool pcap = false;
};

int load_and_validate(const std::string& path, icsim::config::SimulationConfig& config) {
    try {
        config = icsim::config::load_config_file(path);
    } catch (const icsim::config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_usage;
    }
    const auto known = icsim::scenarios::builtin_registry().names();
    const auto violations = icsim::config::validate(config, &known);
    if (!violations.empty()) {
        for (const auto& violation : violations) {
            std::cerr << violation.to_string() << "\n";
        }
        return exit_domain_failure;
    }
    return exit_ok;
}

class StoreJournalWriter {
  public:
    explicit StoreJournalWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write store journal: " + path);
        out_ << "sim_time_s,revision,name,value\n";
    }

    void operator()(const icsim::world::StoreCommit& commit) {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "%.6f,%llu,", commit.sim_time_s,
                      static_cast<unsigned long long>(commit.revision));
        out_ << buffer << commit.name << ',';
        std::snprintf(buffer, sizeof(buffer), "%.10g", commit.value);
        out_ << buffer << "\n";
    }

    void flush() { out_.flush(); }

  private:
    std::ofstream out_;
};

// Shared plant runner for `run` (no plan) and `attack` (with plan).
int run_simulation(const RunSettings& settings, const icsim::attacks::CampaignPlan* plan) {
    icsim::config::SimulationConfig config;
    if (int failure = load_and_validate(settings.config_path, config)) return failure;
    if (settings.seed_set) config.seed = settings.seed;

    const bool lockstep = settings.mode == "lockstep";
    if (!lockstep && settings.seed_set) {
        std::cerr << "note: realtime mode accepts a seed, but network timing is "
                     "nondeterministic\n";
    }

    icsim::attacks::CampaignPlan effective_plan;
    if (plan) {
        effective_plan = *plan;
        if (settings.seed_set) effective_plan.seed = settings.seed;
        if (settings.duration_set) effective_plan.duration_s = settings.duration_s;
        for (const auto& attacker : effective_plan.attackers) {
            bool declared = false;
            for (const auto& candidate : config.attackers) {
                if (candidate.name == attacker) declared = true;
            }
            if (!declared) {
                std::cerr << "plan error: attacker \"" << attacker
                          << "\" is not declared in the config\n";
                return exit_usage;
            }
        }
    }
    const double duration_s =
        settings.duration_set ? settings.duration_s : (plan ? effective_plan.duration_s : 120.0);

    const fs::path out_dir(settings.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << out_dir << ": " << ec.message()
                  << "\n";
        return exit_usage;
    }

    try {
        icsim::sim::Simulation simulation(
            config, icsim::scenarios::builtin_registry(),
            lockstep ? icsim::sim::RunMode::lockstep : icsim::sim::RunMode::realtime);

        StoreJournalWriter store_journal((out_dir / "store.csv").string());
        simulation.store().set_journal([&](const icsim::world::StoreCommit& commit) {
            store_journal(commit);
        });

        simulation.boot();
        if (!settings.hmi_script.empty()) simulation.load_hmi_script_file(settings.hmi_script);

        std::ofstream status((out_dir / "status.txt").string());
        if (!status) throw std::runtime_error("cannot write status file");
        status << simulation.status_snapshot();  // power-on view
        double next_snapshot = settings.snapshot_every_s;

        std::unique_ptr<icsim::attacks::CampaignRunner> campaign;
        if (plan) {
            campaign = std::make_unique<icsim::attacks::CampaignRunner>(
                effective_plan, simulation.config(), simulation.fabric());
        }

        auto per_tick = [&](icsim::sim::Simulation& sim) {
            if (campaign) campaign->on_tick(sim.now_s(), sim.tick_s());
            if (sim.now_s() + 1e-9 >= next_snapshot) {
                status << sim.status_snapshot();
                next_snapshot += settings.snapshot_every_s;
            }
            if (interrupted.load()) throw std::runtime_error("interrupted");
        };

        std::signal(SIGINT, handle_interrupt);
        bool clean = true;
        try {
            if (lockstep) {
                simulation.run_ticks(simulation.ticks_for(duration_s), per_tick);
            } else {
                simulation.run_realtime(duration_s, per_tick);
            }
        } catch (const std::runtime_error& e) {
            if (std::string(e.what()) != "interrupted") throw;
            clean = false;
            std::cerr << "interrupted; flushing journals\n";
        }

        status << simulation.status_snapshot();
        status.flush();
        store_journal.flush();

        const auto capture = simulation.fabric().tap().drain();
        icsim::net::write_capture_journal_file((out_dir / "capture.csv").string(), capture);
        if (settings.pcap) {
            icsim::net::write_pcap_file((out_dir / "capture.pcap").string(), capture);
        }
        if (campaign) {
            icsim::attacks::write_campaign_log_file((out_dir / "campaign.csv").string(),
                                                    campaign->log());
        }

        std::cout << "wrote " << capture.size() << " captured packets to "
                  << (out_dir / "capture.csv").string() << "\n";
        return clean ? exit_ok : exit_domain_failure;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return exit_domain_failure;
    }
}

int cmd_validate(const std::string& path) {
    icsim::config::SimulationConfig config;
    const int failure = load_and_validate(path, config);
    if (failure == exit_ok) {
        std::cout << "ok: " << config.devices.size() << " devices, "
                  << config.networks.size() << " networks, " << config.serial_buses.size()
                  << " serial buses\n";
    }
    return failure;
}

int cmd_export(const std::string& capture_path, const std::string& log_path,
               const std::string& out_path, const std::string& qa_path,
               bool label_responses) {
    try {
        const auto capture = icsim::net::read_capture_journal_file(capture_path);

        std::vector<icsim::attacks::CampaignEntry> log;
        if (!log_path.empty()) log = icsim::attacks::read_campaign_log_file(log_path);

        // Attacker registry from the journal's fabric-assigned flags.
        std::set<std::string> registry;
        for (const auto& packet : capture) {
            if (packet.origin_is_attacker) registry.insert(packet.origin_device);
            if (packet.cause_is_attacker) registry.insert(packet.cause_device);
        }

        auto rows = icsim::dataset::extract_rows(capture);
        const auto stats = icsim::dataset::label_rows(rows, log, registry, label_responses);
        icsim::dataset::write_csv_file(out_path, rows);
        if (!qa_path.empty()) {
            std::ofstream qa(qa_path);
            if (!qa) throw std::runtime_error("cannot write qa report: " + qa_path);
            qa << icsim::dataset::qa_report(stats, rows.size());
        }
        std::cout << "wrote " << rows.size() << " rows (" << stats.malicious
                  << " malicious) to " << out_path << "\n";
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "export failed: " << e.what() << "\n";
        return exit_usage;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Configuration-driven ICS simulator: Modbus devices, attack campaigns, "
                 "and labeled traffic datasets"};
    app.require_subcommand(1);

    // validate
    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a simulation config");
    validate_cmd->add_option("config", validate_path, "Config JSON path")->required();

    // run
    RunSettings run_settings;
    auto* run_cmd = app.add_subcommand("run", "Run a plant without attacks");
    run_cmd->add_option("config", run_settings.config_path, "Config JSON path")->required();
    run_cmd->add_option("--mode", run_settings.mode, "lockstep|realtime")
        ->check(CLI::IsMember({"lockstep", "realtime"}));
    auto* run_seed = run_cmd->add_option("--seed", run_settings.seed, "Seed override");
    auto* run_duration =
        run_cmd->add_option("--duration", run_settings.duration_s, "Run duration (s)");
    run_cmd->add_option("--out", run_settings.out_dir, "Output directory");
    run_cmd->add_option("--hmi-script", run_settings.hmi_script,
                        "CSV of scheduled HMI commands (time_s,device,controller,value)");
    run_cmd->add_option("--snapshot-every", run_settings.snapshot_every_s,
                        "Status snapshot interval (s)");
    run_cmd->add_flag("--pcap", run_settings.pcap, "Also export capture.pcap");

    // attack
    RunSettings attack_settings;
    std::string plan_path;
    auto* attack_cmd = app.add_subcommand("attack", "Run a plant plus an attack campaign");
    attack_cmd->add_option("config", attack_settings.config_path, "Config JSON path")
        ->required();
    attack_cmd->add_option("--plan", plan_path, "Campaign plan JSON")->required();
    attack_cmd->add_option("--mode", attack_settings.mode, "lockstep|realtime")
        ->check(CLI::IsMember({"lockstep", "realtime"}));
    auto* attack_seed = attack_cmd->add_option("--seed", attack_settings.seed, "Seed override");
    auto* attack_duration =
        attack_cmd->add_option("--duration", attack_settings.duration_s, "Run duration (s)");
    attack_cmd->add_option("--out", attack_settings.out_dir, "Output directory");
    attack_cmd->add_option("--hmi-script", attack_settings.hmi_script,
                           "CSV of scheduled HMI commands");
    attack_cmd->add_option("--snapshot-every", attack_settings.snapshot_every_s,
                           "Status snapshot interval (s)");
    attack_cmd->add_flag("--pcap", attack_settings.pcap, "Also export capture.pcap");

    // export
    std::string export_capture, export_log, export_out, export_qa;
    bool no_label_responses = false;
    auto* export_cmd =
        app.add_subcommand("export", "Build the labeled dataset CSV from run outputs");
    export_cmd->add_option("--capture", export_capture, "Capture journal CSV")->required();
    export_cmd->add_option("--log", export_log, "Campaign log CSV (omit for benign runs)");
    export_cmd->add_option("--out", export_out, "Dataset CSV path")->required();
    export_cmd->add_option("--qa", export_qa, "QA report path");
    export_cmd->add_flag("--no-label-responses", no_label_responses,
                         "Do not label responses elicited by attacker requests");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? exit_ok : exit_usage;
    }

    if (validate_cmd->parsed()) return cmd_validate(validate_path);

    if (run_cmd->parsed()) {
        run_settings.seed_set = run_seed->count() > 0;
        run_settings.duration_set = run_duration->count() > 0;
        if (run_settings.out_dir.empty()) run_settings.out_dir = default_out_dir();
        return run_simulation(run_settings, nullptr);
    }

    if (attack_cmd->parsed()) {
        attack_settings.seed_set = attack_seed->count() > 0;
        attack_settings.duration_set = attack_duration->count() > 0;
        if (attack_settings.out_dir.empty()) attack_settings.out_dir = default_out_dir();
        icsim::attacks::CampaignPlan plan;
        try {
            plan = icsim::attacks::CampaignPlan::load_file(plan_path);
        } catch (const std::exception& e) {
            std::cerr << "plan error: " << e.what() << "\n";
            return exit_usage;
        }
        return run_simulation(attack_settings, &plan);
    }

    if (export_cmd->parsed()) {
        return cmd_export(export_capture, export_log, export_out, export_qa,
                          !no_label_responses);
    }
    return exit_usage;
}
