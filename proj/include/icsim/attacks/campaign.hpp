#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "icsim/attacks/attacks.hpp"
#include "icsim/config/model.hpp"
#include "icsim/world/rng.hpp"

namespace icsim::attacks {

// Internal attack identifiers, with the classification column fixed by the
// name->category mapping in attack_category().
extern const std::vector<std::string> all_attack_names;

// Display names and categories as they appear in campaign logs and datasets,
// e.g. "address_scan" -> ("Address Scan", "Reconnaissance").
std::string attack_display_name(const std::string& name);
std::string attack_category(const std::string& name);
bool is_known_attack(const std::string& name);

struct CampaignPlan {
    std::uint64_t seed = 0;
    double duration_s = 120.0;
    double min_gap_s = 2.0;
    double max_gap_s = 8.0;
    std::vector<std::string> enabled;    // attack names; empty plan = benign run
    std::vector<std::string> attackers;  // attacker endpoint identities

    // Default knobs; individual runs draw within these.
    double data_flood_rate_hz = 500.0;
    double conn_flood_rate_hz = 200.0;
    double flood_duration_s = 10.0;
    std::uint16_t scan_window = 256;  // naive-read address window

    static CampaignPlan parse(const std::string& json_text);
    static CampaignPlan load_file(const std::string& path);
};

struct CampaignEntry {
    double start_s = 0.0;
    double end_s = 0.0;
    std::string attack;    // display name
    std::string category;  // Table-style classification
    std::string target;
    std::string params_json;
};

void write_campaign_log(std::ostream& out, const std::vector<CampaignEntry>& log);
void write_campaign_log_file(const std::string& path, const std::vector<CampaignEntry>& log);
std::vector<CampaignEntry> read_campaign_log(std::istream& in);
std::vector<CampaignEntry> read_campaign_log_file(const std::string& path);

// Seeded random sequencing of the enabled attacks against the deployed
// plant. Driven once per tick (lockstep scheduler hook or a wall-clock
// loop): scans run to completion within their tick, floods pace themselves
// across their window. The log records every attack with its interval,
// target and parameters — the labeling ground truth.
class CampaignRunner {
  public:
    CampaignRunner(const CampaignPlan& plan, const config::SimulationConfig& config,
                   net::Fabric& fabric);

    void on_tick(double now_s, double tick_s);
    bool finished(double now_s) const;

    const std::vector<CampaignEntry>& log() const { return log_; }

  private:
    struct TcpCandidate {
        std::string attacker;
        TcpTarget target;
        std::uint8_t unit;  // a unit id the target answers on
    };
    struct BusCandidate {
        std::string attacker;
        std::string bus;
    };

    void launch_next(double now_s);
    void finish_flood(CampaignEntry& entry, const FloodStats& stats);
    AttackerSession& session_for(const std::string& attacker);

    CampaignPlan plan_;
    net::Fabric& fabric_;
    world::Rng rng_;
    std::vector<TcpCandidate> tcp_candidates_;
    std::vector<BusCandidate> bus_candidates_;
    std::vector<std::unique_ptr<AttackerSession>> sessions_;
    std::vector<CampaignEntry> log_;

    double next_launch_s_ = 0.0;
    bool first_launch_scheduled_ = false;

    // At most one flood in flight; scans complete inside their tick.
    std::optional<std::size_t> active_entry_;
    std::unique_ptr<DataFlood> data_flood_;
    std::unique_ptr<ConnectionFlood> conn_flood_;
    AttackerSession* flood_session_ = nullptr;
};

}  // namespace icsim::attacks
