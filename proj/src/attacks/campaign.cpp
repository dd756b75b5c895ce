#include "icsim/attacks/campaign.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace icsim::attacks {

using nlohmann::json;

const std::vector<std::string> all_attack_names = {
    "address_scan",     "function_code_scan", "device_identification",
    "naive_sensor_read", "sporadic_injection", "force_listen",
    "restart_comm",     "data_flood",         "connection_flood",
};

namespace {

struct AttackMeta {
    const char* display;
    const char* category;
};

const std::map<std::string, AttackMeta>& attack_table() {
    static const std::map<std::string, AttackMeta> table = {
        {"address_scan", {"Address Scan", "Reconnaissance"}},
        {"function_code_scan", {"Function Code Scan", "Reconnaissance"}},
        {"device_identification", {"Device Identification", "Reconnaissance"}},
        {"naive_sensor_read",
         {"Naive Sensor Read", "Response and Measurement Injection"}},
        {"sporadic_injection",
         {"Sporadic Sensor Measurement Injection", "Response and Measurement Injection"}},
        {"force_listen", {"Force Listen Mode", "Command Injection"}},
        {"restart_comm", {"Restart Communications", "Command Injection"}},
        {"data_flood", {"Data Flood Attack", "Denial of Service"}},
        {"connection_flood", {"Connection Flood Attack", "Denial of Service"}},
    };
    return table;
}

}  // namespace

std::string attack_display_name(const std::string& name) {
    auto it = attack_table().find(name);
    if (it == attack_table().end()) throw std::runtime_error("unknown attack: " + name);
    return it->second.display;
}

std::string attack_category(const std::string& name) {
    auto it = attack_table().find(name);
    if (it == attack_table().end()) throw std::runtime_error("unknown attack: " + name);
    return it->second.category;
}

bool is_known_attack(const std::string& name) {
    return attack_table().count(name) != 0;
}

CampaignPlan CampaignPlan::parse(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("campaign plan: ") + e.what());
    }
    CampaignPlan plan;
    for (const auto& [key, value] : root.items()) {
        if (key == "seed") plan.seed = value.get<std::uint64_t>();
        else if (key == "duration_s") plan.duration_s = value.get<double>();
        else if (key == "min_gap_s") plan.min_gap_s = value.get<double>();
        else if (key == "max_gap_s") plan.max_gap_s = value.get<double>();
        else if (key == "attacks") plan.enabled = value.get<std::vector<std::string>>();
        else if (key == "attackers") plan.attackers = value.get<std::vector<std::string>>();
        else if (key == "data_flood_rate_hz") plan.data_flood_rate_hz = value.get<double>();
        else if (key == "conn_flood_rate_hz") plan.conn_flood_rate_hz = value.get<double>();
        else if (key == "flood_duration_s") plan.flood_duration_s = value.get<double>();
        else if (key == "scan_window") plan.scan_window = value.get<std::uint16_t>();
        else throw std::runtime_error("campaign plan: unknown key \"" + key + "\"");
    }
    for (const auto& name : plan.enabled) {
        if (!is_known_attack(name)) {
            throw std::runtime_error("campaign plan: unknown attack \"" + name + "\"");
        }
    }
    if (plan.min_gap_s < 0 || plan.max_gap_s < plan.min_gap_s) {
        throw std::runtime_error("campaign plan: bad gap bounds");
    }
    return plan;
}

CampaignPlan CampaignPlan::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open campaign plan: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

namespace {
constexpr const char* campaign_header =
    "start_s,end_s,attack_specific,attack_category,target,params_json";
}

void write_campaign_log(std::ostream& out, const std::vector<CampaignEntry>& log) {
    out << campaign_header << "\n";
    char buffer[64];
    for (const auto& entry : log) {
        std::snprintf(buffer, sizeof(buffer), "%.6f,%.6f", entry.start_s, entry.end_s);
        // params_json is quoted with doubled inner quotes (RFC style) so the
        // embedded commas and quotes stay one field.
        std::string quoted;
        quoted.reserve(entry.params_json.size() + 2);
        for (char c : entry.params_json) {
            if (c == '"') quoted += "\"\"";
            else quoted += c;
        }
        out << buffer << ',' << entry.attack << ',' << entry.category << ',' << entry.target
            << ",\"" << quoted << "\"\n";
    }
}

void write_campaign_log_file(const std::string& path, const std::vector<CampaignEntry>& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write campaign log: " + path);
    write_campaign_log(out, log);
}

std::vector<CampaignEntry> read_campaign_log(std::istream& in) {
    std::vector<CampaignEntry> log;
    std::string line;
    if (!std::getline(in, line)) return log;
    if (line != campaign_header) throw std::runtime_error("unrecognized campaign log header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CampaignEntry entry;
        std::size_t position = 0;
        auto next_field = [&](bool last) {
            if (last) {
                std::string field = line.substr(position);
                if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
                    field = field.substr(1, field.size() - 2);
                    std::string unescaped;
                    unescaped.reserve(field.size());
                    for (std::size_t i = 0; i < field.size(); ++i) {
                        if (field[i] == '"' && i + 1 < field.size() && field[i + 1] == '"') {
                            ++i;
                        }
                        unescaped += field[i];
                    }
                    field = unescaped;
                }
                return field;
            }
            const auto comma = line.find(',', position);
            if (comma == std::string::npos) {
                throw std::runtime_error("malformed campaign log line: " + line);
            }
            std::string field = line.substr(position, comma - position);
            position = comma + 1;
            return field;
        };
        entry.start_s = std::stod(next_field(false));
        entry.end_s = std::stod(next_field(false));
        entry.attack = next_field(false);
        entry.category = next_field(false);
        entry.target = next_field(false);
        entry.params_json = next_field(true);
        log.push_back(std::move(entry));
    }
    return log;
}

std::vector<CampaignEntry> read_campaign_log_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read campaign log: " + path);
    return read_campaign_log(in);
}

namespace {

const char* identification_outcome(const DeviceIdentificationResult& result) {
    if (result.identity) return "ok";
    if (result.unsupported) return "unsupported";
    if (result.parse_error) return "parse_error";
    return "timeout";
}

}  // namespace

CampaignRunner::CampaignRunner(const CampaignPlan& plan, const config::SimulationConfig& config,
                               net::Fabric& fabric)
    : plan_(plan), fabric_(fabric), rng_(world::Rng(plan.seed).split("campaign")) {
    for (const auto& attacker_name : plan_.attackers) {
        const config::AttackerConfig* attacker = nullptr;
        for (const auto& candidate : config.attackers) {
            if (candidate.name == attacker_name) attacker = &candidate;
        }
        if (!attacker) {
            throw std::runtime_error("campaign attacker not declared in config: " +
                                     attacker_name);
        }
        sessions_.push_back(std::make_unique<AttackerSession>(fabric_, attacker->name));

        // Deployment knowledge: which endpoints exist and where they are
        // reachable. Register maps stay unknown; scans discover those.
        for (const auto& device : config.devices) {
            if (!device.network) continue;
            bool shared = false;
            for (const auto& attachment : attacker->networks) {
                if (attachment.network == device.network->network) shared = true;
            }
            if (!shared) continue;
            for (const auto& inbound : device.inbound_connections) {
                if (inbound.type == config::ConnectionType::tcp) {
                    tcp_candidates_.push_back(
                        {attacker->name, {device.name, inbound.port}, inbound.unit_id});
                }
            }
        }
        for (const auto& bus : attacker->buses) {
            bus_candidates_.push_back({attacker->name, bus});
        }
    }
}

void CampaignRunner::finish_flood(CampaignEntry& entry, const FloodStats& stats) {
    json params = json::parse(entry.params_json);
    params["attempted"] = stats.attempted;
    params["achieved_rate_hz"] = stats.achieved_rate_hz;
    entry.params_json = params.dump();
}

AttackerSession& CampaignRunner::session_for(const std::string& attacker) {
    for (auto& session : sessions_) {
        if (session->name() == attacker) return *session;
    }
    throw std::logic_error("no session for attacker " + attacker);
}

bool CampaignRunner::finished(double now_s) const {
    return now_s >= plan_.duration_s && !active_entry_;
}

void CampaignRunner::on_tick(double now_s, double tick_s) {
    if (active_entry_) {
        auto& entry = log_[*active_entry_];
        if (data_flood_) {
            data_flood_->on_tick(*flood_session_, now_s, tick_s);
            if (data_flood_->done(now_s)) {
                entry.end_s = now_s;
                finish_flood(entry, data_flood_->stats(now_s));
                data_flood_.reset();
                active_entry_.reset();
            }
        } else if (conn_flood_) {
            conn_flood_->on_tick(*flood_session_, now_s, tick_s);
            if (conn_flood_->done(now_s)) {
                entry.end_s = now_s;
                finish_flood(entry, conn_flood_->stats(now_s));
                conn_flood_.reset();
                active_entry_.reset();
            }
        }
        return;
    }

    if (now_s >= plan_.duration_s) return;
    if (plan_.enabled.empty() || (tcp_candidates_.empty() && bus_candidates_.empty())) return;

    if (!first_launch_scheduled_) {
        first_launch_scheduled_ = true;
        next_launch_s_ = now_s + rng_.uniform(plan_.min_gap_s, plan_.max_gap_s);
    }
    if (now_s < next_launch_s_) return;

    launch_next(now_s);
    next_launch_s_ = now_s + rng_.uniform(plan_.min_gap_s, plan_.max_gap_s);
}

void CampaignRunner::launch_next(double now_s) {
    const auto& name = plan_.enabled[static_cast<std::size_t>(
        rng_.uniform_int(0, static_cast<std::int64_t>(plan_.enabled.size()) - 1))];

    // Floods need a TCP endpoint; everything else takes either transport.
    const bool tcp_only = name == "data_flood" || name == "connection_flood";
    const bool pick_tcp = tcp_only || bus_candidates_.empty() ||
                          (!tcp_candidates_.empty() && rng_.coin());

    CampaignEntry entry;
    entry.start_s = now_s;
    entry.end_s = now_s;
    entry.attack = attack_display_name(name);
    entry.category = attack_category(name);

    json params;

    if (pick_tcp && tcp_candidates_.empty()) return;  // nothing reachable

    if (pick_tcp) {
        const auto& candidate = tcp_candidates_[static_cast<std::size_t>(rng_.uniform_int(
            0, static_cast<std::int64_t>(tcp_candidates_.size()) - 1))];
        AttackerSession& session = session_for(candidate.attacker);
        const Target target{candidate.target};
        entry.target = target_label(target);
        params["unit"] = candidate.unit;

        if (name == "address_scan") {
            params["first_unit"] = 1;
            params["last_unit"] = 16;
            params["discovered"] = address_scan(session, target, 1, 16).discovered.size();
        } else if (name == "function_code_scan") {
            params["supported"] =
                function_code_scan(session, target, candidate.unit).supported.size();
        } else if (name == "device_identification") {
            params["result"] = identification_outcome(
                device_identification(session, target, candidate.unit));
        } else if (name == "naive_sensor_read") {
            params["first_address"] = 0;
            params["last_address"] = plan_.scan_window - 1;
            params["found"] =
                naive_sensor_read(session, target, candidate.unit, 0,
                                  static_cast<std::uint16_t>(plan_.scan_window - 1))
                    .values.size();
        } else if (name == "sporadic_injection") {
            SporadicInjectionParams sp;
            sp.writes = static_cast<std::uint32_t>(rng_.uniform_int(10, 40));
            params["writes"] = sp.writes;
            params["first_address"] = sp.first_address;
            params["last_address"] = sp.last_address;
            const auto log = sporadic_injection(session, target, candidate.unit, rng_, sp);
            std::size_t accepted = 0;
            for (const auto& record : log) accepted += record.accepted ? 1 : 0;
            params["accepted"] = accepted;
        } else if (name == "force_listen") {
            force_listen(session, target, candidate.unit);
        } else if (name == "restart_comm") {
            restart_comm(session, target, candidate.unit);
        } else if (name == "data_flood") {
            params["rate_hz"] = plan_.data_flood_rate_hz;
            params["duration_s"] = plan_.flood_duration_s;
            data_flood_ = std::make_unique<DataFlood>(candidate.target, candidate.unit,
                                                      plan_.data_flood_rate_hz,
                                                      plan_.flood_duration_s);
            flood_session_ = &session;
        } else if (name == "connection_flood") {
            params["rate_hz"] = plan_.conn_flood_rate_hz;
            params["duration_s"] = plan_.flood_duration_s;
            conn_flood_ = std::make_unique<ConnectionFlood>(
                candidate.target, plan_.conn_flood_rate_hz, plan_.flood_duration_s);
            flood_session_ = &session;
        }
    } else {
        const auto& candidate = bus_candidates_[static_cast<std::size_t>(rng_.uniform_int(
            0, static_cast<std::int64_t>(bus_candidates_.size()) - 1))];
        AttackerSession& session = session_for(candidate.attacker);
        const Target target{BusTarget{candidate.bus}};
        entry.target = target_label(target);

        if (name == "address_scan") {
            params["first_unit"] = 1;
            params["last_unit"] = 16;
            params["discovered"] = address_scan(session, target, 1, 16).discovered.size();
        } else {
            // Unit-directed serial attacks lean on recon: scan first, then
            // pick an answering unit; fall back to a blind guess.
            const auto scan = address_scan(session, target, 1, 16);
            std::uint8_t unit = static_cast<std::uint8_t>(rng_.uniform_int(1, 8));
            if (!scan.discovered.empty()) {
                auto it = scan.discovered.begin();
                std::advance(it, rng_.uniform_int(
                                     0, static_cast<std::int64_t>(scan.discovered.size()) - 1));
                unit = *it;
            }
            params["unit"] = unit;
            if (name == "function_code_scan") {
                params["supported"] = function_code_scan(session, target, unit).supported.size();
            } else if (name == "device_identification") {
                params["result"] =
                    identification_outcome(device_identification(session, target, unit));
            } else if (name == "naive_sensor_read") {
                params["first_address"] = 0;
                params["last_address"] = plan_.scan_window - 1;
                params["found"] =
                    naive_sensor_read(session, target, unit, 0,
                                      static_cast<std::uint16_t>(plan_.scan_window - 1))
                        .values.size();
            } else if (name == "sporadic_injection") {
                SporadicInjectionParams sp;
                sp.writes = static_cast<std::uint32_t>(rng_.uniform_int(10, 40));
                params["writes"] = sp.writes;
                params["first_address"] = sp.first_address;
                params["last_address"] = sp.last_address;
                const auto log = sporadic_injection(session, target, unit, rng_, sp);
                std::size_t accepted = 0;
                for (const auto& record : log) accepted += record.accepted ? 1 : 0;
                params["accepted"] = accepted;
            } else if (name == "force_listen") {
                force_listen(session, target, unit);
            } else if (name == "restart_comm") {
                restart_comm(session, target, unit);
            }
        }
    }

    // Floods carry a provisional end until the window closes; everything
    // else completes within its launch tick.
    entry.end_s = (data_flood_ || conn_flood_) ? now_s + plan_.flood_duration_s : now_s;
    entry.params_json = params.empty() ? "{}" : params.dump();
    log_.push_back(entry);
    if (data_flood_ || conn_flood_) active_entry_ = log_.size() - 1;
}

}  // namespace icsim::attacks
