#include "icsim/dataset/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "icsim/modbus/frame.hpp"

namespace icsim::dataset {

std::vector<DatasetRow> extract_rows(const std::vector<net::CapturedPacket>& capture) {
    std::vector<DatasetRow> rows;
    rows.reserve(capture.size());
    for (const auto& packet : capture) {
        DatasetRow row;
        row.time = packet.timestamp_s;
        row.src_mac = packet.src.mac;
        row.dest_mac = packet.dst.mac;
        row.src_ip = packet.src.ip;
        row.dest_ip = packet.dst.ip;
        row.length = static_cast<std::uint32_t>(packet.raw_adu.size());
        row.origin_device = packet.origin_device;
        row.cause_device = packet.cause_device;

        if (packet.kind == net::EventKind::connection) {
            row.protocol = "TCP";
        } else if (packet.transport == net::Transport::tcp) {
            row.protocol = "Modbus/TCP";
            try {
                const auto adu = modbus::decode_tcp(packet.raw_adu);
                row.unit_id = adu.unit_id;
                row.func_code = adu.pdu.function_code;
                row.data = net::to_hex(adu.pdu.data);
            } catch (const modbus::CodecError&) {
                row.data = parse_failure_sentinel;
            }
        } else {
            row.protocol = "Modbus RTU";
            try {
                const auto adu = modbus::decode_rtu(packet.raw_adu);
                row.unit_id = adu.address;  // the frame's address byte
                row.func_code = adu.pdu.function_code;
                row.data = net::to_hex(adu.pdu.data);
            } catch (const modbus::CodecError&) {
                row.data = parse_failure_sentinel;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

LabelStats label_rows(std::vector<DatasetRow>& rows,
                      const std::vector<attacks::CampaignEntry>& campaign_log,
                      const std::set<std::string>& attacker_names, bool label_responses) {
    LabelStats stats;
    auto covering_entry = [&](double t) -> const attacks::CampaignEntry* {
        for (const auto& entry : campaign_log) {
            if (t >= entry.start_s && t <= entry.end_s) return &entry;
        }
        return nullptr;
    };

    for (auto& row : rows) {
        if (row.data == parse_failure_sentinel) ++stats.parse_failures;

        const bool attacker_origin = attacker_names.count(row.origin_device) != 0;
        const bool attacker_elicited =
            label_responses && attacker_names.count(row.cause_device) != 0;
        if (!attacker_origin && !attacker_elicited) continue;

        row.attack_binary = 1;
        ++stats.malicious;
        if (const auto* entry = covering_entry(row.time)) {
            row.attack_specific = entry->attack;
            row.attack_category = entry->category;
        } else {
            row.attack_specific = "unattributed";
            row.attack_category = "unattributed";
            ++stats.unattributed;
        }
    }
    return stats;
}

namespace {

// RFC-style quoting; our fields are comma-free in practice but stay safe.
std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += "\"";
    return quoted;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<DatasetRow>& rows) {
    out << csv_header << "\n";
    char time_buffer[32];
    for (const auto& row : rows) {
        std::snprintf(time_buffer, sizeof(time_buffer), "%.6f", row.time);
        out << time_buffer << ',' << csv_quote(row.src_mac) << ',' << csv_quote(row.dest_mac)
            << ',' << csv_quote(row.src_ip) << ',' << csv_quote(row.dest_ip) << ','
            << csv_quote(row.protocol) << ',' << row.length << ',';
        if (row.unit_id) out << *row.unit_id;
        out << ',';
        if (row.func_code) out << *row.func_code;
        out << ',' << csv_quote(row.data) << ',' << csv_quote(row.attack_specific) << ','
            << csv_quote(row.attack_category) << ',' << row.attack_binary << "\n";
    }
}

void write_csv_file(const std::string& path, const std::vector<DatasetRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset: " + path);
    write_csv(out, rows);
}

std::string qa_report(const LabelStats& stats, std::size_t row_count) {
    std::ostringstream out;
    out << "rows: " << row_count << "\n"
        << "malicious: " << stats.malicious << "\n"
        << "unattributed: " << stats.unattributed << "\n"
        << "parse_failures: " << stats.parse_failures << "\n";
    return out.str();
}

}  // namespace icsim::dataset
