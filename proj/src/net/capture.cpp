#include "icsim/net/capture.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "icsim/world/rng.hpp"  // fnv1a

namespace icsim::net {

std::string synthetic_mac(const std::string& device_name) {
    const std::uint64_t hash = world::fnv1a(device_name);
    char buffer[18];
    // 0x02 prefix: locally administered, unicast.
    std::snprintf(buffer, sizeof(buffer), "02:%02x:%02x:%02x:%02x:%02x",
                  static_cast<unsigned>((hash >> 32) & 0xFF),
                  static_cast<unsigned>((hash >> 24) & 0xFF),
                  static_cast<unsigned>((hash >> 16) & 0xFF),
                  static_cast<unsigned>((hash >> 8) & 0xFF),
                  static_cast<unsigned>(hash & 0xFF));
    return buffer;
}

void CaptureTap::record(CapturedPacket packet) {
    std::lock_guard lock(mutex_);
    packet.seq = next_seq_++;
    packets_.push_back(std::move(packet));
}

std::vector<CapturedPacket> CaptureTap::drain() {
    std::lock_guard lock(mutex_);
    std::vector<CapturedPacket> out;
    out.swap(packets_);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.timestamp_s != b.timestamp_s) return a.timestamp_s < b.timestamp_s;
        return a.seq < b.seq;
    });
    return out;
}

std::size_t CaptureTap::size() const {
    std::lock_guard lock(mutex_);
    return packets_.size();
}

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

std::vector<std::uint8_t> from_hex(const std::string& text) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::runtime_error("bad hex digit");
    };
    if (text.size() % 2 != 0) throw std::runtime_error("odd hex length");
    std::vector<std::uint8_t> out(text.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((nibble(text[2 * i]) << 4) | nibble(text[2 * i + 1]));
    }
    return out;
}

namespace {

constexpr const char* journal_header =
    "seq,time_s,transport,kind,direction,"
    "src_device,src_network,src_ip,src_mac,src_port,"
    "dst_device,dst_network,dst_ip,dst_mac,dst_port,"
    "origin,origin_attacker,cause,cause_attacker,raw_hex";

const char* transport_name(Transport t) { return t == Transport::tcp ? "tcp" : "serial"; }
const char* kind_name(EventKind k) { return k == EventKind::modbus ? "modbus" : "connection"; }
const char* direction_name(Direction d) {
    return d == Direction::request ? "request" : "response";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

}  // namespace

void write_capture_journal(std::ostream& out, const std::vector<CapturedPacket>& packets) {
    out << journal_header << "\n";
    char time_buffer[32];
    for (const auto& p : packets) {
        std::snprintf(time_buffer, sizeof(time_buffer), "%.6f", p.timestamp_s);
        out << p.seq << ',' << time_buffer << ',' << transport_name(p.transport) << ','
            << kind_name(p.kind) << ',' << direction_name(p.direction) << ',' << p.src.device
            << ',' << p.src.network << ',' << p.src.ip << ',' << p.src.mac << ',' << p.src.port
            << ',' << p.dst.device << ',' << p.dst.network << ',' << p.dst.ip << ',' << p.dst.mac
            << ',' << p.dst.port << ',' << p.origin_device << ',' << (p.origin_is_attacker ? 1 : 0)
            << ',' << p.cause_device << ',' << (p.cause_is_attacker ? 1 : 0) << ','
            << to_hex(p.raw_adu) << "\n";
    }
}

void write_capture_journal_file(const std::string& path,
                                const std::vector<CapturedPacket>& packets) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write capture journal: " + path);
    write_capture_journal(out, packets);
}

std::vector<CapturedPacket> read_capture_journal(std::istream& in) {
    std::vector<CapturedPacket> packets;
    std::string line;
    if (!std::getline(in, line)) return packets;
    if (line != journal_header) {
        throw std::runtime_error("unrecognized capture journal header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 20) {
            throw std::runtime_error("malformed capture journal line: " + line);
        }
        CapturedPacket p;
        p.seq = std::stoull(fields[0]);
        p.timestamp_s = std::stod(fields[1]);
        p.transport = fields[2] == "tcp" ? Transport::tcp : Transport::serial;
        p.kind = fields[3] == "modbus" ? EventKind::modbus : EventKind::connection;
        p.direction = fields[4] == "request" ? Direction::request : Direction::response;
        p.src = {fields[5], fields[6], fields[7], fields[8],
                 static_cast<std::uint16_t>(std::stoul(fields[9]))};
        p.dst = {fields[10], fields[11], fields[12], fields[13],
                 static_cast<std::uint16_t>(std::stoul(fields[14]))};
        p.origin_device = fields[15];
        p.origin_is_attacker = fields[16] == "1";
        p.cause_device = fields[17];
        p.cause_is_attacker = fields[18] == "1";
        p.raw_adu = from_hex(fields[19]);
        packets.push_back(std::move(p));
    }
    return packets;
}

std::vector<CapturedPacket> read_capture_journal_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read capture journal: " + path);
    return read_capture_journal(in);
}

}  // namespace icsim::net
