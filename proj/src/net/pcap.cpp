#include "icsim/net/pcap.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace icsim::net {

namespace {

void put_u16be(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_u32le(std::ostream& out, std::uint32_t v) {
    char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                     static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(bytes, 4);
}

void put_u16le(std::ostream& out, std::uint16_t v) {
    char bytes[2] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF)};
    out.write(bytes, 2);
}

std::array<std::uint8_t, 6> parse_mac(const std::string& text) {
    std::array<std::uint8_t, 6> mac{};
    if (text.size() != 17) return mac;
    for (int i = 0; i < 6; ++i) {
        mac[i] = static_cast<std::uint8_t>(std::stoul(text.substr(3 * i, 2), nullptr, 16));
    }
    return mac;
}

std::uint32_t parse_ipv4(const std::string& text) {
    std::uint32_t ip = 0;
    std::istringstream in(text);
    std::string octet;
    int parts = 0;
    while (std::getline(in, octet, '.') && parts < 4) {
        ip = (ip << 8) | (std::stoul(octet) & 0xFF);
        ++parts;
    }
    return parts == 4 ? ip : 0;
}

std::uint16_t ones_complement_sum(const std::vector<std::uint8_t>& bytes, std::size_t start,
                                  std::size_t length, std::uint32_t initial = 0) {
    std::uint32_t sum = initial;
    for (std::size_t i = 0; i < length; i += 2) {
        const std::uint16_t word =
            static_cast<std::uint16_t>((bytes[start + i] << 8) |
                                       (i + 1 < length ? bytes[start + i + 1] : 0));
        sum += word;
    }
    while (sum >> 16) sum = (sum & 0xFFFF) + (sum >> 16);
    return static_cast<std::uint16_t>(~sum);
}

struct FlowState {
    std::uint32_t seq = 1;
};

}  // namespace

std::size_t write_pcap_file(const std::string& path,
                            const std::vector<CapturedPacket>& packets) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write pcap file: " + path);

    // Global header: classic pcap, microsecond timestamps, Ethernet.
    put_u32le(out, 0xA1B2C3D4);
    put_u16le(out, 2);
    put_u16le(out, 4);
    put_u32le(out, 0);      // thiszone
    put_u32le(out, 0);      // sigfigs
    put_u32le(out, 65535);  // snaplen
    put_u32le(out, 1);      // LINKTYPE_ETHERNET

    std::map<std::string, FlowState> flows;
    std::size_t written = 0;

    for (const auto& packet : packets) {
        if (packet.transport != Transport::tcp) continue;

        const auto src_mac = parse_mac(packet.src.mac);
        const auto dst_mac = parse_mac(packet.dst.mac);
        const std::uint32_t src_ip = parse_ipv4(packet.src.ip);
        const std::uint32_t dst_ip = parse_ipv4(packet.dst.ip);
        const std::vector<std::uint8_t>& payload = packet.raw_adu;

        const std::string flow_key = packet.src.ip + ":" + std::to_string(packet.src.port) +
                                     ">" + packet.dst.ip + ":" + std::to_string(packet.dst.port);
        FlowState& flow = flows[flow_key];

        std::vector<std::uint8_t> frame;
        frame.insert(frame.end(), dst_mac.begin(), dst_mac.end());
        frame.insert(frame.end(), src_mac.begin(), src_mac.end());
        put_u16be(frame, 0x0800);

        const std::size_t ip_offset = frame.size();
        const std::uint16_t total_len = static_cast<std::uint16_t>(20 + 20 + payload.size());
        frame.push_back(0x45);  // IPv4, 20-byte header
        frame.push_back(0x00);
        put_u16be(frame, total_len);
        put_u16be(frame, static_cast<std::uint16_t>(written & 0xFFFF));  // id
        put_u16be(frame, 0x4000);                                        // don't fragment
        frame.push_back(64);                                             // ttl
        frame.push_back(6);                                              // protocol tcp
        put_u16be(frame, 0);                                             // checksum slot
        put_u32be(frame, src_ip);
        put_u32be(frame, dst_ip);
        const std::uint16_t ip_checksum = ones_complement_sum(frame, ip_offset, 20);
        frame[ip_offset + 10] = static_cast<std::uint8_t>(ip_checksum >> 8);
        frame[ip_offset + 11] = static_cast<std::uint8_t>(ip_checksum & 0xFF);

        const std::size_t tcp_offset = frame.size();
        put_u16be(frame, packet.src.port);
        put_u16be(frame, packet.dst.port);
        put_u32be(frame, flow.seq);
        put_u32be(frame, 1);   // ack (synthetic)
        frame.push_back(0x50);  // data offset 5
        if (packet.kind == EventKind::connection) {
            frame.push_back(0x02);  // SYN
        } else {
            frame.push_back(0x18);  // PSH|ACK
        }
        put_u16be(frame, 0xFFFF);  // window
        put_u16be(frame, 0);       // checksum slot
        put_u16be(frame, 0);       // urgent
        frame.insert(frame.end(), payload.begin(), payload.end());

        // TCP checksum over pseudo-header + segment.
        const std::size_t segment_len = 20 + payload.size();
        std::uint32_t pseudo = 0;
        pseudo += (src_ip >> 16) + (src_ip & 0xFFFF);
        pseudo += (dst_ip >> 16) + (dst_ip & 0xFFFF);
        pseudo += 6;
        pseudo += static_cast<std::uint32_t>(segment_len);
        const std::uint16_t tcp_checksum =
            ones_complement_sum(frame, tcp_offset, segment_len, pseudo);
        frame[tcp_offset + 16] = static_cast<std::uint8_t>(tcp_checksum >> 8);
        frame[tcp_offset + 17] = static_cast<std::uint8_t>(tcp_checksum & 0xFF);

        flow.seq += packet.kind == EventKind::connection
                        ? 1
                        : static_cast<std::uint32_t>(payload.size());

        const double whole = std::floor(packet.timestamp_s);
        put_u32le(out, static_cast<std::uint32_t>(whole));
        put_u32le(out, static_cast<std::uint32_t>(
                           std::llround((packet.timestamp_s - whole) * 1e6) % 1000000));
        put_u32le(out, static_cast<std::uint32_t>(frame.size()));
        put_u32le(out, static_cast<std::uint32_t>(frame.size()));
        out.write(reinterpret_cast<const char*>(frame.data()),
                  static_cast<std::streamsize>(frame.size()));
        ++written;
    }
    return written;
}

}  // namespace icsim::net
