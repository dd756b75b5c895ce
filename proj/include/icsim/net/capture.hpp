#pragma once

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <string>
#include <vector>

namespace icsim::net {

struct Endpoint {
    std::string device;
    std::string network;  // network name, or bus name for serial endpoints
    std::string ip;       // empty on serial endpoints (no IP framing on a bus)
    std::string mac;      // synthetic per-device label, stable across a run
    std::uint16_t port = 0;

    bool operator==(const Endpoint&) const = default;
};

// Stable synthetic MAC for a device, derived from its name.
std::string synthetic_mac(const std::string& device_name);

enum class Transport { tcp, serial };
enum class Direction { request, response };

// What crossed the fabric: a Modbus ADU or a bare TCP connection attempt
// (recorded so connection floods are visible in the capture).
enum class EventKind { modbus, connection };

struct CapturedPacket {
    std::uint64_t seq = 0;
    double timestamp_s = 0.0;
    Transport transport = Transport::tcp;
    Direction direction = Direction::request;
    EventKind kind = EventKind::modbus;
    Endpoint src;
    Endpoint dst;
    std::vector<std::uint8_t> raw_adu;  // full ADU bytes; empty for connection events
    // Fabric-assigned ground truth, never parsed from packet contents.
    std::string origin_device;  // who put this packet on the wire
    std::string cause_device;   // who originated the exchange (labels elicited responses)
    bool origin_is_attacker = false;
    bool cause_is_attacker = false;
};

class CaptureTap {
  public:
    // Assigns the sequence number; timestamps are non-decreasing because the
    // fabric serializes recording.
    void record(CapturedPacket packet);

    // Returns everything captured so far in timestamp order and clears.
    std::vector<CapturedPacket> drain();

    std::size_t size() const;

  private:
    mutable std::mutex mutex_;
    std::vector<CapturedPacket> packets_;
    std::uint64_t next_seq_ = 0;
};

// Normative capture record: CSV of raw hex plus metadata.
void write_capture_journal(std::ostream& out, const std::vector<CapturedPacket>& packets);
void write_capture_journal_file(const std::string& path,
                                const std::vector<CapturedPacket>& packets);
std::vector<CapturedPacket> read_capture_journal(std::istream& in);
std::vector<CapturedPacket> read_capture_journal_file(const std::string& path);

std::string to_hex(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> from_hex(const std::string& text);

}  // namespace icsim::net
