#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "icsim/modbus/bank.hpp"
#include "icsim/modbus/frame.hpp"
#include "icsim/net/fabric.hpp"
#include "icsim/world/rng.hpp"

namespace icsim::attacks {

// A Modbus endpoint as the attacker sees it: either a TCP server or a serial
// bus it can speak on.
struct TcpTarget {
    std::string device;
    std::uint16_t port = 502;
};
struct BusTarget {
    std::string bus;
};
using Target = std::variant<TcpTarget, BusTarget>;

std::string target_label(const Target& target);

// Attacker-side transport: owns sessions from a declared attacker endpoint
// and stamps every emitted frame with the attacker's identity.
class AttackerSession {
  public:
    AttackerSession(net::Fabric& fabric, std::string attacker_name)
        : fabric_(fabric), name_(std::move(attacker_name)) {}

    // Request/response against a target; nullopt on timeout. Opens (and
    // caches) a session to TCP targets on first use.
    std::optional<modbus::Pdu> transact(const Target& target, std::uint8_t unit,
                                        const modbus::Pdu& request);

    // Bare connection attempt; true when accepted.
    bool try_connect(const TcpTarget& target);

    const std::string& name() const { return name_; }
    net::Fabric& fabric() { return fabric_; }
    void drop_session(const TcpTarget& target);

  private:
    net::Fabric& fabric_;
    std::string name_;
    std::map<std::pair<std::string, std::uint16_t>, net::Fabric::Session> sessions_;
};

// --- Reconnaissance ---

struct AddressScanResult {
    std::set<std::uint8_t> discovered;
    std::uint32_t probes = 0;
};
AddressScanResult address_scan(AttackerSession& session, const Target& target,
                               std::uint8_t first_unit = 1, std::uint8_t last_unit = 247);

struct FunctionCodeScanResult {
    std::set<std::uint8_t> supported;
    std::uint32_t timeouts = 0;
};
FunctionCodeScanResult function_code_scan(AttackerSession& session, const Target& target,
                                          std::uint8_t unit);

struct DeviceIdentificationResult {
    std::optional<modbus::DeviceIdentity> identity;
    bool unsupported = false;   // exception 0x01 recorded
    bool parse_error = false;   // malformed reply flagged
    bool timeout = false;
};
DeviceIdentificationResult device_identification(AttackerSession& session, const Target& target,
                                                 std::uint8_t unit);

// --- Response and measurement injection ---

struct NaiveSensorReadResult {
    // (area, address) -> value for every address that answered.
    std::map<std::pair<modbus::Area, std::uint16_t>, std::uint16_t> values;
    std::uint32_t requests = 0;
};
NaiveSensorReadResult naive_sensor_read(AttackerSession& session, const Target& target,
                                        std::uint8_t unit, std::uint16_t first_address = 0,
                                        std::uint16_t last_address = 0xFFFF);

struct InjectionRecord {
    modbus::Area area;
    std::uint16_t address;
    std::uint16_t value;
    bool accepted;
};
struct SporadicInjectionParams {
    std::uint32_t writes = 20;
    std::uint16_t first_address = 0;
    std::uint16_t last_address = 64;
};
std::vector<InjectionRecord> sporadic_injection(AttackerSession& session, const Target& target,
                                                std::uint8_t unit, world::Rng& rng,
                                                const SporadicInjectionParams& params);

// --- Command injection ---

// Diagnostics 0x08/0x0004; per the standard the victim acknowledges with
// silence, so `delivered` reports reachability, not a response.
bool force_listen(AttackerSession& session, const Target& target, std::uint8_t unit);
// Diagnostics 0x08/0x0001; listen-only devices still answer this one.
bool restart_comm(AttackerSession& session, const Target& target, std::uint8_t unit);

// --- Denial of service ---

struct FloodStats {
    std::uint64_t attempted = 0;
    double achieved_rate_hz = 0.0;
};

// Tick-paced flood drivers; the campaign (or a test) calls on_tick once per
// tick until the window closes.
class DataFlood {
  public:
    DataFlood(TcpTarget target, std::uint8_t unit, double rate_hz, double duration_s)
        : target_(std::move(target)), unit_(unit), rate_hz_(rate_hz), duration_s_(duration_s) {}

    bool done(double now_s) const;
    void on_tick(AttackerSession& session, double now_s, double tick_s);
    FloodStats stats(double now_s) const;

  private:
    TcpTarget target_;
    std::uint8_t unit_;
    double rate_hz_;
    double duration_s_;
    double started_s_ = -1.0;
    double carry_ = 0.0;
    std::uint64_t sent_ = 0;
};

class ConnectionFlood {
  public:
    ConnectionFlood(TcpTarget target, double rate_hz, double duration_s)
        : target_(std::move(target)), rate_hz_(rate_hz), duration_s_(duration_s) {}

    bool done(double now_s) const;
    void on_tick(AttackerSession& session, double now_s, double tick_s);
    FloodStats stats(double now_s) const;

  private:
    TcpTarget target_;
    double rate_hz_;
    double duration_s_;
    double started_s_ = -1.0;
    double carry_ = 0.0;
    std::uint64_t attempted_ = 0;
};

}  // namespace icsim::attacks
