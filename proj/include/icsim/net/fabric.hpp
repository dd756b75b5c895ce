#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "icsim/modbus/frame.hpp"
#include "icsim/net/capture.hpp"

namespace icsim::net {

class FabricError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// No shared network between client and server.
class Unreachable : public FabricError {
  public:
    using FabricError::FabricError;
};

// Server down or in listen-only mode.
class Refused : public FabricError {
  public:
    using FabricError::FabricError;
};

struct BusResult {
    std::optional<modbus::RtuAdu> response;
    bool timed_out = false;  // broadcast suppresses the timeout
};

// In-process Modbus-TCP network and RTU serial bus with a capture tap on
// every message. Handlers execute synchronously in the caller's thread; the
// served device serializes its own bank access.
class Fabric {
  public:
    using TimeSource = std::function<double()>;
    using TcpHandler = std::function<std::optional<modbus::Pdu>(std::uint8_t unit_id,
                                                                const modbus::Pdu& request)>;
    using SerialHandler =
        std::function<std::optional<modbus::Pdu>(bool broadcast, const modbus::Pdu& request)>;

    explicit Fabric(TimeSource time_source) : now_(std::move(time_source)) {}

    void add_network(const std::string& name);
    void add_bus(const std::string& name);

    // Declares a device's (or attacker's) presence on a network.
    void attach(const std::string& device, const std::string& network, const std::string& ip);

    // Marks an identity as an attacker endpoint; captured packets carry the
    // resulting ground-truth flags so labeling never parses payload fields.
    void declare_attacker(const std::string& name);
    bool is_attacker(const std::string& name) const;

    struct ServerHandle {
        std::string device;
        std::uint16_t port = 0;
    };

    // The `accepting` probe gates new connections (closed or listen-only
    // servers refuse); established sessions instead observe silence.
    ServerHandle bind_server(const std::string& device, std::uint16_t port, TcpHandler handler,
                             std::function<bool()> accepting);
    void set_server_open(const ServerHandle& handle, bool open);

    void attach_bus_device(const std::string& bus, const std::string& device,
                           std::uint8_t unit_id, SerialHandler handler);

    class Session {
      public:
        // Returns the response PDU, or nullopt when the server stayed silent
        // (down, listen-only, or no reply for this request).
        std::optional<modbus::Pdu> transact(std::uint8_t unit_id, const modbus::Pdu& request);

        const Endpoint& local() const { return local_; }
        const Endpoint& remote() const { return remote_; }

      private:
        friend class Fabric;
        Fabric* fabric_ = nullptr;
        std::string server_device_;
        std::uint16_t server_port_ = 0;
        Endpoint local_;
        Endpoint remote_;
        std::uint16_t next_transaction_ = 0;
    };

    // Establishes a session; records the connection event either way.
    // Throws Unreachable / Refused.
    Session connect(const std::string& client_device, const std::string& server_device,
                    std::uint16_t port);

    // Connection attempt that reports refusal instead of throwing; floods use
    // this to hammer without sessions. Still throws Unreachable.
    bool try_connect_once(const std::string& client_device, const std::string& server_device,
                          std::uint16_t port);

    BusResult bus_transact(const std::string& bus, const std::string& origin_device,
                           const modbus::RtuAdu& request);

    CaptureTap& tap() { return tap_; }
    double now() const { return now_(); }

    // True when the two endpoints share a named network.
    bool reachable(const std::string& from_device, const std::string& to_device) const;

  private:
    struct ServerBinding {
        std::string device;
        std::uint16_t port;
        TcpHandler handler;
        std::function<bool()> accepting;
        bool open = true;
    };

    struct BusAttachment {
        std::string device;
        std::uint8_t unit_id;
        SerialHandler handler;
    };

    const ServerBinding* find_server(const std::string& device, std::uint16_t port) const;
    ServerBinding* find_server(const std::string& device, std::uint16_t port);
    // Shared network between two attached devices, if any.
    std::optional<std::string> shared_network(const std::string& a, const std::string& b) const;
    Endpoint endpoint_on(const std::string& device, const std::string& network,
                         std::uint16_t port) const;
    std::uint16_t next_ephemeral_port();

    void stamp_and_record(CapturedPacket packet);

    TimeSource now_;
    CaptureTap tap_;
    mutable std::mutex mutex_;
    std::set<std::string> attackers_;
    std::set<std::string> networks_;
    // device -> network -> ip
    std::map<std::string, std::map<std::string, std::string>> attachments_;
    std::vector<ServerBinding> servers_;
    std::map<std::string, std::vector<BusAttachment>> buses_;
    std::uint16_t ephemeral_counter_ = 0;
};

}  // namespace icsim::net
