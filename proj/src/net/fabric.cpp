#include "icsim/net/fabric.hpp"

namespace icsim::net {

void Fabric::add_network(const std::string& name) {
    std::lock_guard lock(mutex_);
    networks_.insert(name);
}

void Fabric::add_bus(const std::string& name) {
    std::lock_guard lock(mutex_);
    buses_.emplace(name, std::vector<BusAttachment>{});
}

void Fabric::declare_attacker(const std::string& name) {
    std::lock_guard lock(mutex_);
    attackers_.insert(name);
}

bool Fabric::is_attacker(const std::string& name) const {
    std::lock_guard lock(mutex_);
    return attackers_.count(name) != 0;
}

void Fabric::stamp_and_record(CapturedPacket packet) {
    {
        std::lock_guard lock(mutex_);
        packet.origin_is_attacker = attackers_.count(packet.origin_device) != 0;
        packet.cause_is_attacker = attackers_.count(packet.cause_device) != 0;
    }
    tap_.record(std::move(packet));
}

void Fabric::attach(const std::string& device, const std::string& network,
                    const std::string& ip) {
    std::lock_guard lock(mutex_);
    if (networks_.count(network) == 0) {
        throw FabricError("network not declared: " + network);
    }
    attachments_[device][network] = ip;
}

Fabric::ServerHandle Fabric::bind_server(const std::string& device, std::uint16_t port,
                                         TcpHandler handler, std::function<bool()> accepting) {
    std::lock_guard lock(mutex_);
    servers_.push_back({device, port, std::move(handler), std::move(accepting), true});
    return {device, port};
}

void Fabric::set_server_open(const ServerHandle& handle, bool open) {
    std::lock_guard lock(mutex_);
    if (auto* server = find_server(handle.device, handle.port)) server->open = open;
}

void Fabric::attach_bus_device(const std::string& bus, const std::string& device,
                               std::uint8_t unit_id, SerialHandler handler) {
    std::lock_guard lock(mutex_);
    auto it = buses_.find(bus);
    if (it == buses_.end()) throw FabricError("bus not declared: " + bus);
    it->second.push_back({device, unit_id, std::move(handler)});
}

const Fabric::ServerBinding* Fabric::find_server(const std::string& device,
                                                 std::uint16_t port) const {
    for (const auto& server : servers_) {
        if (server.device == device && server.port == port) return &server;
    }
    return nullptr;
}

Fabric::ServerBinding* Fabric::find_server(const std::string& device, std::uint16_t port) {
    for (auto& server : servers_) {
        if (server.device == device && server.port == port) return &server;
    }
    return nullptr;
}

std::optional<std::string> Fabric::shared_network(const std::string& a,
                                                  const std::string& b) const {
    auto ita = attachments_.find(a);
    auto itb = attachments_.find(b);
    if (ita == attachments_.end() || itb == attachments_.end()) return std::nullopt;
    for (const auto& [network, ip] : ita->second) {
        (void)ip;
        if (itb->second.count(network) != 0) return network;
    }
    return std::nullopt;
}

bool Fabric::reachable(const std::string& from_device, const std::string& to_device) const {
    std::lock_guard lock(mutex_);
    return shared_network(from_device, to_device).has_value();
}

Endpoint Fabric::endpoint_on(const std::string& device, const std::string& network,
                             std::uint16_t port) const {
    Endpoint endpoint;
    endpoint.device = device;
    endpoint.network = network;
    auto it = attachments_.find(device);
    if (it != attachments_.end()) {
        auto nit = it->second.find(network);
        if (nit != it->second.end()) endpoint.ip = nit->second;
    }
    endpoint.mac = synthetic_mac(device);
    endpoint.port = port;
    return endpoint;
}

std::uint16_t Fabric::next_ephemeral_port() {
    // Wraps within the dynamic range; collisions are harmless labels.
    ephemeral_counter_ = static_cast<std::uint16_t>((ephemeral_counter_ + 1) % 16384);
    return static_cast<std::uint16_t>(49152 + ephemeral_counter_);
}

Fabric::Session Fabric::connect(const std::string& client_device,
                                const std::string& server_device, std::uint16_t port) {
    Session session;
    std::function<bool()> accepting;
    bool bound_and_open = false;
    {
        std::lock_guard lock(mutex_);
        const auto network = shared_network(client_device, server_device);
        if (!network) {
            throw Unreachable("no shared network between " + client_device + " and " +
                              server_device);
        }
        session.fabric_ = this;
        session.server_device_ = server_device;
        session.server_port_ = port;
        session.local_ = endpoint_on(client_device, *network, next_ephemeral_port());
        session.remote_ = endpoint_on(server_device, *network, port);

        if (const ServerBinding* server = find_server(server_device, port)) {
            bound_and_open = server->open;
            accepting = server->accepting;
        }
    }

    CapturedPacket event;
    event.timestamp_s = now_();
    event.transport = Transport::tcp;
    event.direction = Direction::request;
    event.kind = EventKind::connection;
    event.src = session.local_;
    event.dst = session.remote_;
    event.origin_device = client_device;
    event.cause_device = client_device;
    stamp_and_record(std::move(event));

    // The accepting probe runs outside the fabric lock; it touches device
    // state guarded by the device's own mutex.
    if (!bound_and_open || (accepting && !accepting())) {
        throw Refused("connection refused by " + server_device + ":" + std::to_string(port));
    }
    return session;
}

bool Fabric::try_connect_once(const std::string& client_device,
                              const std::string& server_device, std::uint16_t port) {
    try {
        connect(client_device, server_device, port);
        return true;
    } catch (const Refused&) {
        return false;
    }
}

std::optional<modbus::Pdu> Fabric::Session::transact(std::uint8_t unit_id,
                                                     const modbus::Pdu& request) {
    Fabric& fabric = *fabric_;

    modbus::TcpAdu request_adu;
    request_adu.unit_id = unit_id;
    request_adu.pdu = request;

    Fabric::TcpHandler handler;
    {
        std::lock_guard lock(fabric.mutex_);
        request_adu.transaction_id = next_transaction_++;
        const ServerBinding* server = fabric.find_server(server_device_, server_port_);
        if (server && server->open) handler = server->handler;
    }

    {
        CapturedPacket packet;
        packet.timestamp_s = fabric.now_();
        packet.transport = Transport::tcp;
        packet.direction = Direction::request;
        packet.kind = EventKind::modbus;
        packet.src = local_;
        packet.dst = remote_;
        packet.raw_adu = modbus::encode_tcp(request_adu);
        packet.origin_device = local_.device;
        packet.cause_device = local_.device;
        fabric.stamp_and_record(std::move(packet));
    }

    if (!handler) return std::nullopt;  // silent wire: client times out

    const auto response = handler(unit_id, request);
    if (!response) return std::nullopt;

    modbus::TcpAdu response_adu;
    response_adu.transaction_id = request_adu.transaction_id;
    response_adu.unit_id = unit_id;
    response_adu.pdu = *response;

    {
        CapturedPacket packet;
        packet.timestamp_s = fabric.now_();
        packet.transport = Transport::tcp;
        packet.direction = Direction::response;
        packet.kind = EventKind::modbus;
        packet.src = remote_;
        packet.dst = local_;
        packet.raw_adu = modbus::encode_tcp(response_adu);
        packet.origin_device = remote_.device;
        packet.cause_device = local_.device;  // elicited by the requester
        fabric.stamp_and_record(std::move(packet));
    }
    return response;
}

BusResult Fabric::bus_transact(const std::string& bus, const std::string& origin_device,
                               const modbus::RtuAdu& request) {
    std::vector<BusAttachment> attached;
    {
        std::lock_guard lock(mutex_);
        auto it = buses_.find(bus);
        if (it == buses_.end()) throw FabricError("bus not declared: " + bus);
        attached = it->second;
    }

    const bool broadcast = request.address == modbus::broadcast_address;

    {
        Endpoint src{origin_device, bus, "", synthetic_mac(origin_device), 0};
        Endpoint dst{"", bus, "", "", 0};
        if (!broadcast) {
            for (const auto& attachment : attached) {
                if (attachment.unit_id == request.address) dst.device = attachment.device;
            }
            if (!dst.device.empty()) dst.mac = synthetic_mac(dst.device);
        }

        CapturedPacket packet;
        packet.timestamp_s = now_();
        packet.transport = Transport::serial;
        packet.direction = Direction::request;
        packet.kind = EventKind::modbus;
        packet.src = src;
        packet.dst = dst;
        packet.raw_adu = modbus::encode_rtu(request.address, request.pdu);
        packet.origin_device = origin_device;
        packet.cause_device = origin_device;
        stamp_and_record(std::move(packet));
    }
    if (broadcast) {
        // Every attached device applies the request; nobody answers.
        for (const auto& attachment : attached) {
            attachment.handler(true, request.pdu);
        }
        return {std::nullopt, false};
    }

    for (const auto& attachment : attached) {
        if (attachment.unit_id != request.address) continue;
        const auto response = attachment.handler(false, request.pdu);
        if (!response) return {std::nullopt, true};  // listen-only or down

        modbus::RtuAdu response_adu{request.address, *response};
        CapturedPacket packet;
        packet.timestamp_s = now_();
        packet.transport = Transport::serial;
        packet.direction = Direction::response;
        packet.kind = EventKind::modbus;
        packet.src = {attachment.device, bus, "", synthetic_mac(attachment.device), 0};
        packet.dst = {origin_device, bus, "", synthetic_mac(origin_device), 0};
        packet.raw_adu = modbus::encode_rtu(response_adu.address, response_adu.pdu);
        packet.origin_device = attachment.device;
        packet.cause_device = origin_device;
        stamp_and_record(std::move(packet));
        return {response_adu, false};
    }
    return {std::nullopt, true};  // no receiver on this unit id
}

}  // namespace icsim::net
