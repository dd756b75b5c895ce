#include "icsim/attacks/attacks.hpp"

#include <algorithm>

#include "icsim/modbus/server.hpp"

namespace icsim::attacks {

using modbus::Area;
using modbus::FunctionCode;
using modbus::Pdu;

std::string target_label(const Target& target) {
    if (const auto* tcp = std::get_if<TcpTarget>(&target)) {
        return tcp->device + ":" + std::to_string(tcp->port);
    }
    return "bus:" + std::get<BusTarget>(target).bus;
}

std::optional<Pdu> AttackerSession::transact(const Target& target, std::uint8_t unit,
                                             const Pdu& request) {
    if (const auto* bus = std::get_if<BusTarget>(&target)) {
        const auto result = fabric_.bus_transact(bus->bus, name_, {unit, request});
        if (!result.response) return std::nullopt;
        return result.response->pdu;
    }

    const auto& tcp = std::get<TcpTarget>(target);
    const auto key = std::make_pair(tcp.device, tcp.port);
    auto it = sessions_.find(key);
    if (it == sessions_.end()) {
        try {
            it = sessions_.emplace(key, fabric_.connect(name_, tcp.device, tcp.port)).first;
        } catch (const net::FabricError&) {
            return std::nullopt;
        }
    }
    return it->second.transact(unit, request);
}

bool AttackerSession::try_connect(const TcpTarget& target) {
    return fabric_.try_connect_once(name_, target.device, target.port);
}

void AttackerSession::drop_session(const TcpTarget& target) {
    sessions_.erase(std::make_pair(target.device, target.port));
}

namespace {

Pdu read_request(FunctionCode fc, std::uint16_t address, std::uint16_t count) {
    Pdu pdu;
    pdu.function_code = static_cast<std::uint8_t>(fc);
    modbus::put_u16(pdu.data, address);
    modbus::put_u16(pdu.data, count);
    return pdu;
}

constexpr Area scan_areas[] = {Area::coil, Area::discrete_input, Area::holding_register,
                               Area::input_register};

FunctionCode read_fc_for(Area area) {
    switch (area) {
        case Area::coil: return FunctionCode::read_coils;
        case Area::discrete_input: return FunctionCode::read_discrete_inputs;
        case Area::holding_register: return FunctionCode::read_holding_registers;
        case Area::input_register: return FunctionCode::read_input_registers;
    }
    return FunctionCode::read_coils;
}

}  // namespace

AddressScanResult address_scan(AttackerSession& session, const Target& target,
                               std::uint8_t first_unit, std::uint8_t last_unit) {
    AddressScanResult result;
    for (std::uint32_t unit = first_unit; unit <= last_unit; ++unit) {
        ++result.probes;
        // A benign read; an exception reply proves presence just as well.
        const auto response = session.transact(
            target, static_cast<std::uint8_t>(unit),
            read_request(FunctionCode::read_holding_registers, 0, 1));
        if (response) result.discovered.insert(static_cast<std::uint8_t>(unit));
    }
    return result;
}

FunctionCodeScanResult function_code_scan(AttackerSession& session, const Target& target,
                                          std::uint8_t unit) {
    FunctionCodeScanResult result;
    for (std::uint16_t fc = 1; fc <= 127; ++fc) {
        Pdu probe;
        probe.function_code = static_cast<std::uint8_t>(fc);
        switch (static_cast<FunctionCode>(fc)) {
            case FunctionCode::read_coils:
            case FunctionCode::read_discrete_inputs:
            case FunctionCode::read_holding_registers:
            case FunctionCode::read_input_registers:
                modbus::put_u16(probe.data, 0);
                modbus::put_u16(probe.data, 1);
                break;
            case FunctionCode::write_single_coil:
                // Deliberately invalid value: answered with 0x03 when the
                // code is supported, without flipping anything.
                modbus::put_u16(probe.data, 0);
                modbus::put_u16(probe.data, 0x0001);
                break;
            case FunctionCode::write_single_register:
                // Probe an address that is almost certainly unconfigured.
                modbus::put_u16(probe.data, 0xFFFF);
                modbus::put_u16(probe.data, 0);
                break;
            case FunctionCode::write_multiple_coils:
            case FunctionCode::write_multiple_registers:
                // Zero count: rejected as 0x03 without mutation.
                modbus::put_u16(probe.data, 0);
                modbus::put_u16(probe.data, 0);
                probe.data.push_back(0);
                break;
            case FunctionCode::diagnostics:
                // Harmless unknown sub-function; supported servers answer
                // 0x03 instead of acting.
                modbus::put_u16(probe.data, 0x0000);
                modbus::put_u16(probe.data, 0x0000);
                break;
            case FunctionCode::read_device_identification:
                probe.data = {0x0E, 0x01, 0x00};
                break;
            default:
                break;
        }
        const auto response = session.transact(target, unit, probe);
        if (!response) {
            ++result.timeouts;
            continue;
        }
        if (response->is_exception() &&
            response->exception_code() ==
                static_cast<std::uint8_t>(modbus::ExceptionCode::illegal_function)) {
            continue;
        }
        result.supported.insert(static_cast<std::uint8_t>(fc));
    }
    return result;
}

DeviceIdentificationResult device_identification(AttackerSession& session, const Target& target,
                                                 std::uint8_t unit) {
    DeviceIdentificationResult result;
    Pdu request;
    request.function_code = static_cast<std::uint8_t>(FunctionCode::read_device_identification);
    request.data = {0x0E, 0x01, 0x00};

    const auto response = session.transact(target, unit, request);
    if (!response) {
        result.timeout = true;
        return result;
    }
    if (response->is_exception()) {
        result.unsupported = true;
        return result;
    }

    const auto& d = response->data;
    if (d.size() < 6 || d[0] != 0x0E) {
        result.parse_error = true;
        return result;
    }
    modbus::DeviceIdentity identity;
    std::size_t offset = 6;
    for (int object = 0; object < d[5]; ++object) {
        if (offset + 2 > d.size()) {
            result.parse_error = true;
            return result;
        }
        const std::uint8_t id = d[offset];
        const std::uint8_t length = d[offset + 1];
        if (offset + 2 + length > d.size()) {
            result.parse_error = true;
            return result;
        }
        const std::string text(d.begin() + static_cast<long>(offset) + 2,
                               d.begin() + static_cast<long>(offset) + 2 + length);
        if (id == 0) identity.vendor = text;
        if (id == 1) identity.product = text;
        if (id == 2) identity.version = text;
        offset += 2u + length;
    }
    result.identity = identity;
    return result;
}

namespace {

// Records every value of a successful range read.
void record_range(const Pdu& response, Area area, std::uint32_t first, std::uint32_t count,
                  NaiveSensorReadResult& result) {
    if (modbus::is_bit_area(area)) {
        for (std::uint32_t i = 0; i < count; ++i) {
            const bool on = (response.data[1 + i / 8] >> (i % 8)) & 1;
            result.values[{area, static_cast<std::uint16_t>(first + i)}] = on ? 1 : 0;
        }
    } else {
        for (std::uint32_t i = 0; i < count; ++i) {
            result.values[{area, static_cast<std::uint16_t>(first + i)}] =
                modbus::get_u16(response.data, 1 + 2u * i);
        }
    }
}

// Reads [first, last] of one area in one chunk. A 0x02 reply means the chunk
// straddles configured and unconfigured addresses; fall back to probing each
// address alone so holes cannot mask used registers. Returns false when the
// whole area is unsupported (0x01), so the caller stops scanning it.
bool scan_area_chunk(AttackerSession& session, const Target& target, std::uint8_t unit,
                     Area area, std::uint32_t first, std::uint32_t last,
                     NaiveSensorReadResult& result) {
    const std::uint32_t count = last - first + 1;
    ++result.requests;
    const auto response =
        session.transact(target, unit,
                         read_request(read_fc_for(area), static_cast<std::uint16_t>(first),
                                      static_cast<std::uint16_t>(count)));
    if (!response) return false;  // silent target: nothing to learn
    if (!response->is_exception()) {
        record_range(*response, area, first, count, result);
        return true;
    }
    if (response->exception_code() !=
        static_cast<std::uint8_t>(modbus::ExceptionCode::illegal_data_address)) {
        return false;
    }
    if (count == 1) return true;  // definitively absent
    for (std::uint32_t address = first; address <= last; ++address) {
        ++result.requests;
        const auto single =
            session.transact(target, unit,
                             read_request(read_fc_for(area),
                                          static_cast<std::uint16_t>(address), 1));
        if (single && !single->is_exception()) {
            record_range(*single, area, address, 1, result);
        }
    }
    return true;
}

}  // namespace

NaiveSensorReadResult naive_sensor_read(AttackerSession& session, const Target& target,
                                        std::uint8_t unit, std::uint16_t first_address,
                                        std::uint16_t last_address) {
    NaiveSensorReadResult result;
    for (Area area : scan_areas) {
        const std::uint32_t chunk =
            modbus::is_bit_area(area) ? modbus::max_read_bits : modbus::max_read_words;
        std::uint32_t address = first_address;
        while (address <= last_address) {
            const std::uint32_t end = std::min<std::uint32_t>(address + chunk - 1, last_address);
            if (!scan_area_chunk(session, target, unit, area, address, end, result)) break;
            address = end + 1;
        }
    }
    return result;
}

std::vector<InjectionRecord> sporadic_injection(AttackerSession& session, const Target& target,
                                                std::uint8_t unit, world::Rng& rng,
                                                const SporadicInjectionParams& params) {
    std::vector<InjectionRecord> log;
    for (std::uint32_t i = 0; i < params.writes; ++i) {
        const bool coil = rng.coin();
        const auto address = static_cast<std::uint16_t>(
            rng.uniform_int(params.first_address, params.last_address));
        Pdu request;
        std::uint16_t value;
        if (coil) {
            value = rng.coin() ? 1 : 0;
            request.function_code = static_cast<std::uint8_t>(FunctionCode::write_single_coil);
            modbus::put_u16(request.data, address);
            modbus::put_u16(request.data, value != 0 ? 0xFF00 : 0x0000);
        } else {
            value = static_cast<std::uint16_t>(rng.uniform_int(0, 0xFFFF));
            request.function_code =
                static_cast<std::uint8_t>(FunctionCode::write_single_register);
            modbus::put_u16(request.data, address);
            modbus::put_u16(request.data, value);
        }
        const auto response = session.transact(target, unit, request);
        const bool accepted = response && !response->is_exception();
        log.push_back({coil ? Area::coil : Area::holding_register, address, value, accepted});
    }
    return log;
}

bool force_listen(AttackerSession& session, const Target& target, std::uint8_t unit) {
    Pdu request;
    request.function_code = static_cast<std::uint8_t>(FunctionCode::diagnostics);
    modbus::put_u16(request.data, modbus::diag_force_listen_only);
    modbus::put_u16(request.data, 0x0000);
    session.transact(target, unit, request);
    return true;  // silence is the expected acknowledgment
}

bool restart_comm(AttackerSession& session, const Target& target, std::uint8_t unit) {
    Pdu request;
    request.function_code = static_cast<std::uint8_t>(FunctionCode::diagnostics);
    modbus::put_u16(request.data, modbus::diag_restart_communications);
    modbus::put_u16(request.data, 0x0000);
    const auto response = session.transact(target, unit, request);
    return response.has_value();
}

bool DataFlood::done(double now_s) const {
    return started_s_ >= 0.0 && now_s >= started_s_ + duration_s_;
}

void DataFlood::on_tick(AttackerSession& session, double now_s, double tick_s) {
    if (started_s_ < 0.0) started_s_ = now_s;
    if (done(now_s)) return;
    carry_ += rate_hz_ * tick_s;
    auto batch = static_cast<std::uint64_t>(carry_);
    carry_ -= static_cast<double>(batch);
    for (std::uint64_t i = 0; i < batch; ++i) {
        session.transact(Target{target_}, unit_,
                         read_request(FunctionCode::read_holding_registers, 0, 1));
        ++sent_;
    }
}

FloodStats DataFlood::stats(double now_s) const {
    const double elapsed = started_s_ < 0.0 ? 0.0 : std::min(now_s - started_s_, duration_s_);
    return {sent_, elapsed > 0.0 ? static_cast<double>(sent_) / elapsed : 0.0};
}

bool ConnectionFlood::done(double now_s) const {
    return started_s_ >= 0.0 && now_s >= started_s_ + duration_s_;
}

void ConnectionFlood::on_tick(AttackerSession& session, double now_s, double tick_s) {
    if (started_s_ < 0.0) started_s_ = now_s;
    if (done(now_s)) return;
    carry_ += rate_hz_ * tick_s;
    auto batch = static_cast<std::uint64_t>(carry_);
    carry_ -= static_cast<double>(batch);
    for (std::uint64_t i = 0; i < batch; ++i) {
        try {
            session.try_connect(target_);  // connect-and-abandon
        } catch (const net::Unreachable&) {
            // target misconfigured out of reach; keep counting attempts
        }
        ++attempted_;
    }
}

FloodStats ConnectionFlood::stats(double now_s) const {
    const double elapsed = started_s_ < 0.0 ? 0.0 : std::min(now_s - started_s_, duration_s_);
    return {attempted_, elapsed > 0.0 ? static_cast<double>(attempted_) / elapsed : 0.0};
}

}  // namespace icsim::attacks
