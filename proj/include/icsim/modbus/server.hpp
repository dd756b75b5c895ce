#pragma once

#include <optional>

#include "icsim/modbus/bank.hpp"
#include "icsim/modbus/pdu.hpp"

namespace icsim::modbus {

enum class ServerMode {
    normal,
    listen_only,
};

// Device-level side effects a diagnostics request asks for. The server engine
// reports them; the owning device runtime applies them.
enum class DeviceControl {
    restart_communications,
    force_listen_only,
};

struct ExecResult {
    std::optional<Pdu> response;       // absent: no reply goes on the wire
    std::optional<DeviceControl> control;
};

// Standard request-count limits; scans have to chunk accordingly.
inline constexpr std::uint16_t max_read_bits = 2000;
inline constexpr std::uint16_t max_read_words = 125;
inline constexpr std::uint16_t max_write_bits = 1968;
inline constexpr std::uint16_t max_write_words = 123;

// Server semantics for function codes 0x01-0x06, 0x0F, 0x10, 0x08 and 0x2B.
//
// A function code is supported only when the bank exposes its data area
// (0x2B only with a configured identity; 0x08 always) — so a probe of a
// sensor that holds nothing but input registers reports exactly fc 0x04 and
// 0x08. Unsupported code -> exception 0x01, unconfigured address -> 0x02,
// malformed field -> 0x03.
//
// In listen-only mode the engine stays silent and inert for everything except
// a diagnostics restart, which is answered and reported as a control effect.
ExecResult execute_on_bank(const Pdu& request, RegisterBank& bank,
                           ServerMode mode = ServerMode::normal);

}  // namespace icsim::modbus
