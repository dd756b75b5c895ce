#pragma once

#include <cstdint>
#include <span>

namespace icsim::modbus {

// CRC-16/MODBUS: init 0xFFFF, reflected polynomial 0xA001.
// Serialization puts the low byte on the wire first.
std::uint16_t crc16(std::span<const std::uint8_t> bytes);

}  // namespace icsim::modbus
