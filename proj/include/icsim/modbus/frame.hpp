#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "icsim/modbus/pdu.hpp"

namespace icsim::modbus {

// Serial framing: address | function code | data | crc_lo | crc_hi.
struct RtuAdu {
    std::uint8_t address = 0;
    Pdu pdu;

    bool operator==(const RtuAdu&) const = default;
};

// TCP framing: 7-byte MBAP header (txid, protocol=0, length, unit) + PDU.
// The length field is derived on encode; there is no CRC, integrity is
// delegated to the transport.
struct TcpAdu {
    std::uint16_t transaction_id = 0;
    std::uint16_t protocol_id = 0;
    std::uint8_t unit_id = 0;
    Pdu pdu;

    bool operator==(const TcpAdu&) const = default;
};

inline constexpr std::size_t mbap_header_bytes = 7;
inline constexpr std::size_t min_rtu_frame_bytes = 4;
inline constexpr std::size_t min_tcp_frame_bytes = 8;

std::vector<std::uint8_t> encode_rtu(std::uint8_t address, const Pdu& pdu);
RtuAdu decode_rtu(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_tcp(const TcpAdu& adu);
TcpAdu decode_tcp(std::span<const std::uint8_t> bytes);

// Big-endian word helpers shared by the codec and the server engine.
inline std::uint16_t get_u16(std::span<const std::uint8_t> bytes, std::size_t offset) {
    return static_cast<std::uint16_t>((bytes[offset] << 8) | bytes[offset + 1]);
}

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t value) {
    out.push_back(static_cast<std::uint8_t>(value >> 8));
    out.push_back(static_cast<std::uint8_t>(value & 0xFF));
}

}  // namespace icsim::modbus
