#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace icsim::modbus {

// A PDU is the function code plus its data payload. The data field is capped
// at 252 bytes so the serial ADU (address + fc + data + crc) stays within the
// 256-byte Modbus frame limit.
inline constexpr std::size_t max_pdu_data_bytes = 252;

inline constexpr std::uint8_t exception_flag = 0x80;

inline constexpr std::uint8_t broadcast_address = 0;
inline constexpr std::uint8_t max_unit_address = 247;

enum class FunctionCode : std::uint8_t {
    read_coils = 0x01,
    read_discrete_inputs = 0x02,
    read_holding_registers = 0x03,
    read_input_registers = 0x04,
    write_single_coil = 0x05,
    write_single_register = 0x06,
    diagnostics = 0x08,
    write_multiple_coils = 0x0f,
    write_multiple_registers = 0x10,
    read_device_identification = 0x2b,
};

enum class ExceptionCode : std::uint8_t {
    illegal_function = 0x01,
    illegal_data_address = 0x02,
    illegal_data_value = 0x03,
};

// Diagnostics (0x08) sub-functions the server acts on.
inline constexpr std::uint16_t diag_restart_communications = 0x0001;
inline constexpr std::uint16_t diag_force_listen_only = 0x0004;

struct Pdu {
    std::uint8_t function_code = 0;
    std::vector<std::uint8_t> data;

    bool is_exception() const { return (function_code & exception_flag) != 0; }

    // Exception responses carry exactly one data byte: the exception code.
    std::uint8_t exception_code() const { return data.empty() ? 0 : data[0]; }

    bool operator==(const Pdu&) const = default;
};

Pdu make_exception(std::uint8_t request_fc, ExceptionCode code);

// Codec failures. Protocol-level errors (illegal function, illegal address)
// are not C++ errors; they travel in-band as exception-response PDUs.
class CodecError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class AddressOutOfRange : public CodecError {
  public:
    using CodecError::CodecError;
};
class PduTooLong : public CodecError {
  public:
    using CodecError::CodecError;
};
class FrameTooShort : public CodecError {
  public:
    using CodecError::CodecError;
};
class CrcMismatch : public CodecError {
  public:
    using CodecError::CodecError;
};
class ProtocolIdNonZero : public CodecError {
  public:
    using CodecError::CodecError;
};
class LengthMismatch : public CodecError {
  public:
    using CodecError::CodecError;
};

}  // namespace icsim::modbus
