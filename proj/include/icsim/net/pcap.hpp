#pragma once

#include <string>
#include <vector>

#include "icsim/net/capture.hpp"

namespace icsim::net {

// Writes TCP-transport capture events as a classic pcap file with synthetic
// Ethernet/IPv4/TCP headers rebuilt from the endpoint labels, so standard
// network analyzers can open campaign traffic. Modbus exchanges become
// PSH/ACK segments carrying the ADU; connection events become bare SYNs.
// Serial traffic has no IP framing and stays in the capture journal, which
// remains the normative record.
//
// Returns the number of packets written.
std::size_t write_pcap_file(const std::string& path,
                            const std::vector<CapturedPacket>& packets);

}  // namespace icsim::net
