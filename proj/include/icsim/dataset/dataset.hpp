#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "icsim/attacks/campaign.hpp"
#include "icsim/net/capture.hpp"

namespace icsim::dataset {

// One labeled record; columns in this order:
//   time,src_mac,dest_mac,src_ip,dest_ip,protocol,length,unit_id,func_code,
//   data,attack_specific,attack_category,attack_binary
struct DatasetRow {
    double time = 0.0;
    std::string src_mac;
    std::string dest_mac;
    std::string src_ip;
    std::string dest_ip;
    std::string protocol;  // "Modbus/TCP", "Modbus RTU", or "TCP" (connection events)
    std::uint32_t length = 0;  // Modbus ADU byte length (0 for connection events)
    std::optional<int> unit_id;
    std::optional<int> func_code;
    std::string data;  // hex of the PDU data field; sentinel on parse failure
    std::string attack_specific;
    std::string attack_category;
    int attack_binary = 0;

    // Labeling inputs carried off-schema.
    std::string origin_device;
    std::string cause_device;
};

inline constexpr const char* csv_header =
    "time,src_mac,dest_mac,src_ip,dest_ip,protocol,length,unit_id,func_code,data,"
    "attack_specific,attack_category,attack_binary";

inline constexpr const char* parse_failure_sentinel = "!decode_error";

// One row per captured packet, unlabeled. Undecodable ADUs keep their row
// with the sentinel in the data field.
std::vector<DatasetRow> extract_rows(const std::vector<net::CapturedPacket>& capture);

struct LabelStats {
    std::uint64_t malicious = 0;
    std::uint64_t unattributed = 0;    // attacker packets outside any log interval
    std::uint64_t parse_failures = 0;
};

// A row is malicious iff its origin is an attacker identity; the specific
// attack and category come from the campaign-log interval covering its
// timestamp. With label_responses (the default), responses elicited by
// attacker requests inherit the request's labels.
LabelStats label_rows(std::vector<DatasetRow>& rows,
                      const std::vector<attacks::CampaignEntry>& campaign_log,
                      const std::set<std::string>& attacker_names,
                      bool label_responses = true);

void write_csv(std::ostream& out, const std::vector<DatasetRow>& rows);
void write_csv_file(const std::string& path, const std::vector<DatasetRow>& rows);

std::string qa_report(const LabelStats& stats, std::size_t row_count);

}  // namespace icsim::dataset
