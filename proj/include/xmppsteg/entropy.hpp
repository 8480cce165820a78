#pragma once

// Byte-level statistics in the style of the `ent` test battery, and a
// comparator for clean versus stego sessions.
//
// The battery runs over serialized transcript bytes, which is what a warden
// recording the wire would see.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xmppsteg/transcript.hpp"

namespace xmppsteg {

struct EntReport {
    double entropy_bits_per_byte = 0;
    double chi_square = 0;
    double chi_square_p = 0;   // upper tail, 255 degrees of freedom
    double arithmetic_mean = 0;
    double monte_carlo_pi = 0; // 0 when fewer than six bytes
    double serial_correlation = 0; // 0 when undefined (constant input)
    std::size_t byte_count = 0;
};

/// Throws EmptyInput.
EntReport ent_battery(std::string_view data);

/// Field-wise variant minus control.
struct EntDelta {
    double entropy_bits_per_byte = 0;
    double chi_square = 0;
    double chi_square_p = 0;
    double arithmetic_mean = 0;
    double monte_carlo_pi = 0;
    double serial_correlation = 0;
    std::int64_t byte_count = 0;
};

EntDelta operator-(const EntReport& variant, const EntReport& control);

struct EntropyComparison {
    struct Variant {
        std::string name;
        EntReport report;
        EntDelta difference;
    };
    EntReport control;
    std::vector<Variant> variants;  // in the order given
};

EntropyComparison compare_bytes(std::string_view control, const std::vector<std::pair<std::string, std::string>>& variants);
EntropyComparison compare_sessions(const SessionTranscript& control,
                                   const std::vector<std::pair<std::string, SessionTranscript>>& variants);

/// Channel / Entropy / Difference table with six decimals.
std::string format_entropy_table(const EntropyComparison& cmp);
nlohmann::json to_json(const EntReport& r);
nlohmann::json to_json(const EntropyComparison& cmp);

}  // namespace xmppsteg
