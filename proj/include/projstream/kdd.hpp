#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "projstream/types.hpp"

namespace projstream {
namespace kdd {

// Connection-record schema. The canonical layout carries 42 attributes plus
// a trailing class label; the 41-attribute variant distributed with the
// original corrected dataset is accepted as well. In both layouts the seven
// symbolic attributes sit at the same 0-based positions and everything else
// parses as a finite real:
//
//   1 protocol_type   2 service   3 flag   6 land
//  11 logged_in      20 is_host_login     21 is_guest_login
//
// Continuous positions, 42-attribute layout (35 columns):
//   0, 4, 5, 7, 8, 9, 10, 12..19, 22..41
inline constexpr std::array<std::size_t, 7> kSymbolicColumns = {1, 2, 3, 6, 11, 20, 21};

bool is_symbolic_column(std::size_t attr_index);

/// Continuous attribute positions for a record with `num_attributes`
/// attributes (42 -> 35 positions, 41 -> 34).
std::vector<std::size_t> continuous_columns(std::size_t num_attributes);

struct RawRecord {
    std::vector<std::string> fields;  // attribute strings, label excluded
    std::string label;                // trailing class tag, e.g. "smurf."
};

struct ParseError {
    std::uint64_t line_no = 0;
    std::string reason;
};

/// Splits a comma-separated record line. Returns the error instead of the
/// record when the field count is off or a continuous column does not
/// parse as a finite real.
std::optional<RawRecord> parse_kdd_record(std::string_view line, std::uint64_t line_no,
                                          ParseError* error = nullptr);

/// Continuous attribute values of a parsed record, in schema order.
Vec continuous_values(const RawRecord& record);

/// Per-dimension min-max scaler fitted on the initialization prefix.
/// apply() maps x to (x-min)/(max-min) clamped to [0,1]; dimensions that
/// were constant in the prefix map to 0.
class Normalizer {
public:
    static Normalizer fit(const std::vector<Vec>& rows);
    static Normalizer identity(std::size_t dim);

    Vec apply(const Vec& raw) const;
    std::size_t dim() const { return min_.size(); }

    const Vec& minimums() const { return min_; }
    const Vec& maximums() const { return max_; }

private:
    Vec min_;
    Vec max_;
};

}  // namespace kdd
}  // namespace projstream
