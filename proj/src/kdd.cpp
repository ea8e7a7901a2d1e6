#include "projstream/kdd.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace projstream {
namespace kdd {

bool is_symbolic_column(std::size_t attr_index) {
    return std::find(kSymbolicColumns.begin(), kSymbolicColumns.end(), attr_index) !=
           kSymbolicColumns.end();
}

std::vector<std::size_t> continuous_columns(std::size_t num_attributes) {
    std::vector<std::size_t> cols;
    cols.reserve(num_attributes - kSymbolicColumns.size());
    for (std::size_t i = 0; i < num_attributes; ++i)
        if (!is_symbolic_column(i)) cols.push_back(i);
    return cols;
}

namespace {

bool parse_real(std::string_view text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

}  // namespace

std::optional<RawRecord> parse_kdd_record(std::string_view line, std::uint64_t line_no,
                                          ParseError* error) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }

    if (fields.size() != 43 && fields.size() != 42) {
        if (error)
            *error = {line_no, "expected 42 or 41 attributes plus label, got " +
                                   std::to_string(fields.size()) + " fields"};
        return std::nullopt;
    }

    RawRecord rec;
    rec.label = std::move(fields.back());
    fields.pop_back();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (is_symbolic_column(i)) continue;
        double v;
        if (!parse_real(fields[i], v)) {
            if (error)
                *error = {line_no,
                          "attribute " + std::to_string(i) + " is not a finite real: '" +
                              fields[i] + "'"};
            return std::nullopt;
        }
    }
    rec.fields = std::move(fields);
    return rec;
}

Vec continuous_values(const RawRecord& record) {
    Vec out;
    out.reserve(record.fields.size() - kSymbolicColumns.size());
    for (std::size_t i = 0; i < record.fields.size(); ++i) {
        if (is_symbolic_column(i)) continue;
        double v = 0.0;
        parse_real(record.fields[i], v);
        out.push_back(v);
    }
    return out;
}

Normalizer Normalizer::fit(const std::vector<Vec>& rows) {
    if (rows.empty()) throw std::invalid_argument("Normalizer::fit: empty buffer");
    Normalizer n;
    n.min_ = rows.front();
    n.max_ = rows.front();
    for (const Vec& row : rows) {
        detail::require_dim(row.size(), n.min_.size(), "Normalizer::fit");
        for (std::size_t j = 0; j < row.size(); ++j) {
            n.min_[j] = std::min(n.min_[j], row[j]);
            n.max_[j] = std::max(n.max_[j], row[j]);
        }
    }
    return n;
}

Normalizer Normalizer::identity(std::size_t dim) {
    Normalizer n;
    n.min_.assign(dim, 0.0);
    n.max_.assign(dim, 1.0);
    return n;
}

Vec Normalizer::apply(const Vec& raw) const {
    detail::require_dim(raw.size(), min_.size(), "Normalizer::apply");
    Vec out(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) {
        const double range = max_[j] - min_[j];
        if (range <= 0.0) {
            out[j] = 0.0;
            continue;
        }
        out[j] = std::clamp((raw[j] - min_[j]) / range, 0.0, 1.0);
    }
    return out;
}

}  // namespace kdd
}  // namespace projstream
