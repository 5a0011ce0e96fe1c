// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "remat/errors.hpp"
#include "remat/policy_table.hpp"

namespace remat {

/// Current policy document format.
inline constexpr int kPolicyFormatVersion = 1;

namespace detail {

template <class T, class Encode>
void write_table(std::string& out, const char* name, const Grid<T>& g, Encode encode, bool last) {
    out += "  \"";
    out += name;
    out += "\": [\n";
    for (int t = 0; t <= g.t_max(); ++t) {
        out += "    [";
        for (int m = 0; m <= g.m_max(); ++m) {
            if (m) out += ", ";
            out += std::to_string(encode(g(t, m)));
        }
        out += t == g.t_max() ? "]\n" : "],\n";
    }
    out += last ? "  ]\n" : "  ],\n";
}

inline const nlohmann::json& require(const nlohmann::json& doc, const char* field) {
    auto it = doc.find(field);
    if (it == doc.end()) throw ParseError(field, "missing");
    return *it;
}

inline int require_int(const nlohmann::json& doc, const char* field) {
    const auto& v = require(doc, field);
    if (!v.is_number_integer()) throw ParseError(field, "expected an integer");
    return v.get<int>();
}

template <class T, class Decode>
Grid<T> read_table(const nlohmann::json& doc, const char* field, int t_max, int m_max,
                   Decode decode) {
    const auto& rows = require(doc, field);
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(t_max) + 1) {
        throw ParseError(field, "expected " + std::to_string(t_max + 1) + " rows");
    }
    Grid<T> g(t_max, m_max);
    for (int t = 0; t <= t_max; ++t) {
        const auto& row = rows[t];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(m_max) + 1) {
            throw ParseError(field, "row " + std::to_string(t) + " must have " +
                                        std::to_string(m_max + 1) + " entries");
        }
        for (int m = 0; m <= m_max; ++m) {
            if (!row[m].is_number_integer()) {
                throw ParseError(field, "non-integer entry in row " + std::to_string(t));
            }
            g(t, m) = decode(row[m].get<std::int64_t>(), field);
        }
    }
    return g;
}

}  // namespace detail

/// Structured text (JSON) document, one table row per line, rows indexed
/// by t in [0, t_max] and columns by m in [0, m_max]; -1 encodes infinity.
inline std::string serialize_policy(const PolicyTable& p) {
    const auto& tb = p.tables();
    std::string out = "{\n";
    out += "  \"version\": " + std::to_string(kPolicyFormatVersion) + ",\n";
    out += "  \"algorithm\": \"" + std::string(to_string(p.algorithm())) + "\",\n";
    out += "  \"t_max\": " + std::to_string(p.t_max()) + ",\n";
    out += "  \"m_max\": " + std::to_string(p.m_max()) + ",\n";
    if (const auto& cm = p.cost_model()) {
        out += "  \"alpha\": " + std::to_string(cm->alpha) + ",\n";
        out += "  \"beta\": " + std::to_string(cm->beta) + ",\n";
    } else {
        out += "  \"alpha\": null,\n  \"beta\": null,\n";
    }
    const bool mixed = is_mixed(p.algorithm());
    auto as_int = [](int v) { return static_cast<std::int64_t>(v); };
    detail::write_table(out, "cost", tb.cost, [](Cost c) { return c.encoded(); }, false);
    detail::write_table(out, "split", tb.split, as_int, !mixed);
    if (mixed) {
        detail::write_table(out, "split_hidden", tb.split_hidden, as_int, false);
        detail::write_table(out, "split_internal", tb.split_internal, as_int, false);
        detail::write_table(out, "kind", tb.kind,
                            [](PushKind k) { return static_cast<std::int64_t>(k); }, true);
    }
    out += "}\n";
    return out;
}

/// Parses and validates a policy document.
///
/// Throws ParseError for malformed input (naming the field) and
/// ValidationError when the tables break an invariant.
inline PolicyTable deserialize_policy(std::string_view data) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(data.begin(), data.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("document", e.what());
    }
    if (!doc.is_object()) throw ParseError("document", "expected an object");

    if (detail::require_int(doc, "version") != kPolicyFormatVersion) {
        throw ParseError("version", "unsupported format version");
    }
    const auto& alg_field = detail::require(doc, "algorithm");
    if (!alg_field.is_string()) throw ParseError("algorithm", "expected a string");
    const Algorithm alg = parse_algorithm(alg_field.get<std::string>());
    const int t_max = detail::require_int(doc, "t_max");
    const int m_max = detail::require_int(doc, "m_max");
    if (t_max < 1) throw ParseError("t_max", "must be >= 1");
    if (m_max < 1) throw ParseError("m_max", "must be >= 1");

    std::optional<CostModel> model;
    if (is_mixed(alg)) {
        model = CostModel{detail::require_int(doc, "alpha"), detail::require_int(doc, "beta"), 2.0};
    } else {
        for (const char* f : {"alpha", "beta"}) {
            if (!detail::require(doc, f).is_null()) throw ParseError(f, "must be null for HSM/ISM");
        }
    }

    auto decode_cost = [](std::int64_t v, const char* field) {
        if (v < -1) throw ParseError(field, "negative cost");
        return Cost::decode(v);
    };
    auto decode_int = [](std::int64_t v, const char* field) {
        if (v < 0 || v > INT32_MAX) throw ParseError(field, "split out of range");
        return static_cast<int>(v);
    };
    auto decode_kind = [](std::int64_t v, const char* field) {
        if (v != 0 && v != 1) throw ParseError(field, "kind must be 0 (hidden) or 1 (internal)");
        return static_cast<PushKind>(v);
    };

    PolicyTable::Tables tb;
    tb.cost = detail::read_table<Cost>(doc, "cost", t_max, m_max, decode_cost);
    tb.split = detail::read_table<int>(doc, "split", t_max, m_max, decode_int);
    if (is_mixed(alg)) {
        tb.split_hidden = detail::read_table<int>(doc, "split_hidden", t_max, m_max, decode_int);
        tb.split_internal = detail::read_table<int>(doc, "split_internal", t_max, m_max, decode_int);
        tb.kind = detail::read_table<PushKind>(doc, "kind", t_max, m_max, decode_kind);
    }
    return PolicyTable(alg, t_max, m_max, model, std::move(tb));
}

}  // namespace remat
