#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agentopt/errors.hpp"

namespace agentopt::cli {

// The YAML subset used by run configs and exports: block mappings with
// 2-space indentation, block sequences of scalars, flow sequences
// [a, b], double-quoted or plain scalars, and # comments. Scalars keep
// their raw text so decimal fields can be parsed exactly downstream.
class YamlNode {
public:
    enum class Kind { Null, Bool, Int, Float, Str, Seq, Map };

    Kind kind = Kind::Null;
    bool boolean = false;
    std::int64_t integer = 0;
    double real = 0.0;
    std::string text;  // string value or raw scalar text
    std::vector<YamlNode> seq;
    std::vector<std::pair<std::string, YamlNode>> map;  // insertion order

    static YamlNode null() { return YamlNode(); }
    static YamlNode of_bool(bool v);
    static YamlNode of_int(std::int64_t v);
    static YamlNode of_raw(const std::string& raw);  // re-detects the scalar kind
    static YamlNode of_str(std::string v);
    static YamlNode sequence() { YamlNode n; n.kind = Kind::Seq; return n; }
    static YamlNode mapping() { YamlNode n; n.kind = Kind::Map; return n; }

    bool is_map() const { return kind == Kind::Map; }
    bool is_seq() const { return kind == Kind::Seq; }
    bool is_scalar() const { return !is_map() && !is_seq(); }

    const YamlNode* find(const std::string& key) const;
    YamlNode& set(const std::string& key, YamlNode value);

    // checked accessors; `where` names the field in error messages
    std::string as_string(const std::string& where) const;
    std::int64_t as_int(const std::string& where) const;
    double as_double(const std::string& where) const;
    bool as_bool(const std::string& where) const;
    // raw scalar text (for exact decimal parsing)
    std::string raw_scalar(const std::string& where) const;
};

YamlNode yaml_parse(const std::string& text);
std::string yaml_emit(const YamlNode& node);

}  // namespace agentopt::cli
