#include "agentopt/yaml_lite.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace agentopt::cli {

namespace {

struct Line {
    int indent = 0;
    std::string content;  // comment-stripped, right-trimmed
    std::size_t number = 0;
};

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
    throw ConfigError("yaml line " + std::to_string(line) + ": " + msg);
}

std::string strip_comment(const std::string& s) {
    bool in_quotes = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '"' && (i == 0 || s[i - 1] != '\\')) in_quotes = !in_quotes;
        if (c == '#' && !in_quotes && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t'))
            return s.substr(0, i);
    }
    return s;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<Line> split_lines(const std::string& text) {
    std::vector<Line> lines;
    std::size_t start = 0, number = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string raw = text.substr(start, end - start);
        ++number;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string stripped = strip_comment(raw);
        std::string content = trim(stripped);
        if (!content.empty()) {
            int indent = 0;
            while (indent < static_cast<int>(stripped.size()) && stripped[indent] == ' ') ++indent;
            if (stripped.find('\t') < static_cast<std::size_t>(indent))
                parse_error(number, "tabs are not allowed in indentation");
            lines.push_back({indent, content, number});
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    return lines;
}

bool looks_like_int(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

bool looks_like_float(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

std::string parse_quoted(const std::string& s, std::size_t line) {
    // s starts and ends with '"'
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        char c = s[i];
        if (c == '\\') {
            ++i;
            if (i + 1 > s.size() - 1) parse_error(line, "dangling escape in string");
            switch (s[i]) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: parse_error(line, std::string("unsupported escape \\") + s[i]);
            }
        } else {
            out.push_back(c);
        }
    }
    return out;
}

YamlNode parse_scalar(const std::string& token, std::size_t line) {
    if (token.empty() || token == "~" || token == "null") return YamlNode::null();
    if (token.size() >= 2 && token.front() == '"') {
        if (token.back() != '"') parse_error(line, "unterminated string");
        return YamlNode::of_str(parse_quoted(token, line));
    }
    if (token == "true" || token == "false") return YamlNode::of_bool(token == "true");
    return YamlNode::of_raw(token);
}

// splits "a, b, c" at top-level commas (quotes respected)
std::vector<std::string> split_flow(const std::string& inner, std::size_t line) {
    std::vector<std::string> items;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        char c = inner[i];
        if (c == '"' && (i == 0 || inner[i - 1] != '\\')) in_quotes = !in_quotes;
        if (c == ',' && !in_quotes) {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (in_quotes) parse_error(line, "unterminated string in flow sequence");
    std::string last = trim(cur);
    if (!last.empty() || !items.empty()) items.push_back(last);
    return items;
}

YamlNode parse_value_token(const std::string& token, std::size_t line) {
    if (!token.empty() && token.front() == '[') {
        if (token.back() != ']') parse_error(line, "unterminated flow sequence");
        YamlNode node = YamlNode::sequence();
        for (const auto& item : split_flow(token.substr(1, token.size() - 2), line)) {
            if (item.empty()) parse_error(line, "empty item in flow sequence");
            node.seq.push_back(parse_scalar(item, line));
        }
        return node;
    }
    return parse_scalar(token, line);
}

struct Parser {
    const std::vector<Line>& lines;
    std::size_t pos = 0;

    YamlNode parse_block(int indent) {
        if (pos >= lines.size()) return YamlNode::null();
        if (lines[pos].indent != indent)
            parse_error(lines[pos].number, "unexpected indentation");
        if (lines[pos].content.rfind("- ", 0) == 0 || lines[pos].content == "-")
            return parse_sequence(indent);
        return parse_mapping(indent);
    }

    YamlNode parse_sequence(int indent) {
        YamlNode node = YamlNode::sequence();
        while (pos < lines.size() && lines[pos].indent == indent &&
               (lines[pos].content.rfind("- ", 0) == 0 || lines[pos].content == "-")) {
            const Line& line = lines[pos];
            std::string rest = line.content == "-" ? "" : trim(line.content.substr(2));
            if (rest.empty()) parse_error(line.number, "sequence items must be scalars");
            node.seq.push_back(parse_value_token(rest, line.number));
            ++pos;
        }
        if (pos < lines.size() && lines[pos].indent > indent)
            parse_error(lines[pos].number, "unexpected indentation after sequence item");
        return node;
    }

    YamlNode parse_mapping(int indent) {
        YamlNode node = YamlNode::mapping();
        while (pos < lines.size() && lines[pos].indent == indent) {
            const Line& line = lines[pos];
            if (line.content.rfind("- ", 0) == 0)
                parse_error(line.number, "mixed sequence and mapping entries");
            std::string key;
            std::string rest;
            if (!split_key(line.content, key, rest))
                parse_error(line.number, "expected 'key: value'");
            if (node.find(key)) parse_error(line.number, "duplicate key '" + key + "'");
            ++pos;
            if (!rest.empty()) {
                node.map.emplace_back(key, parse_value_token(rest, line.number));
            } else if (pos < lines.size() && lines[pos].indent > indent) {
                node.map.emplace_back(key, parse_block(lines[pos].indent));
            } else {
                node.map.emplace_back(key, YamlNode::null());
            }
        }
        if (pos < lines.size() && lines[pos].indent > indent)
            parse_error(lines[pos].number, "unexpected indentation");
        return node;
    }

    static bool split_key(const std::string& content, std::string& key, std::string& rest) {
        bool in_quotes = false;
        for (std::size_t i = 0; i < content.size(); ++i) {
            char c = content[i];
            if (c == '"' && (i == 0 || content[i - 1] != '\\')) in_quotes = !in_quotes;
            if (c == ':' && !in_quotes && (i + 1 == content.size() || content[i + 1] == ' ')) {
                key = trim(content.substr(0, i));
                rest = i + 1 < content.size() ? trim(content.substr(i + 1)) : "";
                if (key.size() >= 2 && key.front() == '"' && key.back() == '"')
                    key = parse_quoted(key, 0);
                return !key.empty();
            }
        }
        return false;
    }
};

bool plain_safe(const std::string& s) {
    if (s.empty() || s == "true" || s == "false" || s == "null" || s == "~") return false;
    if (looks_like_int(s) || looks_like_float(s)) return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '-' || c == '_' || c == '.' || c == '/' || c == ' ';
        if (!ok) return false;
    }
    return s.front() != ' ' && s.back() != ' ' && s.rfind("- ", 0) != 0;
}

std::string emit_scalar(const YamlNode& node) {
    switch (node.kind) {
        case YamlNode::Kind::Null: return "null";
        case YamlNode::Kind::Bool: return node.boolean ? "true" : "false";
        case YamlNode::Kind::Int: return std::to_string(node.integer);
        case YamlNode::Kind::Float: return node.text;  // raw text preserved
        case YamlNode::Kind::Str: {
            if (plain_safe(node.text)) return node.text;
            std::string out = "\"";
            for (char c : node.text) {
                if (c == '"' || c == '\\') out.push_back('\\');
                if (c == '\n') { out += "\\n"; continue; }
                if (c == '\t') { out += "\\t"; continue; }
                out.push_back(c);
            }
            out.push_back('"');
            return out;
        }
        default: throw ConfigError("emit_scalar on a container");
    }
}

void emit_node(const YamlNode& node, int indent, std::string& out) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (node.is_map()) {
        for (const auto& [key, value] : node.map) {
            std::string key_text = plain_safe(key) || looks_like_int(key) ? key : emit_scalar(YamlNode::of_str(key));
            if (value.is_map() || (value.is_seq() && !value.seq.empty())) {
                out += pad + key_text + ":\n";
                emit_node(value, indent + 1, out);
            } else if (value.is_seq()) {
                out += pad + key_text + ": []\n";
            } else {
                out += pad + key_text + ": " + emit_scalar(value) + "\n";
            }
        }
    } else if (node.is_seq()) {
        for (const auto& item : node.seq) {
            if (!item.is_scalar()) throw ConfigError("emit supports scalar sequence items only");
            out += pad + "- " + emit_scalar(item) + "\n";
        }
    } else {
        out += pad + emit_scalar(node) + "\n";
    }
}

}  // namespace

YamlNode YamlNode::of_bool(bool v) {
    YamlNode n;
    n.kind = Kind::Bool;
    n.boolean = v;
    return n;
}

YamlNode YamlNode::of_int(std::int64_t v) {
    YamlNode n;
    n.kind = Kind::Int;
    n.integer = v;
    n.text = std::to_string(v);
    return n;
}

YamlNode YamlNode::of_raw(const std::string& raw) {
    YamlNode n;
    n.text = raw;
    if (looks_like_int(raw)) {
        n.kind = Kind::Int;
        n.integer = std::strtoll(raw.c_str(), nullptr, 10);
    } else if (looks_like_float(raw)) {
        n.kind = Kind::Float;
        n.real = std::strtod(raw.c_str(), nullptr);
    } else {
        n.kind = Kind::Str;
    }
    return n;
}

YamlNode YamlNode::of_str(std::string v) {
    YamlNode n;
    n.kind = Kind::Str;
    n.text = std::move(v);
    return n;
}

const YamlNode* YamlNode::find(const std::string& key) const {
    for (const auto& [k, v] : map)
        if (k == key) return &v;
    return nullptr;
}

YamlNode& YamlNode::set(const std::string& key, YamlNode value) {
    for (auto& [k, v] : map) {
        if (k == key) {
            v = std::move(value);
            return v;
        }
    }
    map.emplace_back(key, std::move(value));
    return map.back().second;
}

std::string YamlNode::as_string(const std::string& where) const {
    if (kind == Kind::Str) return text;
    if (kind == Kind::Int || kind == Kind::Float) return text;
    throw ConfigError(where + ": expected a string");
}

std::int64_t YamlNode::as_int(const std::string& where) const {
    if (kind == Kind::Int) return integer;
    throw ConfigError(where + ": expected an integer");
}

double YamlNode::as_double(const std::string& where) const {
    if (kind == Kind::Int) return static_cast<double>(integer);
    if (kind == Kind::Float) return real;
    throw ConfigError(where + ": expected a number");
}

bool YamlNode::as_bool(const std::string& where) const {
    if (kind == Kind::Bool) return boolean;
    throw ConfigError(where + ": expected true or false");
}

std::string YamlNode::raw_scalar(const std::string& where) const {
    if (kind == Kind::Int || kind == Kind::Float || kind == Kind::Str) return text;
    throw ConfigError(where + ": expected a scalar");
}

YamlNode yaml_parse(const std::string& text) {
    auto lines = split_lines(text);
    if (lines.empty()) return YamlNode::mapping();
    Parser parser{lines};
    YamlNode root = parser.parse_block(lines.front().indent);
    if (parser.pos != lines.size())
        parse_error(lines[parser.pos].number, "trailing content");
    return root;
}

std::string yaml_emit(const YamlNode& node) {
    std::string out;
    emit_node(node, 0, out);
    return out;
}

}  // namespace agentopt::cli
