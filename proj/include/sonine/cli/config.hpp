#ifndef SONINE_CLI_CONFIG_HPP
#define SONINE_CLI_CONFIG_HPP

// A small TOML subset read into a JSON tree:
//   key = value            strings, integers, floats (inf/nan), booleans, arrays
//   [table] / [a.b]        tables, dotted names nest
//   # comment
// Duplicate keys and redefined tables are errors; every error carries the
// line number.

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sonine/errors.hpp"

namespace sonine::cli {

using json = nlohmann::json;

class ParseError : public ConfigurationError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : ConfigurationError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

class Parser {
public:
    Parser(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

    json parse() {
        json root = json::object();
        json* table = &root;
        std::vector<std::string> defined;
        while (pos_ < text_.size()) {
            skip_blank();
            if (pos_ >= text_.size()) break;
            const char c = text_[pos_];
            if (c == '\n') { ++pos_; ++line_; continue; }
            if (c == '#') { skip_comment(); continue; }
            if (c == '[') {
                ++pos_;
                if (peek() == '[') fail("arrays of tables are not supported");
                const auto path = parse_key_path(']');
                expect(']');
                std::string joined;
                for (const auto& p : path) joined += (joined.empty() ? "" : ".") + p;
                for (const auto& d : defined)
                    if (d == joined) fail("table [" + joined + "] defined twice");
                defined.push_back(joined);
                table = &root;
                for (const auto& p : path) {
                    auto& next = (*table)[p];
                    if (next.is_null()) next = json::object();
                    if (!next.is_object()) fail("'" + p + "' is not a table");
                    table = &next;
                }
                end_of_line();
                continue;
            }
            const auto path = parse_key_path('=');
            skip_blank();
            expect('=');
            skip_blank();
            json value = parse_value();
            json* target = table;
            for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                auto& next = (*target)[path[i]];
                if (next.is_null()) next = json::object();
                if (!next.is_object()) fail("'" + path[i] + "' is not a table");
                target = &next;
            }
            if (target->contains(path.back())) fail("duplicate key '" + path.back() + "'");
            (*target)[path.back()] = std::move(value);
            end_of_line();
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
    }

    void skip_comment() {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }

    // Skips whitespace, comments and newlines inside arrays.
    void skip_space_multiline() {
        for (;;) {
            skip_blank();
            if (peek() == '#') skip_comment();
            if (peek() == '\n') { ++pos_; ++line_; continue; }
            return;
        }
    }

    void end_of_line() {
        skip_blank();
        if (peek() == '#') skip_comment();
        if (pos_ < text_.size()) {
            if (text_[pos_] != '\n') fail("unexpected text after value");
            ++pos_;
            ++line_;
        }
    }

    static bool bare_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    std::vector<std::string> parse_key_path(char terminator) {
        std::vector<std::string> parts;
        for (;;) {
            skip_blank();
            std::string part;
            if (peek() == '"') {
                part = parse_string();
            } else {
                while (bare_char(peek())) part += text_[pos_++];
            }
            if (part.empty()) fail("expected a key");
            parts.push_back(part);
            skip_blank();
            if (peek() == '.') { ++pos_; continue; }
            if (peek() != terminator) fail(std::string("expected '") + terminator + "' after key");
            return parts;
        }
    }

    std::string parse_string() {
        expect('"');
        std::string out;
        for (;;) {
            if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated string");
            const char c = text_[pos_++];
            if (c == '"') return out;
            if (c != '\\') { out += c; continue; }
            if (pos_ >= text_.size()) fail("unterminated escape");
            const char e = text_[pos_++];
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(std::string("unsupported escape '\\") + e + "'");
            }
        }
    }

    json parse_value() {
        const char c = peek();
        if (c == '"') return parse_string();
        if (c == '[') {
            ++pos_;
            json arr = json::array();
            skip_space_multiline();
            if (peek() == ']') { ++pos_; return arr; }
            for (;;) {
                arr.push_back(parse_value());
                skip_space_multiline();
                if (peek() == ',') {
                    ++pos_;
                    skip_space_multiline();
                    if (peek() == ']') { ++pos_; return arr; }
                    continue;
                }
                expect(']');
                return arr;
            }
        }
        std::string tok;
        while (pos_ < text_.size() && (bare_char(text_[pos_]) || text_[pos_] == '.' || text_[pos_] == '+'))
            tok += text_[pos_++];
        if (tok.empty()) fail("expected a value");
        if (tok == "true") return true;
        if (tok == "false") return false;
        return parse_number(tok);
    }

    json parse_number(std::string tok) {
        std::string clean;
        for (char c : tok)
            if (c != '_') clean += c;
        const bool neg = !clean.empty() && clean[0] == '-';
        const std::string body = (!clean.empty() && (clean[0] == '-' || clean[0] == '+')) ? clean.substr(1) : clean;
        if (body == "inf") return neg ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
        const bool is_float = clean.find_first_of(".eE") != std::string::npos;
        const char* first = clean.data() + (clean[0] == '+' ? 1 : 0);
        const char* last = clean.data() + clean.size();
        if (is_float) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || p != last) fail("malformed number '" + tok + "'");
            return v;
        }
        long long v = 0;
        auto [p, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || p != last) fail("malformed value '" + tok + "'");
        return v;
    }

    std::string_view text_;
    std::string source_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

}  // namespace detail

inline json parse_config(std::string_view text, const std::string& source = "<config>") {
    return detail::Parser(text, source).parse();
}

inline json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace sonine::cli

#endif  // SONINE_CLI_CONFIG_HPP
