#include "kvmix/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace kvmix::toml {

namespace {

[[noreturn]] void fail(int line, const std::string& message) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + message);
}

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_ws_inline() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
};

void skip_to_eol(Cursor& c) {
    c.skip_ws_inline();
    if (c.done()) return;
    if (c.peek() == '#') {
        while (!c.done() && c.peek() != '\n') ++c.pos;
    }
    if (!c.done()) {
        if (c.peek() != '\n') fail(c.line, "unexpected trailing characters");
        c.take();
    }
}

std::string parse_bare_key(Cursor& c) {
    std::string key;
    while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '_' || c.peek() == '-'))
        key.push_back(c.take());
    if (key.empty()) fail(c.line, "expected a key");
    return key;
}

std::vector<std::string> parse_dotted_name(Cursor& c) {
    std::vector<std::string> parts;
    parts.push_back(parse_bare_key(c));
    while (!c.done() && c.peek() == '.') {
        c.take();
        parts.push_back(parse_bare_key(c));
    }
    return parts;
}

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
    Value v;
    v.kind = Value::Kind::Array;
    v.line = c.line;
    c.take(); // '['
    for (;;) {
        // arrays may span lines
        while (!c.done()) {
            c.skip_ws_inline();
            if (c.done()) break;
            if (c.peek() == '\n') {
                c.take();
                continue;
            }
            if (c.peek() == '#') {
                while (!c.done() && c.peek() != '\n') ++c.pos;
                continue;
            }
            break;
        }
        if (c.done()) fail(c.line, "unterminated array");
        if (c.peek() == ']') {
            c.take();
            return v;
        }
        v.array.push_back(parse_value(c));
        while (!c.done()) {
            c.skip_ws_inline();
            if (!c.done() && c.peek() == '\n') {
                c.take();
                continue;
            }
            if (!c.done() && c.peek() == '#') {
                while (!c.done() && c.peek() != '\n') ++c.pos;
                continue;
            }
            break;
        }
        if (c.done()) fail(c.line, "unterminated array");
        if (c.peek() == ',') {
            c.take();
            continue;
        }
        if (c.peek() == ']') {
            c.take();
            return v;
        }
        fail(c.line, "expected ',' or ']' in array");
    }
}

Value parse_string(Cursor& c) {
    Value v;
    v.kind = Value::Kind::String;
    v.line = c.line;
    c.take(); // '"'
    while (!c.done() && c.peek() != '"') {
        char ch = c.take();
        if (ch == '\n') fail(c.line - 1, "unterminated string");
        if (ch == '\\') {
            if (c.done()) fail(c.line, "unterminated escape");
            char esc = c.take();
            switch (esc) {
                case 'n': v.str.push_back('\n'); break;
                case 't': v.str.push_back('\t'); break;
                case '"': v.str.push_back('"'); break;
                case '\\': v.str.push_back('\\'); break;
                default: fail(c.line, "unsupported escape sequence");
            }
        } else {
            v.str.push_back(ch);
        }
    }
    if (c.done()) fail(c.line, "unterminated string");
    c.take(); // closing quote
    return v;
}

Value parse_scalar(Cursor& c) {
    Value v;
    v.line = c.line;
    std::string token;
    while (!c.done()) {
        char ch = c.peek();
        if (ch == ',' || ch == ']' || ch == '\n' || ch == ' ' || ch == '\t' || ch == '#') break;
        token.push_back(c.take());
    }
    if (token.empty()) fail(c.line, "expected a value");
    if (token == "true" || token == "false") {
        v.kind = Value::Kind::Bool;
        v.boolean = token == "true";
        return v;
    }
    const bool looks_float = token.find_first_of(".eE") != std::string::npos ||
                             token == "inf" || token == "-inf" || token == "nan";
    if (!looks_float) {
        long long parsed = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), parsed);
        if (ec == std::errc() && ptr == token.data() + token.size()) {
            v.kind = Value::Kind::Integer;
            v.integer = parsed;
            v.number = double(parsed);
            return v;
        }
    }
    try {
        std::size_t used = 0;
        v.number = std::stod(token, &used);
        if (used != token.size()) fail(v.line, "malformed number '" + token + "'");
    } catch (const std::exception&) {
        fail(v.line, "malformed value '" + token + "'");
    }
    v.kind = Value::Kind::Float;
    return v;
}

Value parse_value(Cursor& c) {
    c.skip_ws_inline();
    if (c.done()) fail(c.line, "expected a value");
    if (c.peek() == '[') return parse_array(c);
    if (c.peek() == '"') return parse_string(c);
    return parse_scalar(c);
}

Value* descend(Value& root, const std::vector<std::string>& parts, int line, bool array_of_tables) {
    Value* node = &root;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const bool last = i + 1 == parts.size();
        Value& slot = node->table[parts[i]];
        if (slot.kind == Value::Kind::None) {
            slot.kind = (last && array_of_tables) ? Value::Kind::Array : Value::Kind::Table;
            slot.line = line;
        }
        if (last && array_of_tables) {
            if (!slot.is_array()) fail(line, "'" + parts[i] + "' is not an array of tables");
            Value entry;
            entry.kind = Value::Kind::Table;
            entry.line = line;
            slot.array.push_back(std::move(entry));
            return &slot.array.back();
        }
        if (slot.is_array()) {
            if (slot.array.empty() || !slot.array.back().is_table())
                fail(line, "'" + parts[i] + "' is not a table");
            node = &slot.array.back();
        } else if (slot.is_table()) {
            node = &slot;
        } else {
            fail(line, "'" + parts[i] + "' is not a table");
        }
    }
    return node;
}

} // namespace

const Value* Value::find(const std::string& key) const {
    if (!is_table()) return nullptr;
    auto it = table.find(key);
    return it == table.end() ? nullptr : &it->second;
}

const Value& Value::get(const std::string& key) const {
    const Value* v = find(key);
    if (!v) fail(line, "missing required key '" + key + "'");
    return *v;
}

std::string Value::as_string() const {
    if (kind != Kind::String) fail(line, "expected a string");
    return str;
}

bool Value::as_bool() const {
    if (kind != Kind::Bool) fail(line, "expected a boolean");
    return boolean;
}

long long Value::as_int() const {
    if (kind != Kind::Integer) fail(line, "expected an integer");
    return integer;
}

double Value::as_double() const {
    if (kind != Kind::Float && kind != Kind::Integer) fail(line, "expected a number");
    return number;
}

Value parse(const std::string& text) {
    Value root;
    root.kind = Value::Kind::Table;
    root.line = 1;
    Cursor c{text};
    Value* current = &root;
    while (!c.done()) {
        c.skip_ws_inline();
        if (c.done()) break;
        char ch = c.peek();
        if (ch == '\n') {
            c.take();
            continue;
        }
        if (ch == '#') {
            while (!c.done() && c.peek() != '\n') ++c.pos;
            continue;
        }
        if (ch == '[') {
            const int line = c.line;
            c.take();
            bool array_of_tables = false;
            if (!c.done() && c.peek() == '[') {
                array_of_tables = true;
                c.take();
            }
            c.skip_ws_inline();
            std::vector<std::string> name = parse_dotted_name(c);
            c.skip_ws_inline();
            if (c.done() || c.take() != ']') fail(line, "expected ']' in table header");
            if (array_of_tables && (c.done() || c.take() != ']'))
                fail(line, "expected ']]' in array-of-tables header");
            current = descend(root, name, line, array_of_tables);
            skip_to_eol(c);
            continue;
        }
        const int line = c.line;
        std::string key = parse_bare_key(c);
        c.skip_ws_inline();
        if (c.done() || c.take() != '=') fail(line, "expected '=' after key '" + key + "'");
        Value value = parse_value(c);
        value.line = line;
        if (current->table.count(key)) fail(line, "duplicate key '" + key + "'");
        current->table[key] = std::move(value);
        skip_to_eol(c);
    }
    return root;
}

Value parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

} // namespace kvmix::toml
