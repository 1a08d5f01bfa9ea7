#pragma once

#include <map>
#include <string>
#include <vector>

#include "kvmix/errors.hpp"

namespace kvmix::toml {

// Minimal TOML subset: [table] and [[array-of-tables]] headers with dotted
// names, `key = value` pairs, strings, booleans, integers, floats, and
// (possibly nested) arrays. Enough for the run-configuration schema.
struct Value {
    enum class Kind { None, Table, Array, String, Bool, Integer, Float };
    Kind kind = Kind::None;
    std::map<std::string, Value> table;
    std::vector<Value> array;
    std::string str;
    bool boolean = false;
    long long integer = 0;
    double number = 0.0;
    int line = 0;

    bool is_table() const { return kind == Kind::Table; }
    bool is_array() const { return kind == Kind::Array; }

    bool has(const std::string& key) const { return is_table() && table.count(key) > 0; }
    const Value* find(const std::string& key) const;

    // typed getters; throw ParseError with the value's line on mismatch
    const Value& get(const std::string& key) const;
    std::string as_string() const;
    bool as_bool() const;
    long long as_int() const;
    double as_double() const; // accepts integer values too
};

Value parse(const std::string& text);
Value parse_file(const std::string& path);

} // namespace kvmix::toml
