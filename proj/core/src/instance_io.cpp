// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

#include "abex/instance_io.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "abex/model_io.hpp"

namespace abex {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

Value parse_value(const std::string& text, const AttributeSchema& schema, std::size_t attr,
                  std::size_t line_no) {
    const Attribute& a = schema[attr];
    std::string where =
        "line " + std::to_string(line_no) + ", attribute '" + a.name + "': ";
    switch (a.kind) {
        case AttrKind::Numerical: {
            char* end = nullptr;
            double v = std::strtod(text.c_str(), &end);
            if (end == text.c_str() || *end != '\0' || !std::isfinite(v))
                throw ModelError(where + "'" + text + "' is not a finite number");
            return Value::number(v);
        }
        case AttrKind::Categorical: {
            std::int32_t c = schema.category_index(attr, text);
            if (c < 0) throw ModelError(where + "unknown category '" + text + "'");
            return Value::category(c);
        }
        case AttrKind::Boolean:
            if (text == "0") return Value::boolean(false);
            if (text == "1") return Value::boolean(true);
            throw ModelError(where + "'" + text + "' is not 0 or 1");
    }
    throw ModelError(where + "unknown attribute kind");
}

} // namespace

std::vector<Instance> parse_instances_csv(const std::string& text, const AttributeSchema& schema) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<Instance> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (!header_seen) {
            if (fields.size() != schema.size())
                throw ModelError("header has " + std::to_string(fields.size()) +
                                 " columns, schema has " + std::to_string(schema.size()));
            for (std::size_t i = 0; i < fields.size(); ++i)
                if (fields[i] != schema[i].name)
                    throw ModelError("header column " + std::to_string(i) + " is '" + fields[i] +
                                     "', expected '" + schema[i].name + "'");
            header_seen = true;
            continue;
        }
        if (fields.size() != schema.size())
            throw ModelError("line " + std::to_string(line_no) + ": " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(schema.size()));
        Instance x;
        x.reserve(schema.size());
        for (std::size_t i = 0; i < fields.size(); ++i)
            x.push_back(parse_value(fields[i], schema, i, line_no));
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<Instance> load_instances_csv(const std::string& path, const AttributeSchema& schema) {
    try {
        return parse_instances_csv(read_file(path), schema);
    } catch (const ModelError& e) {
        throw ModelError(path + ": " + e.what());
    }
}

std::string format_value(const AttributeSchema& schema, std::size_t attribute, const Value& v) {
    switch (v.kind()) {
        case AttrKind::Numerical: {
            std::ostringstream out;
            out.precision(17);
            out << v.number();
            return out.str();
        }
        case AttrKind::Categorical:
            return schema[attribute].categories[static_cast<std::size_t>(v.category())];
        case AttrKind::Boolean:
            return v.boolean() ? "1" : "0";
    }
    return "?";
}

std::string serialize_instances_csv(const std::vector<Instance>& instances,
                                    const AttributeSchema& schema) {
    std::ostringstream out;
    for (std::size_t i = 0; i < schema.size(); ++i)
        out << (i ? "," : "") << schema[i].name;
    out << "\n";
    for (const Instance& x : instances) {
        for (std::size_t i = 0; i < x.size(); ++i)
            out << (i ? "," : "") << format_value(schema, i, x[i]);
        out << "\n";
    }
    return out.str();
}

std::vector<std::vector<std::int32_t>> parse_terms_json(const std::string& text,
                                                        const AttributeSchema& schema) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_array()) throw ModelError("terms: expected a JSON array");
    std::vector<std::vector<std::int32_t>> out;
    for (const nlohmann::json& jt : j) {
        std::vector<std::int32_t> kept;
        for (const nlohmann::json& jn : jt.at("kept")) {
            std::int32_t i = jn.is_string() ? schema.attribute_index(jn.get<std::string>())
                                            : jn.get<std::int32_t>();
            if (i < 0 || static_cast<std::size_t>(i) >= schema.size())
                throw ModelError("terms: unknown attribute " + jn.dump());
            kept.push_back(i);
        }
        out.push_back(std::move(kept));
    }
    return out;
}

std::vector<std::vector<std::int32_t>> load_terms_json(const std::string& path,
                                                       const AttributeSchema& schema) {
    try {
        return parse_terms_json(read_file(path), schema);
    } catch (const ModelError& e) {
        throw ModelError(path + ": " + e.what());
    }
}

} // namespace abex
