// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

/// \file instance_io.hpp
/// CSV instance files (header row of attribute names in schema order,
/// categorical values as labels, Booleans as 0/1) and JSON term files for
/// check mode.

#ifndef ABEX_INSTANCE_IO_HPP
#define ABEX_INSTANCE_IO_HPP

#include <string>
#include <vector>

#include "abex/model.hpp"

namespace abex {

std::vector<Instance> parse_instances_csv(const std::string& text, const AttributeSchema& schema);
std::vector<Instance> load_instances_csv(const std::string& path, const AttributeSchema& schema);

std::string serialize_instances_csv(const std::vector<Instance>& instances,
                                    const AttributeSchema& schema);

/// Terms file: a JSON array, one entry per instance, each {"kept": [names]}.
std::vector<std::vector<std::int32_t>> parse_terms_json(const std::string& text,
                                                        const AttributeSchema& schema);
std::vector<std::vector<std::int32_t>> load_terms_json(const std::string& path,
                                                       const AttributeSchema& schema);

/// Text form of a value ("4", "b", "1") for reports and CSV.
std::string format_value(const AttributeSchema& schema, std::size_t attribute, const Value& v);

} // namespace abex

#endif // ABEX_INSTANCE_IO_HPP
