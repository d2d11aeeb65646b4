#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ipmgen {

/// Domain vocabulary used to name generated parameters.
struct DictionaryEntry {
    enum class Type { Boolean, Enum, Integer };

    std::string name;
    Type type = Type::Boolean;
    std::vector<std::string> values;  // Enum only
    std::int64_t lowerBound = 0;      // Integer only
    std::int64_t upperBound = 0;      // Integer only

    std::size_t cardinality() const;
    bool operator==(const DictionaryEntry&) const = default;
};

using Dictionary = std::vector<DictionaryEntry>;

/// Parses a JSON array of entries with keys name/type/values/lowerBound/upperBound.
/// Throws ConfigError on malformed JSON, unknown keys or types, missing fields,
/// duplicate names, or labels that are not identifiers.
Dictionary loadDictionary(std::string_view json);

}  // namespace ipmgen
