#include "ipmgen/dictionary.hpp"

#include <set>

#include <json.hpp>

#include "ipmgen/errors.hpp"
#include "ipmgen/model.hpp"

namespace ipmgen {

std::size_t DictionaryEntry::cardinality() const {
    switch (type) {
        case Type::Boolean: return 2;
        case Type::Enum: return values.size();
        case Type::Integer: return static_cast<std::size_t>(upperBound - lowerBound) + 1;
    }
    return 0;
}

namespace {

std::int64_t readBound(const nlohmann::json& obj, const char* key, const std::string& owner) {
    if (!obj.contains(key))
        throw ConfigError("dictionary entry '" + owner + "': Integer type requires '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError("dictionary entry '" + owner + "': '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

}  // namespace

Dictionary loadDictionary(std::string_view json) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& err) {
        throw ConfigError(std::string("malformed dictionary JSON: ") + err.what());
    }
    if (!doc.is_array()) throw ConfigError("dictionary must be a JSON array");

    static const std::set<std::string> kKeys = {"name", "type", "values", "lowerBound", "upperBound"};
    Dictionary out;
    std::set<std::string> names;
    for (const auto& obj : doc) {
        if (!obj.is_object()) throw ConfigError("dictionary entries must be JSON objects");
        for (const auto& item : obj.items())
            if (!kKeys.count(item.key()))
                throw ConfigError("unknown dictionary key '" + item.key() + "'");
        if (!obj.contains("name") || !obj.at("name").is_string())
            throw ConfigError("dictionary entry without a string 'name'");
        if (!obj.contains("type") || !obj.at("type").is_string())
            throw ConfigError("dictionary entry without a string 'type'");

        DictionaryEntry e;
        e.name = obj.at("name").get<std::string>();
        if (!isIdentifier(e.name) || isReservedWord(e.name))
            throw ConfigError("dictionary name '" + e.name + "' is not a valid identifier");
        if (!names.insert(e.name).second)
            throw ConfigError("duplicate dictionary entry '" + e.name + "'");

        const std::string type = obj.at("type").get<std::string>();
        auto forbid = [&](const char* key) {
            if (obj.contains(key))
                throw ConfigError("dictionary entry '" + e.name + "': key '" + key +
                                  "' not allowed for type " + type);
        };
        if (type == "Boolean") {
            e.type = DictionaryEntry::Type::Boolean;
            forbid("values");
            forbid("lowerBound");
            forbid("upperBound");
        } else if (type == "Enum") {
            e.type = DictionaryEntry::Type::Enum;
            forbid("lowerBound");
            forbid("upperBound");
            if (!obj.contains("values") || !obj.at("values").is_array() || obj.at("values").empty())
                throw ConfigError("dictionary entry '" + e.name + "': Enum type requires non-empty 'values'");
            std::set<std::string> seen;
            for (const auto& v : obj.at("values")) {
                if (!v.is_string())
                    throw ConfigError("dictionary entry '" + e.name + "': values must be strings");
                std::string label = v.get<std::string>();
                if (!isIdentifier(label) || isReservedWord(label))
                    throw ConfigError("dictionary entry '" + e.name + "': value '" + label +
                                      "' is not a valid identifier");
                if (!seen.insert(label).second)
                    throw ConfigError("dictionary entry '" + e.name + "': duplicate value '" + label + "'");
                e.values.push_back(std::move(label));
            }
        } else if (type == "Integer") {
            e.type = DictionaryEntry::Type::Integer;
            forbid("values");
            e.lowerBound = readBound(obj, "lowerBound", e.name);
            e.upperBound = readBound(obj, "upperBound", e.name);
            if (e.lowerBound > e.upperBound)
                throw ConfigError("dictionary entry '" + e.name + "': lowerBound exceeds upperBound");
            if (e.lowerBound < -kMaxRangeMagnitude || e.upperBound > kMaxRangeMagnitude)
                throw ConfigError("dictionary entry '" + e.name + "': bounds out of supported range");
        } else {
            throw ConfigError("dictionary entry '" + e.name + "': unknown type '" + type + "'");
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace ipmgen
