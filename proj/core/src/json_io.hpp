#pragma once

// JSON helpers shared by the file-format readers. Not installed.

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "acp/blueprint/blueprint.hpp"
#include "acp/blueprint/serialization.hpp"

namespace acp::detail {

using ojson = nlohmann::ordered_json;

// Parses text, converting syntax errors into ParseError with line:column.
ojson parse_json(std::string_view text, const std::string& source);

// Checked member access with field-path diagnostics.
class JsonFields {
public:
    JsonFields(const ojson& obj, std::string source, std::string path);

    bool has(const char* key) const;
    const ojson& get(const char* key);
    std::string string(const char* key);
    std::string string_or(const char* key, std::string fallback);
    const ojson& array(const char* key);
    const ojson& object(const char* key);
    void reject_unknown() const;

    std::string path_of(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;
    const std::string& source() const noexcept { return source_; }

private:
    const ojson& obj_;
    std::string source_;
    std::string path_;
    std::vector<std::string> used_;
};

ojson node_to_json(const BlueprintNode& node);
BlueprintNode node_from_json(const ojson& j, const std::string& source, const std::string& path);

ojson param_to_json(const ParamBinding& b);
ParamBinding param_from_json(const ojson& j, const std::string& source, const std::string& path);

ojson blueprint_to_json(const ExecutionBlueprint& bp);
ExecutionBlueprint blueprint_from_json(const ojson& j, const std::string& source);

}  // namespace acp::detail
