#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "acp/error.hpp"
#include "acp/protocol/messages.hpp"

namespace acp {

// Text that is not a JSON object at all.
class MalformedMessage : public Error {
public:
    using Error::Error;
};

// Canonical JSON encoding: fixed field order, no insignificant whitespace,
// UTF-8 output. Equal messages encode to byte-identical text.
// Throws SchemaViolation if msg breaks an invariant or holds invalid UTF-8.
std::string encode_message(const Message& msg);

// Strict inverse of encode_message. Unknown, missing or mistyped fields and
// invariant violations raise SchemaViolation; unparseable text raises
// MalformedMessage.
Message decode_message(std::string_view text);

// Glob patterns (only '*' is special, matching is case-insensitive) naming
// header or body parameters whose values are secrets.
std::vector<std::string> default_secret_patterns();

bool glob_match(std::string_view pattern, std::string_view text) noexcept;

// Copy of req with every matching header/body value replaced by "***".
AgentRequest redact_secrets(const AgentRequest& req, const std::vector<std::string>& patterns);

}  // namespace acp
