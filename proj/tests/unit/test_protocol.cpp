#include <random>
#include <set>

#include <gtest/gtest.h>

#include "acp/protocol/codec.hpp"
#include "acp/protocol/status.hpp"
#include "message_gen.hpp"

using namespace acp;

namespace {

SchemaViolation decode_violation(const std::string& text) {
    try {
        decode_message(text);
    } catch (const SchemaViolation& e) {
        return e;
    }
    ADD_FAILURE() << "no SchemaViolation for " << text;
    return SchemaViolation("", "");
}

AgentRequest weather_request() {
    AgentRequest r;
    r.method = "FUNCTION";
    r.endpoint = "perplexity_api_response";
    r.body = {{"query", "What are the latitude and longitude for the following places: \"The Dolomites, Italy\", "
                        "\"Santorini, Greece\", \"Prague, Czech Republic\", \"Cinque Terre, Italy\", "
                        "\"Barcelona, Spain\""},
              {"preplexity_ai_key", "YOUR_API_KEY"}};
    return r;
}

AssistanceRequest weather_assistance() {
    AssistanceRequest a;
    a.error = StatusCode::MissingRequiredParameters;
    a.error_node = "s1.step2";
    a.error_tool = "Open-Meteo";
    a.description = "The Open-Meteo API requires latitude and longitude parameters, which are missing from the "
                    "input variables.";
    a.relevant_context = "The vacation_spots_list contains names but not coordinates.";
    a.suggested_resolution = {ResolutionKind::Reroute,
                              "Add a step to obtain latitude and longitude for each vacation spot, possibly "
                              "using the Perplexity API."};
    a.status_update.previous_progress = "Successfully executed Step 1 of the workflow for Sub-Task 1.";
    a.status_update.current_progress = "Attempted to execute Step 2 using the Open-Meteo API to retrieve weather data.";
    a.status_update.current_node = "s1.step2";
    a.status_update.completed_tools = {{"Perplexity", "Retrieved a list of top vacation spots in India."}};
    a.status_update.encountered_issues = "Open-Meteo API call failed due to missing latitude and longitude parameters.";
    return a;
}

}  // namespace

TEST(StatusCodes, TableIsExactlyTheEightCodes) {
    std::set<int> ints;
    for (auto c : kAllStatusCodes) ints.insert(to_int(c));
    EXPECT_EQ(ints, (std::set<int>{200, 601, 602, 603, 604, 605, 606, 607}));
}

TEST(StatusCodes, NameMappingIsABijection) {
    std::set<std::string_view> names;
    for (auto c : kAllStatusCodes) {
        auto name = status_name(c);
        EXPECT_TRUE(names.insert(name).second) << name;
        EXPECT_EQ(status_from_name(name), c);
        EXPECT_EQ(status_from_int(to_int(c)), c);
    }
    EXPECT_EQ(status_name(StatusCode::MissingRequiredParameters), "MISSING_REQUIRED_PARAMETERS");
    EXPECT_EQ(status_name(StatusCode::WrongStepDetails), "WRONG_STEP_DETAILS");
    EXPECT_EQ(status_name(StatusCode::InvalidParameterUsage), "INVALID_PARAMETER_USAGE");
    EXPECT_EQ(status_name(StatusCode::ToolCallFailure), "TOOL_CALL_FAILURE");
    EXPECT_EQ(status_name(StatusCode::IncompleteInformation), "INCOMPLETE_INFORMATION");
    EXPECT_EQ(status_name(StatusCode::DependencyIncompleteInformation), "DEPENDENCY_INCOMPLETE_INFORMATION");
    EXPECT_EQ(status_name(StatusCode::WrongInformation), "WRONG_INFORMATION");
    EXPECT_FALSE(status_from_name("NOT_A_CODE"));
}

TEST(StatusCodes, ClassifyStageGroupsCodesByPhase) {
    EXPECT_EQ(classify_stage(StatusCode::MissingRequiredParameters), Stage::RequestStage);
    EXPECT_EQ(classify_stage(StatusCode::ToolCallFailure), Stage::ToolCallStage);
    EXPECT_EQ(classify_stage(StatusCode::Ok), Stage::Success);
    EXPECT_EQ(classify_stage(StatusCode::WrongStepDetails), Stage::RequestStage);
    EXPECT_EQ(classify_stage(StatusCode::InvalidParameterUsage), Stage::RequestStage);
    EXPECT_EQ(classify_stage(StatusCode::IncompleteInformation), Stage::OutputExtractionStage);
    EXPECT_EQ(classify_stage(StatusCode::DependencyIncompleteInformation), Stage::OutputExtractionStage);
    EXPECT_EQ(classify_stage(StatusCode::WrongInformation), Stage::OutputExtractionStage);
}

TEST(StatusCodes, EveryErrorCodeHasExactlyOneNonSuccessStage) {
    int request = 0, call = 0, extract = 0;
    for (auto c : kAllStatusCodes) {
        if (c == StatusCode::Ok) continue;
        switch (classify_stage(c)) {
            case Stage::RequestStage: ++request; break;
            case Stage::ToolCallStage: ++call; break;
            case Stage::OutputExtractionStage: ++extract; break;
            case Stage::Success: ADD_FAILURE() << to_int(c); break;
        }
    }
    EXPECT_EQ(request, 3);
    EXPECT_EQ(call, 1);
    EXPECT_EQ(extract, 3);
}

TEST(Codec, WeatherAgentRequestCarriesBothBodyFields) {
    std::string text = encode_message(weather_request());
    EXPECT_NE(text.find("\"method\":\"FUNCTION\""), std::string::npos);
    EXPECT_NE(text.find("\"endpoint\":\"perplexity_api_response\""), std::string::npos);
    EXPECT_NE(text.find("{\"name\":\"query\",\"value\":\"What are the latitude"), std::string::npos);
    EXPECT_NE(text.find("{\"name\":\"preplexity_ai_key\",\"value\":\"YOUR_API_KEY\"}"), std::string::npos);
    EXPECT_EQ(std::get<AgentRequest>(decode_message(text)), weather_request());
}

TEST(Codec, WeatherAgentResponseEncodesCanonically) {
    AgentResponse r;
    r.outputs = {{"vacation_spots_list_usa", "[\"Yellowstone National Park\", \"Grand Canyon\", \"Hawaii\"]"}};
    std::string text = encode_message(r);
    EXPECT_EQ(text.rfind("{\"kind\":\"AGENT_RESPONSE\",\"status\":200,\"outputs\":[{\"name\":\"vacation_spots_list_usa\"", 0),
              0u);
    EXPECT_EQ(encode_message(r), text);
    EXPECT_EQ(std::get<AgentResponse>(decode_message(text)), r);
}

TEST(Codec, WeatherAssistanceRequestContains601) {
    std::string text = encode_message(weather_assistance());
    EXPECT_NE(text.find("\"error\":601"), std::string::npos);
    EXPECT_NE(text.find("\"error_tool\":\"Open-Meteo\""), std::string::npos);
    EXPECT_NE(text.find("\"action\":\"Reroute\""), std::string::npos);
    EXPECT_EQ(std::get<AssistanceRequest>(decode_message(text)), weather_assistance());
}

TEST(Codec, FieldOrderIsFixed) {
    std::string text = encode_message(weather_assistance());
    size_t last = 0;
    for (const char* key : {"\"kind\"", "\"error\"", "\"error_node\"", "\"error_tool\"", "\"description\"",
                            "\"relevant_context\"", "\"suggested_resolution\"", "\"status_update\""}) {
        size_t pos = text.find(key);
        ASSERT_NE(pos, std::string::npos) << key;
        EXPECT_GE(pos, last) << key;
        last = pos;
    }
}

TEST(Codec, RoundTripIdentityOverGeneratedMessages) {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 600; ++i) {
        Message m = gen::message(rng, i);
        std::string text = encode_message(m);
        Message back = decode_message(text);
        ASSERT_EQ(back, m) << text;
        ASSERT_EQ(encode_message(back), text);
        ASSERT_EQ(kind_of(back), kind_of(m));
    }
}

TEST(Codec, Status200WithEmptyOutputsIsViolationOnOutputs) {
    auto e = decode_violation(R"({"kind":"AGENT_RESPONSE","status":200,"outputs":[],"dependent_inputs":[]})");
    EXPECT_EQ(e.field_path(), "outputs");
}

TEST(Codec, ErrorStatusWithOutputsIsViolation) {
    auto e = decode_violation(
        R"({"kind":"AGENT_RESPONSE","status":604,"outputs":[{"name":"a","content":"b"}],"dependent_inputs":[]})");
    EXPECT_EQ(e.field_path(), "outputs");
}

TEST(Codec, EveryCodeOutsideTheTableIsViolationOnStatus) {
    const std::set<int> valid{200, 601, 602, 603, 604, 605, 606, 607};
    for (int code = -1; code <= 1000; ++code) {
        if (valid.count(code)) continue;
        std::string text = R"({"kind":"AGENT_RESPONSE","status":)" + std::to_string(code) +
                           R"(,"outputs":[{"name":"a","content":"b"}],"dependent_inputs":[]})";
        auto e = decode_violation(text);
        ASSERT_EQ(e.field_path(), "status") << code;
    }
    auto e = decode_violation(
        R"({"kind":"AGENT_RESPONSE","status":699,"outputs":[{"name":"a","content":"b"}],"dependent_inputs":[]})");
    EXPECT_EQ(e.field_path(), "status");
}

TEST(Codec, AssistanceRequestWithSuccessCodeIsViolation) {
    auto text = encode_message(weather_assistance());
    auto pos = text.find("\"error\":601");
    text.replace(pos, 11, "\"error\":200");
    EXPECT_EQ(decode_violation(text).field_path(), "error");
}

TEST(Codec, ErrorNodeMustMatchStatusUpdate) {
    auto a = weather_assistance();
    a.status_update.current_node = "s1.step1";
    EXPECT_THROW(encode_message(a), SchemaViolation);
    try {
        validate(a);
    } catch (const SchemaViolation& e) {
        EXPECT_EQ(e.field_path(), "status_update.current_node");
    }
}

TEST(Codec, UnknownFieldsAreRejectedWithPath) {
    EXPECT_EQ(decode_violation(R"({"kind":"AGENT_REQUEST","method":"GET","endpoint":"x","headers":{},"body":[],"extra":1})")
                  .field_path(),
              "extra");
    EXPECT_EQ(decode_violation(
                  R"({"kind":"AGENT_REQUEST","method":"GET","endpoint":"x","headers":{},"body":[{"name":"a","value":"b","x":1}]})")
                  .field_path(),
              "body[0].x");
}

TEST(Codec, MissingAndMistypedFields) {
    EXPECT_EQ(decode_violation(R"({"kind":"AGENT_REQUEST","method":"GET","headers":{},"body":[]})").field_path(),
              "endpoint");
    EXPECT_EQ(decode_violation(R"({"kind":"AGENT_REQUEST","method":7,"endpoint":"x","headers":{},"body":[]})")
                  .field_path(),
              "method");
    EXPECT_THROW(decode_message(R"({"kind":"NOPE"})"), SchemaViolation);
}

TEST(Codec, DuplicateBodyNamesAreViolations) {
    AgentRequest r;
    r.method = "FUNCTION";
    r.endpoint = "calc";
    r.body = {{"query", "1"}, {"query", "2"}};
    EXPECT_THROW(encode_message(r), SchemaViolation);
    EXPECT_EQ(decode_violation(
                  R"({"kind":"AGENT_REQUEST","method":"GET","endpoint":"x","headers":{},"body":[{"name":"q","value":"1"},{"name":"q","value":"2"}]})")
                  .field_path(),
              "body[1].name");
}

TEST(Codec, EmptyEndpointIsViolation) {
    AgentRequest r;
    r.method = "GET";
    EXPECT_THROW(encode_message(r), SchemaViolation);
}

TEST(Codec, UnparseableTextIsMalformed) {
    EXPECT_THROW(decode_message("not json"), MalformedMessage);
    EXPECT_THROW(decode_message("{\"kind\": "), MalformedMessage);
    EXPECT_THROW(decode_message("[1,2]"), MalformedMessage);
}

TEST(Codec, EncodingIsDeterministic) {
    std::mt19937_64 a(7), b(7);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(encode_message(gen::message(a, i)), encode_message(gen::message(b, i)));
}

TEST(Redaction, DefaultPatternsMaskKeysAndTokensOnly) {
    AgentRequest r = weather_request();
    r.headers = {{"x_api_token", "secret"}, {"Accept", "json"}};
    AgentRequest shown = redact_secrets(r, default_secret_patterns());
    EXPECT_EQ(shown.body[0].value, r.body[0].value);
    EXPECT_EQ(shown.body[1].value, "***");
    EXPECT_EQ(shown.headers[0].value, "***");
    EXPECT_EQ(shown.headers[1].value, "json");
    EXPECT_EQ(r.body[1].value, "YOUR_API_KEY");
}

TEST(Redaction, GlobMatchIsCaseInsensitive) {
    EXPECT_TRUE(glob_match("*_key", "PREPLEXITY_AI_KEY"));
    EXPECT_TRUE(glob_match("*", ""));
    EXPECT_TRUE(glob_match("a*b*c", "aXXbYc"));
    EXPECT_FALSE(glob_match("*_key", "keychain"));
    EXPECT_FALSE(glob_match("a*b", "ab_"));
}
