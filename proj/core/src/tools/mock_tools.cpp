#include "acp/tools/mock_tools.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

namespace acp {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view text) : text_(text) {}

    Rational parse() {
        Rational value = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return value;
    }

private:
    Rational expression() {
        Rational value = term();
        for (;;) {
            char op = peek();
            if (op != '+' && op != '-') return value;
            ++pos_;
            Rational rhs = term();
            value = op == '+' ? Rational(value + rhs) : Rational(value - rhs);
        }
    }

    Rational term() {
        Rational value = factor();
        for (;;) {
            char op = peek();
            if (op != '*' && op != '/') return value;
            ++pos_;
            Rational rhs = factor();
            if (op == '*') {
                value *= rhs;
            } else {
                if (rhs == 0) fail("division by zero");
                value /= rhs;
            }
        }
    }

    Rational factor() {
        char c = peek();
        if (c == '-') {
            ++pos_;
            return -factor();
        }
        if (c == '+') {
            ++pos_;
            return factor();
        }
        if (c == '(') {
            ++pos_;
            Rational value = expression();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return value;
        }
        return number();
    }

    Rational number() {
        skip_space();
        std::string digits;
        size_t frac = 0;
        bool point = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits += c;
                if (point) ++frac;
            } else if (c == '.' && !point) {
                point = true;
            } else {
                break;
            }
            ++pos_;
        }
        if (digits.empty()) {
            if (pos_ >= text_.size()) fail("unexpected end of expression");
            fail("expected a number at '" + std::string(1, text_[pos_]) + "'");
        }
        // cpp_int reads a leading zero as an octal prefix.
        digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
        BigInt numerator(digits);
        BigInt denominator = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac));
        return Rational(numerator, denominator);
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw CalcError("cannot evaluate '" + std::string(text_) + "': " + what);
    }

    std::string_view text_;
    size_t pos_ = 0;
};

std::string render(const Rational& value) {
    BigInt num = boost::multiprecision::numerator(value);
    BigInt den = boost::multiprecision::denominator(value);
    bool negative = num < 0;
    if (negative) num = -num;

    BigInt rest = den;
    unsigned twos = 0, fives = 0;
    while (rest % 2 == 0) {
        rest /= 2;
        ++twos;
    }
    while (rest % 5 == 0) {
        rest /= 5;
        ++fives;
    }
    std::string sign = negative ? "-" : "";
    if (rest != 1) return sign + num.str() + "/" + den.str();

    unsigned places = std::max(twos, fives);
    BigInt scaled = num * boost::multiprecision::pow(BigInt(10), places) / den;
    std::string digits = scaled.str();
    if (places == 0) return sign + digits;
    if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
    std::string whole = digits.substr(0, digits.size() - places);
    std::string fraction = digits.substr(digits.size() - places);
    while (!fraction.empty() && fraction.back() == '0') fraction.pop_back();
    return sign + whole + (fraction.empty() ? "" : "." + fraction);
}

class CalculatorTool final : public ToolAdapter {
public:
    explicit CalculatorTool(std::string name) {
        schema_.name = std::move(name);
        schema_.description = "Exact arithmetic over decimal expressions";
        EndpointSchema ep;
        ep.id = "calculate";
        ep.required = {ParamSpec{"query", false, ""}};
        ep.outputs = {"result"};
        ep.output_mode = OutputMode::WholePayload;
        schema_.endpoints.push_back(std::move(ep));
    }

    const ToolSchema& schema() const override { return schema_; }

    std::string call(const AgentRequest& request, const CallContext&) override {
        for (const auto& p : request.body) {
            if (p.name == "query") return evaluate_expression(p.value);
        }
        throw ToolError("calculator: missing 'query'");
    }

private:
    ToolSchema schema_;
};

class KvTool final : public ToolAdapter {
public:
    KvTool(ToolSchema schema, Fixture fixture) : schema_(std::move(schema)), fixture_(std::move(fixture)) {}

    const ToolSchema& schema() const override { return schema_; }

    std::string call(const AgentRequest& request, const CallContext&) override {
        const EndpointSchema* ep = schema_.find_endpoint(request.endpoint);
        if (!ep) throw ToolError(schema_.name + ": unknown endpoint '" + request.endpoint + "'");
        std::string key;
        if (ep->required.empty()) {
            if (!request.body.empty()) key = request.body.front().value;
        } else {
            for (size_t i = 0; i < ep->required.size(); ++i) {
                if (i) key += " | ";
                for (const auto& p : request.body) {
                    if (p.name == ep->required[i].name) key += p.value;
                }
            }
        }
        auto it = fixture_.find(key);
        return it == fixture_.end() ? std::string() : it->second;
    }

private:
    ToolSchema schema_;
    Fixture fixture_;
};

class DelayedTool final : public ToolAdapter {
public:
    DelayedTool(ToolAdapterPtr inner, std::chrono::milliseconds delay)
        : inner_(std::move(inner)), delay_(delay) {}

    const ToolSchema& schema() const override { return inner_->schema(); }

    std::string call(const AgentRequest& request, const CallContext& ctx) override {
        std::this_thread::sleep_for(delay_);
        return inner_->call(request, ctx);
    }

private:
    ToolAdapterPtr inner_;
    std::chrono::milliseconds delay_;
};

}  // namespace

std::string evaluate_expression(std::string_view expr) {
    return render(ExpressionParser(expr).parse());
}

ToolAdapterPtr make_calculator_tool(std::string name) {
    return std::make_shared<CalculatorTool>(std::move(name));
}

Fixture parse_fixture(std::string_view json_text) {
    auto doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error("fixture must be a JSON object");
    Fixture out;
    for (const auto& [key, value] : doc.items()) {
        out.emplace(key, value.is_string() ? value.get<std::string>() : value.dump());
    }
    return out;
}

Fixture load_fixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open fixture file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_fixture(buf.str());
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

ToolAdapterPtr make_kv_tool(ToolSchema schema, Fixture fixture) {
    return std::make_shared<KvTool>(std::move(schema), std::move(fixture));
}

ToolAdapterPtr with_delay(ToolAdapterPtr inner, std::chrono::milliseconds delay) {
    return std::make_shared<DelayedTool>(std::move(inner), delay);
}

}  // namespace acp
