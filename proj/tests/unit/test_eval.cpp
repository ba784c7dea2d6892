#include "test_support.hpp"

#include "tml2/interpreter.hpp"

#include <doctest.h>

#include <limits>

using namespace tml2;
using namespace tml2::testing;

namespace {

// Parses `text` as the initializer of a property of type `type`.
Expression expr(std::string_view text, std::string_view type = "Int") {
    const auto m = parse_text("thing T { property x: " + std::string(type) + " = " + std::string(text) + " }");
    return *m.things[0].properties[0].initial;
}

Value run(std::string_view text, std::string_view type = "Int", std::int64_t now = 0) {
    return eval(expr(text, type), std::map<std::string, Value, std::less<>>{}, now);
}

std::string error_code(std::string_view text, std::string_view type = "Int") {
    try {
        run(text, type);
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("integer division truncates") {
    CHECK(std::get<std::int64_t>(run("7 / 2")) == 3);
    CHECK(std::get<std::int64_t>(run("-7 / 2")) == -3);
    CHECK(std::get<std::int64_t>(run("-7 % 2")) == -1);
}

TEST_CASE("Int promotes to Real") {
    CHECK(std::get<double>(run("7.0 / 2", "Real")) == 3.5);
    CHECK(std::get<double>(run("1 + 0.5", "Real")) == 1.5);
    CHECK(std::get<bool>(run("1 == 1.0", "Bool")));
    CHECK(std::get<bool>(run("2 > 1.5", "Bool")));
}

TEST_CASE("and/or short-circuit") {
    CHECK(std::get<bool>(run("(1 == 1) or (1 / 0 == 1)", "Bool")));
    CHECK_FALSE(std::get<bool>(run("(1 == 2) and (1 / 0 == 1)", "Bool")));
    CHECK(error_code("(1 == 2) or (1 / 0 == 1)", "Bool") == "E-DIV");
}

TEST_CASE("division and modulo by zero") {
    CHECK(error_code("1 / 0") == "E-DIV");
    CHECK(error_code("1 % 0") == "E-DIV");
    CHECK(error_code("1.0 / 0.0", "Real") == "E-DIV");
    CHECK(error_code("1.0 % 0", "Real") == "E-DIV");
}

TEST_CASE("Int arithmetic wraps") {
    CHECK(std::get<std::int64_t>(run("9223372036854775807 + 1")) == std::numeric_limits<std::int64_t>::min());
    CHECK(std::get<std::int64_t>(run("(-9223372036854775807 - 1) / -1")) == std::numeric_limits<std::int64_t>::min());
    CHECK(std::get<std::int64_t>(run("(-9223372036854775807 - 1) % -1")) == 0);
    CHECK(std::get<std::int64_t>(run("-(-9223372036854775807 - 1)")) == std::numeric_limits<std::int64_t>::min());
}

TEST_CASE("strings and booleans") {
    CHECK(std::get<std::string>(run("\"ab\" + \"cd\"", "String")) == "abcd");
    CHECK(std::get<bool>(run("\"a\" == \"a\"", "Bool")));
    CHECK(std::get<bool>(run("not false and true != false", "Bool")));
}

TEST_CASE("names and Now") {
    const auto m = parse_text("thing T { property a: Int property x: Int = a * 2 + Now() }");
    const auto& e = *m.things[0].properties[1].initial;
    std::map<std::string, Value, std::less<>> env{{"a", std::int64_t{5}}};
    CHECK(std::get<std::int64_t>(eval(e, env, 7)) == 17);
    env.clear();
    CHECK_THROWS_AS(eval(e, env, 7), Error);
}

TEST_CASE("evaluation is left to right") {
    // The left operand's error wins over the right one's.
    const auto m = parse_text("thing T { property x: Int = 1 / 0 + 1 % 0 }");
    try {
        eval(*m.things[0].properties[0].initial, std::map<std::string, Value, std::less<>>{});
        FAIL("expected E-DIV");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("division") != std::string::npos);
    }
}

TEST_CASE("values serialize to JSON") {
    CHECK(to_json(Value{std::int64_t{3}}).dump() == "3");
    CHECK(to_json(Value{0.1}).dump() == "0.1");
    CHECK(to_json(Value{true}).dump() == "true");
    CHECK(to_json(Value{std::string("a\"b")}).dump() == "\"a\\\"b\"");
}
