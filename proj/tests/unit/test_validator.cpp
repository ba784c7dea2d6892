#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace tml2;
using namespace tml2::testing;

namespace {

std::vector<std::string> codes(const ValidationReport& report) {
    std::vector<std::string> out;
    for (const auto& d : report.diagnostics) out.push_back(d.code);
    return out;
}

ValidationReport check(std::string_view text) { return validate(parse_text(text)); }

}  // namespace

TEST_CASE("each fixture triggers exactly its rule") {
    const std::pair<const char*, const char*> fixtures[] = {
        {"v001_duplicate_name.tml2", "V001"},       {"v002_undeclared_message.tml2", "V002"},
        {"v003_undefined_initial.tml2", "V003"},    {"v004_undefined_target.tml2", "V004"},
        {"v005_unknown_trigger_port.tml2", "V005"}, {"v006_type_error.tml2", "V006"},
        {"v007_undeclared_assignment.tml2", "V007"}, {"v008_undeclared_feature.tml2", "V008"},
        {"v009_non_numeric_feature.tml2", "V009"},  {"v010_bad_hyperparameter.tml2", "V010"},
        {"v011_unknown_thing.tml2", "V011"},        {"v012_unknown_endpoint.tml2", "V012"},
        {"v013_direction_mismatch.tml2", "V013"},   {"v014_undeclared_da_block.tml2", "V014"},
    };
    for (const auto& [file, code] : fixtures) {
        CAPTURE(file);
        const auto report = validate(parse_file(kFixturesDir / "validator" / file));
        CHECK_FALSE(report.ok);
        CHECK(codes(report) == std::vector<std::string>{code});
    }
}

TEST_CASE("bundled models validate clean") {
    for (const char* name : kBundledModels) {
        CAPTURE(name);
        const auto report = validate(parse_file(kModelsDir / name));
        CHECK(report.ok);
        CHECK(report.diagnostics.empty());
    }
}

TEST_CASE("V002 undeclared message location") {
    const auto report = check("thing T { provided port p { receives ping } }");
    CHECK(codes(report) == std::vector<std::string>{"V002"});
}

TEST_CASE("V013 in both message directions") {
    const auto report = check(
        "thing A { message m() required port p { sends m } }\n"
        "thing B { message m() message n() provided port q { sends n receives m } }\n"
        "configuration c { instance a: A instance b: B connector a.p => b.q }\n");
    const auto c = codes(report);
    CHECK(c == std::vector<std::string>{"V013"});
}

TEST_CASE("V013 accepts provided to required too") {
    const auto report = check(
        "thing A { message m() required port p { sends m } }\n"
        "thing B { message m() provided port q { receives m } }\n"
        "configuration c { instance a: A instance b: B connector b.q => a.p }\n");
    CHECK(report.ok);
}

TEST_CASE("V006 covers conditions, sends and unknown names") {
    CHECK(codes(check("thing T { statechart init A { state A { entry { if (1) { } } } } }")) ==
          std::vector<std::string>{"V006"});
    CHECK(codes(check("thing T { statechart init A { state A { transition guard 3 -> A } } }")) ==
          std::vector<std::string>{"V006"});
    CHECK(codes(check("thing T { statechart init A { state A { entry { print(nope); } } } }")) ==
          std::vector<std::string>{"V006"});
    CHECK(codes(check("thing T { message m(a: Int) required port p { sends m }\n"
                      "  statechart init A { state A { entry { p!m(1, 2); } } } }")) == std::vector<std::string>{"V006"});
    CHECK(codes(check("thing T { message m(a: Int) required port p { sends m }\n"
                      "  statechart init A { state A { entry { p!m(true); } } } }")) == std::vector<std::string>{"V006"});
    CHECK(codes(check("thing T { message m(a: Int) required port p { sends m }\n"
                      "  statechart init A { state A { entry { p!m(1.5); } } } }")) == std::vector<std::string>{"V006"});
    // Int promotes to Real.
    CHECK(check("thing T { message m(a: Real) required port p { sends m }\n"
                "  statechart init A { state A { entry { p!m(1); } } } }")
              .ok);
}

TEST_CASE("V006 assignment type") {
    CHECK(codes(check("thing T { property x: Int statechart init A { state A { entry { x = 1.5; } } } }")) ==
          std::vector<std::string>{"V006"});
    CHECK(check("thing T { property x: Real statechart init A { state A { entry { x = 1; } } } }").ok);
}

TEST_CASE("trigger parameters are scoped to guard and action") {
    const char* ok =
        "thing T { message m(v: Int) property x: Int provided port p { receives m }\n"
        "  statechart init A { state A { transition event p?m guard v > 0 internal action { x = v; } } } }";
    CHECK(check(ok).ok);
    const char* leak =
        "thing T { message m(v: Int) property x: Int provided port p { receives m }\n"
        "  statechart init A { state A { entry { x = v; } transition event p?m internal } } }";
    CHECK(codes(check(leak)) == std::vector<std::string>{"V006"});
    const char* assign =
        "thing T { message m(v: Int) provided port p { receives m }\n"
        "  statechart init A { state A { transition event p?m internal action { v = 1; } } } }";
    CHECK(codes(check(assign)) == std::vector<std::string>{"V007"});
}

TEST_CASE("V005 message not received by the port") {
    const auto report = check(
        "thing T { message m() message n() provided port p { sends n receives m }\n"
        "  statechart init A { state A { transition event p?n -> A } } }");
    CHECK(codes(report) == std::vector<std::string>{"V005"});
}

TEST_CASE("V009 prediction type follows the algorithm") {
    const char* tmpl =
        "thing T { property x: Int property y: Int property p: %s\n"
        "  data_analytics d { features: x label: y dataset: \"d.csv\" algorithm: %s prediction: p }\n"
        "  statechart init A { state A { entry { da_train(d); } } } }";
    auto make = [&](const char* type, const char* algo) {
        char buf[512];
        std::snprintf(buf, sizeof buf, tmpl, type, algo);
        return check(buf);
    };
    CHECK(make("Real", "LinearRegression").ok);
    CHECK(codes(make("Int", "LinearRegression")) == std::vector<std::string>{"V009"});
    CHECK(make("Int", "KNN(k = 2)").ok);
    CHECK(codes(make("Real", "GaussianNB")) == std::vector<std::string>{"V009"});
    CHECK(codes(make("Real", "LogisticRegression")) == std::vector<std::string>{"V009"});
}

TEST_CASE("V010 algorithm kinds and hyperparameters") {
    const char* tmpl =
        "thing T { property x: Int property y: Int property p: Int\n"
        "  data_analytics d { features: x label: y dataset: \"d.csv\" algorithm: %s prediction: p }\n"
        "  statechart init A { state A { entry { da_train(d); } } } }";
    auto make = [&](const char* algo) {
        char buf[512];
        std::snprintf(buf, sizeof buf, tmpl, algo);
        return check(buf);
    };
    CHECK(make("LogisticRegression(lr = 0.5, epochs = 10)").ok);
    CHECK(make("GaussianNB(var_smoothing = 0.001)").ok);
    CHECK(codes(make("RandomForest")) == std::vector<std::string>{"V010"});
    CHECK(codes(make("LogisticRegression(epochs = 0)")) == std::vector<std::string>{"V010"});
    CHECK(codes(make("LogisticRegression(lr = 0.0)")) == std::vector<std::string>{"V010"});
    CHECK(make("LogisticRegression(lr = 1)").ok);  // Int promotes to Real
    CHECK(codes(make("LogisticRegression(lr = true)")) == std::vector<std::string>{"V010"});
    CHECK(codes(make("KNN(depth = 3)")) == std::vector<std::string>{"V010"});
    CHECK(codes(make("KNN(k = 1, k = 2)")) == std::vector<std::string>{"V010"});
    CHECK(codes(make("GaussianNB(var_smoothing = -1.0)")) == std::vector<std::string>{"V010"});
}

TEST_CASE("resolve_algorithm fills defaults") {
    AlgorithmSpec spec{{"LogisticRegression", {}}, {}};
    auto res = resolve_algorithm(spec);
    REQUIRE(res.config);
    CHECK(res.config->kind == ml::AlgorithmKind::LogisticRegression);
    CHECK(res.config->lr == 0.1);
    CHECK(res.config->epochs == 500);
    spec.kind.name = "KNN";
    spec.hyperparameters.push_back({"k", std::int64_t{7}, {}});
    res = resolve_algorithm(spec);
    REQUIRE(res.config);
    CHECK(res.config->k == 7);
}

TEST_CASE("V014 undeclared DA block in a thing that has one") {
    const auto report = check(
        "thing T { property x: Int property y: Int property p: Int\n"
        "  data_analytics d { features: x label: y dataset: \"d.csv\" algorithm: KNN prediction: p }\n"
        "  statechart init A { state A { entry { da_train(d); da_predict(e); } } } }");
    CHECK(codes(report) == std::vector<std::string>{"V014"});
}

TEST_CASE("warnings do not block") {
    const auto report = check(
        "thing T { message unused() property x: Int property y: Int property p: Int\n"
        "  data_analytics d { features: x label: y dataset: \"d.csv\" algorithm: KNN prediction: p }\n"
        "  statechart init A { state A { } state B { transition -> B } } }");
    CHECK(report.ok);
    CHECK(codes(report) == std::vector<std::string>{"V102", "V103", "V101"});
    for (const auto& d : report.diagnostics) CHECK(d.severity == Severity::Warning);
}

TEST_CASE("diagnostics sorted and deterministic") {
    const char* text =
        "thing T { property a: Int = true property a: Int\n"
        "  statechart init Z { state A { transition -> Q } } }\n"
        "configuration c { instance i: U instance i: T }\n";
    const auto first = check(text);
    const auto second = check(text);
    CHECK(first.diagnostics == second.diagnostics);
    CHECK(std::is_sorted(first.diagnostics.begin(), first.diagnostics.end(), [](const auto& x, const auto& y) {
        return std::tie(x.file, x.line, x.column) < std::tie(y.file, y.line, y.column);
    }));
    CHECK(first.diagnostics.size() >= 5);
}

TEST_CASE("property initializers only see earlier properties") {
    CHECK(check("thing T { property a: Int = 1 property b: Int = a + 1 }").ok);
    CHECK(codes(check("thing T { property b: Int = a + 1 property a: Int = 1 }")) == std::vector<std::string>{"V006"});
}
