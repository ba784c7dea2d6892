#include "test_support.hpp"

#include "tml2/codegen.hpp"
#include "tml2/error.hpp"

#include <doctest.h>

#include <cstdlib>
#include <set>

using namespace tml2;
using namespace tml2::testing;

namespace {

struct GoldenCase {
    const char* model;
    const char* config;
};

constexpr GoldenCase kGoldens[] = {
    {"smart_pingpong", "attack"},
    {"smart_pingpong_gnb", "normal"},
    {"smart_pingpong_knn", "normal"},
    {"thermostat", "home"},
};

std::vector<codegen::GeneratedArtifact> generate_bundled(const GoldenCase& c) {
    const auto m = parse_file(kModelsDir / (std::string(c.model) + ".tml2"));
    REQUIRE(validate(m).ok);
    return codegen::generate(m, c.config);
}

}  // namespace

TEST_CASE("snake_case") {
    CHECK(codegen::snake_case("DataAnalytics") == "data_analytics");
    CHECK(codegen::snake_case("Heater") == "heater");
    CHECK(codegen::snake_case("HTTPServer") == "http_server");
    CHECK(codegen::snake_case("sensor2Hub") == "sensor2_hub");
    CHECK(codegen::snake_case("already_snake") == "already_snake");
}

TEST_CASE("Smart PingPong yields exactly three artifacts") {
    const auto artifacts = generate_bundled(kGoldens[0]);
    REQUIRE(artifacts.size() == 3);
    CHECK(artifacts[0].path == "data_analytics_da.py");
    CHECK(artifacts[1].path == "manifest.json");
    CHECK(artifacts[2].path == "requirements.txt");
    CHECK(artifacts[2].content == "numpy\nscikit-learn\n");
}

TEST_CASE("artifacts match goldens byte for byte") {
    for (const auto& c : kGoldens) {
        CAPTURE(c.model);
        const auto artifacts = generate_bundled(c);
        std::set<std::string> produced;
        for (const auto& a : artifacts) {
            CAPTURE(a.path);
            produced.insert(a.path);
            CHECK(a.content == read_file(kGoldenDir / c.model / a.path));
        }
        std::set<std::string> golden;
        for (const auto& entry : std::filesystem::directory_iterator(kGoldenDir / c.model))
            golden.insert(entry.path().filename().string());
        CHECK(produced == golden);
    }
}

TEST_CASE("manifest mirrors the DA declarations") {
    for (const auto& c : kGoldens) {
        CAPTURE(c.model);
        const auto m = parse_file(kModelsDir / (std::string(c.model) + ".tml2"));
        const auto artifacts = codegen::generate(m, c.config);
        const auto manifest = nlohmann::ordered_json::parse(artifacts[artifacts.size() - 2].content);
        REQUIRE(manifest["things"].size() == 1);
        const auto& entry = manifest["things"][0];

        std::vector<std::string> keys;
        for (const auto& [k, v] : entry.items()) keys.push_back(k);
        CHECK(keys == std::vector<std::string>{"name", "script", "algorithm", "features", "label", "prediction"});

        const Thing* thing = m.find_thing(entry["name"].get<std::string>());
        REQUIRE(thing);
        REQUIRE(thing->analytics.size() == 1);
        const auto& da = thing->analytics[0];
        std::vector<std::string> features;
        for (const auto& f : da.features) features.push_back(f.name);
        CHECK(entry["features"].get<std::vector<std::string>>() == features);
        CHECK(entry["label"] == da.label.name);
        CHECK(entry["prediction"] == da.prediction.name);
        CHECK(entry["script"] == codegen::snake_case(thing->name) + "_da.py");
        CHECK(entry["algorithm"]["kind"] == da.algorithm.kind.name);
        for (const auto& hp : da.algorithm.hyperparameters) {
            CAPTURE(hp.name);
            const auto& value = entry["algorithm"]["hyperparameters"][hp.name];
            if (const auto* i = std::get_if<std::int64_t>(&hp.value)) {
                if (value.is_number_integer()) CHECK(value.get<std::int64_t>() == *i);
                else CHECK(value.get<double>() == static_cast<double>(*i));
            } else {
                CHECK(value.get<double>() == std::get<double>(hp.value));
            }
        }
    }
}

TEST_CASE("defaults are resolved into the manifest") {
    const auto m = parse_text(
        "thing T { property x: Int property y: Int property p: Int\n"
        "  data_analytics d { features: x label: y dataset: \"d.csv\" algorithm: LogisticRegression prediction: p }\n"
        "  statechart init S { state S { entry { da_train(d); } } } }\n"
        "configuration c { instance t: T }\n");
    const auto artifacts = codegen::generate(m, "c");
    const auto manifest = nlohmann::json::parse(artifacts[1].content);
    CHECK(manifest["things"][0]["algorithm"]["hyperparameters"]["lr"] == 0.1);
    CHECK(manifest["things"][0]["algorithm"]["hyperparameters"]["epochs"] == 500);
    CHECK(artifacts[1].content.ends_with("}\n"));
}

TEST_CASE("several DA blocks in one thing get one script each") {
    const auto m = parse_text(
        "thing Node { property x: Int property y: Int property p: Int property q: Real\n"
        "  data_analytics fast { features: x label: y dataset: \"d.csv\" algorithm: KNN prediction: p }\n"
        "  data_analytics Slow { features: x label: y dataset: \"d.csv\" algorithm: LinearRegression prediction: q }\n"
        "  statechart init S { state S { entry { da_train(fast); da_train(Slow); } } } }\n"
        "configuration c { instance a: Node instance b: Node }\n");
    REQUIRE(validate(m).ok);
    const auto artifacts = codegen::generate(m, "c");
    REQUIRE(artifacts.size() == 4);
    CHECK(artifacts[0].path == "node_fast_da.py");
    CHECK(artifacts[1].path == "node_slow_da.py");
    const auto manifest = nlohmann::json::parse(artifacts[2].content);
    CHECK(manifest["things"].size() == 2);
}

TEST_CASE("generation is deterministic and model-only") {
    const auto m = parse_file(kModelsDir / "smart_pingpong.tml2");
    const auto a = codegen::generate(m, "attack");
    const auto b = codegen::generate(m, "attack");
    CHECK(a == b);
    for (const auto& art : a) {
        CHECK(art.content.find(kSourceDir.string()) == std::string::npos);
        CHECK(art.content.find(kModelsDir.string()) == std::string::npos);
    }
    // Both configurations instantiate the same DA thing.
    CHECK(codegen::generate(m, "normal") == a);
}

TEST_CASE("E-NODA and unknown configurations") {
    const auto m = parse_file(kModelsDir / "pingpong.tml2");
    try {
        codegen::generate(m, "main");
        FAIL("expected E-NODA");
    } catch (const Error& e) {
        CHECK(e.code() == "E-NODA");
    }
    CHECK_THROWS_AS(codegen::generate(m, "nope"), std::invalid_argument);
}

TEST_CASE("write_artifacts") {
    const auto dir = scratch_dir("codegen_write");
    const auto artifacts = generate_bundled(kGoldens[0]);
    CHECK(codegen::write_artifacts(artifacts, dir / "out") == 3);
    for (const auto& a : artifacts) {
        CHECK(std::filesystem::file_size(dir / "out" / a.path) == a.content.size());
        CHECK(read_file(dir / "out" / a.path) == a.content);
    }
    // Overwrites in place and leaves the same directory state.
    { std::ofstream(dir / "out" / "manifest.json") << "stale"; }
    CHECK(codegen::write_artifacts(artifacts, dir / "out") == 3);
    CHECK(read_file(dir / "out" / "manifest.json") == artifacts[1].content);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "out")) ++files;
    CHECK(files == 3);

    CHECK(codegen::write_artifacts({}, dir / "empty") == 0);
    CHECK(std::filesystem::is_directory(dir / "empty"));
    CHECK(std::filesystem::is_empty(dir / "empty"));

    auto code = [&](std::vector<codegen::GeneratedArtifact> list, const std::filesystem::path& out) {
        try {
            codegen::write_artifacts(list, out);
        } catch (const Error& e) {
            return e.code();
        }
        return std::string();
    };
    CHECK(code({{"../escape.txt", "x"}}, dir / "bad") == "E-IO");
    CHECK(code({{"/abs.txt", "x"}}, dir / "bad") == "E-IO");
    { std::ofstream(dir / "file") << "x"; }
    CHECK(code(artifacts, dir / "file" / "sub") == "E-IO");
}

TEST_CASE("generated scripts compile under python3") {
    if (std::system("python3 -c pass > /dev/null 2>&1") != 0) {
        MESSAGE("python3 not available; skipped");
        return;
    }
    for (const auto& c : kGoldens) {
        for (const auto& entry : std::filesystem::directory_iterator(kGoldenDir / c.model)) {
            if (entry.path().extension() != ".py") continue;
            CAPTURE(entry.path().string());
            const std::string cmd = "python3 -c \"import ast,sys; ast.parse(open(sys.argv[1]).read())\" '" +
                                    entry.path().string() + "'";
            CHECK(std::system(cmd.c_str()) == 0);
        }
    }
}
