#include "tml2/codegen.hpp"

#include "tml2/error.hpp"
#include "tml2/validator.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tml2::codegen {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kScriptTemplate = R"PY(# Generated from @SOURCE@ (thing @THING@, data_analytics @BLOCK@).
# Regenerate from the model instead of editing this file.
"""Data-analytics entry points for thing @THING@.

    preprocess(dataset_path) -> (scaled features, labels, scaler)
    train(dataset_path, model_out) -> fitted estimator, persisted to model_out
    predict(model_in, feature_values) -> @PREDICTION_TYPE@
"""

import csv
import pickle
import sys

import numpy as np
@IMPORTS@
FEATURES = [@FEATURES@]
LABEL = @LABEL@
PREDICTION = @PREDICTION@
ALGORITHM = @ALGORITHM@
HYPERPARAMETERS = {@HYPERPARAMETERS@}


class DaOrderError(RuntimeError):
    """predict was called before train produced a model."""


def load_dataset(dataset_path):
    with open(dataset_path, newline="") as handle:
        rows = [[cell.strip() for cell in row] for row in csv.reader(handle) if row]
    if not rows:
        raise ValueError("E-SCHEMA: %s has no header line" % dataset_path)
    header = rows[0]
    for name in FEATURES + [LABEL]:
        if header.count(name) != 1:
            raise ValueError("E-SCHEMA: column %r must appear exactly once in %s" % (name, dataset_path))
    columns = [header.index(name) for name in FEATURES]
    label_column = header.index(LABEL)
    body = rows[1:]
    if not body:
        raise ValueError("E-SCHEMA: %s has no data rows" % dataset_path)
    x = np.array([[float(row[j]) for j in columns] for row in body], dtype=float)
    y = np.array([float(row[label_column]) for row in body], dtype=float)
    return x, y


def preprocess(dataset_path):
    x, y = load_dataset(dataset_path)
    scaler = StandardScaler().fit(x)
    return scaler.transform(x), y, scaler


def make_estimator():
@ESTIMATOR@


def train(dataset_path, model_out):
    x, y, scaler = preprocess(dataset_path)
    estimator = make_estimator()
    estimator.fit(x, @TARGET@)
    bundle = {
        "algorithm": ALGORITHM,
        "features": FEATURES,
        "label": LABEL,
        "scaler": scaler,
        "estimator": estimator,
    }
    with open(model_out, "wb") as handle:
        pickle.dump(bundle, handle)
    return estimator


def predict(model_in, feature_values):
    try:
        with open(model_in, "rb") as handle:
            bundle = pickle.load(handle)
    except FileNotFoundError:
        raise DaOrderError("E-DA-ORDER: no trained model at %s; call train first" % model_in) from None
    x = np.asarray([feature_values], dtype=float)
    if x.shape[1] != len(FEATURES):
        raise ValueError("E-DIM: expected %d features, got %d" % (len(FEATURES), x.shape[1]))
    value = bundle["estimator"].predict(bundle["scaler"].transform(x))[0]
    return @CONVERT@(value)


def main(argv):
    usage = "usage: %s train DATASET MODEL_OUT | predict MODEL_IN VALUE..." % argv[0]
    if len(argv) == 4 and argv[1] == "train":
        train(argv[2], argv[3])
        return 0
    if len(argv) == 3 + len(FEATURES) and argv[1] == "predict":
        print(predict(argv[2], [float(v) for v in argv[3:]]))
        return 0
    print(usage, file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main(sys.argv))
)PY";

std::string substitute(std::string_view text, const std::vector<std::pair<std::string, std::string>>& values) {
    std::string out(text);
    for (const auto& [key, value] : values) {
        for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size()))
            out.replace(pos, key.size(), value);
    }
    return out;
}

std::string py_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string py_real(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    std::string text(buf, end);
    if (text.find_first_of(".e") == std::string::npos) text += ".0";
    return text;
}

std::string py_list(const std::vector<NameRef>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += py_string(names[i].name);
    }
    return out;
}

// Resolved hyperparameters of `config`, in a fixed order per kind.
ordered_json hyperparameters(const ml::AlgorithmConfig& config) {
    ordered_json hp = ordered_json::object();
    switch (config.kind) {
    case ml::AlgorithmKind::LinearRegression: hp["lambda"] = config.lambda; break;
    case ml::AlgorithmKind::LogisticRegression:
        hp["lr"] = config.lr;
        hp["epochs"] = config.epochs;
        break;
    case ml::AlgorithmKind::GaussianNB: hp["var_smoothing"] = config.var_smoothing; break;
    case ml::AlgorithmKind::KNN: hp["k"] = config.k; break;
    }
    return hp;
}

std::string py_hyperparameters(const ml::AlgorithmConfig& config) {
    switch (config.kind) {
    case ml::AlgorithmKind::LinearRegression: return "\"lambda\": " + py_real(config.lambda);
    case ml::AlgorithmKind::LogisticRegression:
        return "\"lr\": " + py_real(config.lr) + ", \"epochs\": " + std::to_string(config.epochs);
    case ml::AlgorithmKind::GaussianNB: return "\"var_smoothing\": " + py_real(config.var_smoothing);
    case ml::AlgorithmKind::KNN: return "\"k\": " + std::to_string(config.k);
    }
    return {};
}

struct EstimatorMapping {
    std::string imports;
    std::string body;  // indented function body of make_estimator()
};

EstimatorMapping estimator_mapping(const ml::AlgorithmConfig& config) {
    constexpr std::string_view scaler_import = "from sklearn.preprocessing import StandardScaler\n";
    switch (config.kind) {
    case ml::AlgorithmKind::LinearRegression:
        if (config.lambda == 0.0) {
            return {"from sklearn.linear_model import LinearRegression\n" + std::string(scaler_import),
                    "    return LinearRegression()"};
        }
        return {"from sklearn.linear_model import Ridge\n" + std::string(scaler_import),
                "    return Ridge(alpha=HYPERPARAMETERS[\"lambda\"])"};
    case ml::AlgorithmKind::LogisticRegression:
        return {"from sklearn.linear_model import LogisticRegression\n" + std::string(scaler_import),
                "    # The library chooses its own solver step size; \"lr\" has no counterpart.\n"
                "    return LogisticRegression(max_iter=HYPERPARAMETERS[\"epochs\"])"};
    case ml::AlgorithmKind::GaussianNB:
        return {"from sklearn.naive_bayes import GaussianNB\n" + std::string(scaler_import),
                "    return GaussianNB(var_smoothing=HYPERPARAMETERS[\"var_smoothing\"])"};
    case ml::AlgorithmKind::KNN:
        return {"from sklearn.neighbors import KNeighborsClassifier\n" + std::string(scaler_import),
                "    return KNeighborsClassifier(n_neighbors=HYPERPARAMETERS[\"k\"], algorithm=\"brute\")"};
    }
    throw Error("E-UNSUPPORTED", "algorithm kind has no library mapping");
}

std::string render_script(const Model& model, const Thing& thing, const DataAnalyticsBlock& da,
                          const ml::AlgorithmConfig& config) {
    const auto mapping = estimator_mapping(config);
    const bool classifier = ml::is_classifier(config.kind);
    const std::string source = std::filesystem::path(model.source_name).filename().string();
    return substitute(kScriptTemplate, {
                                           {"@SOURCE@", source.empty() ? "<memory>" : source},
                                           {"@THING@", thing.name},
                                           {"@BLOCK@", da.name},
                                           {"@PREDICTION_TYPE@", classifier ? "int class label" : "float"},
                                           {"@IMPORTS@", mapping.imports},
                                           {"@FEATURES@", py_list(da.features)},
                                           {"@LABEL@", py_string(da.label.name)},
                                           {"@PREDICTION@", py_string(da.prediction.name)},
                                           {"@ALGORITHM@", py_string(ml::to_string(config.kind))},
                                           {"@HYPERPARAMETERS@", py_hyperparameters(config)},
                                           {"@ESTIMATOR@", mapping.body},
                                           {"@TARGET@", classifier ? "y.astype(int)" : "y"},
                                           {"@CONVERT@", classifier ? "int" : "float"},
                                       });
}

}  // namespace

std::string snake_case(std::string_view name) {
    std::string out;
    for (std::size_t i = 0; i < name.size(); ++i) {
        const char c = name[i];
        const bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
        if (upper && i > 0) {
            const char prev = name[i - 1];
            const bool prev_lower = std::islower(static_cast<unsigned char>(prev)) || std::isdigit(static_cast<unsigned char>(prev));
            const bool next_lower = i + 1 < name.size() && std::islower(static_cast<unsigned char>(name[i + 1]));
            const bool prev_upper = std::isupper(static_cast<unsigned char>(prev)) != 0;
            if (prev_lower || (prev_upper && next_lower)) out += '_';
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::vector<GeneratedArtifact> generate(const Model& model, std::string_view config_name) {
    const Configuration* config = model.find_configuration(config_name);
    if (!config) throw std::invalid_argument("unknown configuration '" + std::string(config_name) + "'");

    std::vector<GeneratedArtifact> artifacts;
    ordered_json entries = ordered_json::array();
    std::set<std::string> emitted;
    for (const auto& inst : config->instances) {
        const Thing* thing = model.find_thing(inst.thing.name);
        if (!thing || thing->analytics.empty() || !emitted.insert(thing->name).second) continue;
        const bool single = thing->analytics.size() == 1;
        for (const auto& da : thing->analytics) {
            const auto resolution = resolve_algorithm(da.algorithm);
            if (!resolution.config)
                throw Error("E-UNSUPPORTED", "data_analytics '" + da.name + "' has no usable algorithm");
            const std::string script =
                snake_case(thing->name) + (single ? "" : "_" + snake_case(da.name)) + "_da.py";
            artifacts.push_back({script, render_script(model, *thing, da, *resolution.config)});

            ordered_json entry;
            entry["name"] = thing->name;
            entry["script"] = script;
            entry["algorithm"] = {{"kind", std::string(ml::to_string(resolution.config->kind))},
                                  {"hyperparameters", hyperparameters(*resolution.config)}};
            ordered_json features = ordered_json::array();
            for (const auto& f : da.features) features.push_back(f.name);
            entry["features"] = std::move(features);
            entry["label"] = da.label.name;
            entry["prediction"] = da.prediction.name;
            entries.push_back(std::move(entry));
        }
    }
    if (artifacts.empty()) {
        throw Error("E-NODA", "configuration '" + config->name + "' instantiates no thing with a data_analytics block");
    }
    ordered_json manifest;
    manifest["things"] = std::move(entries);
    artifacts.push_back({"manifest.json", manifest.dump(2) + "\n"});
    artifacts.push_back({"requirements.txt", "numpy\nscikit-learn\n"});
    return artifacts;
}

std::size_t write_artifacts(const std::vector<GeneratedArtifact>& artifacts, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw Error("E-IO", "cannot create output directory '" + out_dir.string() + "'");
    for (const auto& artifact : artifacts) {
        const std::filesystem::path rel(artifact.path);
        if (rel.is_absolute() || rel.empty()) throw Error("E-IO", "artifact path must be relative: " + artifact.path);
        for (const auto& part : rel) {
            if (part == "..") throw Error("E-IO", "artifact path escapes the output root: " + artifact.path);
        }
        const auto target = out_dir / rel;
        if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path(), ec);
        std::ofstream out(target, std::ios::binary | std::ios::trunc);
        out.write(artifact.content.data(), static_cast<std::streamsize>(artifact.content.size()));
        if (!out) throw Error("E-IO", "cannot write '" + target.string() + "'");
    }
    return artifacts.size();
}

}  // namespace tml2::codegen
