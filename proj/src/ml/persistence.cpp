#include "tml2/error.hpp"
#include "tml2/ml.hpp"

#include <fstream>
#include <sstream>

namespace tml2::ml {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void malformed(const std::string& what) { throw Error("E-FORMAT", "malformed model: " + what); }

const json& field(const json& obj, const char* name) {
    if (!obj.is_object() || !obj.contains(name)) malformed(std::string("missing field '") + name + "'");
    return obj.at(name);
}

Vector number_array(const json& value, const char* name) {
    if (!value.is_array()) malformed(std::string("'") + name + "' must be an array");
    Vector out;
    for (const auto& v : value) {
        if (!v.is_number()) malformed(std::string("'") + name + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

Matrix number_matrix(const json& value, const char* name, std::size_t width) {
    if (!value.is_array()) malformed(std::string("'") + name + "' must be an array of rows");
    Matrix out;
    for (const auto& row : value) {
        out.push_back(number_array(row, name));
        if (out.back().size() != width) malformed(std::string("'") + name + "' row has wrong width");
    }
    return out;
}

std::vector<std::int64_t> label_array(const json& value, const char* name) {
    if (!value.is_array()) malformed(std::string("'") + name + "' must be an array");
    std::vector<std::int64_t> out;
    for (const auto& v : value) {
        if (!v.is_number_integer()) malformed(std::string("'") + name + "' must hold integers");
        out.push_back(v.get<std::int64_t>());
    }
    return out;
}

}  // namespace

ordered_json to_json(const TrainedModel& model) {
    ordered_json doc;
    doc["algorithm"] = std::string(to_string(model.kind));
    doc["feature_names"] = model.feature_names;
    doc["label_name"] = model.label_name;
    if (model.scaler) {
        doc["scaler"] = ordered_json{{"mean", model.scaler->mean}, {"scale", model.scaler->scale}};
    } else {
        doc["scaler"] = nullptr;
    }
    ordered_json params;
    if (const auto* linear = std::get_if<LinearParams>(&model.params)) {
        params["weights"] = linear->weights;
        params["intercept"] = linear->intercept;
    } else if (const auto* nb = std::get_if<GaussianNBParams>(&model.params)) {
        params["classes"] = nb->classes;
        params["priors"] = nb->priors;
        params["means"] = nb->means;
        params["variances"] = nb->variances;
    } else {
        const auto& knn = std::get<KnnParams>(model.params);
        params["k"] = knn.k;
        params["points"] = knn.points;
        params["labels"] = knn.labels;
    }
    doc["params"] = std::move(params);
    return doc;
}

TrainedModel model_from_json(const json& doc) {
    if (!doc.is_object()) malformed("document is not an object");
    TrainedModel model;
    const auto& algorithm = field(doc, "algorithm");
    if (!algorithm.is_string()) malformed("'algorithm' must be a string");
    auto kind = algorithm_kind_from_string(algorithm.get<std::string>());
    if (!kind) throw Error("E-FORMAT", "unknown algorithm tag '" + algorithm.get<std::string>() + "'");
    model.kind = *kind;

    const auto& names = field(doc, "feature_names");
    if (!names.is_array()) malformed("'feature_names' must be an array");
    for (const auto& name : names) {
        if (!name.is_string()) malformed("'feature_names' must hold strings");
        model.feature_names.push_back(name.get<std::string>());
    }
    const auto& label = field(doc, "label_name");
    if (!label.is_string()) malformed("'label_name' must be a string");
    model.label_name = label.get<std::string>();
    const std::size_t d = model.feature_names.size();

    const auto& scaler = field(doc, "scaler");
    if (!scaler.is_null()) {
        ScalerParams s{number_array(field(scaler, "mean"), "mean"), number_array(field(scaler, "scale"), "scale")};
        if (s.mean.size() != d || s.scale.size() != d) malformed("scaler dimension mismatch");
        model.scaler = std::move(s);
    }

    const auto& params = field(doc, "params");
    switch (model.kind) {
    case AlgorithmKind::LinearRegression:
    case AlgorithmKind::LogisticRegression: {
        LinearParams p;
        p.weights = number_array(field(params, "weights"), "weights");
        const auto& intercept = field(params, "intercept");
        if (!intercept.is_number()) malformed("'intercept' must be a number");
        p.intercept = intercept.get<double>();
        if (p.weights.size() != d) malformed("weight count differs from feature count");
        model.params = std::move(p);
        break;
    }
    case AlgorithmKind::GaussianNB: {
        GaussianNBParams p;
        p.classes = label_array(field(params, "classes"), "classes");
        p.priors = number_array(field(params, "priors"), "priors");
        p.means = number_matrix(field(params, "means"), "means", d);
        p.variances = number_matrix(field(params, "variances"), "variances", d);
        const auto c = p.classes.size();
        if (c == 0 || p.priors.size() != c || p.means.size() != c || p.variances.size() != c)
            malformed("class count mismatch");
        model.params = std::move(p);
        break;
    }
    case AlgorithmKind::KNN: {
        KnnParams p;
        const auto& k = field(params, "k");
        if (!k.is_number_integer()) malformed("'k' must be an integer");
        p.k = k.get<std::int64_t>();
        p.points = number_matrix(field(params, "points"), "points", d);
        p.labels = label_array(field(params, "labels"), "labels");
        if (p.points.size() != p.labels.size()) malformed("point/label count mismatch");
        if (p.k < 1 || static_cast<std::size_t>(p.k) > p.points.size()) malformed("'k' out of range");
        model.params = std::move(p);
        break;
    }
    }
    return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("E-IO", "cannot write model '" + path.string() + "'");
    out << to_json(model).dump(2) << '\n';
    if (!out) throw Error("E-IO", "failed writing model '" + path.string() + "'");
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("E-IO", "cannot read model '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    json doc = json::parse(buffer.str(), nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw Error("E-FORMAT", "'" + path.string() + "' is not valid JSON");
    return model_from_json(doc);
}

}  // namespace tml2::ml
