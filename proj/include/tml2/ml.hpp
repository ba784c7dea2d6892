#pragma once

// Native data-analytics engine: CSV ingestion, z-score scaling, four classical
// estimators and JSON persistence. Everything here is deterministic; nothing
// draws random numbers.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace tml2::ml {

using Vector = std::vector<double>;
/// Row-major; every row has the same length.
using Matrix = std::vector<Vector>;

enum class AlgorithmKind { LinearRegression, LogisticRegression, GaussianNB, KNN };

std::string_view to_string(AlgorithmKind kind) noexcept;
std::optional<AlgorithmKind> algorithm_kind_from_string(std::string_view name) noexcept;
bool is_classifier(AlgorithmKind kind) noexcept;

/// Resolved hyperparameters; fields not used by `kind` keep their defaults.
struct AlgorithmConfig {
    AlgorithmKind kind = AlgorithmKind::LinearRegression;
    double lambda = 0.0;
    double lr = 0.1;
    std::int64_t epochs = 500;
    double var_smoothing = 1e-9;
    std::int64_t k = 3;
};

struct Dataset {
    /// Feature columns in requested order, label last.
    std::vector<std::string> columns;
    Matrix rows;

    std::size_t n() const noexcept { return rows.size(); }
    std::size_t d() const noexcept { return columns.size(); }
    Matrix features() const;
    Vector labels() const;
};

/// Reads a headered, comma-separated numeric table and reorders its columns
/// to (features..., label). Throws Error with E-IO, E-SCHEMA or E-PARSE.
Dataset load_dataset(const std::filesystem::path& path, const std::vector<std::string>& features,
                     const std::string& label);
Dataset parse_dataset(std::string_view text, const std::vector<std::string>& features,
                      const std::string& label, std::string_view source_name = "<memory>");

struct ScalerParams {
    Vector mean;
    Vector scale;  // population standard deviation, 1.0 for constant columns

    bool operator==(const ScalerParams&) const = default;
};

ScalerParams fit_scaler(const Matrix& x);
Matrix apply_scaler(const ScalerParams& scaler, const Matrix& x);
Vector apply_scaler(const ScalerParams& scaler, std::span<const double> x);

/// Weights and intercept of a linear decision function (linear and logistic
/// regression share this shape).
struct LinearParams {
    Vector weights;
    double intercept = 0.0;

    bool operator==(const LinearParams&) const = default;
};

struct GaussianNBParams {
    std::vector<std::int64_t> classes;  // ascending
    Vector priors;
    Matrix means;      // [class][feature]
    Matrix variances;  // [class][feature], already floored

    bool operator==(const GaussianNBParams&) const = default;
};

struct KnnParams {
    Matrix points;
    std::vector<std::int64_t> labels;
    std::int64_t k = 3;

    bool operator==(const KnnParams&) const = default;
};

using ModelParams = std::variant<LinearParams, GaussianNBParams, KnnParams>;

struct TrainedModel {
    AlgorithmKind kind = AlgorithmKind::LinearRegression;
    ModelParams params;
    std::optional<ScalerParams> scaler;
    std::vector<std::string> feature_names;
    std::string label_name;

    std::size_t feature_count() const noexcept;
    bool operator==(const TrainedModel&) const = default;
};

/// Real for regression, Int class label for classifiers.
using Prediction = std::variant<double, std::int64_t>;

// Raw estimators. They see X exactly as given (no scaler) and leave the
// names of the returned model empty.
TrainedModel train_linear_regression(const Matrix& x, std::span<const double> y, double lambda);
TrainedModel train_logistic_regression(const Matrix& x, std::span<const double> y, double lr,
                                       std::int64_t epochs);
TrainedModel train_gaussian_nb(const Matrix& x, std::span<const double> y, double var_smoothing);
TrainedModel train_knn(const Matrix& x, std::span<const double> y, std::int64_t k);

/// Mean log-loss of a logistic model and its gradient.
double logistic_loss(const Matrix& x, std::span<const double> y, const LinearParams& params);
LinearParams logistic_gradient(const Matrix& x, std::span<const double> y, const LinearParams& params);

/// log P(c) + sum_j log N(x_j | mean_cj, var_cj), one entry per class.
Vector gaussian_nb_log_posteriors(const GaussianNBParams& params, std::span<const double> x);

/// Fits `config` on `data`, standardizing the features first when
/// `standardize` is set. The scaler is stored in the returned model.
TrainedModel train(const AlgorithmConfig& config, const Dataset& data, bool standardize,
                   const std::optional<ScalerParams>& scaler = std::nullopt);

/// Applies the stored scaler (if any), then the decision function.
/// Throws Error E-DIM when `x` has the wrong length.
Prediction predict(const TrainedModel& model, std::span<const double> x);

/// Training-set accuracy for classifiers, RMSE for regression.
struct TrainingMetric {
    std::string name;
    double value = 0.0;
};
TrainingMetric evaluate(const TrainedModel& model, const Dataset& data);

nlohmann::ordered_json to_json(const TrainedModel& model);
/// Throws Error E-FORMAT on malformed documents.
TrainedModel model_from_json(const nlohmann::json& doc);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace tml2::ml
