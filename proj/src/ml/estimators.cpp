#include "tml2/error.hpp"
#include "tml2/ml.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

namespace tml2::ml {

namespace {

constexpr double kSingularPivot = 1e-12;

void require_shape(const Matrix& x, std::span<const double> y) {
    if (x.empty()) throw Error("E-SCHEMA", "training requires at least one row");
    if (x.size() != y.size()) throw Error("E-DIM", "feature rows and labels differ in count");
    const auto d = x.front().size();
    for (const auto& row : x) {
        if (row.size() != d) throw Error("E-DIM", "ragged feature matrix");
    }
}

std::int64_t to_class_label(double value) {
    if (!std::isfinite(value) || std::trunc(value) != value || std::abs(value) > 9.0e15)
        throw Error("E-SCHEMA", "class label is not an integer: " + std::to_string(value));
    return static_cast<std::int64_t>(value);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) sum += a[j] * b[j];
    return sum;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Gaussian elimination with partial pivoting on a dense square system.
Vector solve(Matrix a, Vector b) {
    const std::size_t m = b.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < kSingularPivot)
            throw Error("E-SINGULAR", "normal equations are numerically singular");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < m; ++r) {
            const double factor = a[r][col] / a[col][col];
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < m; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    Vector solution(m);
    for (std::size_t i = m; i-- > 0;) {
        double sum = b[i];
        for (std::size_t c = i + 1; c < m; ++c) sum -= a[i][c] * solution[c];
        solution[i] = sum / a[i][i];
    }
    return solution;
}

std::int64_t knn_vote(const KnnParams& params, std::span<const double> x) {
    std::vector<std::pair<double, std::size_t>> by_distance;
    by_distance.reserve(params.points.size());
    for (std::size_t i = 0; i < params.points.size(); ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double diff = params.points[i][j] - x[j];
            sq += diff * diff;
        }
        by_distance.emplace_back(sq, i);
    }
    const auto k = static_cast<std::size_t>(params.k);
    std::partial_sort(by_distance.begin(), by_distance.begin() + static_cast<std::ptrdiff_t>(k),
                      by_distance.end());
    std::map<std::int64_t, int> votes;
    for (std::size_t i = 0; i < k; ++i) ++votes[params.labels[by_distance[i].second]];
    std::int64_t best = votes.begin()->first;
    int best_count = 0;
    for (const auto& [label, count] : votes) {
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return best;
}

}  // namespace

std::string_view to_string(AlgorithmKind kind) noexcept {
    switch (kind) {
    case AlgorithmKind::LinearRegression: return "LinearRegression";
    case AlgorithmKind::LogisticRegression: return "LogisticRegression";
    case AlgorithmKind::GaussianNB: return "GaussianNB";
    case AlgorithmKind::KNN: return "KNN";
    }
    return "?";
}

std::optional<AlgorithmKind> algorithm_kind_from_string(std::string_view name) noexcept {
    for (auto kind : {AlgorithmKind::LinearRegression, AlgorithmKind::LogisticRegression,
                      AlgorithmKind::GaussianNB, AlgorithmKind::KNN}) {
        if (to_string(kind) == name) return kind;
    }
    return std::nullopt;
}

bool is_classifier(AlgorithmKind kind) noexcept { return kind != AlgorithmKind::LinearRegression; }

std::size_t TrainedModel::feature_count() const noexcept {
    return std::visit(
        [](const auto& p) -> std::size_t {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LinearParams>) {
                return p.weights.size();
            } else if constexpr (std::is_same_v<T, GaussianNBParams>) {
                return p.means.empty() ? 0 : p.means.front().size();
            } else {
                return p.points.empty() ? 0 : p.points.front().size();
            }
        },
        params);
}

TrainedModel train_linear_regression(const Matrix& x, std::span<const double> y, double lambda) {
    require_shape(x, y);
    const std::size_t d = x.front().size();
    const std::size_t m = d + 1;  // intercept occupies the last slot
    Matrix normal(m, Vector(m, 0.0));
    Vector rhs(m, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        Vector a(x[i]);
        a.push_back(1.0);
        for (std::size_t r = 0; r < m; ++r) {
            rhs[r] += a[r] * y[i];
            for (std::size_t c = 0; c < m; ++c) normal[r][c] += a[r] * a[c];
        }
    }
    for (std::size_t j = 0; j < d; ++j) normal[j][j] += lambda;
    Vector beta = solve(std::move(normal), std::move(rhs));

    TrainedModel model;
    model.kind = AlgorithmKind::LinearRegression;
    LinearParams params;
    params.intercept = beta.back();
    beta.pop_back();
    params.weights = std::move(beta);
    model.params = std::move(params);
    return model;
}

double logistic_loss(const Matrix& x, std::span<const double> y, const LinearParams& params) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double z = dot(params.weights, x[i]) + params.intercept;
        total += softplus(z) - y[i] * z;
    }
    return total / static_cast<double>(x.size());
}

LinearParams logistic_gradient(const Matrix& x, std::span<const double> y, const LinearParams& params) {
    LinearParams grad;
    grad.weights.assign(params.weights.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double residual = sigmoid(dot(params.weights, x[i]) + params.intercept) - y[i];
        for (std::size_t j = 0; j < grad.weights.size(); ++j) grad.weights[j] += residual * x[i][j];
        grad.intercept += residual;
    }
    const auto n = static_cast<double>(x.size());
    for (auto& g : grad.weights) g /= n;
    grad.intercept /= n;
    return grad;
}

TrainedModel train_logistic_regression(const Matrix& x, std::span<const double> y, double lr,
                                       std::int64_t epochs) {
    require_shape(x, y);
    for (double label : y) {
        if (label != 0.0 && label != 1.0)
            throw Error("E-SCHEMA", "logistic regression labels must be 0 or 1");
    }
    LinearParams params;
    params.weights.assign(x.front().size(), 0.0);
    for (std::int64_t epoch = 0; epoch < epochs; ++epoch) {
        const LinearParams grad = logistic_gradient(x, y, params);
        for (std::size_t j = 0; j < params.weights.size(); ++j) params.weights[j] -= lr * grad.weights[j];
        params.intercept -= lr * grad.intercept;
    }
    TrainedModel model;
    model.kind = AlgorithmKind::LogisticRegression;
    model.params = std::move(params);
    return model;
}

TrainedModel train_gaussian_nb(const Matrix& x, std::span<const double> y, double var_smoothing) {
    require_shape(x, y);
    const std::size_t d = x.front().size();
    const auto n = static_cast<double>(x.size());

    // Floor is relative to the widest feature over the whole training set.
    const ScalerParams overall = fit_scaler(x);
    double max_variance = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double var = 0.0;
        for (const auto& row : x) var += (row[j] - overall.mean[j]) * (row[j] - overall.mean[j]);
        max_variance = std::max(max_variance, var / n);
    }
    const double floor = max_variance > 0.0 ? var_smoothing * max_variance : var_smoothing;

    std::map<std::int64_t, std::vector<std::size_t>> rows_of;
    for (std::size_t i = 0; i < x.size(); ++i) rows_of[to_class_label(y[i])].push_back(i);

    GaussianNBParams params;
    for (const auto& [label, rows] : rows_of) {
        const auto count = static_cast<double>(rows.size());
        Vector mean(d, 0.0);
        Vector variance(d, 0.0);
        for (auto i : rows)
            for (std::size_t j = 0; j < d; ++j) mean[j] += x[i][j];
        for (auto& m : mean) m /= count;
        for (auto i : rows)
            for (std::size_t j = 0; j < d; ++j) variance[j] += (x[i][j] - mean[j]) * (x[i][j] - mean[j]);
        for (auto& v : variance) v = std::max(v / count, floor);
        params.classes.push_back(label);
        params.priors.push_back(count / n);
        params.means.push_back(std::move(mean));
        params.variances.push_back(std::move(variance));
    }
    TrainedModel model;
    model.kind = AlgorithmKind::GaussianNB;
    model.params = std::move(params);
    return model;
}

Vector gaussian_nb_log_posteriors(const GaussianNBParams& params, std::span<const double> x) {
    Vector scores;
    scores.reserve(params.classes.size());
    for (std::size_t c = 0; c < params.classes.size(); ++c) {
        double score = std::log(params.priors[c]);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double var = params.variances[c][j];
            const double diff = x[j] - params.means[c][j];
            score += -0.5 * std::log(2.0 * std::numbers::pi * var) - diff * diff / (2.0 * var);
        }
        scores.push_back(score);
    }
    return scores;
}

TrainedModel train_knn(const Matrix& x, std::span<const double> y, std::int64_t k) {
    require_shape(x, y);
    if (k < 1 || static_cast<std::size_t>(k) > x.size())
        throw Error("E-SCHEMA", "k=" + std::to_string(k) + " exceeds the " + std::to_string(x.size()) +
                                    " training rows");
    KnnParams params;
    params.points = x;
    params.k = k;
    for (double label : y) params.labels.push_back(to_class_label(label));
    TrainedModel model;
    model.kind = AlgorithmKind::KNN;
    model.params = std::move(params);
    return model;
}

TrainedModel train(const AlgorithmConfig& config, const Dataset& data, bool standardize,
                   const std::optional<ScalerParams>& scaler) {
    Matrix x = data.features();
    const Vector y = data.labels();
    std::optional<ScalerParams> fitted;
    if (standardize) {
        fitted = scaler ? *scaler : fit_scaler(x);
        x = apply_scaler(*fitted, x);
    }

    TrainedModel model;
    switch (config.kind) {
    case AlgorithmKind::LinearRegression: model = train_linear_regression(x, y, config.lambda); break;
    case AlgorithmKind::LogisticRegression:
        model = train_logistic_regression(x, y, config.lr, config.epochs);
        break;
    case AlgorithmKind::GaussianNB: model = train_gaussian_nb(x, y, config.var_smoothing); break;
    case AlgorithmKind::KNN: model = train_knn(x, y, config.k); break;
    }
    model.scaler = std::move(fitted);
    model.feature_names.assign(data.columns.begin(), data.columns.end() - 1);
    model.label_name = data.columns.back();
    return model;
}

Prediction predict(const TrainedModel& model, std::span<const double> x) {
    if (x.size() != model.feature_count()) {
        throw Error("E-DIM", "expected " + std::to_string(model.feature_count()) + " features, got " +
                                 std::to_string(x.size()));
    }
    Vector scaled;
    if (model.scaler) {
        scaled = apply_scaler(*model.scaler, x);
        x = scaled;
    }
    switch (model.kind) {
    case AlgorithmKind::LinearRegression: {
        const auto& p = std::get<LinearParams>(model.params);
        return dot(p.weights, x) + p.intercept;
    }
    case AlgorithmKind::LogisticRegression: {
        const auto& p = std::get<LinearParams>(model.params);
        return std::int64_t{dot(p.weights, x) + p.intercept >= 0.0 ? 1 : 0};
    }
    case AlgorithmKind::GaussianNB: {
        const auto& p = std::get<GaussianNBParams>(model.params);
        const Vector scores = gaussian_nb_log_posteriors(p, x);
        std::size_t best = 0;
        for (std::size_t c = 1; c < scores.size(); ++c) {
            if (scores[c] > scores[best]) best = c;
        }
        return p.classes[best];
    }
    case AlgorithmKind::KNN: return knn_vote(std::get<KnnParams>(model.params), x);
    }
    return 0.0;
}

TrainingMetric evaluate(const TrainedModel& model, const Dataset& data) {
    const Matrix x = data.features();
    const Vector y = data.labels();
    if (is_classifier(model.kind)) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (static_cast<double>(std::get<std::int64_t>(predict(model, x[i]))) == y[i]) ++correct;
        }
        return {"accuracy", static_cast<double>(correct) / static_cast<double>(x.size())};
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double err = std::get<double>(predict(model, x[i])) - y[i];
        sq += err * err;
    }
    return {"rmse", std::sqrt(sq / static_cast<double>(x.size()))};
}

}  // namespace tml2::ml
