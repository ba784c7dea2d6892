# Generated from thermostat.tml2 (thing Heater, data_analytics model).
# Regenerate from the model instead of editing this file.
"""Data-analytics entry points for thing Heater.

    preprocess(dataset_path) -> (scaled features, labels, scaler)
    train(dataset_path, model_out) -> fitted estimator, persisted to model_out
    predict(model_in, feature_values) -> float
"""

import csv
import pickle
import sys

import numpy as np
from sklearn.linear_model import LinearRegression
from sklearn.preprocessing import StandardScaler

FEATURES = ["outdoor", "setpoint"]
LABEL = "power"
PREDICTION = "demand"
ALGORITHM = "LinearRegression"
HYPERPARAMETERS = {"lambda": 0.0}


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
    return LinearRegression()


def train(dataset_path, model_out):
    x, y, scaler = preprocess(dataset_path)
    estimator = make_estimator()
    estimator.fit(x, y)
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
    return float(value)


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
