#include "energysaver/forecast/train.hpp"

#include <cmath>

namespace energysaver::forecast {

const char* to_string(Optimizer optimizer) {
    return optimizer == Optimizer::Adam ? "adam" : "sgd";
}

Optimizer optimizer_from_string(const std::string& name) {
    if (name == "adam") return Optimizer::Adam;
    if (name == "sgd") return Optimizer::Sgd;
    throw std::invalid_argument("unknown optimizer '" + name + "', want adam or sgd");
}

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (window_len < 1) throw std::invalid_argument("window_len must be >= 1");
    if (hidden_size < 1) throw std::invalid_argument("hidden_size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
}

nlohmann::json TrainConfig::to_json() const {
    nlohmann::json j;
    j["epochs"] = epochs;
    j["batch_size"] = batch_size;
    j["window_len"] = window_len;
    j["hidden_size"] = hidden_size;
    j["learning_rate"] = learning_rate;
    j["optimizer"] = to_string(optimizer);
    j["seed"] = seed;
    return j;
}

namespace {

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t t = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

    void step(std::span<double> params, std::span<const double> grad, double lr) {
        ++t;
        const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t));
        for (std::size_t k = 0; k < params.size(); ++k) {
            m[k] = kAdamBeta1 * m[k] + (1.0 - kAdamBeta1) * grad[k];
            v[k] = kAdamBeta2 * v[k] + (1.0 - kAdamBeta2) * grad[k] * grad[k];
            const double mhat = m[k] / bc1;
            const double vhat = v[k] / bc2;
            params[k] -= lr * mhat / (std::sqrt(vhat) + kAdamEpsilon);
        }
    }
};

}  // namespace

TrainResult train(const WindowedDataset& dataset, const TrainConfig& config) {
    config.validate();
    if (dataset.size() == 0) throw std::invalid_argument("train: dataset is empty");

    util::Rng rng(config.seed);
    LstmModel model = LstmModel::random_init(config.hidden_size, rng, kInitHalfRange);

    const std::size_t n = dataset.size();
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;

    AdamState adam(config.optimizer == Optimizer::Adam ? model.param_count() : 0);
    std::vector<double> grad(model.param_count(), 0.0);
    LstmCache cache;
    std::vector<double> losses;
    losses.reserve(static_cast<std::size_t>(config.epochs));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double sq_err_sum = 0.0;
        std::size_t pos = 0;
        while (pos < n) {
            const std::size_t batch_end = std::min(pos + static_cast<std::size_t>(config.batch_size), n);
            const double batch_count = static_cast<double>(batch_end - pos);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t k = pos; k < batch_end; ++k) {
                const std::size_t idx = order[k];
                double pred;
                try {
                    pred = lstm_forward(model, dataset.input(idx), cache);
                } catch (const NumericError& e) {
                    throw TrainingError(epoch, std::string("training diverged: ") + e.what());
                }
                const double target = dataset.target(idx);
                sq_err_sum += (pred - target) * (pred - target);
                lstm_backward_accumulate(model, cache, target, grad);
            }
            for (double& g : grad) g /= batch_count;
            if (config.optimizer == Optimizer::Adam) {
                adam.step(model.params(), grad, config.learning_rate);
            } else {
                auto params = model.params();
                for (std::size_t k = 0; k < params.size(); ++k)
                    params[k] -= config.learning_rate * grad[k];
            }
            pos = batch_end;
        }
        const double epoch_loss = sq_err_sum / static_cast<double>(n);
        if (!std::isfinite(epoch_loss))
            throw TrainingError(epoch, "training diverged: non-finite loss at epoch " +
                                           std::to_string(epoch));
        losses.push_back(epoch_loss);
    }
    return TrainResult{std::move(model), std::move(losses)};
}

}  // namespace energysaver::forecast
