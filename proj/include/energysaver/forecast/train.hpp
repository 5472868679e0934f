#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "energysaver/forecast/lstm.hpp"
#include "energysaver/forecast/window.hpp"

namespace energysaver::forecast {

enum class Optimizer { Adam, Sgd };

const char* to_string(Optimizer optimizer);
Optimizer optimizer_from_string(const std::string& name);

struct TrainConfig {
    int epochs = 100;
    int batch_size = 32;
    int window_len = 90;
    int hidden_size = 64;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Adam;
    std::uint64_t seed = 1;

    void validate() const;
    nlohmann::json to_json() const;
};

// Adam moment decay/epsilon constants.
inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

/// Weight initialization half-range, uniform in [-0.08, 0.08].
inline constexpr double kInitHalfRange = 0.08;

class TrainingError : public std::runtime_error {
public:
    TrainingError(int epoch, const std::string& what) : std::runtime_error(what), epoch_(epoch) {}
    int epoch() const { return epoch_; }

private:
    int epoch_;
};

struct TrainResult {
    LstmModel model;
    std::vector<double> epoch_loss;  // mean squared error per epoch
};

/// Seeded init, per-epoch seeded shuffling, mini-batches with averaged
/// gradients, optimizer step per batch. Bit-reproducible for a given
/// (seed, config, data). Throws TrainingError with the epoch index when the
/// loss goes non-finite.
TrainResult train(const WindowedDataset& dataset, const TrainConfig& config);

}  // namespace energysaver::forecast
