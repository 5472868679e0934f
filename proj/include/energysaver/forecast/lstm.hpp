#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "energysaver/util/rng.hpp"

namespace energysaver::forecast {

class NumericError : public std::runtime_error {
public:
    NumericError(int step, const std::string& what) : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

/// Single-layer LSTM over a univariate input with a dense scalar head.
///
/// Parameters live in one flat buffer:
///   [ W: 4H x (H+1) row-major | b: 4H | w_out: H | b_out: 1 ]
/// Gate row blocks in W and b are ordered input, forget, output, candidate.
/// Each row acts on z_t = [h_{t-1}; x_t].
class LstmModel {
public:
    explicit LstmModel(int hidden);

    /// All parameters uniform in [-half_range, half_range].
    static LstmModel random_init(int hidden, util::Rng& rng, double half_range = 0.08);

    int hidden() const { return hidden_; }
    std::size_t param_count() const { return params_.size(); }

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }

    // Views into the flat buffer.
    std::span<const double> gate_weights() const;  // 4H x (H+1)
    std::span<const double> gate_bias() const;     // 4H
    std::span<const double> head_weights() const;  // H
    double head_bias() const { return params_.back(); }
    double& head_bias() { return params_.back(); }
    std::span<double> gate_weights();
    std::span<double> gate_bias();
    std::span<double> head_weights();

    static std::size_t param_count_for(int hidden);

private:
    int hidden_;
    std::vector<double> params_;
};

/// Per-step activations kept for backpropagation. Buffers are laid out
/// step-major (t * H + j) and reused across samples during training.
struct LstmCache {
    int window_len = 0;
    int hidden = 0;
    double prediction = 0.0;
    std::vector<double> x;                          // T
    std::vector<double> i, f, o, g, c, tanh_c, h;   // T x H each

    void resize(int window, int hidden_size);
};

/// Runs the cell over the window and the dense head over the final hidden
/// state. Fills the cache and returns the prediction. Throws NumericError
/// identifying the first bad step if an intermediate goes non-finite.
double lstm_forward(const LstmModel& model, std::span<const double> window, LstmCache& cache);

/// Convenience overload without cache reuse.
double lstm_forward(const LstmModel& model, std::span<const double> window);

/// Accumulates d(0.5 * (prediction - target)^2)/dtheta into grad, which must
/// have param_count entries and the same layout as the parameters.
void lstm_backward_accumulate(const LstmModel& model, const LstmCache& cache, double target,
                              std::span<double> grad);

/// Fresh gradient buffer for one (cache, target) pair.
std::vector<double> lstm_backward(const LstmModel& model, const LstmCache& cache, double target);

}  // namespace energysaver::forecast
