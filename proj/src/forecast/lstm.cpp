#include "energysaver/forecast/lstm.hpp"

#include <cmath>

namespace energysaver::forecast {

namespace {

inline double sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

std::size_t LstmModel::param_count_for(int hidden) {
    const std::size_t h = static_cast<std::size_t>(hidden);
    return 4 * h * (h + 1) + 4 * h + h + 1;
}

LstmModel::LstmModel(int hidden) : hidden_(hidden) {
    if (hidden < 1) throw std::invalid_argument("lstm hidden size must be >= 1");
    params_.assign(param_count_for(hidden), 0.0);
}

LstmModel LstmModel::random_init(int hidden, util::Rng& rng, double half_range) {
    LstmModel model(hidden);
    for (double& p : model.params_) p = rng.uniform(-half_range, half_range);
    return model;
}

std::span<const double> LstmModel::gate_weights() const {
    const std::size_t h = static_cast<std::size_t>(hidden_);
    return std::span<const double>(params_).subspan(0, 4 * h * (h + 1));
}
std::span<const double> LstmModel::gate_bias() const {
    const std::size_t h = static_cast<std::size_t>(hidden_);
    return std::span<const double>(params_).subspan(4 * h * (h + 1), 4 * h);
}
std::span<const double> LstmModel::head_weights() const {
    const std::size_t h = static_cast<std::size_t>(hidden_);
    return std::span<const double>(params_).subspan(4 * h * (h + 1) + 4 * h, h);
}
std::span<double> LstmModel::gate_weights() {
    const std::size_t h = static_cast<std::size_t>(hidden_);
    return std::span<double>(params_).subspan(0, 4 * h * (h + 1));
}
std::span<double> LstmModel::gate_bias() {
    const std::size_t h = static_cast<std::size_t>(hidden_);
    return std::span<double>(params_).subspan(4 * h * (h + 1), 4 * h);
}
std::span<double> LstmModel::head_weights() {
    const std::size_t h = static_cast<std::size_t>(hidden_);
    return std::span<double>(params_).subspan(4 * h * (h + 1) + 4 * h, h);
}

void LstmCache::resize(int window, int hidden_size) {
    window_len = window;
    hidden = hidden_size;
    const std::size_t th = static_cast<std::size_t>(window) * static_cast<std::size_t>(hidden_size);
    x.resize(static_cast<std::size_t>(window));
    i.resize(th);
    f.resize(th);
    o.resize(th);
    g.resize(th);
    c.resize(th);
    tanh_c.resize(th);
    h.resize(th);
}

double lstm_forward(const LstmModel& model, std::span<const double> window, LstmCache& cache) {
    const int H = model.hidden();
    const int T = static_cast<int>(window.size());
    if (T < 1) throw std::invalid_argument("lstm_forward: window must not be empty");
    cache.resize(T, H);

    const std::size_t cols = static_cast<std::size_t>(H) + 1;
    const double* W = model.gate_weights().data();
    const double* b = model.gate_bias().data();
    const double* w_out = model.head_weights().data();

    std::vector<double> z(cols, 0.0);
    std::vector<double> pre(4 * static_cast<std::size_t>(H));

    for (int t = 0; t < T; ++t) {
        const std::size_t at = static_cast<std::size_t>(t) * H;
        const double* h_prev = t > 0 ? cache.h.data() + (at - H) : nullptr;
        const double* c_prev = t > 0 ? cache.c.data() + (at - H) : nullptr;
        for (int j = 0; j < H; ++j) z[static_cast<std::size_t>(j)] = h_prev ? h_prev[j] : 0.0;
        z[static_cast<std::size_t>(H)] = window[static_cast<std::size_t>(t)];
        cache.x[static_cast<std::size_t>(t)] = window[static_cast<std::size_t>(t)];

        for (int r = 0; r < 4 * H; ++r) {
            const double* row = W + static_cast<std::size_t>(r) * cols;
            double acc = b[r];
            for (std::size_t k = 0; k < cols; ++k) acc += row[k] * z[k];
            pre[static_cast<std::size_t>(r)] = acc;
        }
        for (int j = 0; j < H; ++j) {
            const double iv = sigmoid(pre[static_cast<std::size_t>(j)]);
            const double fv = sigmoid(pre[static_cast<std::size_t>(H + j)]);
            const double ov = sigmoid(pre[static_cast<std::size_t>(2 * H + j)]);
            const double gv = std::tanh(pre[static_cast<std::size_t>(3 * H + j)]);
            const double cv = fv * (c_prev ? c_prev[j] : 0.0) + iv * gv;
            const double tc = std::tanh(cv);
            cache.i[at + j] = iv;
            cache.f[at + j] = fv;
            cache.o[at + j] = ov;
            cache.g[at + j] = gv;
            cache.c[at + j] = cv;
            cache.tanh_c[at + j] = tc;
            cache.h[at + j] = ov * tc;
        }
    }

    const double* h_last = cache.h.data() + static_cast<std::size_t>(T - 1) * H;
    double pred = model.head_bias();
    for (int j = 0; j < H; ++j) pred += w_out[j] * h_last[j];
    cache.prediction = pred;

    if (!std::isfinite(pred)) {
        for (int t = 0; t < T; ++t) {
            const std::size_t at = static_cast<std::size_t>(t) * H;
            for (int j = 0; j < H; ++j) {
                if (!std::isfinite(cache.c[at + j]) || !std::isfinite(cache.h[at + j]))
                    throw NumericError(t, "lstm_forward: non-finite state at step " +
                                              std::to_string(t));
            }
        }
        throw NumericError(T - 1, "lstm_forward: non-finite prediction");
    }
    return pred;
}

double lstm_forward(const LstmModel& model, std::span<const double> window) {
    LstmCache cache;
    return lstm_forward(model, window, cache);
}

void lstm_backward_accumulate(const LstmModel& model, const LstmCache& cache, double target,
                              std::span<double> grad) {
    const int H = model.hidden();
    const int T = cache.window_len;
    if (cache.hidden != H) throw std::invalid_argument("lstm_backward: cache/model shape mismatch");
    if (grad.size() != model.param_count())
        throw std::invalid_argument("lstm_backward: gradient buffer has wrong size");

    const std::size_t cols = static_cast<std::size_t>(H) + 1;
    const std::size_t wsize = 4 * static_cast<std::size_t>(H) * cols;
    const double* W = model.gate_weights().data();
    const double* w_out = model.head_weights().data();
    double* gW = grad.data();
    double* gb = grad.data() + wsize;
    double* g_wout = gb + 4 * static_cast<std::size_t>(H);
    double* g_bout = g_wout + H;

    const double dpred = cache.prediction - target;
    const double* h_last = cache.h.data() + static_cast<std::size_t>(T - 1) * H;
    for (int j = 0; j < H; ++j) g_wout[j] += dpred * h_last[j];
    *g_bout += dpred;

    std::vector<double> dh(static_cast<std::size_t>(H));
    std::vector<double> dc(static_cast<std::size_t>(H), 0.0);
    std::vector<double> da(4 * static_cast<std::size_t>(H));
    for (int j = 0; j < H; ++j) dh[static_cast<std::size_t>(j)] = dpred * w_out[j];

    for (int t = T - 1; t >= 0; --t) {
        const std::size_t at = static_cast<std::size_t>(t) * H;
        const double* c_prev = t > 0 ? cache.c.data() + (at - H) : nullptr;
        const double* h_prev = t > 0 ? cache.h.data() + (at - H) : nullptr;

        for (int j = 0; j < H; ++j) {
            const std::size_t k = at + j;
            const double iv = cache.i[k], fv = cache.f[k], ov = cache.o[k], gv = cache.g[k];
            const double tc = cache.tanh_c[k];
            const double dho = dh[static_cast<std::size_t>(j)];
            const double do_ = dho * tc;
            const double dcj = dc[static_cast<std::size_t>(j)] + dho * ov * (1.0 - tc * tc);
            const double di = dcj * gv;
            const double dg = dcj * iv;
            const double df = dcj * (c_prev ? c_prev[j] : 0.0);
            da[static_cast<std::size_t>(j)] = di * iv * (1.0 - iv);
            da[static_cast<std::size_t>(H + j)] = df * fv * (1.0 - fv);
            da[static_cast<std::size_t>(2 * H + j)] = do_ * ov * (1.0 - ov);
            da[static_cast<std::size_t>(3 * H + j)] = dg * (1.0 - gv * gv);
            dc[static_cast<std::size_t>(j)] = dcj * fv;  // flows to step t-1
        }

        const double xt = cache.x[static_cast<std::size_t>(t)];
        std::fill(dh.begin(), dh.end(), 0.0);
        for (int r = 0; r < 4 * H; ++r) {
            const double a = da[static_cast<std::size_t>(r)];
            if (a == 0.0) continue;
            const double* row = W + static_cast<std::size_t>(r) * cols;
            double* grow = gW + static_cast<std::size_t>(r) * cols;
            for (int j = 0; j < H; ++j) {
                grow[j] += a * (h_prev ? h_prev[j] : 0.0);
                dh[static_cast<std::size_t>(j)] += a * row[j];
            }
            grow[H] += a * xt;
            gb[r] += a;
        }
    }
}

std::vector<double> lstm_backward(const LstmModel& model, const LstmCache& cache, double target) {
    std::vector<double> grad(model.param_count(), 0.0);
    lstm_backward_accumulate(model, cache, target, grad);
    return grad;
}

}  // namespace energysaver::forecast
