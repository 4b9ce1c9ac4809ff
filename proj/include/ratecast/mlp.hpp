#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace ratecast {

using Matrix = std::vector<std::vector<double>>;

struct MlpConfig {
    std::vector<unsigned> layers = {19, 10, 5, 1};
    double learning_rate = 0.01;
    double momentum = 0.9;
    unsigned epochs = 2000;
    std::uint64_t seed = 1;
};

// Column-wise z-score transform, fit on training data only.
struct Normalizer {
    std::vector<double> mean, std_dev;

    void fit(const Matrix& x) {
        if (x.empty()) throw std::invalid_argument("Normalizer: no rows");
        const std::size_t d = x[0].size();
        mean.assign(d, 0.0);
        std_dev.assign(d, 0.0);
        for (const auto& row : x) {
            for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
        }
        for (std::size_t j = 0; j < d; ++j) mean[j] /= double(x.size());
        for (const auto& row : x) {
            for (std::size_t j = 0; j < d; ++j) {
                const double c = row[j] - mean[j];
                std_dev[j] += c * c;
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            std_dev[j] = std::sqrt(std_dev[j] / double(x.size()));
            if (std_dev[j] == 0.0) std_dev[j] = 1.0;
        }
    }

    std::vector<double> apply(const std::vector<double>& row) const {
        std::vector<double> out(row.size());
        for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean[j]) / std_dev[j];
        return out;
    }
};

// Fully connected network, tanh hidden units, linear output, trained by
// full-batch gradient descent with momentum on mean squared error. Labels
// are scaled by the largest training label so the loss starts well inside
// tanh's linear range.
class Mlp {
  public:
    explicit Mlp(MlpConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.layers.size() < 2) throw std::invalid_argument("Mlp: need at least two layers");
        if (cfg_.layers.back() != 1) throw std::invalid_argument("Mlp: single output expected");
        std::size_t total = 0;
        for (std::size_t l = 0; l + 1 < cfg_.layers.size(); ++l) {
            offsets_.push_back(total);
            total += std::size_t(cfg_.layers[l + 1]) * cfg_.layers[l] + cfg_.layers[l + 1];
        }
        params_.assign(total, 0.0);
        init_weights();
    }

    void init_weights() {
        std::mt19937_64 rng(cfg_.seed);
        for (std::size_t l = 0; l + 1 < cfg_.layers.size(); ++l) {
            const unsigned fan_in = cfg_.layers[l];
            const unsigned fan_out = cfg_.layers[l + 1];
            const double bound = 1.0 / std::sqrt(double(fan_in));
            std::uniform_real_distribution<double> uni(-bound, bound);
            double* w = params_.data() + offsets_[l];
            for (unsigned i = 0; i < fan_out * fan_in; ++i) w[i] = uni(rng);
            for (unsigned i = 0; i < fan_out; ++i) w[fan_out * fan_in + i] = 0.0;
        }
    }

    // Network output in scaled label space; input must be normalized.
    double forward(const std::vector<double>& x) const {
        std::vector<double> a = x, next;
        for (std::size_t l = 0; l + 1 < cfg_.layers.size(); ++l) {
            const unsigned n_in = cfg_.layers[l], n_out = cfg_.layers[l + 1];
            const double* w = params_.data() + offsets_[l];
            const double* b = w + std::size_t(n_out) * n_in;
            next.assign(n_out, 0.0);
            for (unsigned i = 0; i < n_out; ++i) {
                double s = b[i];
                for (unsigned j = 0; j < n_in; ++j) s += w[std::size_t(i) * n_in + j] * a[j];
                next[i] = l + 2 < cfg_.layers.size() ? std::tanh(s) : s;
            }
            a.swap(next);
        }
        return a[0];
    }

    // Rate prediction: unscaled and clamped to the physical range.
    double predict(const std::vector<double>& x) const {
        return std::max(0.0, forward(x) * label_scale_);
    }

    double compute_loss(const Matrix& x, const std::vector<double>& y_scaled) const {
        double loss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = forward(x[i]) - y_scaled[i];
            loss += e * e;
        }
        return loss / double(x.size());
    }

    // Mean-squared-error gradient over the whole batch, via backprop.
    void compute_gradient(const Matrix& x, const std::vector<double>& y_scaled,
                          std::vector<double>& grad) const {
        grad.assign(params_.size(), 0.0);
        const std::size_t depth = cfg_.layers.size() - 1;
        std::vector<std::vector<double>> act(depth + 1);
        std::vector<std::vector<double>> delta(depth);
        for (std::size_t s = 0; s < x.size(); ++s) {
            act[0] = x[s];
            for (std::size_t l = 0; l < depth; ++l) {
                const unsigned n_in = cfg_.layers[l], n_out = cfg_.layers[l + 1];
                const double* w = params_.data() + offsets_[l];
                const double* b = w + std::size_t(n_out) * n_in;
                act[l + 1].assign(n_out, 0.0);
                for (unsigned i = 0; i < n_out; ++i) {
                    double v = b[i];
                    for (unsigned j = 0; j < n_in; ++j) v += w[std::size_t(i) * n_in + j] * act[l][j];
                    act[l + 1][i] = l + 1 < depth ? std::tanh(v) : v;
                }
            }
            delta[depth - 1] = {2.0 * (act[depth][0] - y_scaled[s]) / double(x.size())};
            for (std::size_t l = depth - 1; l-- > 0;) {
                const unsigned n_out = cfg_.layers[l + 1], n_next = cfg_.layers[l + 2];
                const double* w_next = params_.data() + offsets_[l + 1];
                delta[l].assign(n_out, 0.0);
                for (unsigned i = 0; i < n_out; ++i) {
                    double s_up = 0.0;
                    for (unsigned k = 0; k < n_next; ++k) {
                        s_up += w_next[std::size_t(k) * n_out + i] * delta[l + 1][k];
                    }
                    delta[l][i] = s_up * (1.0 - act[l + 1][i] * act[l + 1][i]);
                }
            }
            for (std::size_t l = 0; l < depth; ++l) {
                const unsigned n_in = cfg_.layers[l], n_out = cfg_.layers[l + 1];
                double* gw = grad.data() + offsets_[l];
                double* gb = gw + std::size_t(n_out) * n_in;
                for (unsigned i = 0; i < n_out; ++i) {
                    for (unsigned j = 0; j < n_in; ++j) {
                        gw[std::size_t(i) * n_in + j] += delta[l][i] * act[l][j];
                    }
                    gb[i] += delta[l][i];
                }
            }
        }
    }

    // Full-batch training; records the loss of every epoch before its step.
    void train(const Matrix& x, const std::vector<double>& y) {
        if (x.empty() || x.size() != y.size()) throw std::invalid_argument("Mlp::train: bad data");
        label_scale_ = *std::max_element(y.begin(), y.end());
        if (label_scale_ <= 0.0) label_scale_ = 1.0;
        std::vector<double> ys(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) ys[i] = y[i] / label_scale_;

        std::vector<double> vel(params_.size(), 0.0), grad;
        losses_.clear();
        losses_.reserve(cfg_.epochs);
        for (unsigned e = 0; e < cfg_.epochs; ++e) {
            losses_.push_back(compute_loss(x, ys));
            if (!std::isfinite(losses_.back())) throw std::runtime_error("Mlp::train: diverged");
            compute_gradient(x, ys, grad);
            for (std::size_t i = 0; i < params_.size(); ++i) {
                vel[i] = cfg_.momentum * vel[i] + grad[i];
                params_[i] -= cfg_.learning_rate * vel[i];
            }
        }
    }

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<double>& epoch_losses() const { return losses_; }
    double label_scale() const { return label_scale_; }
    void set_label_scale(double s) { label_scale_ = s; }
    const MlpConfig& config() const { return cfg_; }

  private:
    MlpConfig cfg_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
    std::vector<double> losses_;
    double label_scale_ = 1.0;
};

}  // namespace ratecast
