#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "ratecast/features.hpp"
#include "ratecast/mlp.hpp"
#include "ratecast/tbs.hpp"
#include "ratecast/traffic.hpp"

namespace ratecast {

// Rate of a lone device at a placement: one full-carrier grant per
// subframe at the placement's MCS until a megabyte is through.
inline double empty_cell_rate_bps(Placement p) {
    const std::uint64_t bits = 8'000'000;
    const std::uint32_t per_grant = compute_tbs(placement_params(p).mcs_cap, 50);
    const std::uint64_t grants = (bits + per_grant - 1) / per_grant;
    return double(bits) * 1000.0 / double(grants);
}

inline Placement placement_from_rsrp(double rsrp_dbm) {
    static constexpr Placement kAll[3] = {Placement::Near, Placement::Intermediate,
                                          Placement::Far};
    Placement best = Placement::Near;
    double best_d = 1e18;
    for (Placement p : kAll) {
        const double d = std::abs(placement_params(p).rsrp_dbm - rsrp_dbm);
        if (d < best_d) {
            best_d = d;
            best = p;
        }
    }
    return best;
}

// Closed-form competitor-count baseline: the lone-device rate divided by
// the mean sniffed user count in the transfer direction, plus the device
// itself.
inline double baseline_predict(const FeatureRow& r) {
    const Placement p = placement_from_rsrp(r.x[17]);
    const double n_mean = r.x[0] > 0.5 ? r.x[15] : r.x[7];
    const double n = std::round(n_mean);
    return empty_cell_rate_bps(p) / (n + 1.0);
}

// Learned predictor: z-score normalization fit on the training rows, then
// the network on top.
class Predictor {
  public:
    explicit Predictor(MlpConfig cfg) : cfg_(std::move(cfg)), mlp_(cfg_) {}

    void train(const std::vector<FeatureRow>& rows) {
        if (rows.empty()) throw std::invalid_argument("Predictor::train: no rows");
        Matrix x;
        std::vector<double> y;
        for (const auto& r : rows) {
            x.emplace_back(r.x.begin(), r.x.end());
            y.push_back(r.label_rate_bps);
        }
        norm_.fit(x);
        for (auto& row : x) row = norm_.apply(row);
        mlp_.train(x, y);
    }

    double predict(const FeatureRow& r) const {
        return mlp_.predict(norm_.apply({r.x.begin(), r.x.end()}));
    }

    const Mlp& mlp() const { return mlp_; }
    Mlp& mlp() { return mlp_; }
    const Normalizer& normalizer() const { return norm_; }
    Normalizer& normalizer() { return norm_; }

  private:
    MlpConfig cfg_;
    Normalizer norm_;
    Mlp mlp_;
};

// Out-of-fold predictions for every row: k contiguous folds over a seeded
// shuffle, the normalizer and network refit from scratch per fold.
struct CvResult {
    std::vector<double> predicted;
    std::vector<double> baseline;
    std::vector<double> label;
};

inline CvResult cross_validate(const std::vector<FeatureRow>& rows, const MlpConfig& cfg,
                               unsigned k, std::uint64_t seed) {
    const std::size_t n = rows.size();
    if (n < 2) throw std::invalid_argument("cross_validate: need at least two rows");
    if (k < 2) throw std::invalid_argument("cross_validate: need at least two folds");
    k = std::min<unsigned>(k, unsigned(n));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    CvResult res;
    res.predicted.assign(n, 0.0);
    res.baseline.assign(n, 0.0);
    res.label.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        res.baseline[i] = baseline_predict(rows[i]);
        res.label[i] = rows[i].label_rate_bps;
    }

    std::size_t begin = 0;
    for (unsigned f = 0; f < k; ++f) {
        const std::size_t size = n / k + (f < n % k ? 1 : 0);
        const std::size_t end = begin + size;
        std::vector<FeatureRow> train_rows;
        train_rows.reserve(n - size);
        for (std::size_t i = 0; i < n; ++i) {
            if (i < begin || i >= end) train_rows.push_back(rows[order[i]]);
        }
        MlpConfig fold_cfg = cfg;
        fold_cfg.seed = seed * 1000003ull + f;
        Predictor p(fold_cfg);
        p.train(train_rows);
        for (std::size_t i = begin; i < end; ++i) {
            res.predicted[order[i]] = p.predict(rows[order[i]]);
        }
        begin = end;
    }
    return res;
}

// Error summary. The distribution is reported as P(|error| < t) for t in
// 0.1 Mbit/s steps up to 10 Mbit/s, strict on the boundary.
struct Evaluation {
    double rmse_bps = 0.0;
    double frac_below_1_5_mbps = 0.0;
    std::array<double, 100> ecdf{};
};

inline Evaluation evaluate(const std::vector<double>& pred, const std::vector<double>& label) {
    if (pred.size() != label.size() || pred.empty()) {
        throw std::invalid_argument("evaluate: size mismatch");
    }
    Evaluation ev;
    double se = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - label[i];
        se += e * e;
        const double ae = std::abs(e);
        for (unsigned b = 0; b < ev.ecdf.size(); ++b) {
            if (ae < 0.1e6 * (b + 1)) {
                ev.ecdf[b] += 1.0;
            }
        }
    }
    ev.rmse_bps = std::sqrt(se / double(pred.size()));
    for (auto& v : ev.ecdf) v /= double(pred.size());
    ev.frac_below_1_5_mbps = ev.ecdf[14];
    return ev;
}

}  // namespace ratecast
