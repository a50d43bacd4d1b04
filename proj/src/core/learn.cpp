#include "learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "error.hpp"

namespace leafscope::learn {

void TrainConfig::validate() const {
    if (base_lr <= 0.0) raise(ErrorCode::InvalidArgument, "base_lr must be > 0");
    if (gamma <= 0.0 || gamma > 1.0) raise(ErrorCode::InvalidArgument, "gamma must be in (0,1]");
    if (momentum < 0.0 || momentum >= 1.0)
        raise(ErrorCode::InvalidArgument, "momentum must be in [0,1)");
    if (weight_decay < 0.0) raise(ErrorCode::InvalidArgument, "weight_decay must be >= 0");
    if (batch_size < 1) raise(ErrorCode::InvalidArgument, "batch_size must be >= 1");
    if (step < 1) raise(ErrorCode::InvalidArgument, "step must be >= 1");
}

double lr_at(uint64_t iteration, const TrainConfig& cfg) {
    uint64_t drops = iteration / cfg.step;
    return std::pow(cfg.gamma, static_cast<double>(drops)) * cfg.base_lr;
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& samples) {
    if (samples.empty()) raise(ErrorCode::InvalidArgument, "cannot fit standardizer on empty set");
    size_t dim = samples[0].size();
    Standardizer s;
    s.mean.assign(dim, 0.0);
    s.scale.assign(dim, 0.0);
    for (const auto& x : samples) {
        if (x.size() != dim) raise(ErrorCode::Dimension, "ragged feature matrix");
        for (size_t d = 0; d < dim; ++d) s.mean[d] += x[d];
    }
    for (size_t d = 0; d < dim; ++d) s.mean[d] /= samples.size();
    for (const auto& x : samples)
        for (size_t d = 0; d < dim; ++d) {
            double diff = x[d] - s.mean[d];
            s.scale[d] += diff * diff;
        }
    for (size_t d = 0; d < dim; ++d)
        s.scale[d] = std::max(std::sqrt(s.scale[d] / samples.size()), 1e-8);
    return s;
}

void Standardizer::apply(std::vector<double>& x) const {
    if (x.size() != mean.size()) raise(ErrorCode::Dimension, "standardizer dimension mismatch");
    for (size_t d = 0; d < x.size(); ++d) x[d] = (x[d] - mean[d]) / scale[d];
}

LossGrad minibatch_loss(const std::vector<double>& w,
                        const std::vector<const std::vector<double>*>& batch,
                        const std::vector<int>& ys, const TrainConfig& cfg) {
    if (batch.empty()) raise(ErrorCode::InvalidArgument, "empty mini-batch");
    if (batch.size() != ys.size()) raise(ErrorCode::Dimension, "batch/label count mismatch");

    LossGrad out;
    out.grad.assign(w.size(), 0.0);
    double inv_n = 1.0 / static_cast<double>(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) {
        const std::vector<double>& x = *batch[i];
        if (x.size() != w.size()) raise(ErrorCode::Dimension, "sample dimension mismatch");
        double score = std::inner_product(w.begin(), w.end(), x.begin(), 0.0);
        double y = ys[i];
        double cw = ys[i] > 0 ? cfg.c_positive_weight : 1.0;
        double margin = y * score;
        if (margin < cfg.hinge_margin) {
            out.loss += cw * (cfg.hinge_margin - margin) * inv_n;
            for (size_t d = 0; d < w.size(); ++d) out.grad[d] -= cw * y * x[d] * inv_n;
        }
    }
    return out;
}

void sgd_step(OptimizerState& state, const std::vector<double>& grad, const TrainConfig& cfg) {
    if (grad.size() != state.weights.size())
        raise(ErrorCode::Dimension, "gradient dimension mismatch");
    for (double g : grad)
        if (!std::isfinite(g)) raise(ErrorCode::Degenerate, "non-finite gradient");

    double alpha = lr_at(state.iteration, cfg);
    for (size_t d = 0; d < state.weights.size(); ++d) {
        state.velocity[d] = cfg.momentum * state.velocity[d] -
                            alpha * (grad[d] + cfg.weight_decay * state.weights[d]);
        state.weights[d] += state.velocity[d];
    }
    ++state.iteration;
}

namespace {

// Portable deterministic generator for batch shuffling.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

void shuffle_indices(std::vector<size_t>& idx, SplitMix64& rng) {
    for (size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.next() % i]);
}

}  // namespace

LinearModel train_ovr_svm(const std::vector<Sample>& samples, const TrainConfig& cfg,
                          const TrainLogFn& log) {
    cfg.validate();
    if (samples.empty()) raise(ErrorCode::InvalidArgument, "empty training set");

    std::set<std::string> label_set;
    for (const auto& s : samples) label_set.insert(s.label);
    if (label_set.size() < 2) raise(ErrorCode::InvalidArgument, "need at least two classes");

    LinearModel model;
    model.class_labels.assign(label_set.begin(), label_set.end());
    model.feature_dim = samples[0].features.size();

    std::vector<std::vector<double>> features;
    features.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.features.size() != model.feature_dim)
            raise(ErrorCode::Dimension, "ragged training features");
        features.push_back(s.features);
    }
    model.standardizer = Standardizer::fit(features);
    for (auto& x : features) {
        model.standardizer.apply(x);
        x.push_back(1.0);  // bias coordinate
    }

    size_t n = features.size();
    for (size_t ci = 0; ci < model.class_labels.size(); ++ci) {
        const std::string& cls = model.class_labels[ci];
        std::vector<int> y(n);
        for (size_t i = 0; i < n; ++i) y[i] = samples[i].label == cls ? 1 : -1;

        OptimizerState state;
        state.weights.assign(model.feature_dim + 1, 0.0);
        state.velocity.assign(model.feature_dim + 1, 0.0);

        SplitMix64 rng(cfg.rng_seed + 0x9E3779B97F4A7C15ULL * (ci + 1));
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        shuffle_indices(order, rng);

        size_t cursor = 0;
        uint64_t epoch = 0;
        double epoch_loss = 0.0;
        size_t epoch_batches = 0;
        std::vector<const std::vector<double>*> batch;
        std::vector<int> batch_y;
        for (uint64_t t = 0; t < cfg.max_iterations; ++t) {
            batch.clear();
            batch_y.clear();
            size_t take = std::min(cfg.batch_size, n - cursor);
            for (size_t i = 0; i < take; ++i) {
                batch.push_back(&features[order[cursor + i]]);
                batch_y.push_back(y[order[cursor + i]]);
            }
            cursor += take;

            LossGrad lg = minibatch_loss(state.weights, batch, batch_y, cfg);
            sgd_step(state, lg.grad, cfg);
            epoch_loss += lg.loss;
            ++epoch_batches;

            if (cursor >= n) {  // epoch boundary: reshuffle
                if (log) log(cls, epoch, epoch_loss / epoch_batches, lr_at(t + 1, cfg));
                ++epoch;
                epoch_loss = 0.0;
                epoch_batches = 0;
                cursor = 0;
                shuffle_indices(order, rng);
            }
        }
        if (log && epoch_batches > 0)
            log(cls, epoch, epoch_loss / epoch_batches, lr_at(cfg.max_iterations, cfg));
        model.weights.push_back(std::move(state.weights));
    }
    return model;
}

Prediction predict_topk(const LinearModel& model, const std::vector<double>& x, size_t k) {
    if (x.size() != model.feature_dim)
        raise(ErrorCode::Dimension, "feature dimension " + std::to_string(x.size()) +
                                        " does not match model dimension " +
                                        std::to_string(model.feature_dim));
    std::vector<double> z = x;
    model.standardizer.apply(z);
    z.push_back(1.0);

    Prediction pred;
    pred.ranked.reserve(model.class_labels.size());
    for (size_t c = 0; c < model.class_labels.size(); ++c) {
        double score = std::inner_product(model.weights[c].begin(), model.weights[c].end(),
                                          z.begin(), 0.0);
        pred.ranked.emplace_back(model.class_labels[c], score);
    }
    std::sort(pred.ranked.begin(), pred.ranked.end(), [](const auto& a, const auto& b) {
        return a.second > b.second || (a.second == b.second && a.first < b.first);
    });
    if (k < pred.ranked.size()) pred.ranked.resize(k);
    return pred;
}

Metrics evaluate(const LinearModel& model, const std::vector<Sample>& test) {
    if (test.empty()) raise(ErrorCode::InvalidArgument, "empty test set");
    size_t c = model.class_labels.size();
    Metrics m;
    m.confusion.assign(c * c, 0);
    m.total = test.size();

    size_t hit1 = 0, hit5 = 0;
    for (const auto& s : test) {
        auto it = std::lower_bound(model.class_labels.begin(), model.class_labels.end(), s.label);
        if (it == model.class_labels.end() || *it != s.label) {
            m.unseen_labels.push_back(s.label);
            continue;  // counted as an error in both metrics
        }
        size_t true_idx = static_cast<size_t>(it - model.class_labels.begin());
        Prediction pred = predict_topk(model, s.features, 5);
        size_t pred_idx = static_cast<size_t>(
            std::lower_bound(model.class_labels.begin(), model.class_labels.end(),
                             pred.ranked[0].first) -
            model.class_labels.begin());
        m.confusion[true_idx * c + pred_idx] += 1;
        if (pred.ranked[0].first == s.label) ++hit1;
        for (const auto& [label, score] : pred.ranked)
            if (label == s.label) {
                ++hit5;
                break;
            }
    }
    m.top1 = static_cast<double>(hit1) / m.total;
    m.top5 = static_cast<double>(hit5) / m.total;
    return m;
}

std::vector<double> fuse(const std::vector<double>& deep, const std::vector<double>& hcf) {
    std::vector<double> out;
    out.reserve(deep.size() + hcf.size());
    out.insert(out.end(), deep.begin(), deep.end());
    out.insert(out.end(), hcf.begin(), hcf.end());
    return out;
}

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_row(const std::vector<double>& row) {
    std::string out;
    for (size_t i = 0; i < row.size(); ++i) {
        if (i) out += ' ';
        out += format_value(row[i]);
    }
    return out;
}

std::vector<double> parse_row(const std::string& line, size_t expected, const std::string& what) {
    std::istringstream in(line);
    std::vector<double> row;
    double v;
    while (in >> v) row.push_back(v);
    if (!in.eof()) raise(ErrorCode::Format, "non-numeric value in " + what);
    if (row.size() != expected)
        raise(ErrorCode::Format, what + ": expected " + std::to_string(expected) + " values, got " +
                                     std::to_string(row.size()));
    return row;
}

}  // namespace

void save_model(const LinearModel& model, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) raise(ErrorCode::Io, "cannot open for write: " + path);
        out << "leafscope-model v1\n";
        out << model.feature_dim << "\n";
        out << model.class_labels.size() << "\n";
        for (const auto& label : model.class_labels) out << label << "\n";
        out << format_row(model.standardizer.mean) << "\n";
        out << format_row(model.standardizer.scale) << "\n";
        for (const auto& w : model.weights) out << format_row(w) << "\n";
        if (!out) raise(ErrorCode::Io, "write failed: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        raise(ErrorCode::Io, "cannot write " + path);
    }
}

LinearModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::Io, "file not found: " + path);
    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) raise(ErrorCode::Format, std::string("model file truncated at ") + what);
        return line;
    };
    if (next_line("header") != "leafscope-model v1")
        raise(ErrorCode::Format, "not a leafscope model file: " + path);

    LinearModel model;
    try {
        model.feature_dim = std::stoull(next_line("feature_dim"));
        size_t classes = std::stoull(next_line("class count"));
        for (size_t i = 0; i < classes; ++i) model.class_labels.push_back(next_line("class label"));
        model.standardizer.mean = parse_row(next_line("mean row"), model.feature_dim, "mean row");
        model.standardizer.scale = parse_row(next_line("scale row"), model.feature_dim, "scale row");
        for (size_t i = 0; i < classes; ++i)
            model.weights.push_back(
                parse_row(next_line("weight row"), model.feature_dim + 1, "weight row"));
    } catch (const std::invalid_argument&) {
        raise(ErrorCode::Format, "malformed count in model file: " + path);
    } catch (const std::out_of_range&) {
        raise(ErrorCode::Format, "malformed count in model file: " + path);
    }
    return model;
}

}  // namespace leafscope::learn
