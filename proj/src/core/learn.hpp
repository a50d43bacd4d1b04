#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace leafscope::learn {

struct TrainConfig {
    double base_lr = 1e-4;
    double gamma = 0.1;          // decay factor per schedule step
    uint64_t step = 20000;       // iterations between decays
    double momentum = 0.9;
    double weight_decay = 5e-4;
    size_t batch_size = 50;
    uint64_t max_iterations = 50000;
    uint64_t rng_seed = 0;
    double hinge_margin = 1.0;
    double c_positive_weight = 1.0;  // extra weight on positive samples

    void validate() const;
};

// Step schedule: the base rate holds for the first `step` iterations, then
// drops by `gamma` after each further `step`.
double lr_at(uint64_t iteration, const TrainConfig& cfg);

// Per-dimension z-scoring fitted on training data; scale floored at 1e-8.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const std::vector<std::vector<double>>& samples);
    void apply(std::vector<double>& x) const;
};

struct OptimizerState {
    std::vector<double> weights;
    std::vector<double> velocity;
    uint64_t iteration = 0;
};

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

// Average hinge loss and sub-gradient over a mini-batch. Rows of `batch`
// already carry the bias coordinate; ys are +1/-1.
LossGrad minibatch_loss(const std::vector<double>& w,
                        const std::vector<const std::vector<double>*>& batch,
                        const std::vector<int>& ys, const TrainConfig& cfg);

// V <- mu*V - alpha*(grad + lambda*W); W <- W + V, with alpha = lr_at(t).
void sgd_step(OptimizerState& state, const std::vector<double>& grad, const TrainConfig& cfg);

struct LinearModel {
    std::vector<std::string> class_labels;       // sorted, unique
    std::vector<std::vector<double>> weights;    // per class, dim + 1 (bias last)
    Standardizer standardizer;
    size_t feature_dim = 0;

    bool operator==(const LinearModel&) const = default;
};

struct Sample {
    std::vector<double> features;
    std::string label;
};

// (class, epoch-within-class, mean epoch loss, learning rate at epoch end)
using TrainLogFn =
    std::function<void(const std::string& cls, uint64_t epoch, double avg_loss, double lr)>;

LinearModel train_ovr_svm(const std::vector<Sample>& samples, const TrainConfig& cfg,
                          const TrainLogFn& log = nullptr);

struct Prediction {
    std::vector<std::pair<std::string, double>> ranked;  // descending score
};

Prediction predict_topk(const LinearModel& model, const std::vector<double>& x, size_t k);

struct Metrics {
    double top1 = 0.0;
    double top5 = 0.0;
    std::vector<int64_t> confusion;  // class_count x class_count, [true][predicted]
    size_t total = 0;
    std::vector<std::string> unseen_labels;  // test labels absent from the model
};

Metrics evaluate(const LinearModel& model, const std::vector<Sample>& test);

// Unweighted concatenation [deep ++ hcf].
std::vector<double> fuse(const std::vector<double>& deep, const std::vector<double>& hcf);

void save_model(const LinearModel& model, const std::string& path);
LinearModel load_model(const std::string& path);

}  // namespace leafscope::learn
