#include <algorithm>
#include <stdexcept>

#include "ibts/classifier.hpp"
#include "ibts/metrics.hpp"

namespace ibts {

namespace {

Tensor gather_rows(const Tensor& X, const std::vector<int64_t>& order, int64_t start,
                   int64_t stop) {
  const int64_t T = X.dim(1), D = X.dim(2);
  const size_t cells = static_cast<size_t>(T * D);
  Tensor out = Tensor::zeros({stop - start, T, D});
  std::vector<double>& od = out.mutable_data();
  for (int64_t i = start; i < stop; ++i) {
    const size_t src = static_cast<size_t>(order[static_cast<size_t>(i)]) * cells;
    std::copy(X.data().begin() + src, X.data().begin() + src + cells,
              od.begin() + static_cast<size_t>(i - start) * cells);
  }
  return out;
}

Tensor one_hot(const std::vector<int32_t>& y, const std::vector<int64_t>& order, int64_t start,
               int64_t stop, int64_t C) {
  Tensor out = Tensor::zeros({stop - start, C});
  std::vector<double>& od = out.mutable_data();
  for (int64_t i = start; i < stop; ++i) {
    const int32_t label = y[static_cast<size_t>(order[static_cast<size_t>(i)])];
    od[static_cast<size_t>((i - start) * C + label)] = 1.0;
  }
  return out;
}

ParamSet deep_copy(const ParamSet& params) {
  ParamSet out;
  for (const auto& [name, t] : params) out.emplace(name, Tensor(t.shape(), t.data()));
  return out;
}

}  // namespace

ClassifierModel train_classifier(const ClassifierConfig& cfg, const TimeSeriesDataset& ds,
                                 ClassifierTrainReport* report) {
  validate(cfg);
  if (ds.splits.train < 1) throw std::invalid_argument("train_classifier: empty train split");
  if (ds.splits.val < 1) {
    throw std::invalid_argument("train_classifier: need a validation split for model selection");
  }

  ClassifierModel model = init_classifier(cfg, ds.T, ds.D, ds.C);
  Rng base(cfg.seed);
  Rng dropout_rng = base.derive(2);
  Rng shuffle_rng = base.derive(3);

  const Tensor X_train = split_tensor(ds, "train");
  const std::vector<int32_t> y_train = split_labels(ds, "train");
  const Tensor X_val = split_tensor(ds, "val");
  const std::vector<int32_t> y_val = split_labels(ds, "val");
  const int64_t n_train = X_train.dim(0);

  Adam opt({cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay});
  std::vector<int64_t> order(static_cast<size_t>(n_train));
  for (int64_t i = 0; i < n_train; ++i) order[static_cast<size_t>(i)] = i;

  ParamSet best_params = deep_copy(model.params);
  double best_f1 = -1.0;
  int64_t best_epoch = 0;
  if (report) *report = ClassifierTrainReport{};

  for (int64_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (int64_t start = 0; start < n_train; start += cfg.batch_size) {
      const int64_t stop = std::min(n_train, start + cfg.batch_size);
      const Tensor xb = gather_rows(X_train, order, start, stop);
      const Tensor onehot = one_hot(y_train, order, start, stop, ds.C);

      Tape tape;
      ParamSet bound;
      for (const auto& [name, t] : model.params) bound.emplace(name, tape.watch(t));
      Tensor logp = log_softmax_last(classifier_logits(model, bound, xb, &dropout_rng));
      Tensor loss = mul_scalar(sum_all(mul(logp, onehot)), -1.0 / static_cast<double>(stop - start));
      loss_sum += loss.item() * static_cast<double>(stop - start);

      GradientMap grads = tape.backward(loss);
      ParamSet g;
      for (const auto& [name, t] : bound) g.emplace(name, grads.at(t));
      opt.step(model.params, g);
    }

    const Tensor val_probs = predict_proba(model, X_val);
    const double val_f1 =
        macro_f1(argmax_rows(val_probs.data(), X_val.dim(0), ds.C), y_val, ds.C);
    if (report) {
      report->history.push_back({epoch, loss_sum / static_cast<double>(n_train), val_f1});
    }
    if (val_f1 > best_f1) {
      best_f1 = val_f1;
      best_epoch = epoch;
      best_params = deep_copy(model.params);
    }
  }

  model.params = std::move(best_params);
  model.frozen = true;

  if (report) {
    report->best_epoch = best_epoch;
    report->best_val_macro_f1 = best_f1;
    if (ds.splits.test > 0) {
      const Tensor X_test = split_tensor(ds, "test");
      const std::vector<int32_t> y_test = split_labels(ds, "test");
      const Tensor probs = predict_proba(model, X_test);
      const auto pred = argmax_rows(probs.data(), X_test.dim(0), ds.C);
      report->test_accuracy = accuracy(pred, y_test);
      report->test_macro_f1 = macro_f1(pred, y_test, ds.C);
      report->test_auroc = macro_ovr_auroc(probs.data(), y_test, ds.C);
    }
  }
  return model;
}

}  // namespace ibts
