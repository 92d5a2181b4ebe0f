#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ibts/checkpoint.hpp"
#include "ibts/cli.hpp"
#include "ibts/io.hpp"
#include "ibts/metrics.hpp"
#include "json.hpp"

namespace ibts {

using nlohmann::json;

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json aggregate(const std::vector<double>& per_seed) {
  double mean = 0.0, sq = 0.0;
  for (double v : per_seed) {
    mean += v;
    sq += v * v;
  }
  const double n = static_cast<double>(per_seed.size());
  mean /= n;
  const double var = std::max(0.0, sq / n - mean * mean);
  return {{"per_seed", per_seed}, {"mean", mean}, {"std", std::sqrt(var)}};
}

bool wants(const EvalSpec& eval, const std::string& metric) {
  return std::find(eval.metrics.begin(), eval.metrics.end(), metric) != eval.metrics.end();
}

ClassifierModel classifier_for_seed(const ExperimentConfig& cfg, uint64_t seed) {
  const std::string dir =
      cfg.classifier.from_dir ? cfg.classifier.dir : seed_dir(cfg, seed) + "/classifier";
  if (!std::filesystem::exists(dir + "/model.json")) {
    throw std::runtime_error("missing classifier checkpoint at " + dir +
                             " (run train-classifier first)");
  }
  return load_classifier(dir);
}

ExplainerModel explainer_for_seed(const ExperimentConfig& cfg, uint64_t seed,
                                  const ClassifierModel& f) {
  const std::string dir = seed_dir(cfg, seed) + "/explainer";
  if (!std::filesystem::exists(dir + "/model.json")) {
    throw std::runtime_error("missing explainer checkpoint at " + dir +
                             " (run train-explainer first)");
  }
  ExplainerModel model = load_explainer(dir);
  if (model.classifier_fingerprint != params_fingerprint(f.params)) {
    throw std::runtime_error("explainer at " + dir +
                             " was trained against a different classifier");
  }
  return model;
}

BatchExplanations chunked_explanations(const ExplainerModel& model, const Tensor& X, Rng& rng) {
  const int64_t N = X.dim(0), chunk = 64;
  BatchExplanations out;
  out.pi = Tensor::zeros(X.shape());
  out.M = Tensor::zeros(X.shape());
  out.Xr = Tensor::zeros(X.shape());
  out.Xt = Tensor::zeros(X.shape());
  const size_t cells = static_cast<size_t>(model.T * model.D);
  for (int64_t start = 0; start < N; start += chunk) {
    const int64_t stop = std::min(N, start + chunk);
    const BatchExplanations part = explain_batch(model, slice(X, 0, start, stop), rng);
    const size_t offset = static_cast<size_t>(start) * cells;
    std::copy(part.pi.data().begin(), part.pi.data().end(), out.pi.mutable_data().begin() + offset);
    std::copy(part.M.data().begin(), part.M.data().end(), out.M.mutable_data().begin() + offset);
    std::copy(part.Xr.data().begin(), part.Xr.data().end(), out.Xr.mutable_data().begin() + offset);
    std::copy(part.Xt.data().begin(), part.Xt.data().end(), out.Xt.mutable_data().begin() + offset);
  }
  return out;
}

std::vector<double> random_scores(uint64_t seed, size_t n) {
  Rng rng = Rng(seed).derive(22);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform();
  return v;
}

std::vector<uint8_t> split_truth(const TimeSeriesDataset& ds, const std::string& which) {
  const SplitRange r = ds.split(which);
  const size_t cells = static_cast<size_t>(ds.T * ds.D);
  return std::vector<uint8_t>(ds.Q.begin() + static_cast<size_t>(r.begin) * cells,
                              ds.Q.begin() + static_cast<size_t>(r.end) * cells);
}

void write_history_csv(const std::string& path, const std::vector<LossBreakdown>& history) {
  std::string csv = "epoch,L_LC,L_M,L_con,L_KL,L_dr,total\n";
  for (size_t i = 0; i < history.size(); ++i) {
    const LossBreakdown& b = history[i];
    csv += std::to_string(i + 1) + "," + num(b.lc) + "," + num(b.m) + "," + num(b.con) + "," +
           num(b.kl) + "," + num(b.dr) + "," + num(b.total) + "\n";
  }
  write_text_atomic(path, csv);
}

}  // namespace

void cmd_gen_data(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (cfg.dataset.from_dir) {
    throw UsageError("gen-data: config points at an existing dataset dir; provide a generator "
                     "block or --kind");
  }
  const TimeSeriesDataset ds = generate_dataset(cfg.dataset.gen);
  save_dataset(ds, out_dir);

  std::string fraction = "n/a";
  if (ds.has_truth) {
    int64_t salient = 0;
    for (uint8_t q : ds.Q) salient += q != 0 ? 1 : 0;
    fraction = num(static_cast<double>(salient) / static_cast<double>(ds.Q.size()));
  }
  std::cout << "dataset " << ds.name << ": N=" << ds.N << " T=" << ds.T << " D=" << ds.D
            << " C=" << ds.C << " salient_fraction=" << fraction << "\n"
            << "wrote " << out_dir << "\n";
}

void cmd_train_classifier(const ExperimentConfig& cfg, const std::vector<uint64_t>& seeds) {
  if (cfg.classifier.from_dir) {
    throw UsageError("train-classifier: config provides a pretrained classifier dir; nothing to "
                     "train");
  }
  for (uint64_t seed : seeds) {
    const TimeSeriesDataset ds = dataset_for_seed(cfg, seed);
    ClassifierConfig c = cfg.classifier.cfg;
    c.seed += seed;

    ClassifierTrainReport report;
    const ClassifierModel model = train_classifier(c, ds, &report);

    const std::string dir = seed_dir(cfg, seed);
    std::filesystem::create_directories(dir);
    save_classifier(model, dir + "/classifier");

    std::string csv = "epoch,train_loss,val_macro_f1\n";
    for (const EpochStats& e : report.history) {
      csv += std::to_string(e.epoch) + "," + num(e.train_loss) + "," + num(e.val_macro_f1) + "\n";
    }
    write_text_atomic(dir + "/classifier_history.csv", csv);

    std::cout << "seed " << seed << ": classifier best val macro-F1 "
              << report.best_val_macro_f1 << " (epoch " << report.best_epoch
              << "), test macro-F1 " << report.test_macro_f1 << ", test accuracy "
              << report.test_accuracy << "\n";
  }
}

void cmd_train_explainer(const ExperimentConfig& cfg, const std::vector<uint64_t>& seeds) {
  for (uint64_t seed : seeds) {
    const TimeSeriesDataset ds = dataset_for_seed(cfg, seed);
    const ClassifierModel f = classifier_for_seed(cfg, seed);
    ExplainerConfig e = cfg.explainer;
    e.seed += seed;

    ExplainerTrainReport report;
    const ExplainerModel model = train_explainer(f, ds, e, &report);

    const std::string dir = seed_dir(cfg, seed);
    std::filesystem::create_directories(dir);
    save_explainer(model, dir + "/explainer");
    write_history_csv(dir + "/explainer_history.csv", report.history);

    const LossBreakdown& last = report.history.back();
    std::cout << "seed " << seed << ": explainer total " << last.total << " (L_LC " << last.lc
              << ", L_M " << last.m << ", L_KL " << last.kl << ", L_dr " << last.dr << ") after "
              << report.history.size() << " epochs\n";
  }
}

void cmd_evaluate(const ExperimentConfig& cfg, const std::vector<uint64_t>& seeds) {
  const EvalSpec& eval = cfg.eval;
  const bool want_gt = wants(eval, "auprc") || wants(eval, "aup") || wants(eval, "aur");
  const bool want_occ = wants(eval, "occlusion");
  const bool want_sub = wants(eval, "substitution");

  std::vector<double> auprc_seeds, aup_seeds, aur_seeds;
  json occ_per_seed = json::array();
  json sub_per_seed = json::array();
  std::string occ_csv = "seed,k,accuracy,macro_f1,auroc\n";
  std::string occ_rand_csv = "seed,k,accuracy,macro_f1,auroc\n";
  std::string sub_csv = "seed,fill,method,accuracy,macro_f1\n";

  std::vector<double> ks = {0.0};
  for (double k : eval.k_list) {
    if (k != 0.0) ks.push_back(k);
  }

  for (uint64_t seed : seeds) {
    const TimeSeriesDataset ds = dataset_for_seed(cfg, seed);
    const ClassifierModel f = classifier_for_seed(cfg, seed);
    const ExplainerModel model = explainer_for_seed(cfg, seed, f);

    const Tensor X_test = split_tensor(ds, "test");
    const std::vector<int32_t> y_test = split_labels(ds, "test");
    Rng expl_rng = Rng(seed).derive(21);
    const BatchExplanations expl = chunked_explanations(model, X_test, expl_rng);
    const std::vector<double>& scores = expl.pi.data();

    const std::string dir = seed_dir(cfg, seed);
    std::filesystem::create_directories(dir);
    write_f32_blob(dir + "/explanations.bin", scores);
    json manifest = {{"format", "ibts-explanations"}, {"format_version", 1},
                     {"N", X_test.dim(0)},            {"T", model.T},
                     {"D", model.D},                  {"dtype", "float32"},
                     {"file", "explanations.bin"},    {"split", "test"}};
    write_text_atomic(dir + "/explanations.json", manifest.dump(2) + "\n");

    if (want_gt) {
      if (!ds.has_truth) {
        throw std::runtime_error(
            "evaluate: dataset '" + ds.name +
            "' carries no ground-truth saliency; request occlusion metrics instead");
      }
      const std::vector<uint8_t> truth = split_truth(ds, "test");
      if (wants(eval, "auprc")) auprc_seeds.push_back(auprc(scores, truth));
      if (wants(eval, "aup") || wants(eval, "aur")) {
        const AupAur pr = aup_aur(scores, truth);
        if (wants(eval, "aup")) aup_seeds.push_back(pr.aup);
        if (wants(eval, "aur")) aur_seeds.push_back(pr.aur);
      }
    }

    const PredictFn predict = [&f](const Tensor& X) { return predict_proba(f, X); };
    const std::vector<double> rand_scores = random_scores(seed, scores.size());

    if (want_occ) {
      Rng occ_rng = Rng(seed).derive(23);
      const auto pts = occlusion_curve(predict, X_test, y_test, scores, ks, model.baseline,
                                       occ_rng);
      Rng occ_rng_rand = Rng(seed).derive(24);
      const auto pts_rand = occlusion_curve(predict, X_test, y_test, rand_scores, ks,
                                            model.baseline, occ_rng_rand);
      json expl_points = json::array(), rand_points = json::array();
      for (const OcclusionPoint& p : pts) {
        occ_csv += std::to_string(seed) + "," + num(p.occluded_percent) + "," + num(p.accuracy) +
                   "," + num(p.macro_f1) + "," + num(p.auroc) + "\n";
        expl_points.push_back({{"k", p.occluded_percent},
                               {"accuracy", p.accuracy},
                               {"macro_f1", p.macro_f1},
                               {"auroc", p.auroc}});
      }
      for (const OcclusionPoint& p : pts_rand) {
        occ_rand_csv += std::to_string(seed) + "," + num(p.occluded_percent) + "," +
                        num(p.accuracy) + "," + num(p.macro_f1) + "," + num(p.auroc) + "\n";
        rand_points.push_back({{"k", p.occluded_percent},
                               {"accuracy", p.accuracy},
                               {"macro_f1", p.macro_f1},
                               {"auroc", p.auroc}});
      }
      occ_per_seed.push_back(
          {{"seed", seed}, {"explainer", expl_points}, {"random", rand_points}});
    }

    if (want_sub) {
      const Tensor probs = predict(X_test);
      const std::vector<int32_t> pred = argmax_rows(probs.data(), X_test.dim(0), f.C);
      const double base_acc = accuracy(pred, y_test);
      const double base_f1 = macro_f1(pred, y_test, f.C);
      sub_csv += std::to_string(seed) + ",none,none," + num(base_acc) + "," + num(base_f1) + "\n";

      json rows = json::array();
      for (const std::string& mode : eval.substitution_modes) {
        const SubstitutionFill fill =
            mode == "mean" ? SubstitutionFill::TrainMean : SubstitutionFill::Zero;
        for (const char* method : {"explainer", "random"}) {
          const std::vector<double>& s =
              std::string(method) == "explainer" ? scores : rand_scores;
          const SubstitutionResult res = top_substitution(
              predict, X_test, y_test, s, eval.substitution_fraction, fill, model.baseline);
          sub_csv += std::to_string(seed) + "," + mode + "," + method + "," + num(res.accuracy) +
                     "," + num(res.macro_f1) + "\n";
          rows.push_back({{"fill", mode},
                          {"method", method},
                          {"accuracy", res.accuracy},
                          {"macro_f1", res.macro_f1}});
        }
      }
      sub_per_seed.push_back({{"seed", seed},
                              {"baseline", {{"accuracy", base_acc}, {"macro_f1", base_f1}}},
                              {"rows", rows}});
    }
  }

  json report;
  report["format"] = "ibts-report";
  report["format_version"] = 1;
  report["seeds"] = seeds;
  if (want_gt) {
    json gt;
    if (wants(eval, "auprc")) gt["auprc"] = aggregate(auprc_seeds);
    if (wants(eval, "aup")) gt["aup"] = aggregate(aup_seeds);
    if (wants(eval, "aur")) gt["aur"] = aggregate(aur_seeds);
    report["ground_truth"] = gt;
  }
  if (want_occ) {
    report["occlusion"] = {{"k_list", ks}, {"per_seed", occ_per_seed}};
    write_text_atomic(cfg.output_dir + "/occlusion.csv", occ_csv);
    write_text_atomic(cfg.output_dir + "/occlusion_random.csv", occ_rand_csv);
  }
  if (want_sub) {
    report["substitution"] = {{"fraction", eval.substitution_fraction},
                              {"modes", eval.substitution_modes},
                              {"per_seed", sub_per_seed}};
    write_text_atomic(cfg.output_dir + "/substitution.csv", sub_csv);
  }
  std::filesystem::create_directories(cfg.output_dir);
  write_text_atomic(cfg.output_dir + "/report.json", report.dump(2) + "\n");

  if (want_gt) {
    for (const char* name : {"auprc", "aup", "aur"}) {
      if (!report["ground_truth"].contains(name)) continue;
      const json& a = report["ground_truth"][name];
      std::cout << name << ": " << a["mean"].get<double>() << " +/- " << a["std"].get<double>()
                << " (" << seeds.size() << " seeds)\n";
    }
  }
  std::cout << "wrote " << cfg.output_dir << "/report.json\n";
}

void cmd_diagnose(const ExperimentConfig& cfg, const std::vector<uint64_t>& seeds) {
  static const std::vector<std::string> families = {"zero", "mean", "reference", "conditioned"};
  static const std::vector<std::string> metric_names = {"kde", "kl", "mmd"};

  json per_seed = json::array();
  std::map<std::string, std::map<std::string, std::vector<double>>> acc;
  std::map<std::string, std::vector<double>> sanity_acc;

  for (uint64_t seed : seeds) {
    const TimeSeriesDataset ds = dataset_for_seed(cfg, seed);
    const ClassifierModel f = classifier_for_seed(cfg, seed);
    const ExplainerModel model = explainer_for_seed(cfg, seed, f);

    const Tensor X_test = split_tensor(ds, "test");
    const int64_t n = X_test.dim(0);
    const int64_t cols = model.T * model.D;
    Rng expl_rng = Rng(seed).derive(31);
    const BatchExplanations expl = chunked_explanations(model, X_test, expl_rng);

    const std::vector<double> orig = flatten_rows(X_test);
    std::map<std::string, std::vector<double>> rows;
    rows["reference"] = flatten_rows(expl.Xr);
    rows["conditioned"] = flatten_rows(expl.Xt);
    std::vector<double> zero(orig.size()), mean(orig.size());
    for (size_t i = 0; i < orig.size(); ++i) {
      const bool keep = expl.M.data()[i] == 1.0;
      const size_t cell = i % static_cast<size_t>(cols);
      zero[i] = keep ? orig[i] : 0.0;
      mean[i] = keep ? orig[i] : model.baseline.mu[cell];
    }
    rows["zero"] = std::move(zero);
    rows["mean"] = std::move(mean);

    json seed_entry;
    seed_entry["seed"] = seed;
    const double sanity_kl = kl_divergence_estimate(orig, n, orig, n, cols);
    const double sanity_mmd = mmd_rbf(orig, n, orig, n, cols);
    seed_entry["sanity"] = {{"kl", sanity_kl}, {"mmd", sanity_mmd}};
    sanity_acc["kl"].push_back(sanity_kl);
    sanity_acc["mmd"].push_back(sanity_mmd);

    for (const std::string& fam : families) {
      const std::vector<double>& r = rows.at(fam);
      const double kde = kde_loglik(orig, n, r, n, cols);
      const double kl = kl_divergence_estimate(orig, n, r, n, cols);
      const double mmd = mmd_rbf(orig, n, r, n, cols);
      seed_entry[fam] = {{"kde", kde}, {"kl", kl}, {"mmd", mmd}};
      acc[fam]["kde"].push_back(kde);
      acc[fam]["kl"].push_back(kl);
      acc[fam]["mmd"].push_back(mmd);
    }
    per_seed.push_back(seed_entry);
  }

  json agg;
  std::string csv = "family,kde,kl,mmd\n";
  for (const std::string& fam : families) {
    json row;
    csv += fam;
    for (const std::string& m : metric_names) {
      const std::vector<double>& v = acc[fam][m];
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      row[m] = mean;
      csv += "," + num(mean);
    }
    csv += "\n";
    agg[fam] = row;
  }

  json report;
  report["format"] = "ibts-diagnosis";
  report["format_version"] = 1;
  report["seeds"] = seeds;
  report["families"] = families;
  report["sanity"] = {{"kl", aggregate(sanity_acc["kl"])}, {"mmd", aggregate(sanity_acc["mmd"])}};
  report["per_seed"] = per_seed;
  report["aggregate"] = agg;

  std::filesystem::create_directories(cfg.output_dir);
  write_text_atomic(cfg.output_dir + "/diagnosis.json", report.dump(2) + "\n");
  write_text_atomic(cfg.output_dir + "/shift.csv", csv);

  std::cout << "family        kde            kl             mmd\n";
  for (const std::string& fam : families) {
    std::cout << std::left << std::setw(13) << fam;
    for (const std::string& m : metric_names) {
      std::cout << " " << std::setw(14) << agg[fam][m].get<double>();
    }
    std::cout << "\n";
  }
  std::cout << "wrote " << cfg.output_dir << "/diagnosis.json\n";
}

}  // namespace ibts
