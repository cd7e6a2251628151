#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "audioml/audio_io.hpp"
#include "audioml/augment.hpp"
#include "audioml/dataset.hpp"
#include "audioml/errors.hpp"
#include "audioml/formats.hpp"
#include "audioml/metrics.hpp"
#include "audioml/spectral.hpp"
#include "audioml/trainer.hpp"
#include "audioml/version.hpp"

namespace audioml::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json report_base(const std::string& invocation, std::uint64_t seed) {
  json report;
  report["tool_version"] = kToolVersion;
  report["invocation"] = invocation;
  report["seed"] = seed;
  return report;
}

void write_report(const std::string& path, const json& report) {
  formats::write_file_text(path, report.dump(2) + "\n");
}

std::string stem_of(const std::string& path) {
  return fs::path(path).stem().string();
}

AudioBuffer load_mono(const std::string& path) {
  return io::downmix_to_mono(io::load_wav(path));
}

std::vector<std::string> load_vocabulary(
    const std::optional<std::string>& vocab_path) {
  if (!vocab_path) return dataset::gtzan_genres();
  std::vector<std::string> vocab;
  std::stringstream ss(formats::read_file_text(*vocab_path));
  std::string line;
  while (std::getline(ss, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (!line.empty()) vocab.push_back(line);
  }
  if (vocab.empty()) throw ParseError(*vocab_path + ": empty vocabulary");
  return vocab;
}

std::vector<bool> truth_column(const Eigen::VectorXd& col,
                               const std::string& path) {
  std::vector<bool> out(static_cast<std::size_t>(col.size()));
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    if (col[i] != 0.0 && col[i] != 1.0)
      throw ParseError(path + ": truth values must be 0 or 1, got " +
                       formats::format_float(col[i]));
    out[static_cast<std::size_t>(i)] = col[i] == 1.0;
  }
  return out;
}

json optional_metric(const std::function<double()>& compute) {
  try {
    return compute();
  } catch (const ValueError&) {
    return nullptr;
  }
}

dataset::GroupKeyKind parse_key(const std::string& key) {
  if (key == "artist") return dataset::GroupKeyKind::artist;
  if (key == "group") return dataset::GroupKeyKind::group;
  throw UsageError("--key must be artist or group, got '" + key + "'");
}

// Train-demo config JSON. Flat object configures every role; an object with
// "teacher"/"student" members configures the noisy-student roles separately.
trainer::TrainConfig parse_train_config(const json& obj,
                                        const std::string& path,
                                        double* test_fraction) {
  trainer::TrainConfig cfg;
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  for (const auto& item : obj.items()) {
    const std::string& k = item.key();
    const json& v = item.value();
    const std::string vp = path + "." + k;
    const auto num = [&](double lo) {
      if (!v.is_number()) throw ParseError(vp + ": expected a number");
      const double d = v.get<double>();
      if (d < lo) throw ParseError(vp + ": must be >= " + std::to_string(lo));
      return d;
    };
    if (k == "learning_rate") {
      cfg.learning_rate = num(0.0);
    } else if (k == "epochs") {
      cfg.epochs = static_cast<int>(num(0.0));
    } else if (k == "batch_size") {
      cfg.batch_size = static_cast<int>(num(0.0));
    } else if (k == "seed") {
      if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ParseError(vp + ": expected an integer");
      cfg.seed = v.get<std::uint64_t>();
    } else if (k == "n_classes") {
      cfg.n_classes = static_cast<int>(num(0.0));
    } else if (k == "lambda") {
      cfg.lambda = num(0.0);
    } else if (k == "noise_std") {
      cfg.noise_std = num(0.0);
    } else if (k == "pseudo_label_mode") {
      if (!v.is_string()) throw ParseError(vp + ": expected a string");
      const std::string mode = v.get<std::string>();
      if (mode == "soft") {
        cfg.pseudo_label_mode = trainer::PseudoLabelMode::soft;
      } else if (mode == "hard") {
        cfg.pseudo_label_mode = trainer::PseudoLabelMode::hard;
      } else {
        throw ParseError(vp + ": expected \"soft\" or \"hard\"");
      }
    } else if (k == "test_fraction" && test_fraction != nullptr) {
      *test_fraction = num(0.0);
      if (*test_fraction >= 1.0)
        throw ParseError(vp + ": must lie in (0, 1)");
    } else {
      throw ParseError(vp + ": unknown key");
    }
  }
  return cfg;
}

std::vector<int> parse_label_file(const std::string& path,
                                  Eigen::Index expected_rows) {
  const formats::ScoreTable table = formats::read_score_table(path);
  if (table.class_names.size() != 1 || table.class_names[0] != "label")
    throw ParseError(path + ": header must be exactly id,label");
  if (table.scores.rows() != expected_rows)
    throw ParseError(path + ": " + std::to_string(table.scores.rows()) +
                     " labels for " + std::to_string(expected_rows) +
                     " feature rows");
  std::vector<int> labels(static_cast<std::size_t>(table.scores.rows()));
  for (Eigen::Index i = 0; i < table.scores.rows(); ++i) {
    const double v = table.scores(i, 0);
    if (v < 0.0 || v != std::floor(v))
      throw ParseError(path + " row " + std::to_string(i + 1) +
                       ": labels must be nonnegative integers");
    labels[static_cast<std::size_t>(i)] = static_cast<int>(v);
  }
  return labels;
}

}  // namespace

void run_spectrogram(const SpectrogramOptions& opts,
                     const std::string& invocation) {
  (void)invocation;  // spectrogram emits matrices and images, no JSON report
  if (!opts.foreign_flags.empty()) {
    std::string msg = "flags not valid for --kind " + opts.kind + ":";
    for (const auto& f : opts.foreign_flags) msg += " " + f;
    throw UsageError(msg);
  }

  const AudioBuffer x = load_mono(opts.input);
  spectral::RealMatrix repr;
  spectral::DbKind db_kind = spectral::DbKind::amplitude;
  if (opts.kind == "stft") {
    repr = spectral::magnitude(spectral::stft(x, opts.n_fft, opts.hop), 1);
  } else if (opts.kind == "mel") {
    const double fmin = opts.fmin.value_or(0.0);
    repr = spectral::melspectrogram(x, opts.n_fft, opts.hop, opts.n_mels,
                                    fmin, 0.5 * x.sample_rate, 2);
    db_kind = spectral::DbKind::power;
  } else if (opts.kind == "cqt") {
    spectral::CqtParams params;
    params.f_min = opts.fmin.value_or(params.f_min);
    params.bins_per_octave = opts.bins_per_octave;
    params.n_bins = 7 * opts.bins_per_octave;  // seven octaves
    params.hop_length = opts.hop;
    repr = spectral::cqt(x, params);
  } else {
    throw UsageError("--kind must be stft, mel, or cqt");
  }

  spectral::DbParams db_params;
  db_params.kind = db_kind;
  db_params.ref_max = true;
  if (opts.db) {
    repr = spectral::to_decibels(repr, db_params);
    formats::write_matrix(opts.out, repr.data);
    if (opts.pgm) formats::write_pgm(*opts.pgm, repr.data);
    return;
  }
  formats::write_matrix(opts.out, repr.data);
  if (opts.pgm)
    formats::write_pgm(*opts.pgm,
                       spectral::to_decibels(repr, db_params).data);
}

void run_augment(const AugmentOptions& opts, const std::string& invocation) {
  (void)invocation;
  augment::AugmentationPipeline pipeline = augment::parse_pipeline_spec(
      formats::read_file_text(opts.pipeline_path));
  if (opts.seed) pipeline.seed = *opts.seed;
  if (opts.views) {
    if (*opts.views < 1) throw UsageError("--views must be >= 1");
    pipeline.num_views = *opts.views;
  }

  const AudioBuffer x = load_mono(opts.input);
  const std::vector<AudioBuffer> views = augment::apply_pipeline(pipeline, x);

  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) throw IoError("cannot create " + opts.out_dir + ": " + ec.message());
  const std::string stem = stem_of(opts.input);
  for (std::size_t k = 0; k < views.size(); ++k) {
    const fs::path out_path = fs::path(opts.out_dir) /
                              (stem + ".view" + std::to_string(k) + ".wav");
    io::save_wav(views[k], out_path.string(), io::BitDepth::float32);
  }
}

void run_evaluate(const EvaluateOptions& opts,
                  const std::string& invocation) {
  const formats::ScoreTable truth = formats::read_score_table(opts.truth_path);
  const formats::ScoreTable scores =
      formats::read_score_table(opts.scores_path);
  if (truth.ids != scores.ids)
    throw ParseError("evaluate: item ids in " + opts.truth_path + " and " +
                     opts.scores_path + " do not align");
  if (truth.class_names != scores.class_names)
    throw ParseError("evaluate: class columns in " + opts.truth_path +
                     " and " + opts.scores_path + " do not match");

  json report = report_base(invocation, 0);
  if (!opts.multilabel) {
    if (truth.class_names.size() != 1)
      throw ParseError("evaluate: binary mode expects exactly one class "
                       "column; pass --multilabel for " +
                       std::to_string(truth.class_names.size()) + " classes");
    const std::vector<bool> y_true =
        truth_column(truth.scores.col(0), opts.truth_path);
    const Eigen::VectorXd y_score = scores.scores.col(0);

    const metrics::ConfusionCounts counts = metrics::confusion_counts(
        y_true, metrics::threshold_scores(y_score, opts.threshold));
    const metrics::BinaryMetrics bm = metrics::binary_metrics(counts);

    report["mode"] = "binary";
    report["threshold"] = opts.threshold;
    report["class"] = truth.class_names[0];
    report["counts"] = {{"tp", counts.tp},
                        {"fp", counts.fp},
                        {"fn", counts.fn_},
                        {"tn", counts.tn}};
    report["accuracy"] = bm.accuracy;
    report["precision"] = bm.precision;
    report["recall"] = bm.recall;
    report["specificity"] = bm.specificity;
    report["f1"] = bm.f_beta;
    json degenerate = json::array();
    if (bm.precision_degenerate) degenerate.push_back("precision");
    if (bm.recall_degenerate) degenerate.push_back("recall");
    if (bm.specificity_degenerate) degenerate.push_back("specificity");
    if (bm.f_beta_degenerate) degenerate.push_back("f1");
    report["degenerate"] = degenerate;
    // AUCs need both classes present; reported as null when undefined.
    report["roc_auc"] = optional_metric(
        [&] { return metrics::roc_auc(y_true, y_score); });
    report["average_precision"] = optional_metric(
        [&] { return metrics::average_precision(y_true, y_score); });
  } else {
    metrics::PredictionSet pred_set;
    pred_set.item_ids = scores.ids;
    pred_set.scores = scores.scores;
    pred_set.truth.resize(truth.scores.rows(), truth.scores.cols());
    for (Eigen::Index c = 0; c < truth.scores.cols(); ++c) {
      const std::vector<bool> col =
          truth_column(truth.scores.col(c), opts.truth_path);
      for (Eigen::Index r = 0; r < truth.scores.rows(); ++r)
        pred_set.truth(r, c) = col[static_cast<std::size_t>(r)];
    }
    pred_set.validate();

    report["mode"] = "multilabel";
    report["classes"] = truth.class_names;
    const auto macro_json = [&](metrics::RankMetric metric) {
      const metrics::MacroResult r =
          metrics::macro_multilabel(pred_set, metric);
      json per_class = json::array();
      for (Eigen::Index c = 0; c < r.per_class.size(); ++c) {
        if (std::isnan(r.per_class[c]))
          per_class.push_back(nullptr);
        else
          per_class.push_back(r.per_class[c]);
      }
      json skipped = json::array();
      for (int c : r.skipped_classes)
        skipped.push_back(truth.class_names[static_cast<std::size_t>(c)]);
      return json{{"per_class", per_class},
                  {"macro", r.macro},
                  {"skipped", skipped}};
    };
    report["roc_auc"] = macro_json(metrics::RankMetric::roc_auc);
    report["average_precision"] =
        macro_json(metrics::RankMetric::average_precision);
  }
  write_report(opts.out, report);
}

void run_aggregate(const AggregateOptions& opts,
                   const std::string& invocation) {
  (void)invocation;
  metrics::AggregateMethod method;
  if (opts.method == "mean") {
    method = metrics::AggregateMethod::mean;
  } else if (opts.method == "max") {
    method = metrics::AggregateMethod::max;
  } else if (opts.method == "majority") {
    method = metrics::AggregateMethod::majority;
  } else {
    throw UsageError("--method must be mean, max, or majority");
  }

  const formats::ScoreTable chunks =
      formats::read_score_table(opts.scores_path);
  std::vector<std::string> track_order;
  std::map<std::string, std::vector<Eigen::Index>> rows_by_track;
  for (std::size_t i = 0; i < chunks.ids.size(); ++i) {
    const std::string& id = chunks.ids[i];
    const std::size_t pos = id.rfind('#');
    if (pos == std::string::npos || pos == 0 || pos + 1 == id.size())
      throw ParseError(opts.scores_path + ": chunk id '" + id +
                       "' is not <track>#<index>");
    for (std::size_t j = pos + 1; j < id.size(); ++j)
      if (!std::isdigit(static_cast<unsigned char>(id[j])))
        throw ParseError(opts.scores_path + ": chunk id '" + id +
                         "' has a non-numeric index");
    const std::string track = id.substr(0, pos);
    if (rows_by_track.find(track) == rows_by_track.end())
      track_order.push_back(track);
    rows_by_track[track].push_back(static_cast<Eigen::Index>(i));
  }

  formats::ScoreTable out;
  out.class_names = chunks.class_names;
  out.scores.resize(static_cast<Eigen::Index>(track_order.size()),
                    chunks.scores.cols());
  for (std::size_t t = 0; t < track_order.size(); ++t) {
    const auto& rows = rows_by_track[track_order[t]];
    Eigen::MatrixXd block(static_cast<Eigen::Index>(rows.size()),
                          chunks.scores.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
      block.row(static_cast<Eigen::Index>(r)) = chunks.scores.row(rows[r]);
    out.ids.push_back(track_order[t]);
    out.scores.row(static_cast<Eigen::Index>(t)) =
        metrics::aggregate_chunks(block, method).scores.transpose();
  }
  formats::write_score_table(opts.out, out);
}

void run_dataset_check(const DatasetCheckOptions& opts,
                       const std::string& invocation) {
  if (opts.split_paths.size() < 2)
    throw UsageError("check-split needs at least two --splits files");
  const std::vector<std::string> vocab = load_vocabulary(opts.vocab_path);
  const std::optional<std::string> sidecar_text =
      opts.sidecar_path
          ? std::optional<std::string>(
                formats::read_file_text(*opts.sidecar_path))
          : std::nullopt;

  std::map<std::string, dataset::SplitManifest> splits;
  for (const auto& path : opts.split_paths) {
    const std::string name = stem_of(path);
    dataset::SplitManifest manifest =
        dataset::parse_split_file(formats::read_file_text(path), vocab);
    if (sidecar_text) dataset::attach_sidecar(manifest, *sidecar_text);
    if (!splits.emplace(name, std::move(manifest)).second)
      throw UsageError("two --splits files share the name '" + name + "'");
  }

  const std::vector<dataset::LeakFinding> leaks =
      dataset::check_leakage(splits, parse_key(opts.key));
  const std::vector<dataset::PairDivergence> divergence =
      dataset::distribution_divergence(splits);

  json report = report_base(invocation, 0);
  report["key"] = opts.key;
  json split_names = json::array();
  for (const auto& [name, manifest] : splits) {
    split_names.push_back(
        {{"name", name}, {"entries", manifest.entries.size()}});
  }
  report["splits"] = split_names;
  json leaks_json = json::array();
  for (const auto& leak : leaks)
    leaks_json.push_back(
        {{"key_value", leak.key_value}, {"splits", leak.splits}});
  report["leaks"] = leaks_json;
  json div_json = json::array();
  for (const auto& d : divergence)
    div_json.push_back({{"split_a", d.split_a},
                        {"split_b", d.split_b},
                        {"total_variation", d.total_variation}});
  report["label_divergence"] = div_json;
  write_report(opts.out, report);
}

void run_dataset_make(const DatasetMakeOptions& opts,
                      const std::string& invocation) {
  (void)invocation;
  const std::vector<std::string> vocab = load_vocabulary(opts.vocab_path);
  dataset::SplitManifest manifest = dataset::parse_split_file(
      formats::read_file_text(opts.manifest_path), vocab);
  if (opts.sidecar_path)
    dataset::attach_sidecar(manifest,
                            formats::read_file_text(*opts.sidecar_path));

  dataset::SplitFractions fractions;
  double f[3];
  {
    std::stringstream ss(opts.fractions);
    std::string tok;
    int i = 0;
    while (std::getline(ss, tok, ',') && i < 3) {
      try {
        f[i++] = std::stod(tok);
      } catch (const std::exception&) {
        throw UsageError("--fractions must be three comma-separated numbers");
      }
    }
    if (i != 3 || std::getline(ss, tok, ','))
      throw UsageError("--fractions must be three comma-separated numbers");
  }
  fractions.train = f[0];
  fractions.valid = f[1];
  fractions.test = f[2];

  std::optional<dataset::GroupKeyKind> key;
  if (opts.group_key != "none") key = parse_key(opts.group_key);

  const dataset::StratifiedResult result =
      dataset::stratified_split(manifest, fractions, key, opts.seed);

  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) throw IoError("cannot create " + opts.out_dir + ": " + ec.message());
  const std::pair<const char*, const dataset::SplitManifest*> outs[3] = {
      {"train", &result.train}, {"valid", &result.valid},
      {"test", &result.test}};
  for (const auto& [name, split] : outs) {
    formats::write_file_text(
        (fs::path(opts.out_dir) / (std::string(name) + ".txt")).string(),
        dataset::serialize_split_file(*split));
    formats::write_file_text(
        (fs::path(opts.out_dir) / (std::string(name) + ".tsv")).string(),
        dataset::serialize_sidecar(*split));
  }
  for (const auto& note : result.imbalance_notes)
    std::cout << "imbalance: " << note << "\n";
}

void run_train_demo(const TrainDemoOptions& opts,
                    const std::string& invocation) {
  trainer::LabeledSet labeled;
  labeled.features = formats::read_matrix(opts.features_path);
  labeled.labels = parse_label_file(opts.labels_path, labeled.features.rows());

  double test_fraction = 0.2;
  trainer::TrainConfig flat_cfg;
  trainer::TrainConfig teacher_cfg;
  trainer::TrainConfig student_cfg;
  bool split_roles = false;
  if (opts.config_path) {
    json doc;
    try {
      doc = json::parse(formats::read_file_text(*opts.config_path));
    } catch (const json::parse_error& e) {
      throw ParseError(*opts.config_path + ": malformed JSON: " +
                       std::string(e.what()));
    }
    if (doc.is_object() &&
        (doc.contains("teacher") || doc.contains("student"))) {
      split_roles = true;
      for (const auto& item : doc.items())
        if (item.key() != "teacher" && item.key() != "student")
          throw ParseError("$." + item.key() +
                           ": unknown key beside teacher/student");
      if (doc.contains("teacher"))
        teacher_cfg = parse_train_config(doc["teacher"], "$.teacher", nullptr);
      if (doc.contains("student"))
        student_cfg = parse_train_config(doc["student"], "$.student", nullptr);
    } else {
      flat_cfg = parse_train_config(doc, "$", &test_fraction);
    }
  }
  if (!split_roles) {
    teacher_cfg = flat_cfg;
    student_cfg = flat_cfg;
  }
  if (opts.seed) {
    flat_cfg.seed = *opts.seed;
    teacher_cfg.seed = *opts.seed;
    student_cfg.seed = *opts.seed;
  }

  trainer::LinearModel final_model;
  json report = report_base(invocation, flat_cfg.seed);
  report["mode"] = opts.mode;

  if (opts.mode == "supervised") {
    const trainer::FitResult fit = trainer::fit_supervised(labeled, flat_cfg);
    final_model = fit.model;
    report["seed"] = flat_cfg.seed;
    report["train_loss_trace"] = fit.loss_trace;
    report["accuracies"] = {
        {"train", trainer::accuracy(fit.model, labeled)}};
  } else if (opts.mode == "noisy-student") {
    if (!opts.unlabeled_path)
      throw UsageError("noisy-student mode needs --unlabeled");
    trainer::UnlabeledSet unlabeled;
    unlabeled.features = formats::read_matrix(*opts.unlabeled_path);
    const trainer::NoisyStudentResult ns = trainer::noisy_student_train(
        labeled, unlabeled, teacher_cfg, student_cfg);
    final_model = ns.student;
    report["seed"] = student_cfg.seed;
    report["teacher_loss_trace"] = ns.teacher_loss_trace;
    report["student_loss_trace"] = ns.student_loss_trace;
    report["accuracies"] = {
        {"teacher_train", trainer::accuracy(ns.teacher, labeled)},
        {"student_train", trainer::accuracy(ns.student, labeled)}};
  } else if (opts.mode == "linear-eval") {
    const Eigen::Index n = labeled.features.rows();
    if (n < 2)
      throw ValueError("linear-eval needs at least 2 rows to hold out a "
                       "test set");
    Eigen::Index n_test = static_cast<Eigen::Index>(
        std::floor(static_cast<double>(n) * test_fraction));
    n_test = std::clamp<Eigen::Index>(n_test, 1, n - 1);
    trainer::LabeledSet train{
        labeled.features.topRows(n - n_test),
        {labeled.labels.begin(), labeled.labels.end() - n_test}};
    trainer::LabeledSet test{
        labeled.features.bottomRows(n_test),
        {labeled.labels.end() - n_test, labeled.labels.end()}};
    const trainer::LinearEvalResult ev =
        trainer::linear_evaluation(train, test, flat_cfg);
    final_model = ev.model;
    report["seed"] = flat_cfg.seed;
    report["train_loss_trace"] = ev.loss_trace;
    report["test_rows"] = n_test;
    report["accuracies"] = {{"train", trainer::accuracy(ev.model, train)},
                            {"test", ev.test_accuracy}};
  } else {
    throw UsageError(
        "--mode must be supervised, noisy-student, or linear-eval");
  }

  // Checkpoint layout: one row per class, the bias in the last column.
  Eigen::MatrixXd checkpoint(final_model.W.rows(), final_model.W.cols() + 1);
  checkpoint << final_model.W, final_model.b;
  formats::write_matrix(opts.out, checkpoint);
  report["feature_dim"] = final_model.feature_dim();
  report["n_classes"] = final_model.n_classes();
  report["checkpoint"] = opts.out;
  write_report(fs::path(opts.out).replace_extension(".json").string(),
               report);
}

}  // namespace audioml::cli
