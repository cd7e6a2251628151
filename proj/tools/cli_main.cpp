// Command line front end. Subcommands map onto the library modules;
// exit codes are a stable contract: 0 success, 2 usage error, 3 input
// parse/io error, 4 numeric or precondition error.
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "audioml/errors.hpp"
#include "audioml/version.hpp"
#include "commands.hpp"

namespace {

std::string join_invocation(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) out += ' ';
    out += argv[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string invocation = join_invocation(argc, argv);

  CLI::App app{"audioml: spectrograms, augmentation, evaluation, and "
               "training demos for audio ML experiments"};
  app.set_version_flag("--version", audioml::kToolVersion);
  app.require_subcommand(1);

  // spectrogram
  audioml::cli::SpectrogramOptions spec_opts;
  std::string spec_pgm;
  double spec_fmin = 0.0;
  auto* spec_cmd = app.add_subcommand(
      "spectrogram", "Compute an STFT, mel, or CQT matrix from a WAV file");
  spec_cmd->add_option("--input", spec_opts.input, "input WAV file")
      ->required();
  spec_cmd->add_option("--kind", spec_opts.kind, "stft | mel | cqt")
      ->check(CLI::IsMember({"stft", "mel", "cqt"}));
  spec_cmd->add_option("--n-fft", spec_opts.n_fft, "FFT size (stft/mel)");
  spec_cmd->add_option("--hop", spec_opts.hop, "hop length in samples");
  auto* nmels_opt = spec_cmd->add_option("--n-mels", spec_opts.n_mels,
                                         "mel band count (mel only)");
  auto* bpo_opt = spec_cmd->add_option("--bins-per-octave",
                                       spec_opts.bins_per_octave,
                                       "CQT bins per octave (cqt only)");
  auto* fmin_opt = spec_cmd->add_option(
      "--fmin", spec_fmin, "lowest frequency in Hz (mel/cqt)");
  spec_cmd->add_flag("--db", spec_opts.db,
                     "write decibels relative to the matrix maximum");
  spec_cmd->add_option("--out", spec_opts.out,
                       "output matrix (.f32m or .csv)")
      ->required();
  auto* pgm_opt =
      spec_cmd->add_option("--pgm", spec_pgm, "also render a PGM image");
  spec_cmd->callback([&] {
    if (fmin_opt->count() > 0) spec_opts.fmin = spec_fmin;
    if (pgm_opt->count() > 0) spec_opts.pgm = spec_pgm;
    if (spec_opts.kind != "mel" && nmels_opt->count() > 0)
      spec_opts.foreign_flags.push_back("--n-mels");
    if (spec_opts.kind != "cqt" && bpo_opt->count() > 0)
      spec_opts.foreign_flags.push_back("--bins-per-octave");
    if (spec_opts.kind == "stft" && fmin_opt->count() > 0)
      spec_opts.foreign_flags.push_back("--fmin");
    audioml::cli::run_spectrogram(spec_opts, invocation);
  });

  // augment
  audioml::cli::AugmentOptions aug_opts;
  std::uint64_t aug_seed = 0;
  int aug_views = 0;
  auto* aug_cmd = app.add_subcommand(
      "augment", "Render augmented views of a WAV file from a pipeline spec");
  aug_cmd->add_option("--input", aug_opts.input, "input WAV file")
      ->required();
  aug_cmd->add_option("--pipeline", aug_opts.pipeline_path,
                      "pipeline JSON file")
      ->required();
  auto* aug_seed_opt = aug_cmd->add_option(
      "--seed", aug_seed, "override the seed in the pipeline file");
  auto* aug_views_opt = aug_cmd->add_option(
      "--views", aug_views, "override num_views in the pipeline file");
  aug_cmd->add_option("--out-dir", aug_opts.out_dir, "output directory")
      ->required();
  aug_cmd->callback([&] {
    if (aug_seed_opt->count() > 0) aug_opts.seed = aug_seed;
    if (aug_views_opt->count() > 0) aug_opts.views = aug_views;
    audioml::cli::run_augment(aug_opts, invocation);
  });

  // evaluate
  audioml::cli::EvaluateOptions eval_opts;
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "Score predictions against truth and write a JSON report");
  eval_cmd->add_option("--truth", eval_opts.truth_path, "truth CSV (0/1)")
      ->required();
  eval_cmd->add_option("--scores", eval_opts.scores_path, "score CSV")
      ->required();
  eval_cmd->add_option("--threshold", eval_opts.threshold,
                       "decision threshold for binary mode (default 0.5)");
  eval_cmd->add_flag("--multilabel", eval_opts.multilabel,
                     "per-class and macro ranking metrics");
  eval_cmd->add_option("--out", eval_opts.out, "report JSON path")
      ->required();
  eval_cmd->callback(
      [&] { audioml::cli::run_evaluate(eval_opts, invocation); });

  // aggregate
  audioml::cli::AggregateOptions agg_opts;
  auto* agg_cmd = app.add_subcommand(
      "aggregate", "Merge chunk scores (ids <track>#<k>) into track scores");
  agg_cmd->add_option("--scores", agg_opts.scores_path, "chunk score CSV")
      ->required();
  agg_cmd->add_option("--method", agg_opts.method, "mean | max | majority")
      ->check(CLI::IsMember({"mean", "max", "majority"}));
  agg_cmd->add_option("--out", agg_opts.out, "track score CSV path")
      ->required();
  agg_cmd->callback(
      [&] { audioml::cli::run_aggregate(agg_opts, invocation); });

  // dataset
  auto* ds_cmd = app.add_subcommand("dataset", "Split hygiene tooling");
  ds_cmd->require_subcommand(1);

  audioml::cli::DatasetCheckOptions check_opts;
  std::string check_sidecar;
  std::string check_vocab;
  auto* check_cmd = ds_cmd->add_subcommand(
      "check-split", "Audit splits for leakage and label skew");
  check_cmd->add_option("--splits", check_opts.split_paths,
                        "two or more split files")
      ->required()
      ->expected(-2);
  auto* check_sidecar_opt = check_cmd->add_option(
      "--sidecar", check_sidecar, "TSV with artist/group keys per path");
  check_cmd->add_option("--key", check_opts.key, "artist | group")
      ->check(CLI::IsMember({"artist", "group"}));
  auto* check_vocab_opt = check_cmd->add_option(
      "--vocab", check_vocab, "label vocabulary file (default GTZAN genres)");
  check_cmd->add_option("--out", check_opts.out, "report JSON path")
      ->required();
  check_cmd->callback([&] {
    if (check_sidecar_opt->count() > 0)
      check_opts.sidecar_path = check_sidecar;
    if (check_vocab_opt->count() > 0) check_opts.vocab_path = check_vocab;
    audioml::cli::run_dataset_check(check_opts, invocation);
  });

  audioml::cli::DatasetMakeOptions make_opts;
  std::string make_full_sidecar;
  std::string make_vocab;
  auto* make_cmd = ds_cmd->add_subcommand(
      "make-split", "Stratified train/valid/test split of a manifest");
  make_cmd->add_option("--manifest", make_opts.manifest_path,
                       "manifest listing every item as <label>/<file>")
      ->required();
  auto* make_sidecar_opt = make_cmd->add_option(
      "--sidecar", make_full_sidecar, "TSV with artist/group keys per path");
  make_cmd->add_option("--fractions", make_opts.fractions,
                       "train,valid,test (default 0.7,0.2,0.1)");
  make_cmd->add_option("--group-key", make_opts.group_key,
                       "artist | group | none")
      ->check(CLI::IsMember({"artist", "group", "none"}));
  make_cmd->add_option("--seed", make_opts.seed, "shuffle seed");
  auto* make_vocab_opt = make_cmd->add_option(
      "--vocab", make_vocab, "label vocabulary file (default GTZAN genres)");
  make_cmd->add_option("--out-dir", make_opts.out_dir, "output directory")
      ->required();
  make_cmd->callback([&] {
    if (make_sidecar_opt->count() > 0)
      make_opts.sidecar_path = make_full_sidecar;
    if (make_vocab_opt->count() > 0) make_opts.vocab_path = make_vocab;
    audioml::cli::run_dataset_make(make_opts, invocation);
  });

  // train-demo
  audioml::cli::TrainDemoOptions train_opts;
  std::string train_unlabeled;
  std::string train_config;
  std::uint64_t train_seed = 0;
  auto* train_cmd = app.add_subcommand(
      "train-demo", "Linear classifier demos: supervised, noisy-student, "
                    "linear-eval");
  train_cmd->add_option("--features", train_opts.features_path,
                        "feature matrix (.f32m or .csv), one row per item")
      ->required();
  train_cmd->add_option("--labels", train_opts.labels_path,
                        "label CSV with header id,label")
      ->required();
  auto* train_unlabeled_opt = train_cmd->add_option(
      "--unlabeled", train_unlabeled, "unlabeled feature matrix");
  train_cmd->add_option("--mode", train_opts.mode,
                        "supervised | noisy-student | linear-eval")
      ->check(CLI::IsMember({"supervised", "noisy-student", "linear-eval"}));
  auto* train_config_opt = train_cmd->add_option(
      "--config", train_config, "training config JSON");
  auto* train_seed_opt = train_cmd->add_option(
      "--seed", train_seed, "override the seed in the config");
  train_cmd->add_option("--out", train_opts.out,
                        "checkpoint matrix path (.f32m or .csv); the report "
                        "lands next to it as .json")
      ->required();
  train_cmd->callback([&] {
    if (train_unlabeled_opt->count() > 0)
      train_opts.unlabeled_path = train_unlabeled;
    if (train_config_opt->count() > 0) train_opts.config_path = train_config;
    if (train_seed_opt->count() > 0) train_opts.seed = train_seed;
    audioml::cli::run_train_demo(train_opts, invocation);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const audioml::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const audioml::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const audioml::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const audioml::ValueError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
