// Implementations behind the CLI subcommands. Flag parsing stays in
// cli_main.cpp; these functions take validated option structs, do the work,
// and throw the library error types (the main translates them into exit
// codes: usage 2, parse/io 3, numeric 4).
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace audioml::cli {

struct SpectrogramOptions {
  std::string input;
  std::string kind = "stft";  // stft | mel | cqt
  int n_fft = 2048;
  int hop = 512;
  int n_mels = 128;
  int bins_per_octave = 24;
  std::optional<double> fmin;  // default depends on kind
  bool db = false;
  std::string out;
  std::optional<std::string> pgm;
  // Set by the parser when the user passed a flag that only applies to
  // another kind.
  std::vector<std::string> foreign_flags;
};

struct AugmentOptions {
  std::string input;
  std::string pipeline_path;
  std::optional<std::uint64_t> seed;  // overrides the pipeline file
  std::optional<int> views;           // overrides the pipeline file
  std::string out_dir;
};

struct EvaluateOptions {
  std::string truth_path;
  std::string scores_path;
  double threshold = 0.5;
  bool multilabel = false;
  std::string out;
};

struct AggregateOptions {
  std::string scores_path;
  std::string method = "mean";  // mean | max | majority
  std::string out;
};

struct DatasetCheckOptions {
  std::vector<std::string> split_paths;
  std::optional<std::string> sidecar_path;
  std::string key = "artist";  // artist | group
  std::optional<std::string> vocab_path;
  std::string out;
};

struct DatasetMakeOptions {
  std::string manifest_path;
  std::optional<std::string> sidecar_path;
  std::string fractions = "0.7,0.2,0.1";
  std::string group_key = "none";  // artist | group | none
  std::uint64_t seed = 0;
  std::optional<std::string> vocab_path;
  std::string out_dir;
};

struct TrainDemoOptions {
  std::string features_path;
  std::string labels_path;
  std::optional<std::string> unlabeled_path;
  std::string mode = "supervised";  // supervised | noisy-student | linear-eval
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;  // overrides the config file
  std::string out;
};

// invocation is the original command line, echoed into JSON reports.
void run_spectrogram(const SpectrogramOptions& opts,
                     const std::string& invocation);
void run_augment(const AugmentOptions& opts, const std::string& invocation);
void run_evaluate(const EvaluateOptions& opts, const std::string& invocation);
void run_aggregate(const AggregateOptions& opts,
                   const std::string& invocation);
void run_dataset_check(const DatasetCheckOptions& opts,
                       const std::string& invocation);
void run_dataset_make(const DatasetMakeOptions& opts,
                      const std::string& invocation);
void run_train_demo(const TrainDemoOptions& opts,
                    const std::string& invocation);

}  // namespace audioml::cli
