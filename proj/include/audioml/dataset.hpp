#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "audioml/audio_buffer.hpp"
#include "audioml/rng.hpp"

namespace audioml::dataset {

struct SplitEntry {
  std::string relative_path;  // full "<label>/<filename>" line
  std::string label_name;
  int label_index = -1;
  std::string artist_id;  // empty = absent
  std::string group_id;   // empty = absent
};

// Invariants: label_index is the position of label_name in vocabulary;
// relative_path values are unique within the manifest.
struct SplitManifest {
  std::vector<SplitEntry> entries;
  std::vector<std::string> vocabulary;
};

// The ten-genre vocabulary used by the published GTZAN split files, in the
// canonical order that fixes each label_index.
const std::vector<std::string>& gtzan_genres();

// Parses `<label>/<filename>` lines (blank lines skipped, CR tolerated).
// Unknown labels, lines without '/', and duplicate paths are parse errors.
SplitManifest parse_split_file(const std::string& text,
                               const std::vector<std::string>& vocabulary);

// One relative_path per line, newline-terminated; parse of the result under
// the same vocabulary reproduces the manifest.
std::string serialize_split_file(const SplitManifest& manifest);

// TSV sidecar carrying the keys the split txt format lacks. Header line
// "path<TAB>label<TAB>artist<TAB>group", one row per entry.
std::string serialize_sidecar(const SplitManifest& manifest);

// Attaches artist/group ids from a sidecar table to matching paths.
// Paths in the manifest without a sidecar row are left untouched.
void attach_sidecar(SplitManifest& manifest, const std::string& tsv_text);

enum class ChunkMode { train_random_crop, eval_stacked };

struct ChunkPlan {
  Eigen::Index num_samples = 0;
  int num_chunks = 1;
  ChunkMode mode = ChunkMode::train_random_crop;
};

// Train mode: one random crop of num_samples (uniform offset). Eval mode:
// num_chunks rows at offsets i * hop with hop = (len - num_samples) div
// num_chunks; the integer division can leave trailing samples unused and
// they are dropped, matching that formula. Requires len >= num_samples.
std::variant<AudioBuffer, Eigen::MatrixXd> adjust_audio_length(
    const AudioBuffer& x, const ChunkPlan& plan, Rng& rng);

enum class GroupKeyKind { artist, group };

struct LeakFinding {
  std::string key_value;
  std::vector<std::string> splits;  // names of the splits sharing the key
};

// Key values appearing in more than one split; empty result iff clean.
// Every entry must carry the chosen key.
std::vector<LeakFinding> check_leakage(
    const std::map<std::string, SplitManifest>& splits, GroupKeyKind key);

struct PairDivergence {
  std::string split_a;
  std::string split_b;
  double total_variation = 0.0;
};

// TV(p, q) = 1/2 sum_c |p_c - q_c| over normalized label histograms, for
// every split pair. Splits must share the vocabulary and be nonempty.
std::vector<PairDivergence> distribution_divergence(
    const std::map<std::string, SplitManifest>& splits);

struct SplitFractions {
  double train = 0.7;
  double valid = 0.2;
  double test = 0.1;
};

struct StratifiedResult {
  SplitManifest train;
  SplitManifest valid;
  SplitManifest test;
  // Labels whose per-split counts ended more than one item off target
  // because whole groups had to move together.
  std::vector<std::string> imbalance_notes;
};

// Greedy largest-groups-first assignment (seeded shuffle within size ties).
// With a group key, whole groups stay in one split, so check_leakage on the
// output is always empty; without one, per-label counts hit the integer
// targets exactly. The three outputs partition the input.
StratifiedResult stratified_split(const SplitManifest& manifest,
                                  const SplitFractions& fractions,
                                  std::optional<GroupKeyKind> group_key,
                                  std::uint64_t seed);

}  // namespace audioml::dataset
