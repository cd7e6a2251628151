#include "audioml/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace audioml::dataset {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r'))
    --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

const std::string& key_of(const SplitEntry& e, GroupKeyKind kind) {
  return kind == GroupKeyKind::artist ? e.artist_id : e.group_id;
}

const char* key_name(GroupKeyKind kind) {
  return kind == GroupKeyKind::artist ? "artist" : "group";
}

}  // namespace

const std::vector<std::string>& gtzan_genres() {
  static const std::vector<std::string> genres = {
      "blues", "classical", "country", "disco", "hiphop",
      "jazz",  "metal",     "pop",     "reggae", "rock"};
  return genres;
}

SplitManifest parse_split_file(const std::string& text,
                               const std::vector<std::string>& vocabulary) {
  SplitManifest manifest;
  manifest.vocabulary = vocabulary;
  std::set<std::string> seen_paths;
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    const std::size_t slash = line.find('/');
    if (slash == std::string::npos)
      throw ParseError("split file line " + std::to_string(i + 1) +
                       ": expected <label>/<filename>, got '" + line + "'");
    SplitEntry entry;
    entry.relative_path = line;
    entry.label_name = line.substr(0, slash);
    const auto it = std::find(vocabulary.begin(), vocabulary.end(),
                              entry.label_name);
    if (it == vocabulary.end())
      throw ParseError("split file line " + std::to_string(i + 1) +
                       ": label '" + entry.label_name +
                       "' not in vocabulary");
    entry.label_index = static_cast<int>(it - vocabulary.begin());
    if (!seen_paths.insert(entry.relative_path).second)
      throw ParseError("split file line " + std::to_string(i + 1) +
                       ": duplicate path '" + entry.relative_path + "'");
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

std::string serialize_split_file(const SplitManifest& manifest) {
  std::string out;
  for (const auto& e : manifest.entries) {
    out += e.relative_path;
    out += '\n';
  }
  return out;
}

std::string serialize_sidecar(const SplitManifest& manifest) {
  std::string out = "path\tlabel\tartist\tgroup\n";
  for (const auto& e : manifest.entries) {
    out += e.relative_path;
    out += '\t';
    out += e.label_name;
    out += '\t';
    out += e.artist_id;
    out += '\t';
    out += e.group_id;
    out += '\n';
  }
  return out;
}

void attach_sidecar(SplitManifest& manifest, const std::string& tsv_text) {
  const std::vector<std::string> lines = split_lines(tsv_text);
  if (lines.empty() || trim(lines[0]) != "path\tlabel\tartist\tgroup")
    throw ParseError("sidecar: first line must be the header "
                     "path<TAB>label<TAB>artist<TAB>group");
  std::map<std::string, std::pair<std::string, std::string>> table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t pos = 0; pos <= line.size(); ++pos) {
      if (pos == line.size() || line[pos] == '\t') {
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
      }
    }
    if (fields.size() != 4)
      throw ParseError("sidecar line " + std::to_string(i + 1) + ": expected "
                       "4 tab-separated fields, got " +
                       std::to_string(fields.size()));
    table[fields[0]] = {fields[2], fields[3]};
  }
  for (auto& e : manifest.entries) {
    const auto it = table.find(e.relative_path);
    if (it == table.end()) continue;
    e.artist_id = it->second.first;
    e.group_id = it->second.second;
  }
}

std::variant<AudioBuffer, Eigen::MatrixXd> adjust_audio_length(
    const AudioBuffer& x, const ChunkPlan& plan, Rng& rng) {
  require_mono(x, "adjust_audio_length");
  const Eigen::Index len = x.samples.size();
  if (plan.num_samples < 1)
    throw ValueError("adjust_audio_length: num_samples must be >= 1");
  if (plan.num_chunks < 1)
    throw ValueError("adjust_audio_length: num_chunks must be >= 1");
  if (len < plan.num_samples)
    throw ValueError("adjust_audio_length: signal (" +
                     std::to_string(static_cast<long long>(len)) +
                     " samples) shorter than num_samples (" +
                     std::to_string(static_cast<long long>(plan.num_samples)) +
                     ")");

  if (plan.mode == ChunkMode::train_random_crop) {
    const Eigen::Index offset =
        static_cast<Eigen::Index>(rng.uniform_int(0, len - plan.num_samples));
    return AudioBuffer(x.samples.segment(offset, plan.num_samples),
                       x.sample_rate, 1);
  }

  const Eigen::Index hop = (len - plan.num_samples) / plan.num_chunks;
  Eigen::MatrixXd chunks(plan.num_chunks, plan.num_samples);
  for (int i = 0; i < plan.num_chunks; ++i)
    chunks.row(i) = x.samples.segment(i * hop, plan.num_samples);
  return chunks;
}

std::vector<LeakFinding> check_leakage(
    const std::map<std::string, SplitManifest>& splits, GroupKeyKind key) {
  std::map<std::string, std::set<std::string>> memberships;
  for (const auto& [split_name, manifest] : splits) {
    for (const auto& e : manifest.entries) {
      const std::string& k = key_of(e, key);
      if (k.empty())
        throw ValueError("check_leakage: entry '" + e.relative_path +
                         "' in split '" + split_name + "' lacks the " +
                         key_name(key) + " key");
      memberships[k].insert(split_name);
    }
  }
  std::vector<LeakFinding> findings;
  for (const auto& [value, names] : memberships) {
    if (names.size() > 1)
      findings.push_back(
          {value, std::vector<std::string>(names.begin(), names.end())});
  }
  return findings;
}

std::vector<PairDivergence> distribution_divergence(
    const std::map<std::string, SplitManifest>& splits) {
  std::vector<std::pair<std::string, Eigen::VectorXd>> histograms;
  const std::vector<std::string>* vocab = nullptr;
  for (const auto& [name, manifest] : splits) {
    if (manifest.entries.empty())
      throw ValueError("distribution_divergence: split '" + name +
                       "' is empty");
    if (vocab == nullptr) {
      vocab = &manifest.vocabulary;
    } else if (*vocab != manifest.vocabulary) {
      throw ValueError("distribution_divergence: splits do not share a "
                       "vocabulary");
    }
    Eigen::VectorXd h =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab->size()));
    for (const auto& e : manifest.entries) h[e.label_index] += 1.0;
    h /= static_cast<double>(manifest.entries.size());
    histograms.emplace_back(name, std::move(h));
  }
  std::vector<PairDivergence> out;
  for (std::size_t a = 0; a < histograms.size(); ++a)
    for (std::size_t b = a + 1; b < histograms.size(); ++b)
      out.push_back({histograms[a].first, histograms[b].first,
                     0.5 * (histograms[a].second - histograms[b].second)
                               .cwiseAbs()
                               .sum()});
  return out;
}

StratifiedResult stratified_split(const SplitManifest& manifest,
                                  const SplitFractions& fractions,
                                  std::optional<GroupKeyKind> group_key,
                                  std::uint64_t seed) {
  const double fracs[3] = {fractions.train, fractions.valid, fractions.test};
  for (double f : fracs)
    if (f <= 0.0)
      throw ValueError("stratified_split: fractions must be positive");
  if (std::abs(fracs[0] + fracs[1] + fracs[2] - 1.0) > 1e-9)
    throw ValueError("stratified_split: fractions must sum to 1");
  const Eigen::Index n_labels =
      static_cast<Eigen::Index>(manifest.vocabulary.size());
  if (manifest.entries.empty())
    throw ValueError("stratified_split: empty manifest");

  // Group entry indices; without a key every entry is its own group.
  std::map<std::string, std::vector<std::size_t>> by_key;
  std::vector<std::vector<std::size_t>> groups;
  if (group_key) {
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
      const std::string& k = key_of(manifest.entries[i], *group_key);
      if (k.empty())
        throw ValueError("stratified_split: entry '" +
                         manifest.entries[i].relative_path + "' lacks the " +
                         key_name(*group_key) + " key");
      by_key[k].push_back(i);
    }
    for (auto& [k, idx] : by_key) groups.push_back(std::move(idx));
  } else {
    for (std::size_t i = 0; i < manifest.entries.size(); ++i)
      groups.push_back({i});
  }

  const double n_total = static_cast<double>(manifest.entries.size());
  const double max_frac = std::max({fracs[0], fracs[1], fracs[2]});
  for (const auto& g : groups)
    if (static_cast<double>(g.size()) > std::ceil(max_frac * n_total))
      throw ValueError(
          "stratified_split: a single group (" + std::to_string(g.size()) +
          " items) is larger than the largest target split (" +
          std::to_string(static_cast<long long>(
              std::ceil(max_frac * n_total))) +
          " items)");

  // Seeded shuffle, then stable sort by size: largest groups first, ties in
  // shuffled order.
  Rng stream(seed);
  for (std::size_t i = groups.size(); i > 1; --i)
    std::swap(groups[i - 1],
              groups[static_cast<std::size_t>(stream.uniform_int(
                  0, static_cast<std::int64_t>(i) - 1))]);
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& a, const auto& b) {
                     return a.size() > b.size();
                   });

  // Per-label totals fix the targets; the greedy hands each group to the
  // split with the largest remaining label-weighted deficit.
  Eigen::VectorXd label_totals = Eigen::VectorXd::Zero(n_labels);
  for (const auto& e : manifest.entries) label_totals[e.label_index] += 1.0;
  Eigen::MatrixXd target(3, n_labels);
  for (int s = 0; s < 3; ++s) target.row(s) = fracs[s] * label_totals.transpose();
  Eigen::MatrixXd current = Eigen::MatrixXd::Zero(3, n_labels);

  std::vector<int> assignment(manifest.entries.size(), -1);
  for (const auto& g : groups) {
    Eigen::VectorXd g_counts = Eigen::VectorXd::Zero(n_labels);
    for (std::size_t i : g)
      g_counts[manifest.entries[i].label_index] += 1.0;
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < 3; ++s) {
      const double score =
          ((target.row(s) - current.row(s)) * g_counts).value();
      if (score > best_score) {
        best_score = score;
        best = s;
      }
    }
    current.row(best) += g_counts.transpose();
    for (std::size_t i : g) assignment[i] = best;
  }

  StratifiedResult result;
  SplitManifest* outs[3] = {&result.train, &result.valid, &result.test};
  for (int s = 0; s < 3; ++s) outs[s]->vocabulary = manifest.vocabulary;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i)
    outs[assignment[i]]->entries.push_back(manifest.entries[i]);

  const char* split_names[3] = {"train", "valid", "test"};
  for (Eigen::Index l = 0; l < n_labels; ++l)
    for (int s = 0; s < 3; ++s) {
      const double off = std::abs(current(s, l) - target(s, l));
      if (off > 1.0 + 1e-9)
        result.imbalance_notes.push_back(
            "label '" + manifest.vocabulary[static_cast<std::size_t>(l)] +
            "' in " + split_names[s] + ": " +
            std::to_string(static_cast<long long>(current(s, l))) +
            " items vs target " + std::to_string(target(s, l)));
    }
  return result;
}

}  // namespace audioml::dataset
