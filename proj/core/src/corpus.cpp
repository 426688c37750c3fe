#include "rsed/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "rsed/wav.hpp"

namespace rsed {
namespace {

double parse_seconds(std::string_view tok, int line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw DataError("line " + std::to_string(line_no) + ": bad time value '" +
                    std::string(tok) + "'");
  }
  return v;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::string> ordered_participants(const std::vector<ClipRef>& refs) {
  std::set<std::string> ids;
  for (const auto& r : refs) ids.insert(r.participant_id);
  return {ids.begin(), ids.end()};
}

}  // namespace

const LabeledClip& Corpus::at(const std::string& clip_id) const {
  for (const auto& c : clips) {
    if (c.clip.id == clip_id) return c;
  }
  throw DataError("clip not in corpus: " + clip_id);
}

double SplitSpec::achieved_test_fraction() const {
  const auto total = train.size() + test.size();
  return total == 0 ? 0.0 : static_cast<double>(test.size()) / static_cast<double>(total);
}

Recording load_recording(const std::filesystem::path& path, std::string participant_id,
                         Domain domain) {
  WavData wav = read_wav(path);
  if (wav.channels != 1) {
    throw DataError("channel count " + std::to_string(wav.channels) + " != 1: " + path.string());
  }
  if (wav.sample_rate != kSampleRate) {
    throw DataError("sample rate " + std::to_string(wav.sample_rate) + " != 4000: " +
                    path.string());
  }
  if (wav.bits_per_sample != 16) {
    throw DataError("bit depth " + std::to_string(wav.bits_per_sample) + " != 16: " +
                    path.string());
  }
  if (wav.samples.empty()) throw DataError("empty recording: " + path.string());
  Recording rec;
  rec.samples = std::move(wav.samples);
  rec.sample_rate = wav.sample_rate;
  rec.participant_id = std::move(participant_id);
  rec.domain = domain;
  rec.source = path.stem().string();
  return rec;
}

std::vector<Clip> truncate_to_clips(const Recording& rec) {
  std::vector<Clip> clips;
  const std::size_t n = rec.samples.size() / kClipSamples;
  clips.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Clip c;
    c.id = rec.source + "#" + std::to_string(i);
    const auto first = rec.samples.begin() + static_cast<std::ptrdiff_t>(i * kClipSamples);
    c.samples.assign(first, first + static_cast<std::ptrdiff_t>(kClipSamples));
    c.participant_id = rec.participant_id;
    c.domain = rec.domain;
    c.clip_index = static_cast<int>(i);
    clips.push_back(std::move(c));
  }
  return clips;
}

std::vector<LabelEvent> parse_labels(std::istream& in) {
  std::vector<LabelEvent> events;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string kind, start, end, extra;
    if (!(ls >> kind) || kind.front() == '#') continue;
    if (!(ls >> start >> end) || (ls >> extra)) {
      throw DataError("line " + std::to_string(line_no) + ": expected '<kind> <start_s> <end_s>'");
    }
    LabelEvent ev;
    ev.kind = parse_kind(kind);
    ev.start_s = parse_seconds(start, line_no);
    ev.end_s = parse_seconds(end, line_no);
    if (ev.start_s >= ev.end_s) {
      throw DataError("line " + std::to_string(line_no) + ": start >= end");
    }
    if (ev.start_s < 0.0 || ev.end_s > kClipSeconds) {
      throw DataError("line " + std::to_string(line_no) + ": time outside [0, 15] s");
    }
    events.push_back(ev);
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const LabelEvent& a, const LabelEvent& b) { return a.start_s < b.start_s; });
  return events;
}

std::vector<LabelEvent> parse_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file: " + path.string());
  return parse_labels(in);
}

void serialize_labels(std::ostream& os, const std::vector<LabelEvent>& events) {
  for (const auto& ev : events) {
    os << to_char(ev.kind) << ' ' << shortest(ev.start_s) << ' ' << shortest(ev.end_s) << '\n';
  }
}

SplitSpec split_by_participant(const Corpus& corpus, double test_fraction, uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw PreconditionError("test_fraction must lie in (0, 1)");
  }
  std::map<std::string, std::vector<ClipRef>> by_participant;
  for (const auto& c : corpus.clips) {
    by_participant[c.clip.participant_id].push_back({c.clip.id, c.clip.participant_id});
  }
  if (by_participant.size() < 2) {
    throw PreconditionError("corpus needs at least 2 participants for a disjoint split");
  }
  std::vector<std::string> order;
  for (const auto& [pid, _] : by_participant) order.push_back(pid);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const double target = test_fraction * static_cast<double>(corpus.clips.size());
  std::set<std::string> test_ids;
  std::size_t test_count = 0;
  for (std::size_t i = 0; i + 1 < order.size() && static_cast<double>(test_count) < target; ++i) {
    test_ids.insert(order[i]);
    test_count += by_participant[order[i]].size();
  }

  SplitSpec split;
  for (const auto& c : corpus.clips) {
    ClipRef ref{c.clip.id, c.clip.participant_id};
    (test_ids.contains(ref.participant_id) ? split.test : split.train).push_back(std::move(ref));
  }
  return split;
}

std::vector<FoldPair> make_folds(const SplitSpec& split, int k, int repeats, uint64_t seed) {
  if (k < 2) throw PreconditionError("k must be >= 2");
  if (repeats < 1) throw PreconditionError("repeats must be >= 1");
  const auto participants = ordered_participants(split.train);
  if (participants.size() < static_cast<std::size_t>(k)) {
    throw PreconditionError("fewer train participants (" + std::to_string(participants.size()) +
                            ") than folds (" + std::to_string(k) + ")");
  }
  std::mt19937_64 rng(seed);
  std::vector<FoldPair> out;
  out.reserve(static_cast<std::size_t>(k * repeats));
  for (int r = 0; r < repeats; ++r) {
    auto order = participants;
    std::shuffle(order.begin(), order.end(), rng);
    std::unordered_map<std::string, int> fold_of;
    for (std::size_t i = 0; i < order.size(); ++i) {
      fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    for (int f = 0; f < k; ++f) {
      FoldPair fp;
      fp.repeat = r;
      fp.fold = f;
      for (const auto& ref : split.train) {
        (fold_of[ref.participant_id] == f ? fp.validation : fp.train).push_back(ref);
      }
      out.push_back(std::move(fp));
    }
  }
  return out;
}

void write_split_manifest(std::ostream& os, const SplitSpec& split,
                          const std::vector<FoldPair>& folds) {
  const auto section = [&os](const std::string& header, const std::vector<ClipRef>& refs) {
    os << '[' << header << "]\n";
    for (const auto& r : refs) os << r.clip_id << '\n';
  };
  section("train", split.train);
  section("test", split.test);
  for (const auto& fp : folds) {
    section("repeat " + std::to_string(fp.repeat) + " fold " + std::to_string(fp.fold) +
                " validation",
            fp.validation);
  }
}

std::vector<const LabeledClip*> select_clips(const Corpus& corpus,
                                             const std::vector<ClipRef>& refs) {
  std::unordered_map<std::string, const LabeledClip*> index;
  for (const auto& c : corpus.clips) index.emplace(c.clip.id, &c);
  std::vector<const LabeledClip*> out;
  out.reserve(refs.size());
  for (const auto& r : refs) {
    const auto it = index.find(r.clip_id);
    if (it == index.end()) throw DataError("clip not in corpus: " + r.clip_id);
    out.push_back(it->second);
  }
  return out;
}

bool has_label(const LabeledClip& clip, EventKind kind) {
  return std::any_of(clip.labels.begin(), clip.labels.end(),
                     [kind](const LabelEvent& e) { return e.kind == kind; });
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream index(dir / "corpus.tsv");
  if (!index) throw DataError("cannot write corpus index in " + dir.string());
  index << "#name\t" << corpus.name << '\n';
  index << "clip_id\tparticipant\tdomain\tclip_index\twav\tlabels\n";
  for (std::size_t i = 0; i < corpus.clips.size(); ++i) {
    const auto& lc = corpus.clips[i];
    char stem[32];
    std::snprintf(stem, sizeof(stem), "clip_%05zu", i);
    const std::string wav = std::string(stem) + ".wav";
    const std::string lab = std::string(stem) + ".txt";
    write_wav(dir / wav, lc.clip.samples, kSampleRate);
    std::ofstream lf(dir / lab);
    serialize_labels(lf, lc.labels);
    index << lc.clip.id << '\t' << lc.clip.participant_id << '\t' << to_string(lc.clip.domain)
          << '\t' << lc.clip.clip_index << '\t' << wav << '\t' << lab << '\n';
  }
}

Corpus load_corpus(const std::filesystem::path& dir) {
  std::ifstream index(dir / "corpus.tsv");
  if (!index) throw DataError("no corpus.tsv in " + dir.string());
  Corpus corpus;
  std::string line;
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    if (line.rfind("#name\t", 0) == 0) {
      corpus.name = line.substr(6);
      continue;
    }
    if (line.rfind("clip_id\t", 0) == 0) continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    for (std::string col; std::getline(ls, col, '\t');) cols.push_back(col);
    if (cols.size() != 6) throw DataError("bad corpus.tsv row: " + line);
    const Domain domain = parse_domain(cols[2]);
    Recording rec = load_recording(dir / cols[4], cols[1], domain);
    if (rec.samples.size() != kClipSamples) {
      throw DataError("bundle clip is not 60000 samples: " + cols[4]);
    }
    LabeledClip lc;
    lc.clip.id = cols[0];
    lc.clip.samples = std::move(rec.samples);
    lc.clip.participant_id = cols[1];
    lc.clip.domain = domain;
    lc.clip.clip_index = std::stoi(cols[3]);
    lc.labels = parse_labels(dir / cols[5]);
    corpus.clips.push_back(std::move(lc));
  }
  return corpus;
}

Corpus ingest_directory(const std::filesystem::path& dir, std::string name, Domain domain) {
  if (!std::filesystem::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::map<std::string, std::string> participant_of;
  if (const auto map_path = dir / "participants.tsv"; std::filesystem::exists(map_path)) {
    std::ifstream in(map_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
        throw DataError("participants.tsv line " + std::to_string(line_no) + ": expected <stem>\\t<participant>");
      }
      participant_of[line.substr(0, tab)] = line.substr(tab + 1);
    }
  }

  std::vector<std::filesystem::path> wavs;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") wavs.push_back(entry.path());
  }
  std::sort(wavs.begin(), wavs.end());
  if (wavs.empty()) throw DataError("no .wav files in " + dir.string());

  Corpus corpus;
  corpus.name = std::move(name);
  for (const auto& wav : wavs) {
    const std::string stem = wav.stem().string();
    std::string pid;
    if (const auto it = participant_of.find(stem); it != participant_of.end()) {
      pid = it->second;
    } else if (!participant_of.empty()) {
      throw DataError("participants.tsv has no entry for " + stem);
    } else {
      pid = stem.substr(0, stem.find('_'));
    }
    const Recording rec = load_recording(wav, pid, domain);
    std::vector<Clip> clips = truncate_to_clips(rec);
    for (std::size_t i = 0; i < clips.size(); ++i) {
      auto label_path = dir / (stem + "_" + std::to_string(i) + ".txt");
      if (!std::filesystem::exists(label_path) && clips.size() == 1) label_path = dir / (stem + ".txt");
      if (!std::filesystem::exists(label_path)) {
        throw DataError("no label file for clip " + std::to_string(i) + " of " + wav.filename().string());
      }
      corpus.clips.push_back({std::move(clips[i]), parse_labels(label_path)});
    }
  }
  return corpus;
}

}  // namespace rsed
