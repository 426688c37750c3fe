#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsed/types.hpp"

namespace rsed {

/// A whole mono recording at 4 kHz before truncation.
struct Recording {
  std::vector<int16_t> samples;
  int sample_rate = kSampleRate;
  std::string participant_id;
  Domain domain = Domain::lung;
  std::string source;  // recording name, used to derive clip ids
};

/// Exactly 15 s (60000 samples) cut from a recording.
struct Clip {
  std::string id;
  std::vector<int16_t> samples;
  std::string participant_id;
  Domain domain = Domain::lung;
  int clip_index = 0;
};

struct LabelEvent {
  EventKind kind = EventKind::I;
  double start_s = 0.0;
  double end_s = 0.0;

  friend bool operator==(const LabelEvent&, const LabelEvent&) = default;
};

struct LabeledClip {
  Clip clip;
  std::vector<LabelEvent> labels;
};

struct Corpus {
  std::string name;
  std::vector<LabeledClip> clips;

  const LabeledClip& at(const std::string& clip_id) const;
};

struct ClipRef {
  std::string clip_id;
  std::string participant_id;

  friend bool operator==(const ClipRef&, const ClipRef&) = default;
};

/// Participant-disjoint train/test partition.
struct SplitSpec {
  std::vector<ClipRef> train;
  std::vector<ClipRef> test;

  double achieved_test_fraction() const;
};

/// One (training, validation) pair of a repeated k-fold scheme.
struct FoldPair {
  int repeat = 0;
  int fold = 0;
  std::vector<ClipRef> train;
  std::vector<ClipRef> validation;
};

/// Reads a mono 16-bit 4 kHz WAV. Throws DataError mentioning "channel count",
/// "sample rate" or "bit depth" when the file violates the format contract.
Recording load_recording(const std::filesystem::path& path, std::string participant_id,
                         Domain domain);

/// Non-overlapping 15-s clips; a trailing remainder shorter than 15 s is dropped.
std::vector<Clip> truncate_to_clips(const Recording& rec);

/// Label text: one `<kind> <start_s> <end_s>` per line. Blank lines and lines
/// starting with '#' are skipped. Result is sorted by start time.
std::vector<LabelEvent> parse_labels(std::istream& in);
std::vector<LabelEvent> parse_labels(const std::filesystem::path& path);
void serialize_labels(std::ostream& os, const std::vector<LabelEvent>& events);

/// Greedy whole-participant packing: participants are shuffled under `seed`
/// and moved to the test side until it holds at least test_fraction of clips.
SplitSpec split_by_participant(const Corpus& corpus, double test_fraction, uint64_t seed);

/// `repeats` independent shufflings of the train participants, each dealt
/// round-robin into k folds. Returns k * repeats pairs, repeat-major.
std::vector<FoldPair> make_folds(const SplitSpec& split, int k, int repeats, uint64_t seed);

/// Plain-text manifest with `[train]`, `[test]` and per-fold section headers.
void write_split_manifest(std::ostream& os, const SplitSpec& split,
                          const std::vector<FoldPair>& folds);

/// Clips of `corpus` named by `refs`, in the order given.
std::vector<const LabeledClip*> select_clips(const Corpus& corpus,
                                             const std::vector<ClipRef>& refs);

/// True if the clip carries at least one label of `kind`.
bool has_label(const LabeledClip& clip, EventKind kind);

/// On-disk corpus bundle: `corpus.tsv` index plus one WAV and one label file
/// per clip.
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus(const std::filesystem::path& dir);

/// Every `*.wav` in `dir`, in name order, truncated into clips. Participant ids
/// come from `participants.tsv` (`<stem>\t<participant>` per line) when present,
/// else from the file stem up to its first '_'. Clip i of `<stem>.wav` takes
/// its labels from `<stem>_<i>.txt`, or from `<stem>.txt` when the recording
/// yields exactly one clip. A missing label file is a DataError.
Corpus ingest_directory(const std::filesystem::path& dir, std::string name, Domain domain);

}  // namespace rsed
