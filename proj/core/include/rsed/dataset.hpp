#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rsed/corpus.hpp"
#include "rsed/features.hpp"

namespace rsed {

/// Feature tensors and spectrograms for every clip of one or more corpora,
/// computed once and shared read-only afterwards.
class FeatureStore {
 public:
  /// Extracts features for all clips (parallel over clips, `threads` as in parallel_for).
  void add(const Corpus& corpus, int threads = 0);
  const ClipFeatures& get(const std::string& clip_id) const;
  bool contains(const std::string& clip_id) const { return store_.contains(clip_id); }
  std::size_t size() const { return store_.size(); }

 private:
  std::map<std::string, std::shared_ptr<const ClipFeatures>> store_;
};

/// One training/evaluation example for a single-task detector.
struct Sample {
  std::string clip_id;
  const Matrix* features = nullptr;
  std::vector<double> target;  // rasterized ground truth, 469 values in {0, 1}
};

/// Samples for `task`, keeping only clips with at least one label of that kind.
std::vector<Sample> make_samples(const std::vector<const LabeledClip*>& clips, EventKind task,
                                 const FeatureStore& store);

}  // namespace rsed
