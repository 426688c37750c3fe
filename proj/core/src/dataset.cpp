#include "rsed/dataset.hpp"

#include "rsed/eval.hpp"
#include "rsed/parallel.hpp"

namespace rsed {

void FeatureStore::add(const Corpus& corpus, int threads) {
  std::vector<std::shared_ptr<const ClipFeatures>> out(corpus.clips.size());
  parallel_for(corpus.clips.size(), threads, [&](std::size_t i) {
    out[i] = std::make_shared<const ClipFeatures>(extract_features(corpus.clips[i].clip));
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto [it, inserted] = store_.emplace(corpus.clips[i].clip.id, std::move(out[i]));
    if (!inserted) throw DataError("duplicate clip id in feature store: " + it->first);
  }
}

const ClipFeatures& FeatureStore::get(const std::string& clip_id) const {
  const auto it = store_.find(clip_id);
  if (it == store_.end()) throw DataError("no features for clip " + clip_id);
  return *it->second;
}

std::vector<Sample> make_samples(const std::vector<const LabeledClip*>& clips, EventKind task,
                                 const FeatureStore& store) {
  std::vector<Sample> out;
  for (const LabeledClip* lc : clips) {
    if (!has_label(*lc, task)) continue;
    Sample s;
    s.clip_id = lc->clip.id;
    s.features = &store.get(lc->clip.id).features.x;
    const auto truth = rasterize_truth(lc->labels, task);
    s.target.assign(truth.begin(), truth.end());
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace rsed
