#include "metapi/dataset.hpp"

#include <cmath>

#include "metapi/errors.hpp"

namespace metapi {

MetaDataset::MetaDataset(std::vector<StudySummary> studies)
    : studies_(std::move(studies)) {
  if (studies_.size() < 2) {
    throw DatasetError("a meta-analysis dataset needs at least 2 studies");
  }
  for (std::size_t i = 0; i < studies_.size(); ++i) {
    const StudySummary& s = studies_[i];
    if (!std::isfinite(s.effect)) {
      throw DatasetError("study '" + s.id + "': effect is not finite");
    }
    if (!(s.within_variance > 0.0) || !std::isfinite(s.within_variance)) {
      throw DatasetError("study '" + s.id + "': within-study variance must be positive and finite");
    }
  }
}

std::vector<double> MetaDataset::effects() const {
  std::vector<double> out;
  out.reserve(studies_.size());
  for (const auto& s : studies_) out.push_back(s.effect);
  return out;
}

std::vector<double> MetaDataset::variances() const {
  std::vector<double> out;
  out.reserve(studies_.size());
  for (const auto& s : studies_) out.push_back(s.within_variance);
  return out;
}

}  // namespace metapi
