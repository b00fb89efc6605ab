#ifndef METAPI_DATASET_HPP
#define METAPI_DATASET_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace metapi {

/// One study: observed effect and its within-study variance (treated as known).
struct StudySummary {
  std::string id;
  double effect = 0.0;
  double within_variance = 1.0;
};

/// An ordered collection of at least two studies with valid summaries.
class MetaDataset {
 public:
  explicit MetaDataset(std::vector<StudySummary> studies);

  std::size_t size() const noexcept { return studies_.size(); }
  int k() const noexcept { return static_cast<int>(studies_.size()); }
  const std::vector<StudySummary>& studies() const noexcept { return studies_; }
  const StudySummary& operator[](std::size_t i) const { return studies_[i]; }

  std::vector<double> effects() const;
  std::vector<double> variances() const;

 private:
  std::vector<StudySummary> studies_;
};

}  // namespace metapi

#endif  // METAPI_DATASET_HPP
