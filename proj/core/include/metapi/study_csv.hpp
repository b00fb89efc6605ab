#ifndef METAPI_STUDY_CSV_HPP
#define METAPI_STUDY_CSV_HPP

#include <iosfwd>
#include <string>

#include "metapi/dataset.hpp"

namespace metapi {

/// Reads a study table. Expected UTF-8 CSV with header
/// `study_id,effect,se` or `study_id,effect,var`; one row per study, decimal
/// point '.', row order preserved. Errors name the offending row.
MetaDataset parse_studies(std::istream& in);
MetaDataset parse_studies_file(const std::string& path);

/// Writes the dataset back out as `study_id,effect,var` with round-trip-exact
/// numeric fields.
void write_studies(const MetaDataset& d, std::ostream& out);

}  // namespace metapi

#endif  // METAPI_STUDY_CSV_HPP
